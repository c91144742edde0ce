import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from eisprod.errors import InvalidSubstitutionMatrix
from eisprod.exactmath import CyclotomicNumber, zeta
from eisprod.qseries import QExpansion, eta_quotient, series_eval, series_mul, series_substitute


def naive_eta_product(factors, n_terms):
    """Coefficients of prod (1 - q^(delta j))^r as plain integers, by repeated multiplication."""
    p = [1] + [0] * (n_terms - 1)
    for delta, r in factors:
        for j in range(1, n_terms):
            step = delta * j
            if step >= n_terms:
                break
            for _ in range(r):
                p = [p[i] - (p[i - step] if i >= step else 0) for i in range(n_terms)]
    return p


def sigma(k, n):
    return sum(d ** k for d in range(1, n + 1) if n % d == 0)


def test_product_truncation():
    f = QExpansion(1, 1, [1, 1], 3)
    g = QExpansion(1, 1, [1, -1], 3)
    h = f * g
    assert h == QExpansion(1, 1, [1, 0, -1], 3)
    assert h.truncation == 3


def test_min_truncation_rule():
    f = QExpansion(1, 1, [1, 2, 3], 5)
    g = QExpansion(1, 1, [1, 1], 3)
    assert (f * g).truncation == 3
    assert (f + g).truncation == 3


def test_conjugate_single_coefficient():
    f = QExpansion(1, 5, {0: zeta(5)}, 2)
    assert f.conjugate()[0] == zeta(5, 4)


def test_substitute_examples():
    f = QExpansion(1, 1, [1, 2, 3, 4], 4)
    g = series_substitute(f, [[2, 0], [0, 1]])
    assert g.width == 1 and g.truncation == 8
    assert g[2] == 2 and g[6] == 4 and g[1] == 0
    h = series_substitute(f, [[1, 1], [0, 2]])
    assert h.width == 2
    for m in range(4):
        assert h[m] == (m + 1) * zeta(2, m)


def test_oldform_of_e4():
    e4 = QExpansion(1, 1, [1] + [240 * sigma(3, m) for m in range(1, 12)], 12)
    g = series_substitute(e4, [[2, 0], [0, 1]])
    for m in range(1, 12):
        assert g[2 * m] == 240 * sigma(3, m)
        assert g[2 * m - 1] == 0


def test_substitute_rejects():
    f = QExpansion(1, 1, [1], 1)
    for bad in ([[1, 0], [1, 1]], [[0, 1], [0, 1]], [[1, 0], [0, -1]], [[1, 2]]):
        with pytest.raises(InvalidSubstitutionMatrix):
            series_substitute(f, bad)


def test_eval_examples():
    assert series_eval(QExpansion.zero(1, 1, 4), 0.3 + 1j)[0] == 0
    c = CyclotomicNumber.from_rational(Fraction(5, 7))
    assert abs(series_eval(QExpansion(1, 1, [c], 3), 1j)[0] - 5 / 7) < 1e-15
    v, _ = series_eval(QExpansion(1, 1, [1, 240], 2), 1j)
    assert abs(v - (1 + 240 * math.exp(-2 * math.pi))) < 1e-12
    assert abs(v - 1.4481863) < 1e-6


def test_eta_quotients():
    assert eta_quotient([], 4) == QExpansion.constant(1, 4)
    delta = eta_quotient([(1, 24)], 30)
    ref = naive_eta_product([(1, 24)], 29)
    assert [delta[m].to_fraction() for m in range(1, 6)] == [1, -24, 252, -1472, 4830]
    assert all(delta[m + 1] == ref[m] for m in range(29))
    f = eta_quotient([(1, 2), (11, 2)], 30)
    ref = naive_eta_product([(1, 2), (11, 2)], 29)
    assert [f[m].to_fraction() for m in range(1, 6)] == [1, -2, -1, 2, 1]
    assert all(f[m + 1] == ref[m] for m in range(29))


def test_eta_fractional_width():
    f = eta_quotient([(1, 1)], 5)
    assert f.width == 24
    assert f.valuation() == Fraction(1, 24)


def test_json_round_trip():
    f = QExpansion(3, 12, {0: Fraction(1, 2), 4: zeta(12, 5), 7: zeta(4) + 3}, 9)
    assert QExpansion.from_json(f.to_json()) == f


def test_normalized_and_project():
    f = QExpansion(6, 1, {0: 1, 3: 2, 6: 5}, 12)
    g = f.normalized()
    assert g.width == 2 and g[1] == 2 and g[2] == 5
    p = f.project(1)
    assert p[3].is_zero() and p[6] == 5


def series(n=(1, 3, 4, 5), width=(1, 2)):
    @st.composite
    def strat(draw):
        cond = draw(st.sampled_from(n))
        w = draw(st.sampled_from(width))
        T = draw(st.integers(2, 8))
        phi = len(zeta(cond).coords)
        vals = {}
        for m in range(T):
            if draw(st.booleans()):
                cs = draw(st.lists(st.integers(-4, 4), min_size=phi, max_size=phi))
                vals[m] = CyclotomicNumber(cond, cs)
        return QExpansion(w, cond, vals, T)
    return strat()


@given(series(), series(), series())
def test_ring_laws(f, g, h):
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f * g == g * f


@given(series(width=(1,)), st.integers(1, 3), st.integers(0, 3), st.integers(1, 3), st.integers(1, 3),
       st.integers(0, 3), st.integers(1, 3))
def test_substitution_composes(f, a1, b1, d1, a2, b2, d2):
    b1, b2 = b1 % d1, b2 % d2
    # f(m1 (m2 tau)) = (f|m1)(m2 tau)
    m1 = [[a1, b1], [0, d1]]
    m2 = [[a2, b2], [0, d2]]
    prod = [[a1 * a2, a1 * b2 + b1 * d2], [0, d1 * d2]]
    lhs = series_substitute(series_substitute(f, m1), m2)
    rhs = series_substitute(f, prod)
    assert lhs.agrees_with(rhs)


@given(series(width=(1,)), series(width=(1,)))
def test_eval_multiplicative(f, g):
    tau = 1j
    a, ta = series_eval(f, tau)
    b, tb = series_eval(g, tau)
    c, tc = series_eval(f * g, tau)
    tail = tc + ta * (abs(b) + tb) + tb * abs(a) + 1e-12 * (1 + abs(a * b))
    # f*g is truncated at the common precision; its omitted terms are covered by tc
    assert abs(c - a * b) <= tail * 10 + 1e-9


@given(series(), series())
def test_conjugation(f, g):
    assert f.conjugate().conjugate() == f
    assert (f * g).conjugate() == f.conjugate() * g.conjugate()


def test_kronecker_matches_schoolbook():
    # independent route: coefficient-wise convolution through CyclotomicNumber arithmetic
    f = QExpansion(1, 7, {m: zeta(7, m) * (m - 3) + Fraction(m, 5) for m in range(12)}, 12)
    g = QExpansion(1, 7, {m: zeta(7, 2 * m) - m * m for m in range(12)}, 12)
    h = series_mul(f, g)
    for m in range(12):
        ref = sum((f[i] * g[m - i] for i in range(m + 1)), CyclotomicNumber.from_rational(0, 7))
        assert h[m] == ref
