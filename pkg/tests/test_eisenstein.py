import math
from fractions import Fraction

import pytest

from eisprod.cache import FamilyCache
from eisprod.eisenstein import (
    EisensteinSymbol, eisenstein_expansion, eisenstein_family, lattice_sum_numeric, modularity_check,
    required_truncation, slash_index, weight2_conditions,
)
from eisprod.errors import InconclusivePrecision, NotWeightTwo, OracleNotConvergent, UnsupportedWeight
from eisprod.exactmath import CyclotomicNumber
from eisprod.modgroup import I, S, T, IndexVector, enumerate_indices
from eisprod.qseries import QExpansion, series_eval, series_substitute
from eisprod.solver import span_rank
from eisprod.span import SeriesSpan
from eisprod.checks import bump_first_coefficient


def sigma(k, n):
    return sum(d ** k for d in range(1, n + 1) if n % d == 0)


def test_e4_level_one():
    f = eisenstein_expansion(EisensteinSymbol.make(4, 1, 0, 0), 12)
    c0 = f[0].to_fraction()
    assert c0 == Fraction(1, 120)
    for m in range(1, 12):
        assert f[m] == c0 * 240 * sigma(3, m)


def test_e4_against_lattice_square_box():
    sym = EisensteinSymbol.make(4, 1, 0, 0)
    f = eisenstein_expansion(sym, 20)
    val, tail = lattice_sum_numeric(sym, 1j, cutoff=2000, method="square")
    assert tail < 1e-8
    assert abs(val - series_eval(f, 1j)[0]) < 1e-8


def test_e4_at_2i():
    sym = EisensteinSymbol.make(4, 1, 0, 0)
    val, tail = lattice_sum_numeric(sym, 2j, cutoff=60, method="rows")
    assert abs(val - series_eval(eisenstein_expansion(sym, 10), 2j)[0]) < 1e-8


def test_weight_two_level_one():
    fam = eisenstein_family(2, 1, 8)
    f = fam[(0, 0)]
    c0 = f[0].to_fraction()
    assert c0 == Fraction(-1, 12)
    assert [f[m] / c0 for m in range(1, 5)] == [-24 * sigma(1, m) for m in range(1, 5)]
    assert fam.nonholomorphic and fam.residue_marker == 1
    assert fam.holomorphic_basis() == []


def test_parity_example():
    fam = eisenstein_family(3, 3, 9)
    assert fam[(0, 2)] == -fam[(0, 1)]


def test_slash_index_examples():
    s = EisensteinSymbol.make(4, 2, 0, 1)
    assert slash_index(s, I) == s
    assert slash_index(s, S).index == IndexVector(2, 1, 0)
    assert slash_index(EisensteinSymbol.make(4, 3, 1, 1), T).index == IndexVector(3, 1, 2)


def test_unsupported_weight():
    with pytest.raises(UnsupportedWeight):
        eisenstein_expansion(EisensteinSymbol.make(0, 1, 0, 0), 3)


def test_family_sizes_and_rank():
    assert len(eisenstein_family(4, 1, 3)) == 1
    fam = eisenstein_family(4, 2, 20)
    assert len(fam) == 4
    cols = [fam[v] for v in fam.indices]
    assert SeriesSpan(cols, range(20)).rank() == 3


def test_weight2_conditions():
    fam2 = eisenstein_family(2, 2, 20)
    conds = weight2_conditions(fam2)
    assert len(conds) == 1 and set(conds[0]) == set(fam2.indices)
    # kernel of the functional on coefficient vectors: 4 - 1 = 3
    assert len(fam2.holomorphic_basis()) == 3
    # as series the span is M_2(Gamma(2)), of dimension (cusps - 1) = 2, because the
    # level-raising relation among the four members already has coefficient sum 0
    assert SeriesSpan([e for _, e in fam2.holomorphic_basis()], range(20)).rank() == 2
    assert fam2.holomorphic_basis() and eisenstein_family(2, 1, 4).holomorphic_basis() == []
    with pytest.raises(NotWeightTwo):
        weight2_conditions(eisenstein_family(4, 2, 4))


def test_classical_weight_two_form_in_span():
    # 2 E2(2 tau) - E2(tau) = 1 + 24 sum sigma_1^odd(n) q^n, written at width 2
    coeffs = {0: 1}
    for n in range(1, 10):
        coeffs[2 * n] = 24 * sum(d for d in range(1, n + 1) if n % d == 0 and d % 2)
    target = QExpansion(2, 1, coeffs, 20)
    fam = eisenstein_family(2, 2, 20)
    basis = fam.holomorphic_basis()
    span = SeriesSpan([e for _, e in basis], range(20))
    sol = span.express(target)
    assert sol is not None
    # the combination expressed in the G_v satisfies the holomorphy functional
    lam = {}
    for j, x in sol.items():
        for v, a in basis[j][0].items():
            lam[v] = lam.get(v, 0) + x * a
    assert sum(lam.values(), CyclotomicNumber.from_rational(0)) == 0


def test_lattice_errors_and_symmetry():
    with pytest.raises(OracleNotConvergent):
        lattice_sum_numeric(EisensteinSymbol.make(2, 3, 0, 1), 1j)
    for k in (3, 4):
        a, _ = lattice_sum_numeric(EisensteinSymbol.make(k, 5, 2, 1), 0.3 + 1.1j, 40, method="rows")
        b, _ = lattice_sum_numeric(EisensteinSymbol.make(k, 5, 3, 4), 0.3 + 1.1j, 40, method="rows")
        assert abs(b - (-1) ** k * a) < 1e-10


def test_weight3_level3_against_lattice():
    sym = EisensteinSymbol.make(3, 3, 0, 1)
    f = eisenstein_expansion(sym, 80)
    val, tail = lattice_sum_numeric(sym, 1j, 40, method="rows")
    assert abs(val - series_eval(f, 1j)[0]) < 1e-8


def test_modularity_examples():
    fam = eisenstein_family(4, 2, required_truncation(4, 2, 0.2 + 0.9j))
    assert modularity_check(fam, S, 0.2 + 0.9j, 1e-8).all_passed
    bad = {v: (bump_first_coefficient(e) if v == IndexVector(2, 0, 1) else e) for v, e in fam.expansions.items()}
    rep = modularity_check(fam, S, 0.2 + 0.9j, 1e-8, expansions=bad)
    assert not rep.all_passed
    assert IndexVector(2, 0, 1) in rep.failures() or IndexVector(2, 1, 0) in rep.failures()


def test_modularity_inconclusive():
    fam = eisenstein_family(4, 2, 3)
    with pytest.raises(InconclusivePrecision):
        modularity_check(fam, S, 0.2 + 0.9j, 1e-8)


@pytest.mark.parametrize("k", range(1, 7))
@pytest.mark.parametrize("N", range(1, 7))
def test_parity(k, N):
    assert eisenstein_family(k, N, 2 * N + 2).check_parity()


@pytest.mark.parametrize("k", range(1, 5))
@pytest.mark.parametrize("N", range(1, 7))
def test_t_equivariance(k, N):
    fam = eisenstein_family(k, N, 3 * N)
    for v in fam.indices:
        lhs = series_substitute(fam[v], [[1, 1], [0, 1]])
        rhs = fam[index_act_T(v)].lift_conductor(lhs.conductor)
        assert lhs.agrees_with(rhs)


def index_act_T(v):
    return IndexVector(v.level, v.c, v.c + v.d)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_s_equivariance(k, N):
    tau = 0.2 + 0.9j
    fam = eisenstein_family(k, N, required_truncation(k, N, tau))
    assert modularity_check(fam, S, tau, 1e-8).all_passed


@pytest.mark.parametrize("N", [3, 4, 5])
def test_weight_one_nonzero(N):
    assert span_rank((1, N)) >= 1


def test_weight_one_level_two_vanishes():
    assert span_rank((1, 2)) == 0


def test_weight_one_constant_terms():
    # c = 0 row: sum_j zeta^(-j d) B_1(j/N); c != 0: 1/2 - c/N
    fam = eisenstein_family(1, 3, 4)
    assert fam[(1, 0)][0] == Fraction(1, 2) - Fraction(1, 3)
    assert fam[(0, 0)][0].is_zero()


def test_cache_round_trip(tmp_path):
    cache = FamilyCache(tmp_path)
    fam = eisenstein_family(3, 3, 9, cache=cache)
    assert cache.path(3, 3, 9).exists()
    back = cache.load(3, 3, 9)
    assert back.expansions == fam.expansions
    smaller = cache.load(3, 3, 5)
    assert smaller.truncation == 5 and smaller[(0, 1)] == fam[(0, 1)].truncate(5)
    assert cache.load(3, 3, 12) is None
