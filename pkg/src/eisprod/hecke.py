"""Hecke operators on expansions: Delta_M, slash components, twists.

For m = [[a, b], [0, d]] in Delta_M the component of f under m is

    (f |_k m)(tau) = d^-k f((a tau + b)/d),

i.e. the weight-k slash with the determinant factor left out.  The
classical operator is T_M f = M^(k-1) sum_{m in Delta_M} f |_k m, which gives
eigenvalue 1 + p^(k-1) on the level-1 Eisenstein series.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .eisenstein import EisensteinSymbol, eisenstein_family
from .errors import TwistRequiresIntegralExpansion
from .exactmath import CyclotomicNumber, divisors, lcm
from .modgroup import DirichletCharacter, GammaN, IndexVector, enumerate_indices
from .qseries import QExpansion, series_substitute
from .span import SeriesSpan

__all__ = [
    "HeckeTriple", "delta_m", "hecke_image", "classical_hecke", "hecke_stability_check",
    "hecke_component_identity", "twist", "oldform",
]


@dataclass(frozen=True, order=True)
class HeckeTriple:
    a: int
    b: int
    d: int

    def __post_init__(self):
        if self.a <= 0 or self.d <= 0 or not 0 <= self.b < self.d:
            raise ValueError(f"invalid Hecke triple {(self.a, self.b, self.d)}")

    @property
    def determinant(self) -> int:
        return self.a * self.d

    def matrix(self):
        return [[self.a, self.b], [0, self.d]]

    def adjugate(self):
        return [[self.d, -self.b], [0, self.a]]

    def __repr__(self):
        return f"[[{self.a},{self.b}],[0,{self.d}]]"


def delta_m(M: int) -> list[HeckeTriple]:
    if M < 1:
        raise ValueError("M must be positive")
    out = []
    for d in divisors(M):
        a = M // d
        for b in range(d):
            out.append(HeckeTriple(a, b, d))
    return sorted(out, key=lambda t: (t.a, t.b, t.d))


def hecke_image(f: QExpansion, k: int, M: int) -> dict[HeckeTriple, QExpansion]:
    """{m: d^-k f((a tau + b)/d)} for m in Delta_M."""
    if k < 1:
        raise ValueError("weight must be positive")
    out = {}
    for t in delta_m(M):
        g = series_substitute(f, t.matrix())
        out[t] = g.scale(Fraction(1, t.d ** k)) if t.d > 1 else g
    return out


def oldform(f: QExpansion, M: int) -> QExpansion:
    """f(M tau): the [[M, 0], [0, 1]] component."""
    return series_substitute(f, [[M, 0], [0, 1]])


def classical_hecke(f: QExpansion, k: int, M: int) -> QExpansion:
    """M^(k-1) sum_{m in Delta_M} f |_k m, written at the smallest width."""
    comps = list(hecke_image(f, k, M).values())
    w = lcm(*(c.width for c in comps))
    n = lcm(*(c.conductor for c in comps))
    total = None
    for c in comps:
        c = c.lift_width(w).lift_conductor(n)
        total = c if total is None else total + c
    return total.scale(M ** (k - 1)).normalized()


def hecke_component_identity(k: int, N: int, v: IndexVector, t: HeckeTriple) -> dict[IndexVector, Fraction]:
    """Explicit decomposition G_{k,N,v} |_k m = M^-k sum G_{k,MN,u}.

    The lattice points (a c, b c + d e) with (c, e) = v mod N fill exactly
    the classes u = (c2, d2) mod MN with c2 = a c' mod aN and
    d2 = b (c2/a) + d e' mod dN.
    """
    a, b, d = t.a, t.b, t.d
    M = a * d
    L = M * N
    coeff = Fraction(1, M ** k)
    out = {}
    for c2 in range(L):
        if (c2 - a * v.c) % (a * N):
            continue
        cq = c2 // a
        base = (b * cq + d * v.d) % (d * N)
        for d2 in range(base, L, d * N):
            u = IndexVector(L, c2, d2)
            out[u] = out.get(u, 0) + coeff
    return out


@dataclass
class StabilityReport:
    weight: int
    level: int
    M: int
    rows_checked: int
    sturm_units: int
    results: dict = field(default_factory=dict)   # (v, triple) -> coefficients or None
    residuals: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r is not None for r in self.results.values())


def sturm_units_gamma(k: int, L: int) -> int:
    """ceil(k/12 [SL2(Z):Gamma(L)]) + 1 coefficients in q^(1/L)."""
    return math.ceil(Fraction(k, 12) * GammaN(L).index()) + 1


def hecke_stability_check(k: int, N: int, M: int, prec: int | None = None, cache=None) -> StabilityReport:
    """Check exactly that every component of T_M on the level-N family lies in the level-MN span.

    In weight 2 the statement is about holomorphic combinations, so the
    differences G_v - G_v0 are transported instead of single members.
    """
    L = M * N
    R = sturm_units_gamma(k, L)
    if prec is not None:
        R = max(R, prec)
    big = eisenstein_family(k, L, R, cache=cache)
    basis = [e for _, e in big.holomorphic_basis()]
    rows = list(range(R))
    report = StabilityReport(k, N, M, R, sturm_units_gamma(k, L))
    # level-N family long enough that every component is exact below R/L
    small = eisenstein_family(k, N, R, cache=cache)
    if not basis:
        # empty span: components must vanish
        span = None
    else:
        span = SeriesSpan(basis, rows, L)
    members = []
    if k == 2:
        v0 = small.indices[0]
        for _, exp in small.holomorphic_basis():
            members.append(exp)
        keys = [u for u in _diff_keys(small)]
    else:
        keys = list(small.indices)
        members = [small[v] for v in keys]
    for key, f in zip(keys, members):
        for t, comp in hecke_image(f, k, M).items():
            comp = comp.lift_width(L).lift_conductor(L).truncate(R)
            if comp.is_zero():
                report.results[(key, t)] = {}
                continue
            if span is None:
                report.results[(key, t)] = None
                report.residuals[(key, t)] = comp
                continue
            got = span.express(comp)
            report.results[(key, t)] = got
            if got is None:
                report.residuals[(key, t)] = comp
    return report


def _diff_keys(fam):
    out = []
    for coeffs, _ in fam.holomorphic_basis():
        v = next(u for u, c in coeffs.items() if c == 1)
        out.append(v)
    return out


def twist(f: QExpansion, chi: DirichletCharacter) -> QExpansion:
    """a_n -> chi(n) a_n."""
    if f.width != 1:
        g = f.normalized()
        if g.width != 1:
            raise TwistRequiresIntegralExpansion("twisting needs an expansion in integral powers of q")
        f = g
    e = chi.value_conductor
    n = lcm(f.conductor, e)
    f = f.lift_conductor(n)
    out = {}
    for m, c in f.coeffs.items():
        x = chi.value_exponent(m)
        if x is None:
            continue
        out[m] = c * CyclotomicNumber.zeta(e, x)
    return QExpansion(1, n, out, f.truncation)
