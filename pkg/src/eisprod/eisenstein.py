"""Eisenstein series G_{k,N,v} of level N: expansions, index action, oracles.

Normalization.  With C = (-2 pi i)^k / (N^k (k-1)!) we work with
G^ = G / C.  Writing q_N = q^(1/N) and v = (c, d), the coefficient of q_N^m
(m >= 1) is

    sum_{r s = m} r^(k-1) ( [s = c] zeta_N^(r d) + (-1)^k [s = -c] zeta_N^(-r d) )

with congruences mod N.  The constant term comes from the c = 0 row of the
lattice sum.  In weight 2 the Hecke-regularized series picks up the
non-holomorphic term + 1/(4 pi Im tau), the same for every index; in weight
1 the regularization adds 1/2 - c/N for c != 0.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .errors import (
    InconclusivePrecision,
    NotWeightTwo,
    OracleNotConvergent,
    UnsupportedWeight,
)
from .exactmath import CyclotomicNumber, bernoulli_polynomial, euler_phi, group_ring_to_coords
from .modgroup import GroupElement, IndexVector, S, enumerate_indices, index_act
from .qseries import QExpansion, series_eval

__all__ = [
    "EisensteinSymbol", "EisensteinFamily", "eisenstein_expansion", "eisenstein_family",
    "slash_index", "weight2_conditions", "lattice_sum_numeric", "modularity_check",
    "normalization_constant", "ORACLE_POINTS",
]

ORACLE_POINTS = (1j, 0.2 + 0.9j, 0.3 + 1.1j)
NORMALIZATION = "(-2*pi*i)^k / (N^k * (k-1)!)"


@dataclass(frozen=True, order=True)
class EisensteinSymbol:
    weight: int
    level: int
    index: IndexVector

    def __post_init__(self):
        if self.index.level != self.level:
            raise ValueError("index vector level differs from the symbol level")

    @classmethod
    def make(cls, k: int, N: int, c: int, d: int) -> "EisensteinSymbol":
        return cls(k, N, IndexVector(N, c, d))

    def __neg__(self):
        return EisensteinSymbol(self.weight, self.level, -self.index)

    def to_json(self):
        return {"k": self.weight, "N": self.level, "c": self.index.c, "d": self.index.d}

    @classmethod
    def from_json(cls, data):
        return cls.make(int(data["k"]), int(data["N"]), int(data["c"]), int(data["d"]))

    def __repr__(self):
        return f"G[{self.weight},{self.level},({self.index.c},{self.index.d})]"


def slash_index(sym: EisensteinSymbol, g: GroupElement) -> EisensteinSymbol:
    return EisensteinSymbol(sym.weight, sym.level, index_act(sym.index, g))


def normalization_constant(k: int, N: int) -> complex:
    return (-2j * math.pi) ** k / (N ** k * math.factorial(k - 1))


# ----------------------------------------------------------------------------
# exact expansions

def _constant_group_ring(k: int, N: int, c: int, d: int) -> list[Fraction]:
    """Constant term as a vector over zeta_N^j, j mod N."""
    vec = [Fraction(0)] * N
    if c % N == 0:
        if k == 1:
            for j in range(1, N):
                vec[(-j * d) % N] += bernoulli_polynomial(1, Fraction(j, N))
        else:
            f = Fraction(-(-1) ** k * N ** (k - 1), k)
            for j in range(N):
                vec[(-j * d) % N] += f * bernoulli_polynomial(k, Fraction(j, N))
    elif k == 1:
        vec[0] += Fraction(1, 2) - Fraction(c % N, N)
    return vec


def _group_ring_to_number(vec: list[Fraction], N: int) -> CyclotomicNumber:
    den = math.lcm(*(x.denominator for x in vec)) if vec else 1
    ints = [int(x * den) for x in vec]
    return CyclotomicNumber.from_group_ring(N, ints, den)


def constant_term(k: int, N: int, v: IndexVector) -> CyclotomicNumber:
    return _group_ring_to_number(_constant_group_ring(k, N, v.c, v.d), N)


@lru_cache(maxsize=64)
def _family_rows(k: int, N: int, T: int):
    """Integer group-ring rows {v: {m: [coeff of zeta_N^j]}} for m in [1, T)."""
    sign = -1 if k % 2 else 1
    fam = {(c, d): {} for c in range(N) for d in range(N)}
    for s in range(1, T):
        c1 = s % N
        c2 = (-s) % N
        for r in range(1, (T - 1) // s + 1):
            m = r * s
            w = r ** (k - 1)
            for d in range(N):
                rows = fam[(c1, d)]
                vec = rows.get(m)
                if vec is None:
                    vec = rows[m] = [0] * N
                vec[(r * d) % N] += w
                rows = fam[(c2, d)]
                vec = rows.get(m)
                if vec is None:
                    vec = rows[m] = [0] * N
                vec[(-r * d) % N] += sign * w
    return fam


def _expansion_from_rows(k: int, N: int, v: IndexVector, rows, T: int) -> QExpansion:
    const = _constant_group_ring(k, N, v.c, v.d)
    den = math.lcm(*(x.denominator for x in const))
    out = {}
    cvec = [int(x * den) for x in const]
    if any(cvec):
        out[0] = group_ring_to_coords(cvec, N)
    for m, vec in rows.items():
        coords = group_ring_to_coords(vec, N)
        if any(coords):
            out[m] = [x * den for x in coords]
    return QExpansion._make(N, N, T, out, den)


def eisenstein_expansion(sym: EisensteinSymbol, prec: int) -> QExpansion:
    """Normalized expansion of G_{k,N,v} in q^(1/N), exact for m < prec.

    For k = 2 this is the holomorphic part; the non-holomorphic remainder is
    1/(4 pi Im tau) for every index.
    """
    k, N = sym.weight, sym.level
    if k < 1:
        raise UnsupportedWeight(f"weight {k} is not supported")
    if prec < 1:
        raise ValueError("prec must be positive")
    rows = _family_rows(k, N, prec)[(sym.index.c, sym.index.d)]
    return _expansion_from_rows(k, N, sym.index, rows, prec)


@dataclass
class EisensteinFamily:
    weight: int
    level: int
    truncation: int
    expansions: dict = field(repr=False)
    constant_terms: dict = field(repr=False)
    normalization: str = NORMALIZATION

    @property
    def nonholomorphic(self) -> bool:
        return self.weight == 2

    @property
    def residue_marker(self):
        """Coefficient of 1/(4 pi Im tau) carried by every member (weight 2 only)."""
        return Fraction(1) if self.weight == 2 else None

    @property
    def indices(self) -> tuple[IndexVector, ...]:
        return enumerate_indices(self.level)

    def symbols(self) -> list[EisensteinSymbol]:
        return [EisensteinSymbol(self.weight, self.level, v) for v in self.indices]

    def __getitem__(self, v) -> QExpansion:
        if isinstance(v, EisensteinSymbol):
            v = v.index
        elif isinstance(v, tuple):
            v = IndexVector(self.level, *v)
        return self.expansions[v]

    def __len__(self):
        return len(self.expansions)

    def check_parity(self) -> bool:
        sgn = (-1) ** self.weight
        return all(self.expansions[-v] == self.expansions[v].scale(sgn) for v in self.indices)

    def representatives(self) -> list[IndexVector]:
        """One index from each {v, -v} pair with nonzero expansion (lexicographic)."""
        out = []
        seen = set()
        for v in self.indices:
            if v in seen:
                continue
            seen.add(v)
            seen.add(-v)
            if not self.expansions[v].is_zero():
                out.append(v)
        return out

    def holomorphic_basis(self) -> list[tuple[dict, QExpansion]]:
        """Spanning set of the holomorphic span as (coefficients, expansion) pairs.

        Weight 2: differences G_v - G_v0 over the pruned representatives.
        Other weights: the representatives themselves.
        """
        reps = self.representatives()
        if self.weight != 2:
            return [({v: Fraction(1)}, self.expansions[v]) for v in reps]
        v0 = self.indices[0]
        out = []
        seen = {v0}
        for v in self.indices:
            if v in seen:
                continue
            seen.add(v)
            seen.add(-v)
            diff = self.expansions[v] - self.expansions[v0]
            if not diff.is_zero():
                out.append(({v: Fraction(1), v0: Fraction(-1)}, diff))
        return out

    def to_json(self) -> dict:
        return {
            "weight": self.weight,
            "level": self.level,
            "truncation": self.truncation,
            "normalization": self.normalization,
            "format_version": FORMAT_VERSION,
            "members": [[[v.c, v.d], self.expansions[v].to_json()] for v in self.indices],
        }

    @classmethod
    def from_json(cls, data) -> "EisensteinFamily":
        k, N, T = int(data["weight"]), int(data["level"]), int(data["truncation"])
        exps = {}
        for (c, d), e in data["members"]:
            exps[IndexVector(N, c, d)] = QExpansion.from_json(e)
        consts = {v: (e[0] if e.truncation > 0 else CyclotomicNumber.from_rational(0, N)) for v, e in exps.items()}
        return cls(k, N, T, exps, consts, data.get("normalization", NORMALIZATION))


FORMAT_VERSION = 1


def eisenstein_family(k: int, N: int, prec: int, cache=None, validate: bool = True) -> EisensteinFamily:
    """All N^2 normalized expansions G_{k,N,v}, truncated at prec (units of q^(1/N)).

    Before a family is handed to the on-disk cache the formula for (k, N) is
    checked against the numerical oracles (once per process).
    """
    if k < 1:
        raise UnsupportedWeight(f"weight {k} is not supported")
    if cache is not None:
        got = cache.load(k, N, prec)
        if got is not None:
            return got
    fam = _build_family(k, N, prec)
    if cache is not None:
        if validate:
            validate_formula(k, N)
        cache.store(fam)
    return fam


@lru_cache(maxsize=32)
def _build_family(k: int, N: int, prec: int) -> EisensteinFamily:
    rows = _family_rows(k, N, prec)
    exps = {}
    consts = {}
    for v in enumerate_indices(N):
        e = _expansion_from_rows(k, N, v, rows[(v.c, v.d)], prec)
        exps[v] = e
        consts[v] = e[0]
    return EisensteinFamily(k, N, prec, exps, consts)


def weight2_conditions(family: EisensteinFamily):
    """Linear functionals on (lambda_v) cutting out holomorphic combinations.

    With this normalization the only condition is sum_v lambda_v = 0.
    """
    if family.weight != 2:
        raise NotWeightTwo(f"family has weight {family.weight}")
    return [{v: Fraction(1) for v in family.indices}]


# ----------------------------------------------------------------------------
# numerical oracles

def _lattice_square(k, N, c0, d0, tau, cutoff):
    import numpy as np

    total = 0j
    cs = [c for c in range(-cutoff, cutoff + 1) if (c - c0) % N == 0]
    ds = np.array([d for d in range(-cutoff, cutoff + 1) if (d - d0) % N == 0], dtype=np.float64)
    for c in cs:
        z = c * tau + ds
        if c == 0:
            z = z[ds != 0]
        # pairwise float summation via numpy; ordered by magnitude for stability
        vals = z ** (-k)
        total += complex(np.sum(vals[np.argsort(-np.abs(vals))]))
    tau_c = complex(tau)
    # |x tau + y| >= n h on the square max(|x|,|y|) = n
    h = _square_min(tau_c)
    tail = 8.0 * h ** (-k) * cutoff ** (2 - k) / (k - 2)
    return total, tail


def _square_min(tau: complex) -> float:
    # minimum of |x tau + y| over max(|x|, |y|) = 1
    best = float("inf")
    for t in [i / 400.0 for i in range(-400, 401)]:
        for x, y in ((1.0, t), (t, 1.0)):
            best = min(best, abs(x * tau + y))
    return best * 0.999


@lru_cache(maxsize=32)
def _cot_derivative_polys(n: int):
    """P_j with d^j/dz^j [pi cot(pi z)] = pi^(j+1) P_j(cot(pi z)), j <= n."""
    polys = [[0, 1]]
    for _ in range(n):
        p = polys[-1]
        dp = [i * p[i] for i in range(1, len(p))] or [0]
        # -(1 + x^2) * dp
        out = [0] * (len(dp) + 2)
        for i, a in enumerate(dp):
            out[i] -= a
            out[i + 2] -= a
        while len(out) > 1 and out[-1] == 0:
            out.pop()
        polys.append(out)
    return polys


def _row_sum(k, z, mp):
    """sum_{j in Z} (z + j)^-k via derivatives of pi cot(pi z)."""
    poly = _cot_derivative_polys(k - 1)[k - 1]
    x = mp.cot(mp.pi * z)
    val = mp.mpc(0)
    for a in reversed(poly):
        val = val * x + a
    return (-1) ** (k - 1) * mp.pi ** k * val / math.factorial(k - 1)


def _lattice_rows(k, N, c0, d0, tau, cutoff, bits):
    import mpmath as mp

    with mp.workprec(max(bits, 53) + 40):
        tau_m = mp.mpc(tau)
        total = mp.mpc(0)
        # c = 0 row: partial zeta values
        if c0 % N == 0:
            a = mp.mpf(d0 % N) / N
            if d0 % N == 0:
                zero_row = 2 * mp.zeta(k) if k % 2 == 0 else mp.mpf(0)
            else:
                zero_row = mp.zeta(k, a) + (-1) ** k * mp.zeta(k, 1 - a)
            total += zero_row / mp.mpf(N) ** k
        for c in range(1, cutoff + 1):
            for cc in (c, -c):
                if (cc - c0) % N:
                    continue
                z = (cc * tau_m + d0) / N
                total += _row_sum(k, z, mp) / mp.mpf(N) ** k
        y = tau.imag
        # rows with |c| > cutoff: |row| <= (2 pi/N)^k/(k-1)! sum_r r^(k-1) e^(-2 pi r |c| y / N)
        tail = 0.0
        for c in range(cutoff + 1, cutoff + 2000):
            t = 0.0
            for r in range(1, 200):
                term = r ** (k - 1) * math.exp(-2 * math.pi * r * c * y / N)
                t += term
                if term < 1e-30 * max(t, 1e-300):
                    break
            t *= 2 * (2 * math.pi / N) ** k / math.factorial(k - 1)
            tail += t
            if t < 1e-40:
                break
        return complex(total), tail


def lattice_sum_numeric(sym: EisensteinSymbol, tau, cutoff: int = 2000, precision_bits: int = 53,
                        method: str = "square"):
    """Direct lattice evaluation of G_{k,N,v}(tau) divided by the normalization.

    ``method="square"`` sums the box max(|c|,|d|) <= cutoff literally;
    ``method="rows"`` sums every row c exactly (via derivatives of pi cot)
    for |c| <= cutoff, with the c = 0 row taken from Hurwitz zeta values.
    Returns (value, tail_bound).
    """
    k, N = sym.weight, sym.level
    if k <= 2:
        raise OracleNotConvergent(f"the lattice sum does not converge absolutely in weight {k}")
    tau = complex(tau)
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half plane")
    if method == "square":
        val, tail = _lattice_square(k, N, sym.index.c, sym.index.d, tau, cutoff)
    elif method == "rows":
        val, tail = _lattice_rows(k, N, sym.index.c, sym.index.d, tau, cutoff, precision_bits)
    else:
        raise ValueError(f"unknown method {method!r}")
    C = normalization_constant(k, N)
    return val / C, tail / abs(C)


@dataclass
class ModularityReport:
    weight: int
    level: int
    gamma: GroupElement
    tau: complex
    tol: float
    discrepancies: dict
    passed: dict

    @property
    def all_passed(self) -> bool:
        return all(self.passed.values())

    def failures(self):
        return [v for v, ok in self.passed.items() if not ok]


def _eval_full(f: QExpansion, tau: complex, k: int):
    val, tail = series_eval(f, tau, 53, growth=k + 1)
    if k == 2:
        val += 1.0 / (4 * math.pi * tau.imag)
    return complex(val), tail


def modularity_check(family: EisensteinFamily, gamma: GroupElement = S, tau=0.2 + 0.9j, tol: float = 1e-8,
                     expansions=None) -> ModularityReport:
    """Numerically compare (c tau + d)^-k G_v(gamma tau) with G_{v gamma}(tau) for every v."""
    k = family.weight
    tau = complex(tau)
    exps = expansions if expansions is not None else family.expansions
    gtau = gamma.act(tau)
    factor = (gamma.c * tau + gamma.d) ** (-k)
    disc = {}
    passed = {}
    cache_rhs = {}
    for v in family.indices:
        lhs, t1 = _eval_full(exps[v], gtau, k)
        w = index_act(v, gamma)
        if w not in cache_rhs:
            cache_rhs[w] = _eval_full(exps[w], tau, k)
        rhs, t2 = cache_rhs[w]
        tail = abs(factor) * t1 + t2
        if tail > tol:
            raise InconclusivePrecision(
                f"series tail {tail:.2e} exceeds tolerance {tol:.1e}; raise the truncation or Im(tau)")
        d = abs(factor * lhs - rhs)
        disc[v] = d
        passed[v] = d <= tol
    return ModularityReport(k, family.level, gamma, tau, tol, disc, passed)


def required_truncation(k: int, N: int, tau, tol: float = 1e-12) -> int:
    """Truncation (units of q^(1/N)) making the tail at tau and at S tau small."""
    y = min(complex(tau).imag, S.act(complex(tau)).imag)
    r = math.exp(-2 * math.pi * y / N)
    m = 1
    while (m + 1) ** (k + 1) * r ** m / (1 - r) > tol * 1e-3:
        m += 1
    return m + 1


_VALIDATED = {}


def validate_formula(k: int, N: int, tol: float = 1e-8) -> bool:
    """Check the expansion formula for (k, N) against the oracles (memoized)."""
    key = (k, N)
    if key in _VALIDATED:
        return _VALIDATED[key]
    tau = ORACLE_POINTS[1]
    T = required_truncation(k, N, tau)
    fam = _build_family(k, N, T)
    ok = modularity_check(fam, S, tau, tol).all_passed
    if ok and k >= 3:
        for v in fam.indices:
            sym = EisensteinSymbol(k, N, v)
            val, tail = lattice_sum_numeric(sym, ORACLE_POINTS[0], cutoff=40, method="rows")
            ser, st = series_eval(fam[v], ORACLE_POINTS[0], 53, growth=k + 1)
            if abs(val - ser) > tol + tail + st:
                ok = False
                break
    _VALIDATED[key] = ok
    if not ok:
        from .errors import EisprodError

        raise EisprodError(f"Eisenstein expansion formula failed its oracle check for k={k}, N={N}")
    return ok
