"""SL2(Z), index vectors, congruence subgroups and Dirichlet characters."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import NotARepresentation
from .exactmath import CyclotomicNumber, euler_phi, lcm, prime_factors

__all__ = [
    "GroupElement", "IndexVector", "I", "S", "T", "index_act", "enumerate_indices",
    "Gamma0", "Gamma1", "GammaN", "cosets", "dirichlet_characters", "DirichletCharacter",
    "PhasePermutationAction", "fixed_and_parity", "st_word",
]


@dataclass(frozen=True)
class GroupElement:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant of {self.entries()} is not 1")

    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def matrix(self):
        return [[self.a, self.b], [self.c, self.d]]

    def __mul__(self, o: "GroupElement") -> "GroupElement":
        return GroupElement(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                            self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def __neg__(self):
        return GroupElement(-self.a, -self.b, -self.c, -self.d)

    def inverse(self) -> "GroupElement":
        return GroupElement(self.d, -self.b, -self.c, self.a)

    def __pow__(self, e: int) -> "GroupElement":
        base = self if e >= 0 else self.inverse()
        out = I
        for _ in range(abs(e)):
            out = out * base
        return out

    def act(self, tau):
        """Moebius action on a point of the upper half plane."""
        return (self.a * tau + self.b) / (self.c * tau + self.d)

    def reduce(self, N: int) -> tuple[int, int, int, int]:
        return (self.a % N, self.b % N, self.c % N, self.d % N)

    def __repr__(self):
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]]"


I = GroupElement(1, 0, 0, 1)
T = GroupElement(1, 1, 0, 1)
S = GroupElement(0, -1, 1, 0)


def st_word(g: GroupElement) -> list[tuple[str, int]]:
    """Write g as ±(word in S and T), returned as [('T', n) | ('S', 1) | ('-I', 1)].

    Uses the continued fraction algorithm on the first column.
    """
    word = []
    cur = g
    # reduce cur to +-T^n by left multiplication with S and powers of T
    while cur.c != 0:
        # choose n with |a - n c| minimal, then apply S
        n = round(cur.a / cur.c) if cur.c else 0
        cur = (T ** (-n)) * cur
        word.append(("T", n))
        cur = S.inverse() * cur
        word.append(("S", 1))
    # now cur = +-[[1, n], [0, 1]]
    sign = 1
    if cur.a == -1:
        sign = -1
        cur = -cur
    word.append(("T", cur.b))
    if sign < 0:
        word.append(("-I", 1))
    return word


def from_word(word) -> GroupElement:
    g = I
    for sym, n in word:
        if sym == "T":
            g = g * (T ** n)
        elif sym == "S":
            g = g * S
        else:
            g = -g
    return g


@dataclass(frozen=True, order=True)
class IndexVector:
    level: int
    c: int
    d: int

    def __post_init__(self):
        if self.level < 1:
            raise ValueError("level must be positive")
        object.__setattr__(self, "c", self.c % self.level)
        object.__setattr__(self, "d", self.d % self.level)

    def act(self, g: GroupElement) -> "IndexVector":
        return index_act(self, g)

    def __neg__(self):
        return IndexVector(self.level, -self.c, -self.d)

    def __repr__(self):
        return f"({self.c},{self.d}) mod {self.level}"


def index_act(v: IndexVector, g: GroupElement) -> IndexVector:
    """Right action (c, d) -> (c a + d c', c b + d d')."""
    return IndexVector(v.level, v.c * g.a + v.d * g.c, v.c * g.b + v.d * g.d)


@lru_cache(maxsize=None)
def enumerate_indices(N: int) -> tuple[IndexVector, ...]:
    return tuple(IndexVector(N, c, d) for c in range(N) for d in range(N))


# ----------------------------------------------------------------------------
# lifting residues to SL2(Z)

def lift_bottom_row(c: int, d: int, N: int) -> tuple[int, int]:
    """Coprime integers congruent to (c, d) mod N; needs gcd(c, d, N) = 1."""
    c %= N
    d %= N
    if N == 1:
        return (0, 1)
    if math.gcd(math.gcd(c, d), N) != 1:
        raise ValueError(f"({c}, {d}) is not primitive mod {N}")
    if c == 0:
        c = N
    j = 0
    while math.gcd(c, d + j * N) != 1:
        j += 1
    return (c, d + j * N)


def lift_sl2(a: int, b: int, c: int, d: int, N: int) -> GroupElement:
    """An element of SL2(Z) reducing to the given matrix mod N."""
    if (a * d - b * c - 1) % N:
        raise ValueError("matrix does not have determinant 1 mod N")
    c1, d1 = lift_bottom_row(c, d, N)
    # u c1 + v d1 = 1 ; a0 = v, b0 = -u gives a0 d1 - b0 c1 = 1
    g, u, v = _xgcd(c1, d1)
    a0, b0 = v, -u
    t = (u * (a - a0) + v * (b - b0)) % N if N > 1 else 0
    return GroupElement(a0 + t * c1, b0 + t * d1, c1, d1)


def _xgcd(x: int, y: int):
    # returns g, u, v with u x + v y = g
    u0, v0, u1, v1 = 1, 0, 0, 1
    while y:
        q = x // y
        x, y = y, x - q * y
        u0, u1 = u1, u0 - q * u1
        v0, v1 = v1, v0 - q * v1
    if x < 0:
        x, u0, v0 = -x, -u0, -v0
    return x, u0, v0


@lru_cache(maxsize=None)
def sl2_mod(N: int) -> tuple[tuple[int, int, int, int], ...]:
    """All elements of SL2(Z/N) in lexicographic order."""
    out = []
    for a, b, c, d in itertools.product(range(N), repeat=4):
        if (a * d - b * c) % N == 1 % N:
            out.append((a, b, c, d))
    return tuple(out)


# ----------------------------------------------------------------------------
# congruence subgroups

class _Subgroup:
    name = ""

    def __init__(self, N: int):
        if N < 1:
            raise ValueError("level must be positive")
        self.N = N

    def __repr__(self):
        return f"{self.name}({self.N})"

    def __eq__(self, other):
        return type(self) is type(other) and self.N == other.N

    def __hash__(self):
        return hash((self.name, self.N))

    def contains(self, g: GroupElement) -> bool:
        raise NotImplementedError

    def coset_key(self, g: GroupElement):
        """Label of the right coset (subgroup) * g."""
        raise NotImplementedError

    def index(self) -> int:
        raise NotImplementedError

    def cosets(self) -> list[GroupElement]:
        raise NotImplementedError

    def coset_of(self, g: GroupElement) -> int:
        return self._coset_lookup()[self.coset_key(g)]

    def _coset_lookup(self):
        lookup = getattr(self, "_lookup", None)
        if lookup is None:
            lookup = {self.coset_key(g): i for i, g in enumerate(self.cosets())}
            self._lookup = lookup
        return lookup

    def contains_minus_identity(self) -> bool:
        return self.contains(-I)

    def cusps(self) -> list[tuple[GroupElement, int]]:
        """One (gamma, width) per cusp; the cusp is gamma(infinity).

        Cusps correspond to orbits of right cosets under right multiplication
        by T and -I; the width is the least h with gamma T^h gamma^-1 in +-(subgroup).
        """
        reps = self.cosets()
        seen = set()
        out = []
        for g in reps:
            key = self.coset_key(g)
            if key in seen:
                continue
            orbit = set()
            frontier = [g]
            while frontier:
                x = frontier.pop()
                kx = self.coset_key(x)
                if kx in orbit:
                    continue
                orbit.add(kx)
                frontier.append(x * T)
                frontier.append(-x)
            seen |= orbit
            h = 1
            while True:
                y = g * (T ** h)
                ky = self.coset_key(y)
                if ky == key or self.coset_key(-y) == key:
                    break
                h += 1
            out.append((g, h))
        return out


class GammaN(_Subgroup):
    name = "Gamma"

    def contains(self, g):
        return g.reduce(self.N) == (1 % self.N, 0, 0, 1 % self.N)

    def coset_key(self, g):
        return g.reduce(self.N)

    def index(self):
        N = self.N
        out = N ** 3
        for p in prime_factors(N):
            out = out * (p * p - 1) // (p * p)
        return out

    def cosets(self):
        if not hasattr(self, "_reps"):
            self._reps = [lift_sl2(*m, self.N) for m in sl2_mod(self.N)]
        return self._reps


class Gamma1(_Subgroup):
    name = "Gamma1"

    def contains(self, g):
        N = self.N
        return g.c % N == 0 and g.a % N == 1 % N and g.d % N == 1 % N

    def coset_key(self, g):
        return (g.c % self.N, g.d % self.N)

    def index(self):
        N = self.N
        out = N * N
        for p in prime_factors(N):
            out = out * (p * p - 1) // (p * p)
        return out

    def cosets(self):
        if not hasattr(self, "_reps"):
            N = self.N
            reps = []
            for c in range(N):
                for d in range(N):
                    if math.gcd(math.gcd(c, d), N) == 1:
                        c1, d1 = lift_bottom_row(c, d, N)
                        _, u, v = _xgcd(c1, d1)
                        reps.append(GroupElement(v, -u, c1, d1))
            self._reps = reps
        return self._reps


class Gamma0(_Subgroup):
    name = "Gamma0"

    def contains(self, g):
        return g.c % self.N == 0

    def _p1_normal(self, c, d):
        N = self.N
        c %= N
        d %= N
        best = None
        for u in range(N):
            if math.gcd(u, N) == 1:
                cand = (c * u % N, d * u % N)
                if best is None or cand < best:
                    best = cand
        return best if best is not None else (0, 0)

    def coset_key(self, g):
        return self._p1_normal(g.c, g.d)

    def index(self):
        N = self.N
        out = N
        for p in prime_factors(N):
            out = out * (p + 1) // p
        return out

    def cosets(self):
        if not hasattr(self, "_reps"):
            N = self.N
            keys = []
            for c in range(N):
                for d in range(N):
                    if math.gcd(math.gcd(c, d), N) == 1:
                        k = self._p1_normal(c, d)
                        if k not in keys:
                            keys.append(k)
            if N == 1:
                keys = [(0, 0)]
            reps = []
            for c, d in sorted(keys):
                c1, d1 = lift_bottom_row(c, d, N)
                _, u, v = _xgcd(c1, d1)
                reps.append(GroupElement(v, -u, c1, d1))
            self._reps = reps
        return self._reps


def cosets(subgroup: _Subgroup) -> list[GroupElement]:
    return subgroup.cosets()


# ----------------------------------------------------------------------------
# Dirichlet characters

def _unit_group_generators(N: int) -> list[tuple[int, int]]:
    """Generators (g, order) of (Z/N)^* as an internal direct product."""
    gens = []
    n = N
    factors = []
    for p in prime_factors(N):
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        factors.append((p, e))
    for p, e in factors:
        q = p ** e
        other = N // q
        local = []
        if p == 2:
            if e == 2:
                local = [(3, 2)]
            elif e >= 3:
                local = [(q - 1, 2), (5, q // 4)]
        else:
            order = q - q // p
            g = next(x for x in range(2, q + 1) if _mult_order(x, q) == order)
            local = [(g, order)]
        for g, order in local:
            # CRT: = g mod q, = 1 mod other
            if other == 1:
                x = g % q
            else:
                x = (g * other * pow(other, -1, q) + q * pow(q, -1, other)) % N
            gens.append((x, order))
    return gens


def _mult_order(x: int, m: int) -> int:
    if math.gcd(x, m) != 1:
        return 0
    k, y = 1, x % m
    while y != 1 % m:
        y = y * x % m
        k += 1
    return k


class DirichletCharacter:
    """A character of (Z/N)^*, values in Q(zeta_e) for the group exponent e."""

    def __init__(self, modulus: int, exponents: Sequence[int], _gens=None, _logs=None, _e=None):
        self.modulus = modulus
        self.exponents = tuple(exponents)
        self._gens = _gens if _gens is not None else _unit_group_generators(modulus)
        self.value_conductor = _e if _e is not None else lcm(*(o for _, o in self._gens))
        self._logs = _logs if _logs is not None else _discrete_logs(modulus, self._gens)

    def __call__(self, a: int) -> CyclotomicNumber:
        e = self.value_conductor
        log = self._logs.get(a % self.modulus)
        if log is None:
            return CyclotomicNumber.from_rational(0, e)
        k = 0
        for (g, order), x, j in zip(self._gens, self.exponents, log):
            k += x * j * (e // order)
        return CyclotomicNumber.zeta(e, k % e)

    def value_exponent(self, a: int):
        """k with chi(a) = zeta_e^k, or None when gcd(a, N) > 1."""
        e = self.value_conductor
        log = self._logs.get(a % self.modulus)
        if log is None:
            return None
        return sum(x * j * (e // o) for (g, o), x, j in zip(self._gens, self.exponents, log)) % e

    def is_trivial(self) -> bool:
        return all(x % o == 0 for (g, o), x in zip(self._gens, self.exponents))

    def conjugate(self) -> "DirichletCharacter":
        return DirichletCharacter(self.modulus, [(-x) % o for (g, o), x in zip(self._gens, self.exponents)],
                                  self._gens, self._logs, self.value_conductor)

    def is_even(self) -> bool:
        return self.value_exponent(-1) == 0

    def __eq__(self, other):
        return isinstance(other, DirichletCharacter) and self.modulus == other.modulus and \
            self.exponents == other.exponents

    def __hash__(self):
        return hash((self.modulus, self.exponents))

    def __repr__(self):
        return f"DirichletCharacter(mod {self.modulus}, {self.exponents})"


def _discrete_logs(N: int, gens) -> dict[int, tuple[int, ...]]:
    logs = {}
    orders = [o for _, o in gens]
    for exps in itertools.product(*(range(o) for o in orders)):
        x = 1 % N
        for (g, _), j in zip(gens, exps):
            x = x * pow(g, j, N) % N
        logs[x] = exps
    if len(logs) != euler_phi(N):
        raise AssertionError(f"unit group generators for {N} are not independent")
    return logs


@lru_cache(maxsize=None)
def dirichlet_characters(N: int) -> tuple[DirichletCharacter, ...]:
    gens = _unit_group_generators(N)
    logs = _discrete_logs(N, gens)
    e = lcm(*(o for _, o in gens))
    return tuple(DirichletCharacter(N, exps, gens, logs, e)
                 for exps in itertools.product(*(range(o) for _, o in gens)))


# ----------------------------------------------------------------------------
# representations given by generator images

class PhasePermutationAction:
    """Monomial representation: rho(g) e_i = phase_g[i] * e_{perm_g[i]} for g in {T, S}."""

    def __init__(self, t_perm, t_phase, s_perm, s_phase, check: bool = True):
        self.dimension = len(t_perm)
        one = CyclotomicNumber.from_rational(1)
        self.t = (tuple(t_perm), tuple(CyclotomicNumber.coerce(x) for x in (t_phase or [one] * self.dimension)))
        self.s = (tuple(s_perm), tuple(CyclotomicNumber.coerce(x) for x in (s_phase or [one] * self.dimension)))
        if check:
            self.check_relations()

    @staticmethod
    def _compose(x, y):
        """Monomial matrix x*y (apply y first)."""
        py, fy = y
        px, fx = x
        perm = tuple(px[py[i]] for i in range(len(py)))
        phase = tuple(fy[i] * fx[py[i]] for i in range(len(py)))
        return perm, phase

    def _identity(self):
        one = CyclotomicNumber.from_rational(1)
        return tuple(range(self.dimension)), (one,) * self.dimension

    def _power(self, x, e):
        out = self._identity()
        for _ in range(e):
            out = self._compose(x, out)
        return out

    @staticmethod
    def _same(x, y):
        return x[0] == y[0] and all(a == b for a, b in zip(x[1], y[1]))

    def check_relations(self):
        ident = self._identity()
        s2 = self._compose(self.s, self.s)
        st = self._compose(self.s, self.t)
        if not self._same(self._compose(s2, s2), ident):
            raise NotARepresentation("S^4 is not the identity")
        if not self._same(self._power(st, 6), ident):
            raise NotARepresentation("(ST)^6 is not the identity")
        if not self._same(self._compose(s2, self.t), self._compose(self.t, s2)):
            raise NotARepresentation("S^2 is not central")
        if not self._same(self._power(st, 3), s2):
            raise NotARepresentation("(ST)^3 differs from S^2")

    def minus_identity(self):
        return self._compose(self.s, self.s)

    def apply(self, x, vec):
        perm, phase = x
        out = [CyclotomicNumber.from_rational(0)] * self.dimension
        for i, c in enumerate(vec):
            if c:
                out[perm[i]] = out[perm[i]] + phase[i] * c
        return out

    @classmethod
    def from_index_vectors(cls, N: int) -> "PhasePermutationAction":
        """Permutation action e_v -> e_{v g^-1} on (Z/N)^2."""
        idx = enumerate_indices(N)
        pos = {v: i for i, v in enumerate(idx)}
        tperm = [pos[index_act(v, T.inverse())] for v in idx]
        sperm = [pos[index_act(v, S.inverse())] for v in idx]
        return cls(tperm, None, sperm, None)

    @classmethod
    def from_cosets(cls, subgroup: _Subgroup) -> "PhasePermutationAction":
        """Permutation representation on the right cosets (the induced trivial representation)."""
        reps = subgroup.cosets()
        tperm = [subgroup.coset_of(g * T.inverse()) for g in reps]
        sperm = [subgroup.coset_of(g * S.inverse()) for g in reps]
        return cls(tperm, None, sperm, None)


def fixed_and_parity(action: PhasePermutationAction, weight_parity: int):
    """Basis of the T-fixed vectors on which -I acts by ``weight_parity`` (+1 or -1)."""
    from .linalg import nullspace

    action.check_relations()
    perm, phase = action.t
    n = action.dimension
    seen = [False] * n
    fixed = []
    for i in range(n):
        if seen[i]:
            continue
        cycle = []
        j = i
        while not seen[j]:
            seen[j] = True
            cycle.append(j)
            j = perm[j]
        # T-fixed vector on the cycle: x_{perm(j)} = phase_j x_j, consistent iff product of phases is 1
        x = {cycle[0]: CyclotomicNumber.from_rational(1)}
        prod = CyclotomicNumber.from_rational(1)
        for j in cycle:
            prod = prod * phase[j]
        if prod != 1:
            continue
        for j in cycle[:-1]:
            x[perm[j]] = phase[j] * x[j]
        vec = [x.get(t, CyclotomicNumber.from_rational(0)) for t in range(n)]
        fixed.append(vec)
    if not fixed:
        return []
    minus = action.minus_identity()
    images = [action.apply(minus, v) for v in fixed]
    # solve sum a_j (image_j - par * fixed_j) = 0
    par = CyclotomicNumber.from_rational(weight_parity)
    cols = [[im[t] - par * fv[t] for t in range(n)] for im, fv in zip(images, fixed)]
    rows = [[cols[j][t] for j in range(len(fixed))] for t in range(n)]
    kernel = nullspace(rows, len(fixed))
    out = []
    for coeffs in kernel:
        vec = [CyclotomicNumber.from_rational(0)] * n
        for a, fv in zip(coeffs, fixed):
            if a:
                vec = [p + a * q for p, q in zip(vec, fv)]
        out.append(vec)
    return out
