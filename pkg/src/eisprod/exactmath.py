"""Exact arithmetic in cyclotomic fields Q(zeta_n).

Elements are stored in the power basis ``1, z, ..., z^(phi(n)-1)`` reduced
modulo the n-th cyclotomic polynomial.  Internally the coordinates are kept as
integers over one positive common denominator; the public ``coords`` view
returns Fractions.
"""
from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Sequence

from .errors import ConductorMismatch, DivisionByZero, InvalidGaloisExponent

__all__ = [
    "CyclotomicNumber",
    "bernoulli_number",
    "bernoulli_polynomial",
    "cyclotomic_polynomial",
    "divisors",
    "embed_and_galois",
    "euler_phi",
    "prime_factors",
    "to_complex",
    "zeta",
]


# --------------------------------------------------------------------------
# integer helpers

@lru_cache(maxsize=None)
def prime_factors(n: int) -> tuple[int, ...]:
    """Distinct prime divisors of ``n`` in increasing order."""
    n = abs(n)
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out.append(n)
    return tuple(out)


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    result = n
    for p in prime_factors(n):
        result = result // p * (p - 1)
    return result


@lru_cache(maxsize=4096)
def divisors(n: int) -> tuple[int, ...]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return tuple(small + large[::-1])


def lcm(*args: int) -> int:
    out = 1
    for a in args:
        out = out * a // math.gcd(out, a)
    return out


@lru_cache(maxsize=None)
def bernoulli_number(k: int) -> Fraction:
    """Bernoulli numbers with B_1 = -1/2."""
    if k == 0:
        return Fraction(1)
    total = Fraction(0)
    for j in range(k):
        total += math.comb(k + 1, j) * bernoulli_number(j)
    return -total / (k + 1)


def bernoulli_polynomial(k: int, x) -> Fraction:
    x = Fraction(x)
    return sum(
        (math.comb(k, j) * bernoulli_number(j) * x ** (k - j) for j in range(k + 1)),
        Fraction(0),
    )


# --------------------------------------------------------------------------
# cyclotomic polynomials and power tables

@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first."""
    if n < 1:
        raise ValueError("conductor must be positive")
    # x^n - 1 divided by Phi_d for every proper divisor d
    num = [-1] + [0] * (n - 1) + [1]
    for d in divisors(n)[:-1]:
        num = _exact_divide(num, cyclotomic_polynomial(d))
    return tuple(num)


def _exact_divide(num: list[int], den: Sequence[int]) -> list[int]:
    # den is monic
    num = list(num)
    dd = len(den) - 1
    q = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c:
            q[i - dd] = c
            for j, b in enumerate(den):
                num[i - dd + j] -= c * b
    assert not any(num[:dd]), "non-exact cyclotomic division"
    return q


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple[tuple[int, ...], ...]:
    """Row e holds the power-basis coordinates of zeta_n^e, 0 <= e < n."""
    phi = euler_phi(n)
    poly = cyclotomic_polynomial(n)
    rows = []
    cur = [1] + [0] * (phi - 1)
    for _ in range(n):
        rows.append(tuple(cur))
        # multiply by x and reduce
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for i in range(phi):
                cur[i] -= top * poly[i]
    return tuple(rows)


def _reduce(coeffs: list[int], n: int) -> list[int]:
    """Reduce an integer polynomial (low first) modulo Phi_n in place."""
    phi = euler_phi(n)
    if len(coeffs) <= phi:
        return coeffs + [0] * (phi - len(coeffs))
    poly = cyclotomic_polynomial(n)
    for e in range(len(coeffs) - 1, phi - 1, -1):
        c = coeffs[e]
        if c:
            base = e - phi
            for i in range(phi):
                pi = poly[i]
                if pi:
                    coeffs[base + i] -= c * pi
    del coeffs[phi:]
    return coeffs


def group_ring_to_coords(vec: Sequence[int], n: int) -> list[int]:
    """Map sum_e vec[e] zeta_n^e (e mod n) to power-basis integer coords."""
    table = _power_table(n)
    phi = euler_phi(n)
    out = [0] * phi
    for e, c in enumerate(vec):
        if c:
            row = table[e % n]
            for i in range(phi):
                if row[i]:
                    out[i] += c * row[i]
    return out


# --------------------------------------------------------------------------

def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, Rational):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational number")


class CyclotomicNumber:
    """An element of Q(zeta_n) in canonical power-basis form."""

    __slots__ = ("conductor", "_num", "_den", "_hash")

    def __init__(self, conductor: int, coords: Iterable = ()):
        if conductor < 1:
            raise ValueError("conductor must be positive")
        phi = euler_phi(conductor)
        fr = [_as_fraction(c) for c in coords]
        if len(fr) > phi:
            raise ValueError(f"expected at most {phi} coordinates for conductor {conductor}")
        fr += [Fraction(0)] * (phi - len(fr))
        den = lcm(*(f.denominator for f in fr)) if fr else 1
        num = [f.numerator * (den // f.denominator) for f in fr]
        self._set(conductor, num, den)

    def _set(self, conductor, num, den):
        g = math.gcd(den, *num)
        if g > 1:
            num = [a // g for a in num]
            den //= g
        self.conductor = conductor
        self._num = tuple(num)
        self._den = den
        self._hash = None

    @classmethod
    def _make(cls, conductor: int, num: Sequence[int], den: int = 1) -> "CyclotomicNumber":
        obj = cls.__new__(cls)
        if den < 0:
            num = [-a for a in num]
            den = -den
        obj._set(conductor, num, den)
        return obj

    # construction helpers -------------------------------------------------
    @classmethod
    def from_rational(cls, r, conductor: int = 1) -> "CyclotomicNumber":
        r = _as_fraction(r)
        phi = euler_phi(conductor)
        return cls._make(conductor, [r.numerator] + [0] * (phi - 1), r.denominator)

    @classmethod
    def zeta(cls, n: int, e: int = 1) -> "CyclotomicNumber":
        return cls._make(n, list(_power_table(n)[e % n]), 1)

    @classmethod
    def from_group_ring(cls, n: int, vec: Sequence[int], den: int = 1) -> "CyclotomicNumber":
        return cls._make(n, group_ring_to_coords(vec, n), den)

    @classmethod
    def coerce(cls, x) -> "CyclotomicNumber":
        if isinstance(x, CyclotomicNumber):
            return x
        return cls.from_rational(x)

    # views -------------------------------------------------------------------
    @property
    def coords(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(a, self._den) for a in self._num)

    @property
    def numerators(self) -> tuple[int, ...]:
        return self._num

    @property
    def denominator(self) -> int:
        return self._den

    def is_zero(self) -> bool:
        return not any(self._num)

    def __bool__(self):
        return not self.is_zero()

    def is_rational(self) -> bool:
        return not any(self._num[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return Fraction(self._num[0], self._den)

    def height(self) -> int:
        """Bit size of the largest numerator or the denominator."""
        return max(max((abs(a) for a in self._num), default=0).bit_length(), self._den.bit_length())

    def __repr__(self):
        if self.is_rational():
            return f"CyclotomicNumber({self.conductor}, {self.to_fraction()})"
        terms = []
        for j, c in enumerate(self.coords):
            if c:
                terms.append(f"{c}" if j == 0 else f"({c})*z{self.conductor}^{j}")
        return " + ".join(terms)

    # conductor management ---------------------------------------------------
    def lift(self, n: int) -> "CyclotomicNumber":
        """Embed into Q(zeta_n) via zeta_m -> zeta_n^(n/m)."""
        m = self.conductor
        if n == m:
            return self
        if n % m:
            raise ConductorMismatch(f"conductor {m} does not divide {n}")
        step = n // m
        table = _power_table(n)
        phi = euler_phi(n)
        out = [0] * phi
        for j, c in enumerate(self._num):
            if c:
                row = table[j * step]
                for i in range(phi):
                    if row[i]:
                        out[i] += c * row[i]
        return CyclotomicNumber._make(n, out, self._den)

    def galois(self, g: int) -> "CyclotomicNumber":
        """Apply zeta -> zeta^g."""
        n = self.conductor
        if math.gcd(g, n) != 1:
            raise InvalidGaloisExponent(f"{g} is not coprime to {n}")
        g %= n
        if g == 1 or n <= 2:
            return self
        table = _power_table(n)
        phi = euler_phi(n)
        out = [0] * phi
        for j, c in enumerate(self._num):
            if c:
                row = table[(j * g) % n]
                for i in range(phi):
                    if row[i]:
                        out[i] += c * row[i]
        return CyclotomicNumber._make(n, out, self._den)

    def conjugate(self) -> "CyclotomicNumber":
        return self.galois(-1)

    def restrict(self, m: int) -> "CyclotomicNumber":
        """Inverse of ``lift``: express the element in Q(zeta_m), m | conductor."""
        n = self.conductor
        if m == n:
            return self
        if n % m:
            raise ConductorMismatch(f"{m} does not divide conductor {n}")
        sol = _restriction_solve(m, n, self.coords)
        if sol is None:
            raise ConductorMismatch(f"element does not lie in Q(zeta_{m})")
        return CyclotomicNumber(m, sol)

    def minimal_conductor(self) -> int:
        cur = self
        changed = True
        while changed:
            changed = False
            for p in prime_factors(cur.conductor):
                m = cur.conductor // p
                sol = _restriction_solve(m, cur.conductor, cur.coords)
                if sol is not None:
                    cur = CyclotomicNumber(m, sol)
                    changed = True
                    break
        return cur.conductor

    # arithmetic ---------------------------------------------------------------
    def _common(self, other) -> tuple["CyclotomicNumber", "CyclotomicNumber"]:
        other = CyclotomicNumber.coerce(other)
        if self.conductor == other.conductor:
            return self, other
        n = lcm(self.conductor, other.conductor)
        return self.lift(n), other.lift(n)

    def __add__(self, other):
        try:
            a, b = self._common(other)
        except TypeError:
            return NotImplemented
        if a._den == b._den:
            return CyclotomicNumber._make(a.conductor, [x + y for x, y in zip(a._num, b._num)], a._den)
        return CyclotomicNumber._make(
            a.conductor,
            [x * b._den + y * a._den for x, y in zip(a._num, b._num)],
            a._den * b._den,
        )

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicNumber._make(self.conductor, [-x for x in self._num], self._den)

    def __sub__(self, other):
        try:
            return self + (-CyclotomicNumber.coerce(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        return CyclotomicNumber.coerce(other) - self

    def __mul__(self, other):
        try:
            a, b = self._common(other)
        except TypeError:
            return NotImplemented
        n = a.conductor
        if b.is_rational():
            c = b._num[0]
            return CyclotomicNumber._make(n, [x * c for x in a._num], a._den * b._den)
        if a.is_rational():
            c = a._num[0]
            return CyclotomicNumber._make(n, [x * c for x in b._num], a._den * b._den)
        prod = _poly_mul(a._num, b._num)
        return CyclotomicNumber._make(n, _reduce(prod, n), a._den * b._den)

    __rmul__ = __mul__

    def inverse(self) -> "CyclotomicNumber":
        if self.is_zero():
            raise DivisionByZero("inversion of zero")
        n = self.conductor
        if self.is_rational():
            return CyclotomicNumber.from_rational(1 / self.to_fraction(), n)
        inv = _poly_inverse_mod([Fraction(a) for a in self._num], cyclotomic_polynomial(n))
        # self = num/den  =>  self^{-1} = den * num^{-1}
        return CyclotomicNumber(n, [c * self._den for c in inv])

    def __truediv__(self, other):
        other = CyclotomicNumber.coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return CyclotomicNumber.coerce(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = CyclotomicNumber.from_rational(1, self.conductor)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, CyclotomicNumber):
            try:
                other = CyclotomicNumber.coerce(other)
            except TypeError:
                return NotImplemented
        a, b = self._common(other)
        return a._den == b._den and a._num == b._num

    def __hash__(self):
        if self._hash is None:
            m = self.minimal_conductor()
            r = self.restrict(m) if m != self.conductor else self
            self._hash = hash((m, r._num, r._den))
        return self._hash

    def to_complex(self, precision_bits: int = 53):
        return to_complex(self, precision_bits)

    def __complex__(self):
        return complex(to_complex(self, 53))


def _poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _poly_trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(a: list[Fraction], b: list[Fraction]):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(a) >= len(b) and a:
        c = a[-1] / lead
        shift = len(a) - len(b)
        q[shift] = c
        for i, bi in enumerate(b):
            a[shift + i] -= c * bi
        a.pop()
        _poly_trim(a)
    return q, a


def _poly_inverse_mod(a: list[Fraction], modulus: Sequence[int]) -> list[Fraction]:
    """Extended Euclid in Q[x]: returns u with u*a = 1 mod modulus."""
    r0, r1 = [Fraction(c) for c in modulus], _poly_trim(list(a))
    s0, s1 = [Fraction(0)], [Fraction(1)]
    while len(r1) > 1:
        q, r = _poly_divmod(r0, r1)
        qs = _poly_mul_frac(q, s1)
        s2 = [x - y for x, y in _zip_pad(s0, qs)]
        r0, r1, s0, s1 = r1, r, s1, _poly_trim(s2)
    if not r1:
        raise DivisionByZero("element is not invertible")
    c = r1[0]
    phi = len(modulus) - 1
    _, u = _poly_divmod([x / c for x in s1], [Fraction(m) for m in modulus])
    return u + [Fraction(0)] * (phi - len(u))


def _poly_mul_frac(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _zip_pad(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return zip(a, b)


@lru_cache(maxsize=256)
def _restriction_basis(m: int, n: int):
    """Row-reduced image of the power basis of Q(zeta_m) inside Q(zeta_n)."""
    step = n // m
    table = _power_table(n)
    cols = [[Fraction(x) for x in table[j * step]] for j in range(euler_phi(m))]
    return cols


def _restriction_solve(m: int, n: int, target: Sequence[Fraction]):
    cols = _restriction_basis(m, n)
    phi_n, phi_m = euler_phi(n), len(cols)
    # augmented system: sum_j x_j cols[j] = target
    rows = [[cols[j][i] for j in range(phi_m)] + [Fraction(target[i])] for i in range(phi_n)]
    piv_cols = []
    r = 0
    for c in range(phi_m):
        p = next((i for i in range(r, phi_n) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(phi_n):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv_cols.append(c)
        r += 1
    if any(rows[i][-1] != 0 for i in range(r, phi_n)):
        return None
    sol = [Fraction(0)] * phi_m
    for i, c in enumerate(piv_cols):
        sol[c] = rows[i][-1]
    return sol


def zeta(n: int, e: int = 1) -> CyclotomicNumber:
    return CyclotomicNumber.zeta(n, e)


def embed_and_galois(a: CyclotomicNumber, target_conductor: int, galois_exponent: int = 1) -> CyclotomicNumber:
    """Embed ``a`` into Q(zeta_target) and then apply zeta -> zeta^galois_exponent."""
    if target_conductor % a.conductor:
        raise ConductorMismatch(f"conductor {a.conductor} does not divide {target_conductor}")
    if math.gcd(galois_exponent, a.conductor) != 1:
        raise InvalidGaloisExponent(f"{galois_exponent} is not coprime to {a.conductor}")
    lifted = a.lift(target_conductor)
    g = galois_exponent % target_conductor
    if math.gcd(g, target_conductor) != 1:
        # adjust by a multiple of the source conductor so the exponent is a unit mod target
        m = a.conductor
        g = next(x for x in range(g, g + m * target_conductor, m) if math.gcd(x, target_conductor) == 1)
    return lifted.galois(g)


def to_complex(a: CyclotomicNumber, precision_bits: int = 53):
    """Complex value of ``a`` with zeta_n = exp(2 pi i / n).

    Returns a Python complex for precision_bits <= 53 and an mpmath mpc otherwise.
    """
    n = a.conductor
    if precision_bits <= 53:
        total = 0j
        for j, c in enumerate(a._num):
            if c:
                total += c * cmath.exp(2j * math.pi * j / n)
        return total / a._den
    import mpmath

    with mpmath.workprec(precision_bits + 16):
        total = mpmath.mpc(0)
        for j, c in enumerate(a._num):
            if c:
                total += c * mpmath.expjpi(mpmath.mpf(2 * j) / n)
        total /= a._den
    return total
