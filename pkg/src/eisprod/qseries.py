"""Truncated q-expansions in q^(1/w) with cyclotomic coefficients.

A ``QExpansion`` of width ``w`` and truncation ``T`` stores the coefficients
of ``q^(m/w)`` for ``0 <= m < T``.  Coefficients live in Q(zeta_n) and are
held as integer coordinate rows over one shared denominator, so products can
be done with a single big-integer multiplication (Kronecker substitution).
"""
from __future__ import annotations

import cmath
import math
from functools import lru_cache
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import InvalidSubstitutionMatrix
from .exactmath import (
    CyclotomicNumber,
    _power_table,
    _reduce,
    euler_phi,
    lcm,
)

__all__ = ["QExpansion", "eta_quotient", "series_substitute", "series_eval"]


def _row_lift(row: Sequence[int], n: int, target: int) -> tuple[int, ...]:
    if n == target:
        return tuple(row)
    step = target // n
    table = _power_table(target)
    phi = euler_phi(target)
    out = [0] * phi
    for j, c in enumerate(row):
        if c:
            r = table[j * step]
            for i in range(phi):
                if r[i]:
                    out[i] += c * r[i]
    return tuple(out)


def _row_mul_zeta(row: Sequence[int], e: int, n: int) -> tuple[int, ...]:
    """row * zeta_n^e."""
    e %= n
    if e == 0:
        return tuple(row)
    table = _power_table(n)
    phi = len(row)
    out = [0] * phi
    for j, c in enumerate(row):
        if c:
            r = table[(j + e) % n]
            for i in range(phi):
                if r[i]:
                    out[i] += c * r[i]
    return tuple(out)


def _row_galois(row: Sequence[int], g: int, n: int) -> tuple[int, ...]:
    table = _power_table(n)
    phi = len(row)
    out = [0] * phi
    for j, c in enumerate(row):
        if c:
            r = table[(j * g) % n]
            for i in range(phi):
                if r[i]:
                    out[i] += c * r[i]
    return tuple(out)


def _ratstr(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


class QExpansion:
    """Truncated series sum_{0 <= m < T} a_m q^(m/w)."""

    __slots__ = ("width", "conductor", "truncation", "_rows", "_den")

    def __init__(self, width: int, conductor: int, coeffs: Mapping | Sequence = (), truncation: int | None = None):
        if width < 1 or conductor < 1:
            raise ValueError("width and conductor must be positive")
        if isinstance(coeffs, Mapping):
            items = list(coeffs.items())
        else:
            items = list(enumerate(coeffs))
        if truncation is None:
            truncation = max((m for m, _ in items), default=-1) + 1
            truncation = max(truncation, 1)
        if truncation < 1:
            raise ValueError("truncation must be positive")
        vals = {}
        for m, c in items:
            if not 0 <= m < truncation:
                raise ValueError(f"exponent index {m} outside [0, {truncation})")
            c = CyclotomicNumber.coerce(c)
            if conductor % c.conductor:
                raise ValueError(f"coefficient conductor {c.conductor} does not divide {conductor}")
            c = c.lift(conductor)
            if not c.is_zero():
                vals[m] = c
        den = lcm(*(c.denominator for c in vals.values())) if vals else 1
        rows = {m: tuple(a * (den // c.denominator) for a in c.numerators) for m, c in vals.items()}
        self._init(width, conductor, truncation, rows, den)

    def _init(self, width, conductor, truncation, rows, den):
        g = den
        for r in rows.values():
            if g == 1:
                break
            g = math.gcd(g, *r)
        if g > 1:
            rows = {m: tuple(a // g for a in r) for m, r in rows.items()}
            den //= g
        self.width = width
        self.conductor = conductor
        self.truncation = truncation
        self._rows = rows
        self._den = den

    @classmethod
    def _make(cls, width, conductor, truncation, rows, den=1) -> "QExpansion":
        obj = cls.__new__(cls)
        rows = {m: tuple(r) for m, r in rows.items() if m < truncation and any(r)}
        if den < 0:
            rows = {m: tuple(-a for a in r) for m, r in rows.items()}
            den = -den
        obj._init(width, conductor, truncation, rows, den)
        return obj

    @classmethod
    def constant(cls, c, truncation: int = 1, width: int = 1) -> "QExpansion":
        c = CyclotomicNumber.coerce(c)
        return cls(width, c.conductor, {0: c}, truncation)

    @classmethod
    def zero(cls, width: int = 1, conductor: int = 1, truncation: int = 1) -> "QExpansion":
        return cls._make(width, conductor, truncation, {}, 1)

    # views -------------------------------------------------------------------
    @property
    def coeffs(self) -> dict[int, CyclotomicNumber]:
        return {m: CyclotomicNumber._make(self.conductor, r, self._den) for m, r in sorted(self._rows.items())}

    def __getitem__(self, m: int) -> CyclotomicNumber:
        if not 0 <= m < self.truncation:
            raise IndexError(f"coefficient {m} is beyond the truncation {self.truncation}")
        r = self._rows.get(m)
        if r is None:
            return CyclotomicNumber.from_rational(0, self.conductor)
        return CyclotomicNumber._make(self.conductor, r, self._den)

    def coefficient_at(self, exponent) -> CyclotomicNumber:
        """Coefficient of q^exponent for a rational exponent."""
        e = Fraction(exponent) * self.width
        if e.denominator != 1:
            return CyclotomicNumber.from_rational(0, self.conductor)
        return self[int(e)]

    def support(self) -> list[int]:
        return sorted(self._rows)

    @property
    def precision(self) -> Fraction:
        """Exponent bound: coefficients are exact for exponents below this."""
        return Fraction(self.truncation, self.width)

    def valuation(self):
        """Smallest exponent with nonzero coefficient, or None."""
        if not self._rows:
            return None
        return Fraction(min(self._rows), self.width)

    def is_zero(self) -> bool:
        return not self._rows

    def __repr__(self):
        terms = []
        for m, c in list(self.coeffs.items())[:6]:
            e = Fraction(m, self.width)
            terms.append(f"({c!r})*q^{e}")
        more = " + ..." if len(self._rows) > 6 else ""
        return f"QExpansion[w={self.width}, n={self.conductor}]({' + '.join(terms) or '0'}{more} + O(q^{self.precision}))"

    # width / conductor management -------------------------------------------
    def lift_width(self, w: int) -> "QExpansion":
        if w == self.width:
            return self
        if w % self.width:
            raise ValueError(f"width {self.width} does not divide {w}")
        k = w // self.width
        return QExpansion._make(w, self.conductor, self.truncation * k, {m * k: r for m, r in self._rows.items()}, self._den)

    def lift_conductor(self, n: int) -> "QExpansion":
        if n == self.conductor:
            return self
        if n % self.conductor:
            raise ValueError(f"conductor {self.conductor} does not divide {n}")
        rows = {m: _row_lift(r, self.conductor, n) for m, r in self._rows.items()}
        return QExpansion._make(self.width, n, self.truncation, rows, self._den)

    def normalized(self) -> "QExpansion":
        """Smallest width that represents the support and the truncation exactly."""
        g = math.gcd(self.width, self.truncation, *self._rows)
        if g == 1:
            return self
        return QExpansion._make(
            self.width // g, self.conductor, self.truncation // g,
            {m // g: r for m, r in self._rows.items()}, self._den,
        )

    def truncate(self, truncation: int) -> "QExpansion":
        if truncation > self.truncation:
            raise ValueError("cannot raise the truncation of a series")
        return QExpansion._make(self.width, self.conductor, truncation, self._rows, self._den)

    def truncate_exponent(self, bound) -> "QExpansion":
        """Keep exponents below ``bound`` (a rational)."""
        t = math.ceil(Fraction(bound) * self.width)
        return self.truncate(min(t, self.truncation))

    def project(self, w: int) -> "QExpansion":
        """Keep only the exponents lying in (1/w)Z."""
        step = self.width // math.gcd(self.width, w)
        if step == 1:
            return self
        return QExpansion._make(
            self.width, self.conductor, self.truncation,
            {m: r for m, r in self._rows.items() if m % step == 0}, self._den,
        )

    @staticmethod
    def _common(f: "QExpansion", g: "QExpansion"):
        w = lcm(f.width, g.width)
        n = lcm(f.conductor, g.conductor)
        return f.lift_width(w).lift_conductor(n), g.lift_width(w).lift_conductor(n)

    # arithmetic ----------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, QExpansion):
            try:
                other = QExpansion.constant(other, self.truncation, self.width)
            except TypeError:
                return NotImplemented
        a, b = QExpansion._common(self, other)
        T = min(a.truncation, b.truncation)
        da, db = a._den, b._den
        den = da * db // math.gcd(da, db)
        fa, fb = den // da, den // db
        rows = {}
        for m, r in a._rows.items():
            if m < T:
                rows[m] = [x * fa for x in r]
        for m, r in b._rows.items():
            if m < T:
                cur = rows.get(m)
                if cur is None:
                    rows[m] = [x * fb for x in r]
                else:
                    rows[m] = [x + y * fb for x, y in zip(cur, r)]
        return QExpansion._make(a.width, a.conductor, T, rows, den)

    __radd__ = __add__

    def __neg__(self):
        return QExpansion._make(self.width, self.conductor, self.truncation,
                                {m: tuple(-x for x in r) for m, r in self._rows.items()}, self._den)

    def __sub__(self, other):
        if not isinstance(other, QExpansion):
            other = QExpansion.constant(other, self.truncation, self.width)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "QExpansion":
        c = CyclotomicNumber.coerce(c)
        n = lcm(self.conductor, c.conductor)
        f = self.lift_conductor(n)
        c = c.lift(n)
        if c.is_rational():
            k = c.numerators[0]
            return QExpansion._make(f.width, n, f.truncation,
                                    {m: tuple(x * k for x in r) for m, r in f._rows.items()},
                                    f._den * c.denominator)
        crow = c.numerators
        rows = {}
        for m, r in f._rows.items():
            rows[m] = _reduce(_poly_mul(r, crow), n)
        return QExpansion._make(f.width, n, f.truncation, rows, f._den * c.denominator)

    def __mul__(self, other):
        if not isinstance(other, QExpansion):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        return series_mul(self, other)

    def __rmul__(self, other):
        return self.scale(other)

    def conjugate(self) -> "QExpansion":
        n = self.conductor
        if n <= 2:
            return self
        rows = {m: _row_galois(r, n - 1, n) for m, r in self._rows.items()}
        return QExpansion._make(self.width, n, self.truncation, rows, self._den)

    def galois(self, g: int) -> "QExpansion":
        n = self.conductor
        if math.gcd(g, n) != 1:
            raise ValueError(f"{g} is not a unit modulo {n}")
        rows = {m: _row_galois(r, g % n, n) for m, r in self._rows.items()}
        return QExpansion._make(self.width, n, self.truncation, rows, self._den)

    def substitute(self, matrix) -> "QExpansion":
        return series_substitute(self, matrix)

    def evaluate(self, tau, precision_bits: int = 53, growth: float = 12.0):
        return series_eval(self, tau, precision_bits, growth)

    # comparison ----------------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, QExpansion):
            return NotImplemented
        if self.precision != other.precision:
            return False
        a, b = QExpansion._common(self, other)
        return a._den == b._den and a._rows == b._rows

    def __hash__(self):
        f = self.normalized()
        return hash((f.precision, frozenset((Fraction(m, f.width), CyclotomicNumber._make(f.conductor, r, f._den))
                                            for m, r in f._rows.items())))

    def agrees_with(self, other: "QExpansion") -> bool:
        """Equality of coefficients below the common truncation."""
        return (self - other).is_zero()

    # serialization ---------------------------------------------------------------
    def to_json(self) -> dict:
        coeffs = []
        for m, r in sorted(self._rows.items()):
            coeffs.append([m, [_ratstr(Fraction(a, self._den)) for a in r]])
        return {"width": self.width, "conductor": self.conductor, "truncation": self.truncation, "coeffs": coeffs}

    @classmethod
    def from_json(cls, data: Mapping) -> "QExpansion":
        for key in ("width", "conductor", "truncation", "coeffs"):
            if key not in data:
                raise ValueError(f"missing field '{key}'")
        width, n, T = int(data["width"]), int(data["conductor"]), int(data["truncation"])
        phi = euler_phi(n)
        coeffs = {}
        for entry in data["coeffs"]:
            m, coords = entry
            if len(coords) != phi:
                raise ValueError(f"field 'coeffs': entry {m} has {len(coords)} coordinates, expected {phi}")
            coeffs[int(m)] = CyclotomicNumber(n, [Fraction(c) for c in coords])
        return cls(width, n, coeffs, T)


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


# ------------------------------------------------------------------------------
# multiplication via Kronecker substitution

def _pack(rows: Mapping[int, Sequence[int]], T: int, stride: int, nbytes: int) -> int:
    """Pack signed coefficients into one integer, slot (m*stride + j)."""
    size = T * stride * nbytes
    pos = bytearray(size)
    neg = bytearray(size)
    has_neg = False
    for m, r in rows.items():
        if m >= T:
            continue
        base = m * stride
        for j, c in enumerate(r):
            if c:
                off = (base + j) * nbytes
                if c > 0:
                    pos[off:off + nbytes] = c.to_bytes(nbytes, "little")
                else:
                    neg[off:off + nbytes] = (-c).to_bytes(nbytes, "little")
                    has_neg = True
    val = int.from_bytes(pos, "little")
    if has_neg:
        val -= int.from_bytes(neg, "little")
    return val


@lru_cache(maxsize=64)
def _offset_mask(nbytes: int, slots: int):
    # offset every slot by 2^(8 nbytes - 1) so that all slots become nonnegative
    half = 1 << (8 * nbytes - 1)
    offset = int.from_bytes(half.to_bytes(nbytes, "little") * slots, "little")
    return offset, (1 << (8 * nbytes * slots)) - 1


def kronecker_product_rows(ra: Mapping[int, Sequence[int]], rb: Mapping[int, Sequence[int]], T: int, n: int,
                           keep=None) -> dict[int, list[int]]:
    """Integer rows of the truncated product of two coordinate-row series.

    Both inputs use power-basis coordinates for Q(zeta_n); the result is
    reduced modulo Phi_n.  ``keep`` optionally restricts which output indices
    are reduced and returned.
    """
    if not ra or not rb:
        return {}
    phi = euler_phi(n)
    stride = 2 * phi - 1
    ma = max((abs(x) for r in ra.values() for x in r), default=0)
    mb = max((abs(x) for r in rb.values() for x in r), default=0)
    terms = min(len(ra), len(rb)) * phi
    bits = ma.bit_length() + mb.bit_length() + terms.bit_length() + 2
    nbytes = (bits + 7) // 8
    A = _pack(ra, T, stride, nbytes)
    B = _pack(rb, T, stride, nbytes)
    P = A * B
    slots = T * stride
    half = 1 << (8 * nbytes - 1)
    offset, mask = _offset_mask(nbytes, slots)
    data = ((P + offset) & mask).to_bytes(slots * nbytes, "little")
    out = {}
    lo_a, lo_b = min(ra), min(rb)
    start = lo_a + lo_b
    frombytes = int.from_bytes
    for m in range(start, T):
        if keep is not None and m not in keep:
            continue
        base = m * stride * nbytes
        vals = [frombytes(data[base + j * nbytes: base + (j + 1) * nbytes], "little") - half for j in range(stride)]
        if any(vals):
            red = _reduce(vals, n)
            if any(red):
                out[m] = red
    return out


def series_mul(f: QExpansion, g: QExpansion, keep=None) -> QExpansion:
    a, b = QExpansion._common(f, g)
    T = min(a.truncation, b.truncation)
    rows = kronecker_product_rows(a._rows, b._rows, T, a.conductor, keep)
    return QExpansion._make(a.width, a.conductor, T, rows, a._den * b._den)


# ------------------------------------------------------------------------------

def series_substitute(f: QExpansion, matrix) -> QExpansion:
    """f(tau) -> f((a tau + b)/d) for an upper triangular [[a, b], [0, d]]."""
    try:
        (a, b), (c, d) = matrix
    except (TypeError, ValueError):
        raise InvalidSubstitutionMatrix("expected a 2x2 matrix [[a, b], [0, d]]") from None
    if c != 0 or a <= 0 or d <= 0:
        raise InvalidSubstitutionMatrix(f"matrix {matrix} is not upper triangular with positive diagonal")
    w = f.width
    dw = d * w
    n = lcm(f.conductor, dw)
    g = math.gcd(a, dw)
    a_red = a // g
    new_width = dw // g
    f = f.lift_conductor(n)
    shift = n // dw  # zeta_{dw} = zeta_n^shift
    rows = {}
    for m, r in f._rows.items():
        rows[a_red * m] = _row_mul_zeta(r, b * m * shift, n) if b else r
    return QExpansion._make(new_width, n, a_red * f.truncation, rows, f._den)


def series_eval(f: QExpansion, tau, precision_bits: int = 53, growth: float = 12.0):
    """Evaluate the truncated series at tau.

    Returns ``(value, tail)`` where ``tail`` estimates the omitted part from
    the size of the retained coefficients, assuming |a_m| <= C (m+1)^growth.
    """
    tau = complex(tau)
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half plane")
    w = f.width
    n = f.conductor
    mags = {}
    if precision_bits <= 53:
        roots = [cmath.exp(2j * math.pi * j / n) for j in range(euler_phi(n))]
        base = cmath.exp(2j * math.pi * tau / w)
        total = 0j
        for m, r in f._rows.items():
            c = sum(x * roots[j] for j, x in enumerate(r) if x) / f._den
            mags[m] = abs(c)
            total += c * base ** m
        value = total
    else:
        import mpmath

        with mpmath.workprec(precision_bits + 20):
            roots = [mpmath.expjpi(mpmath.mpf(2 * j) / n) for j in range(euler_phi(n))]
            base = mpmath.exp(2j * mpmath.pi * mpmath.mpc(tau) / w)
            total = mpmath.mpc(0)
            for m, r in f._rows.items():
                c = mpmath.fsum(x * roots[j] for j, x in enumerate(r) if x) / f._den
                mags[m] = float(abs(c))
                total += c * base ** m
            value = total
    tail = _tail_bound(mags, f.truncation, math.exp(-2 * math.pi * tau.imag / w), growth)
    return value, tail


def _tail_bound(mags: Mapping[int, float], T: int, r: float, growth: float) -> float:
    if not mags:
        # no information: use the truncation alone with unit coefficients
        C = 1.0
    else:
        lo = T // 2
        window = [v / (m + 1) ** growth for m, v in mags.items() if m >= lo] or \
                 [v / (m + 1) ** growth for m, v in mags.items()]
        C = max(window) if window else 1.0
        C = max(C, max(mags.values()) / T ** growth)
    total = 0.0
    m = T
    while True:
        term = C * (m + 1) ** growth * r ** m
        total += term
        if term < 1e-40 * max(total, 1e-300) or m > T + 100000:
            break
        if m > T + 10 and term < 1e-60:
            break
        m += 1
    return total


# ------------------------------------------------------------------------------

def eta_quotient(factors: Iterable[tuple[int, int]], prec: int) -> QExpansion:
    """prod eta(delta tau)^r with exponents below ``prec`` exact."""
    factors = [(int(dl), int(r)) for dl, r in factors]
    shift = Fraction(sum(dl * r for dl, r in factors), 24)
    if shift < 0:
        raise ValueError("eta quotient has a pole at infinity")
    w = shift.denominator
    a = shift.numerator
    T = prec * w
    # integer exponents j with w*j + a < T
    J = max(0, -(-(T - a) // w))
    p = [0] * J
    if J:
        p[0] = 1
    for dl, r in factors:
        for k in range(dl, J, dl):
            if r > 0:
                for _ in range(r):
                    for i in range(J - 1, k - 1, -1):
                        p[i] -= p[i - k]
            else:
                for _ in range(-r):
                    for i in range(k, J):
                        p[i] += p[i - k]
    rows = {w * j + a: (c,) for j, c in enumerate(p) if c}
    return QExpansion._make(w, 1, T, rows, 1)
