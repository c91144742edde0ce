"""Exact linear algebra over Q(zeta_n), with modular shortcuts.

Exact routines work on lists of rows of CyclotomicNumber.  The modular
routines map Q(zeta_n) to F_p for a prime p = 1 mod n (zeta_n -> a primitive
n-th root of unity mod p); they only ever *propose* pivots, and every answer
that leaves this module is confirmed by exact arithmetic.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .exactmath import CyclotomicNumber, lcm, prime_factors

__all__ = [
    "rank", "nullspace", "solve", "SquareSolver", "ModularMap", "modular_profile", "exact_column_profile",
]

ZERO = CyclotomicNumber.from_rational(0)
ONE = CyclotomicNumber.from_rational(1)


def _pick_pivot(rows, col, start):
    best = None
    best_h = None
    for i in range(start, len(rows)):
        x = rows[i][col]
        if x:
            h = x.height()
            if best is None or h < best_h:
                best, best_h = i, h
    return best


def row_echelon(rows: Sequence[Sequence[CyclotomicNumber]], ncols: int | None = None):
    """Reduced row echelon form; returns (rows, pivot_columns)."""
    rows = [list(r) for r in rows]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = _pick_pivot(rows, c, r)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [x * inv if x else x for x in rows[r]]
        for i in range(len(rows)):
            if i != r:
                f = rows[i][c]
                if f:
                    rows[i] = [x - f * y if y else x for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(rows) -> int:
    if not rows:
        return 0
    return len(row_echelon(rows)[1])


def nullspace(rows, ncols: int):
    """Basis of {x : rows * x = 0}."""
    if not rows:
        return [[ONE if i == j else ZERO for i in range(ncols)] for j in range(ncols)]
    red, pivots = row_echelon(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [ZERO] * ncols
        x[f] = ONE
        for i, pc in enumerate(pivots):
            x[pc] = -red[i][f]
        basis.append(x)
    return basis


def solve(rows, rhs):
    """One solution x of rows * x = rhs, or None."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = row_echelon(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [ZERO] * ncols
    for i, pc in enumerate(pivots):
        x[pc] = red[i][ncols]
    return x


class SquareSolver:
    """Exact LU factorization of a nonsingular square matrix over Q(zeta_n)."""

    def __init__(self, square):
        n = len(square)
        a = [list(r) for r in square]
        perm = list(range(n))
        for c in range(n):
            p = _pick_pivot(a, c, c)
            if p is None:
                raise ZeroDivisionError("matrix is singular")
            a[c], a[p] = a[p], a[c]
            perm[c], perm[p] = perm[p], perm[c]
            inv = a[c][c].inverse()
            for i in range(c + 1, n):
                if a[i][c]:
                    f = a[i][c] * inv
                    a[i][c] = f
                    row_c = a[c]
                    row_i = a[i]
                    for j in range(c + 1, n):
                        if row_c[j]:
                            row_i[j] = row_i[j] - f * row_c[j]
        self.n = n
        self.lu = a
        self.perm = perm
        self.diag_inv = [a[i][i].inverse() for i in range(n)]

    def solve(self, b):
        n = self.n
        y = [b[self.perm[i]] for i in range(n)]
        for i in range(n):
            row = self.lu[i]
            acc = y[i]
            for j in range(i):
                if row[j] and y[j]:
                    acc = acc - row[j] * y[j]
            y[i] = acc
        x = [ZERO] * n
        for i in range(n - 1, -1, -1):
            row = self.lu[i]
            acc = y[i]
            for j in range(i + 1, n):
                if row[j] and x[j]:
                    acc = acc - row[j] * x[j]
            x[i] = acc * self.diag_inv[i] if acc else ZERO
        return x


# ----------------------------------------------------------------------------
# modular images

def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class ModularMap:
    """Ring map Z[zeta_n][1/den] -> F_p with p = 1 mod n, p < 2^31."""

    def __init__(self, n: int, skip: int = 0):
        self.n = n
        start = (2 ** 31 - 1) // n * n + 1
        p = start
        found = 0
        while True:
            p -= n
            if p < 3:
                raise RuntimeError("no suitable prime")
            if _is_prime(p):
                if found == skip:
                    break
                found += 1
        self.p = p
        # primitive n-th root of unity
        for g in range(2, p):
            w = pow(g, (p - 1) // n, p)
            if all(pow(w, n // q, p) != 1 for q in prime_factors(n)):
                break
        self.omega = w
        self._cache = {}

    def powers(self, m: int):
        """omega_m^j for j < phi(m) where zeta_m = zeta_n^(n/m)."""
        got = self._cache.get(m)
        if got is None:
            w = pow(self.omega, self.n // m, self.p)
            got = [pow(w, j, self.p) for j in range(max(1, _phi(m)))]
            self._cache[m] = got
        return got

    def image(self, x: CyclotomicNumber) -> int:
        if self.n % x.conductor:
            raise ValueError("conductor does not divide the modulus conductor")
        p = self.p
        pw = self.powers(x.conductor)
        s = sum(a * b for a, b in zip(x.numerators, pw)) % p
        if s == 0:
            return 0
        den = x.denominator % p
        if den == 0:
            raise ZeroDivisionError("denominator vanishes modulo p")
        return s * pow(den, -1, p) % p

    def image_rows(self, num_rows: Sequence[Sequence[int]], den: int, conductor: int) -> list[int]:
        p = self.p
        pw = self.powers(conductor)
        dinv = pow(den % p, -1, p)
        return [sum(a * b for a, b in zip(r, pw)) % p * dinv % p for r in num_rows]


def _phi(m):
    from .exactmath import euler_phi
    return euler_phi(m)


def modular_profile(mat: np.ndarray, p: int):
    """Gauss-Jordan over F_p on an (R x C) int64 matrix.

    Returns (pivot_columns, pivot_rows): the leftmost maximal set of
    independent columns and rows making the corresponding minor nonsingular.
    """
    a = np.array(mat, dtype=np.int64) % p
    R, C = a.shape
    row_ids = list(range(R))
    pc, pr = [], []
    r = 0
    for c in range(C):
        if r == R:
            break
        col = a[r:, c]
        nz = np.nonzero(col)[0]
        if len(nz) == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
            row_ids[r], row_ids[i] = row_ids[i], row_ids[r]
        inv = pow(int(a[r, c]), -1, p)
        a[r] = a[r] * inv % p
        f = a[:, c].copy()
        f[r] = 0
        nzr = np.nonzero(f)[0]
        if len(nzr):
            a[nzr] = (a[nzr] - (f[nzr, None] * a[r][None, :]) % p) % p
        pc.append(c)
        pr.append(row_ids[r])
        r += 1
    return pc, pr


def exact_column_profile(columns, nrows: int):
    """Leftmost maximal independent subset of columns, computed exactly.

    Returns (pivot_columns, pivot_rows).  Incremental: each new column is
    reduced against the current echelon basis.
    """
    basis = []  # list of (pivot_row, reduced column)
    pcs, prs = [], []
    for ci, col in enumerate(columns):
        v = list(col)
        for pr, b in basis:
            f = v[pr]
            if f:
                v = [x - f * y if y else x for x, y in zip(v, b)]
        best = None
        for i, x in enumerate(v):
            if x and (best is None or x.height() < v[best].height()):
                best = i
        if best is None:
            continue
        inv = v[best].inverse()
        v = [x * inv if x else x for x in v]
        # keep basis fully reduced in the new pivot row
        basis = [(pr, [x - b[best] * y if y else x for x, y in zip(b, v)] if b[best] else b) for pr, b in basis]
        basis.append((best, v))
        pcs.append(ci)
        prs.append(best)
    return pcs, prs
