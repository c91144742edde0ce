"""Exact span membership and rank for families of q-expansions.

Pivots are proposed by elimination over F_p and then confirmed exactly:
the pivot minor is nonsingular mod p (hence over the field), and every
claimed membership is checked by recomputing the combination exactly.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .exactmath import CyclotomicNumber, lcm
from .linalg import ModularMap, SquareSolver, exact_column_profile, modular_profile, solve
from .qseries import QExpansion

__all__ = ["SeriesSpan"]


class SeriesSpan:
    """Span of the columns ``cols`` restricted to exponent indices ``rows``.

    All columns must share one width; ``rows`` is a sorted list of exponent
    indices (in that width) at which the coefficients are compared.
    """

    def __init__(self, cols: Sequence[QExpansion], rows: Sequence[int], conductor: int | None = None):
        if not cols:
            raise ValueError("empty column list")
        self.width = cols[0].width
        if any(c.width != self.width for c in cols):
            raise ValueError("columns must share one width")
        self.rows = list(rows)
        n = conductor or lcm(*(c.conductor for c in cols))
        self.conductor = n
        self.cols = [c.lift_conductor(n) for c in cols]
        self._profile = None
        self._solver = None
        self._mmap = None

    # -------------------------------------------------------------------------
    def _modular_column(self, f: QExpansion, mm: ModularMap):
        n = f.conductor
        p = mm.p
        pw = mm.powers(n)
        dinv = pow(f._den % p, -1, p)
        out = []
        for m in self.rows:
            r = f._rows.get(m)
            if r is None:
                out.append(0)
            else:
                out.append(sum(a * b for a, b in zip(r, pw)) % p * dinv % p)
        return out

    def _compute_profile(self):
        skip = 0
        while True:
            mm = ModularMap(self.conductor, skip)
            try:
                mat = np.array([self._modular_column(c, mm) for c in self.cols], dtype=np.int64).T
                if mat.size == 0:
                    mat = np.zeros((len(self.rows), len(self.cols)), dtype=np.int64)
                pc, pr = modular_profile(mat, mm.p)
                break
            except ZeroDivisionError:
                skip += 1
        self._mmap = mm
        self._profile = (pc, pr)
        return pc, pr

    def entry(self, i_row: int, j: int) -> CyclotomicNumber:
        f = self.cols[j]
        m = self.rows[i_row]
        r = f._rows.get(m)
        if r is None:
            return CyclotomicNumber.from_rational(0, self.conductor)
        return CyclotomicNumber._make(self.conductor, r, f._den)

    @property
    def pivots(self):
        if self._profile is None:
            self._compute_profile()
        return self._profile

    def _square(self):
        if self._solver is None:
            pc, pr = self.pivots
            sq = [[self.entry(i, j) for j in pc] for i in pr]
            self._solver = SquareSolver(sq) if pc else None
        return self._solver

    def combination(self, coeffs: dict) -> QExpansion:
        acc = None
        for j, x in coeffs.items():
            if not x:
                continue
            term = self.cols[j].scale(x)
            acc = term if acc is None else acc + term
        if acc is None:
            c = self.cols[0]
            return QExpansion.zero(c.width, self.conductor, c.truncation)
        return acc

    def _restricted_equal(self, f: QExpansion, g: QExpansion) -> bool:
        d = (f - g)
        return not any(m in d._rows for m in self.rows)

    def _try(self, target: QExpansion):
        pc, pr = self.pivots
        if not pc:
            return {} if all(target[m].is_zero() for m in self.rows) else None
        solver = self._square()
        b = [target[self.rows[i]] for i in pr]
        x = solver.solve(b)
        coeffs = {j: xi for j, xi in zip(pc, x) if xi}
        if self._restricted_equal(self.combination(coeffs), target):
            return coeffs
        return None

    def express(self, target: QExpansion):
        """Exact coefficients {column: value} with target = sum, on ``rows``; None if impossible."""
        target = target.lift_width(self.width) if target.width != self.width else target
        n = lcm(self.conductor, target.conductor)
        if n != self.conductor:
            # target needs a larger field: the span over Q(zeta_n) is what we test
            return self._rebuilt(n).express(target)
        if target.truncation <= max(self.rows, default=-1):
            raise ValueError("target is not known on all comparison rows")
        got = self._try(target)
        if got is not None:
            return got
        if self.rank_is_modular():
            return None
        return self._exact_express(target)

    def _rebuilt(self, n):
        return SeriesSpan(self.cols, self.rows, n)

    _rank_certified = None

    def rank_is_modular(self) -> bool:
        """True when every column lies in the span of the modular pivots (checked exactly)."""
        if self._rank_certified is None:
            pc, _ = self.pivots
            pset = set(pc)
            ok = True
            for j, c in enumerate(self.cols):
                if j in pset:
                    continue
                if self._try(c) is None:
                    ok = False
                    break
            self._rank_certified = ok
        return self._rank_certified

    def rank(self) -> int:
        if self.rank_is_modular():
            return len(self.pivots[0])
        pcs, _ = self._exact_profile()
        return len(pcs)

    def _exact_profile(self):
        columns = [[self.entry(i, j) for i in range(len(self.rows))] for j in range(len(self.cols))]
        return exact_column_profile(columns, len(self.rows))

    def _exact_express(self, target: QExpansion):
        mat = [[self.entry(i, j) for j in range(len(self.cols))] for i in range(len(self.rows))]
        rhs = [target[m] for m in self.rows]
        x = solve(mat, rhs)
        if x is None:
            return None
        return {j: xi for j, xi in enumerate(x) if xi}

    def independent_columns(self) -> list[int]:
        if self.rank_is_modular():
            return list(self.pivots[0])
        return self._exact_profile()[0]
