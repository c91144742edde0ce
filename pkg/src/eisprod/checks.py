"""Invariant suites run by ``eisprod check``: numerical oracles, Hecke stability, parity."""
from __future__ import annotations

from fractions import Fraction

from .eisenstein import (
    EisensteinSymbol, eisenstein_family, lattice_sum_numeric, modularity_check, required_truncation,
)
from .hecke import hecke_stability_check
from .modgroup import S
from .qseries import series_eval

LATTICE_TAUS = (1j, 0.3 + 1.1j)
MODULARITY_TAU = 0.2 + 0.9j


def lattice_agreement(k: int, N: int, tol: float = 1e-8, cutoff: int = 40, method: str = "rows", perturb=None):
    """Worst |lattice - series| over all indices and test points.

    ``perturb`` maps an expansion to a modified one (negative controls).
    """
    fam = eisenstein_family(k, N, required_truncation(k, N, LATTICE_TAUS[0], 1e-14) + 40)
    worst = 0.0
    for v in fam.indices:
        sym = EisensteinSymbol(k, N, v)
        f = fam[v] if perturb is None else perturb(fam[v])
        for tau in LATTICE_TAUS:
            a, tail = lattice_sum_numeric(sym, tau, cutoff, method=method)
            b, st = series_eval(f, tau)
            if tail + st > tol / 10:
                raise ValueError(f"oracle tails too large for tol={tol}: {tail + st:.2e}")
            worst = max(worst, abs(a - b))
    return {"k": k, "N": N, "worst": worst, "passed": worst <= tol}


def modularity(k: int, N: int, tol: float = 1e-8, perturb=None):
    T = required_truncation(k, N, MODULARITY_TAU)
    fam = eisenstein_family(k, N, T)
    exps = None if perturb is None else {v: perturb(e) for v, e in fam.expansions.items()}
    rep = modularity_check(fam, S, MODULARITY_TAU, tol, expansions=exps)
    return {"k": k, "N": N, "worst": max(rep.discrepancies.values()), "passed": rep.all_passed}


def bump_first_coefficient(f):
    """Negative control: add 1/1000 to the first non-constant coefficient."""
    from .qseries import QExpansion

    c = dict(f.coeffs)
    c[1] = f[1] + Fraction(1, 1000)
    return QExpansion(f.width, f.conductor, c, f.truncation)


def oracle_suite(tol: float = 1e-8) -> dict:
    results = []
    for k in (3, 4, 5, 6):
        for N in (1, 2, 3):
            r = lattice_agreement(k, N, tol)
            r["check"] = "lattice"
            results.append(r)
    for k in (1, 2):
        for N in (2, 3, 4, 5):
            r = modularity(k, N, tol)
            r["check"] = "modularity"
            results.append(r)
    controls = []
    r = lattice_agreement(4, 2, tol, perturb=bump_first_coefficient)
    r["check"] = "lattice-negative-control"
    controls.append(r)
    for k in (1, 2):
        r = modularity(k, 3, tol, perturb=bump_first_coefficient)
        r["check"] = "modularity-negative-control"
        controls.append(r)
    ok = all(r["passed"] for r in results) and not any(r["passed"] for r in controls)
    return {"suite": "oracles", "passed": ok, "results": results, "negative_controls": controls}


def hecke_suite() -> dict:
    results = []
    for k in (1, 2, 3, 4):
        for N in (1, 2, 3):
            for M in (2, 3):
                rep = hecke_stability_check(k, N, M)
                results.append({"k": k, "N": N, "M": M, "rows": rep.rows_checked, "passed": rep.passed})
    return {"suite": "hecke", "passed": all(r["passed"] for r in results), "results": results}


def parity_suite() -> dict:
    results = []
    for k in (1, 2, 3, 4, 5):
        for N in (1, 2, 3, 4, 5):
            fam = eisenstein_family(k, N, 3 * N)
            results.append({"k": k, "N": N, "passed": fam.check_parity()})
    return {"suite": "parity", "passed": all(r["passed"] for r in results), "results": results}


SUITES = {"oracles": oracle_suite, "hecke": hecke_suite, "parity": parity_suite}
