"""Exact Fourier expansions of level-N Eisenstein series and of their products.

Main entry points: ``eisenstein_family``, ``express`` / ``verify_certificate``,
``theorem_bounds`` and the ``eisprod`` command line tool.
"""
from .exactmath import CyclotomicNumber, zeta
from .qseries import QExpansion, eta_quotient, series_mul, series_substitute
from .modgroup import GroupElement, IndexVector, Gamma0, Gamma1, GammaN, S, T
from .eisenstein import EisensteinSymbol, EisensteinFamily, eisenstein_expansion, eisenstein_family
from .hecke import classical_hecke, hecke_image, hecke_stability_check
from .solver import (
    BoundRequest, ExpressionCertificate, NoSolution, cusp_expansion, express, sturm_bound, theorem_bounds,
    verify_certificate, span_rank,
)

__version__ = "0.1.0"
