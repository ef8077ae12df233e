"""
Multiple Laguerre Lab Package

Exact and numerical verification of the combinatorial, generating-function,
Hankel total-positivity and moment properties of the multiple Laguerre
polynomials of the first kind.
"""

__version__ = "1.0.0"
__author__ = "Multiple Laguerre Lab Team"

from .polyring import Polynomial
from .laguerre import LaguerreCache, MultiIndex, egf_laguerre, explicit_laguerre
from .digraphs import LayerGraphSpec, combinatorial_laguerre, enumerate_digraphs
from .hankel import HankelSpec, MinorReport, verify_all_minors
from .stieltjes import check_moment, check_orthogonality, moment_integral

__all__ = [
    "Polynomial",
    "MultiIndex",
    "LaguerreCache",
    "explicit_laguerre",
    "egf_laguerre",
    "LayerGraphSpec",
    "enumerate_digraphs",
    "combinatorial_laguerre",
    "HankelSpec",
    "MinorReport",
    "verify_all_minors",
    "moment_integral",
    "check_moment",
    "check_orthogonality",
]
