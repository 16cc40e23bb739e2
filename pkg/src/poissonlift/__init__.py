"""Exact Poisson tensors on tangent bundles: lifts, Casimirs, tables and dynamics."""

from .errors import PoissonLiftError
from .exactpoly import Poly, VarContext, parse
from .poisson_core import IdentityReport, OneForm, PoissonTensor, VecField

__all__ = ["IdentityReport", "OneForm", "PoissonLiftError", "PoissonTensor", "Poly", "VarContext", "VecField", "parse"]
__version__ = "0.1.0"
