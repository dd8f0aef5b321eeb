"""Numerical tools for q-valued (branched) solutions of Poisson-type and small-data
quasilinear problems on a cylinder B_1 x T^{n-2}."""

from . import diagnostics, mv_core, nonlinear, poisson, unfold
from .errors import BranchSolveError
from .mv_core import Grid, SheetedField

__version__ = "0.1.0"

__all__ = ["diagnostics", "mv_core", "nonlinear", "poisson", "unfold", "BranchSolveError", "Grid", "SheetedField"]
