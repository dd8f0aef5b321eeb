"""Spectral-radial Dirichlet solver for q-valued Poisson problems."""

from .radial import radial_mode_solve, solve_modes
from .reference import direct_fd_reference
from .solver import PoissonProblem, SolveReport, forbidden_energy, solve_dirichlet
from .spectrum import ModeSpectrum, analyze, synthesize
from .weak import weak_residual_unfolded

__all__ = [
    "radial_mode_solve",
    "solve_modes",
    "direct_fd_reference",
    "PoissonProblem",
    "SolveReport",
    "forbidden_energy",
    "solve_dirichlet",
    "ModeSpectrum",
    "analyze",
    "synthesize",
    "weak_residual_unfolded",
]
