"""Quantitative checks on computed fields: decay, frequency, axis traces, derivative envelopes."""

from .analytic import BranchSet, CauchyFit, UnreliableDerivativeWarning, branch_set, cauchy_bound_fit, spectral_tail
from .decay import DecayFit, decay_exponent, gradient_magnitude, max_principle_check
from .frequency import FrequencyProfile, InequalityReport, frequency_function, poincare_ratio, sobolev_ratio

__all__ = [
    "BranchSet",
    "CauchyFit",
    "UnreliableDerivativeWarning",
    "branch_set",
    "cauchy_bound_fit",
    "spectral_tail",
    "DecayFit",
    "decay_exponent",
    "gradient_magnitude",
    "max_principle_check",
    "FrequencyProfile",
    "InequalityReport",
    "frequency_function",
    "poincare_ratio",
    "sobolev_ratio",
]
