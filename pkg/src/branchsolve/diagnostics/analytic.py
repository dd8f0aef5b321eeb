"""Axis traces and y-derivative growth (Cauchy-type envelopes)."""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..mv_core.field import SheetedField
from ..unfold import unfold, y_derivatives

TAIL_LIMIT = 1e-8


class UnreliableDerivativeWarning(UserWarning):
    """Raised when a field has too much spectral energy near the y-Nyquist limit."""


@dataclass(frozen=True)
class BranchSet:
    y: tuple  # y-coordinate arrays
    trace: np.ndarray  # shape n_y (+ m)
    derivatives: dict  # order p -> list of d^p/dy_j^p trace, one per y-direction
    max_fourth_difference: float  # max |delta^4 trace| / dy^4 over directions


def branch_set(f: SheetedField) -> BranchSet:
    """Axis trace y -> u(0, y) and its spectral y-derivatives up to order 4."""
    grid = f.grid
    trace = unfold(f).data[0].mean(axis=0)
    derivs = {}
    current = [trace] * len(grid.n_y)
    for p in range(1, 5):
        current = [y_derivatives(grid, c, first_y_axis=0)[j] for j, c in enumerate(current)]
        derivs[p] = current
    fourth = 0.0
    for j, dy in enumerate(grid.dy):
        d4 = np.diff(np.concatenate([trace, np.take(trace, range(4), axis=j)], axis=j), n=4, axis=j)
        fourth = max(fourth, float(np.abs(d4).max()) / dy**4)
    return BranchSet(tuple(grid.y), trace, derivs, fourth)


@dataclass(frozen=True)
class CauchyFit:
    C_estimate: float
    orders: np.ndarray
    S: np.ndarray
    C: np.ndarray
    R: float
    tail_fraction: float
    warnings: list = field(default_factory=list)

    def to_csv(self) -> str:
        rows = ["p,S_p,C_p"] + [f"{p},{s:.17g},{c:.17g}" for p, s, c in zip(self.orders, self.S, self.C)]
        return "\n".join(rows) + "\n"


def _spectrum(grid, data):
    axes = tuple(range(3, 3 + len(grid.n_y)))
    return np.fft.fftn(data, axes=axes), axes


def spectral_tail(f: SheetedField) -> float:
    """Fraction of the y-spectral energy in modes with |z_j| > N_j / 3 in some direction."""
    grid = f.grid
    spec, axes = _spectrum(grid, f.data)
    energy = np.abs(spec) ** 2
    total = energy.sum()
    if total == 0:
        return 0.0
    mask = np.zeros(energy.shape, dtype=bool)
    for ax, N in zip(axes, grid.n_y):
        z = np.abs(np.fft.fftfreq(N, d=1.0 / N))
        shape = [1] * energy.ndim
        shape[ax] = N
        mask = mask | (z > N / 3).reshape(shape)
    return float(energy[np.broadcast_to(mask, energy.shape)].sum() / total)


def cauchy_bound_fit(f: SheetedField, p_max: int = 6, R: float = 0.25) -> CauchyFit:
    """S_p = max over |gamma| = p of sup |D_y^gamma f|, C_p = (S_p R^p / p!)^(1/p), C = max_p C_p."""
    if not (1 <= p_max <= 8):
        raise ValueError("p_max must lie in 1..8")
    if R <= 0:
        raise ValueError("R must be positive")
    grid = f.grid
    spec, axes = _spectrum(grid, f.data)
    ik = []
    for ax, kw, N in zip(axes, grid.wavenumbers(), grid.n_y):
        kk = kw.copy()
        if N % 2 == 0:
            kk[N // 2] = 0.0
        shape = [1] * spec.ndim
        shape[ax] = N
        ik.append((1j * kk).reshape(shape))
    S = np.zeros(p_max)
    for p in range(1, p_max + 1):
        best = 0.0
        for gamma in itertools.combinations_with_replacement(range(len(axes)), p):
            mult = 1.0
            for j in gamma:
                mult = mult * ik[j]
            d = np.fft.ifftn(spec * mult, axes=axes).real
            best = max(best, float(np.abs(d).max()))
        S[p - 1] = best
    orders = np.arange(1, p_max + 1)
    C = np.array([(s * R**p / math.factorial(p)) ** (1.0 / p) for p, s in zip(orders, S)])
    tail = spectral_tail(f)
    notes = []
    if tail > TAIL_LIMIT:
        msg = f"spectral tail fraction {tail:.3g} exceeds {TAIL_LIMIT:g}; high y-derivatives unreliable"
        warnings.warn(msg, UnreliableDerivativeWarning, stacklevel=2)
        notes.append(msg)
    return CauchyFit(float(C.max()), orders, S, C, R, tail, notes)
