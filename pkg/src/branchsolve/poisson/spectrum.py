"""Fourier analysis in (theta_hat, y) of unfolded fields.

Coefficients are stored in FFT order with shape (n_rhat, n_theta_hat, *n_y):
axis 1 indexes the angular mode m, the trailing axes the y-modes z. The
half-node angular offset is folded into the coefficients, so
``u(rhat, theta_hat, y) = sum c[m, z](rhat) exp(i m theta_hat + i 2 pi z.y / rho)``
holds at the grid nodes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..mv_core.field import Grid
from ..unfold import UnfoldedField, mode_admissible


def _theta_phase(grid: Grid) -> np.ndarray:
    m = mode_numbers(grid.n_theta_hat)
    return np.exp(-1j * np.pi * m / grid.n_theta_hat)


def mode_numbers(n: int) -> np.ndarray:
    """Integer mode numbers in FFT order."""
    return np.fft.fftfreq(n, d=1.0 / n).round().astype(int)


@dataclass(frozen=True, eq=False)
class ModeSpectrum:
    grid: Grid
    coefficients: np.ndarray
    admissible_only: bool = False

    @property
    def m_values(self) -> np.ndarray:
        return mode_numbers(self.grid.n_theta_hat)

    @property
    def z_values(self) -> list:
        return [mode_numbers(N) for N in self.grid.n_y]

    def _index(self, z, m):
        z = np.atleast_1d(z)
        idx = [int(m) % self.grid.n_theta_hat]
        idx += [int(zj) % N for zj, N in zip(z, self.grid.n_y)]
        return idx

    def coefficient(self, z, m) -> np.ndarray:
        """Radial profile of mode (z, m)."""
        idx = self._index(z, m)
        return self.coefficients[(slice(None),) + tuple(idx)]

    def mode_energy(self) -> np.ndarray:
        """Per-mode energy sum over radial nodes of |c|^2, shape (n_theta_hat, *n_y)."""
        return (np.abs(self.coefficients) ** 2).sum(axis=0)

    def admissible_mask(self) -> np.ndarray:
        """Boolean mask over (m, z...) of modes passing mode_admissible."""
        g = self.grid
        m = self.m_values
        ok = np.array([mode_admissible(int(mm), None, g.q, g.k) for mm in m])
        return np.broadcast_to(ok.reshape((-1,) + (1,) * len(g.n_y)), (g.n_theta_hat, *g.n_y))

    def hermitian_defect(self) -> float:
        """max |c(-z,-m) - conj(c(z,m))| over non-Nyquist modes, relative to max |c|."""
        c = self.coefficients
        flipped = c
        for ax in range(1, c.ndim):
            flipped = np.roll(np.flip(flipped, axis=ax), 1, axis=ax)
        diff = np.abs(flipped - np.conj(c))
        mask = ~nyquist_mask(self.grid)
        scale = np.abs(c).max()
        if scale == 0:
            return 0.0
        return float(diff[:, mask].max() / scale)


def nyquist_mask(grid: Grid) -> np.ndarray:
    """True on modes that sit at a Nyquist frequency in any direction."""
    masks = []
    for N in (grid.n_theta_hat, *grid.n_y):
        v = np.zeros(N, dtype=bool)
        if N % 2 == 0 and N > 1:
            v[N // 2] = True
        masks.append(v)
    grids = np.meshgrid(*masks, indexing="ij")
    out = np.zeros(grids[0].shape, dtype=bool)
    for g in grids:
        out |= g
    return out


def analyze_array(grid: Grid, data: np.ndarray) -> np.ndarray:
    """Coefficient array of real data shaped (n_rhat, n_theta_hat, *n_y)."""
    axes = tuple(range(1, 2 + len(grid.n_y)))
    c = np.fft.fftn(data, axes=axes, norm="forward")
    shape = (1, -1) + (1,) * len(grid.n_y)
    return c * _theta_phase(grid).reshape(shape)


def synthesize_array(grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    axes = tuple(range(1, 2 + len(grid.n_y)))
    shape = (1, -1) + (1,) * len(grid.n_y)
    c = coeffs / _theta_phase(grid).reshape(shape)
    return np.fft.ifftn(c, axes=axes, norm="forward").real


def analyze(g: UnfoldedField) -> ModeSpectrum:
    """Discrete Fourier coefficients in theta_hat and y at every radial node."""
    if g.is_vector:
        raise ValueError("analyze expects a scalar field")
    return ModeSpectrum(g.grid, analyze_array(g.grid, g.data))


def synthesize(s: ModeSpectrum) -> UnfoldedField:
    return UnfoldedField(s.grid, synthesize_array(s.grid, s.coefficients))
