"""Ball and sphere integrals centred on the branch axis.

Angular integrals (over theta and all sheets) are taken on the unfolded grid,
where sum_l int dtheta = q int dtheta_hat. The resulting densities of (r, y)
are even smooth functions of rhat = r^(1/q), so they are interpolated with
cubic splines in s = rhat^2 and trigonometric
interpolation in y, then integrated with Gauss-Legendre rules in polar
coordinates (s, beta) around the centre: r = s cos(beta), y = y0 + s sin(beta) e.
"""

from __future__ import annotations

import numpy as np
from scipy.interpolate import CubicSpline

from ..mv_core.field import Grid, extrapolate_axis

N_S = 48
N_BETA = 64
N_PHI = 16


class RadialYDensity:
    """Smooth interpolant of a density D(rhat_a, y) sampled on the unfolded (rhat, y) grid."""

    def __init__(self, grid: Grid, values: np.ndarray):
        self.grid = grid
        ny = len(grid.n_y)
        axes = tuple(range(1, 1 + ny))
        coef = np.fft.fftn(values, axes=axes, norm="forward")
        self.shape_y = coef.shape[1:]
        flat = coef.reshape(coef.shape[0], -1)
        s = grid.rhat**2
        self._re = CubicSpline(s, flat.real, axis=0)
        self._im = CubicSpline(s, flat.imag, axis=0)
        self._kw = grid.wavenumbers()

    def __call__(self, r, ys):
        """Evaluate at points r (array) and y-coordinates ys (list of arrays of the same shape)."""
        r = np.asarray(r, dtype=float)
        s = np.clip(r, 0.0, 1.0) ** (2.0 / self.grid.q)
        c = self._re(s.ravel()) + 1j * self._im(s.ravel())  # (P, n_modes)
        phase = np.zeros((s.size, c.shape[1]))
        mode_grids = np.meshgrid(*self._kw, indexing="ij")
        for kj, yj in zip(mode_grids, ys):
            phase = phase + np.asarray(yj, dtype=float).ravel()[:, None] * kj.ravel()[None, :]
        vals = (c * np.exp(1j * phase)).sum(axis=1).real
        return vals.reshape(r.shape)


def _directions(n_y_dims):
    """Unit directions in R^{n-2} and their weights (measure of S^{n-3})."""
    if n_y_dims == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if n_y_dims == 2:
        phi = 2 * np.pi * np.arange(N_PHI) / N_PHI
        return np.stack([np.cos(phi), np.sin(phi)], axis=1), np.full(N_PHI, 2 * np.pi / N_PHI)
    raise NotImplementedError("ball quadrature supports n <= 4")


def _beta_rule():
    x, w = np.polynomial.legendre.leggauss(N_BETA)
    beta = 0.25 * np.pi * (x + 1.0)  # [0, pi/2]
    return beta, 0.25 * np.pi * w


def sphere_integral(density: RadialYDensity, y0, rho: float) -> float:
    """int over the sphere of radius rho about (0, y0) of the angular density."""
    grid = density.grid
    ndy = len(grid.n_y)
    n = grid.n
    y0 = np.atleast_1d(np.asarray(y0, dtype=float))
    beta, wb = _beta_rule()
    dirs, wd = _directions(ndy)
    total = 0.0
    for e, we in zip(dirs, wd):
        r = rho * np.cos(beta)
        ys = [y0[j] + rho * np.sin(beta) * e[j] for j in range(ndy)]
        vals = density(r, ys)
        jac = np.cos(beta) * np.sin(beta) ** (n - 3)
        total += we * np.sum(wb * jac * vals)
    return float(rho ** (n - 1) * total)


def ball_integral(density: RadialYDensity, y0, rho: float) -> float:
    """int over the ball of radius rho about (0, y0) of the angular density."""
    grid = density.grid
    ndy = len(grid.n_y)
    n = grid.n
    y0 = np.atleast_1d(np.asarray(y0, dtype=float))
    xs, ws = np.polynomial.legendre.leggauss(N_S)
    s = 0.5 * rho * (xs + 1.0)
    w_s = 0.5 * rho * ws
    beta, wb = _beta_rule()
    S, Bt = np.meshgrid(s, beta, indexing="ij")
    W = np.outer(w_s, wb)
    dirs, wd = _directions(ndy)
    total = 0.0
    for e, we in zip(dirs, wd):
        r = S * np.cos(Bt)
        ys = [y0[j] + S * np.sin(Bt) * e[j] for j in range(ndy)]
        vals = density(r, ys)
        jac = S ** (n - 1) * np.cos(Bt) * np.sin(Bt) ** (n - 3)
        total += we * np.sum(W * jac * vals)
    return float(total)


def fill_axis_row(values: np.ndarray) -> np.ndarray:
    """Replace row 0 by the even extrapolation from rows 1..3."""
    out = values.copy()
    out[0] = extrapolate_axis(values[1], values[2], values[3])
    return out
