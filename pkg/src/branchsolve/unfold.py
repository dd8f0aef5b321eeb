"""The unfolding map w = x**(1/q) between sheeted fields and single-valued disk fields.

Node correspondence (exact, no interpolation): unfolded node (a, b) with
``b = (l-1)*n_theta + j`` is sheet l's node (i = a-1, j). Row a = 0 of the
unfolded grid is the axis.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from .errors import DimensionError, InvalidProblemError, ResolutionError
from .mv_core.field import Grid, SheetedField, extrapolate_axis


@dataclass(frozen=True, eq=False)
class UnfoldedField:
    """Single-valued field on the unfolded disk x torus, data shape (n_rhat, n_theta_hat, *n_y[, m])."""

    grid: Grid
    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=float)
        base = self.grid.unfolded_shape
        if data.shape[: len(base)] != base or data.ndim - len(base) not in (0, 1):
            raise DimensionError(f"data shape {data.shape} does not match unfolded grid {base}")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def axis(self) -> np.ndarray:
        return self.data[0, 0]

    @property
    def is_vector(self) -> bool:
        return self.data.ndim == len(self.grid.unfolded_shape) + 1

    @classmethod
    def from_function(cls, grid: Grid, func) -> "UnfoldedField":
        """Sample ``func(rhat, theta_hat, *y)`` on the unfolded grid (axis row included)."""
        rh, th, ys = grid.unfolded_coords()
        vals = np.asarray(func(rh, th, *ys), dtype=float)
        vals = np.broadcast_to(vals, grid.unfolded_shape + vals.shape[len(grid.unfolded_shape):])
        return cls(grid, vals)


def _axis_from_rings(grid: Grid, data: np.ndarray) -> np.ndarray:
    """Estimate the axis value from the angular means of the first three rings."""
    means = data[:3].mean(axis=1)
    return extrapolate_axis(means[0], means[1], means[2])


def unfold(f: SheetedField) -> UnfoldedField:
    """Map q sheets onto the unfolded disk: u_0(rhat e^{i theta_hat}) = u_l(rhat^q e^{i q theta_hat})."""
    grid = f.grid
    if not isinstance(f, SheetedField):
        raise TypeError("unfold expects a SheetedField")
    d = f.data
    n_r = grid.n_rhat - 1
    # (q, n_r, n_theta, ...) -> (n_r, q, n_theta, ...) -> (n_r, q*n_theta, ...)
    moved = np.moveaxis(d, 0, 1)
    body = moved.reshape((n_r, grid.n_theta_hat) + d.shape[3:])
    if f.axis is not None:
        ax = f.axis
    else:
        ax = _axis_from_rings(grid, body)
    ax_row = np.broadcast_to(ax[None], (grid.n_theta_hat,) + ax.shape)
    data = np.concatenate([ax_row[None], body], axis=0)
    return UnfoldedField(grid, data)


def fold(g: UnfoldedField) -> SheetedField:
    """Inverse of :func:`unfold`; the axis row becomes the field's ``axis``."""
    grid = g.grid
    q, nt = grid.q, grid.n_theta
    body = g.data[1:]
    tail = body.shape[2:]
    sheets = body.reshape((grid.n_rhat - 1, q, nt) + tail)
    sheets = np.moveaxis(sheets, 1, 0)
    row = g.data[0]
    # exact copy when the axis row is constant (the usual case), mean otherwise
    axis = row[0] if np.all(row == row[0]) else row.mean(axis=0)
    return SheetedField(grid, sheets, axis)


def mode_admissible(m: int, z, q: int, k: int) -> bool:
    """True iff angular mode m survives average-freeness (m != 0 mod q) and k-fold symmetry (m = 0 mod k)."""
    if gcd(int(k), int(q)) != 1:
        raise InvalidProblemError(f"k={k} and q={q} are not relatively prime")
    return (m % k == 0) and (m % q != 0)


def rotate_unfolded(g: UnfoldedField, s: int = 1) -> UnfoldedField:
    """Pull back along the rotation theta_hat -> theta_hat + 2*pi*s/k."""
    grid = g.grid
    if grid.n_theta_hat % grid.k:
        raise ResolutionError("n_theta_hat must be divisible by k")
    step = s * grid.n_theta_hat // grid.k
    return UnfoldedField(grid, np.roll(g.data, -step, axis=1))


# -- derivatives ---------------------------------------------------------------

def theta_derivative(data: np.ndarray, axis: int = 1) -> np.ndarray:
    """Spectral d/dtheta_hat along ``axis`` (Nyquist mode dropped)."""
    n = data.shape[axis]
    m = np.fft.fftfreq(n, d=1.0 / n)
    if n % 2 == 0:
        m[n // 2] = 0.0
    shape = [1] * data.ndim
    shape[axis] = n
    spec = np.fft.fft(data, axis=axis) * (1j * m).reshape(shape)
    return np.fft.ifft(spec, axis=axis).real


def y_derivatives(grid: Grid, data: np.ndarray, first_y_axis: int = 2) -> list:
    """Spectral derivatives along each periodic direction (Nyquist mode dropped)."""
    out = []
    for j, (kw, N) in enumerate(zip(grid.wavenumbers(), grid.n_y)):
        ax = first_y_axis + j
        kk = kw.copy()
        if N % 2 == 0:
            kk[N // 2] = 0.0
        shape = [1] * data.ndim
        shape[ax] = N
        spec = np.fft.fft(data, axis=ax) * (1j * kk).reshape(shape)
        out.append(np.fft.ifft(spec, axis=ax).real)
    return out


def radial_derivative(data: np.ndarray, h: float, theta_axis: int | None = 1) -> np.ndarray:
    """d/drhat with fourth-order stencils; row 0 (axis) is one-sided.

    The centered stencil at rhat = h reaches across the axis: the value at
    rhat = -h is the ring rhat = h rotated by pi (needs an even angular count
    on ``theta_axis``; otherwise that row drops to second order).
    """
    d = data
    out = np.empty_like(d)
    out[2:-2] = (d[:-4] - 8 * d[1:-3] + 8 * d[3:-1] - d[4:]) / (12 * h)
    n_th = d.shape[theta_axis] if theta_axis is not None else 1
    if theta_axis is not None and n_th % 2 == 0:
        mirrored = np.roll(d[1], n_th // 2, axis=theta_axis - 1)
        out[1] = (mirrored - 8 * d[0] + 8 * d[2] - d[3]) / (12 * h)
    else:
        out[1] = (d[2] - d[0]) / (2 * h)
    out[-2] = (3 * d[-1] + 10 * d[-2] - 18 * d[-3] + 6 * d[-4] - d[-5]) / (12 * h)
    out[-1] = (25 * d[-1] - 48 * d[-2] + 36 * d[-3] - 16 * d[-4] + 3 * d[-5]) / (12 * h)
    out[0] = (-25 * d[0] + 48 * d[1] - 36 * d[2] + 16 * d[3] - 3 * d[4]) / (12 * h)
    return out


def unfolded_gradient(g: UnfoldedField):
    """(d/drhat, (1/rhat) d/dtheta_hat, d/dy_j...) of a scalar unfolded field; row 0 left as NaN for the angular part."""
    grid = g.grid
    d = g.data
    dr = radial_derivative(d, grid.h)
    dth = theta_derivative(d, axis=1)
    rh = grid.rhat.reshape((-1,) + (1,) * (d.ndim - 1))
    with np.errstate(divide="ignore", invalid="ignore"):
        dth_r = np.where(rh > 0, dth / np.where(rh > 0, rh, 1.0), np.nan)
    dys = y_derivatives(grid, d)
    return dr, dth_r, dys


def gradient_polar(g: UnfoldedField):
    """x-plane polar gradient (D_r u, r^{-1} D_theta u) on sheet nodes plus y-derivatives.

    Uses D_x u = e^{i q theta_hat} (u_rhat + i u_theta_hat / rhat) / (q rhat^{q-1}):
    the xi-gradient divided by |q w^{q-1}| and rotated by +(q-1) theta_hat.
    Returns arrays on the unfolded grid without the axis row, shape (n_rhat-1, n_theta_hat, *n_y).
    """
    grid = g.grid
    q = grid.q
    dr, dth_r, dys = unfolded_gradient(g)
    rh = grid.rhat[1:].reshape((-1,) + (1,) * (g.data.ndim - 1))
    scale = 1.0 / (q * rh ** (q - 1))
    return dr[1:] * scale, dth_r[1:] * scale, [dy[1:] for dy in dys]


def gradient_x(g: UnfoldedField) -> SheetedField:
    """Sheeted gradient (D_x1 u, D_x2 u, D_y1 u, ...) of a scalar unfolded field.

    The axis entry holds the in-plane gradient (0) and the y-derivatives of the
    axis trace when the low angular modes 1 <= |m| <= q are negligible near the
    axis; otherwise the in-plane axis gradient is undefined and ``axis`` is None.
    """
    if g.is_vector:
        raise DimensionError("gradient_x expects a scalar field; apply it per component")
    grid = g.grid
    fr, fth, dys = gradient_polar(g)
    th = (grid.q * grid.theta_hat).reshape((1, -1) + (1,) * len(grid.n_y))
    c, s = np.cos(th), np.sin(th)
    gx1 = c * fr - s * fth
    gx2 = s * fr + c * fth
    comps = np.stack([gx1, gx2] + dys, axis=-1)
    unf = UnfoldedField(grid, np.concatenate([np.zeros((1,) + comps.shape[1:]), comps], axis=0))
    sheeted = fold(unf)
    axis = _axis_gradient(g)
    return SheetedField(grid, sheeted.data, axis)


def _axis_gradient(g: UnfoldedField):
    grid = g.grid
    q = grid.q
    # angular spectrum of the first ring; modes 1..q control the in-plane gradient at 0
    ring = np.fft.fft(g.data[1], axis=0) / grid.n_theta_hat
    amp = np.abs(ring[1: q + 1]).reshape(q, -1).max(axis=1)
    # mode m contributes ~ amp * m * h^{-q} / q to |D_x u| at the first ring
    contrib = (amp * np.arange(1, q + 1)).max() * grid.h ** (-q) / q
    if contrib > 1e-6 * max(1.0, float(np.abs(g.data).max())):
        return None
    ax = g.data[0].mean(axis=0)
    dys = y_derivatives(grid, ax, first_y_axis=0)
    planar = [np.zeros_like(ax), np.zeros_like(ax)]
    return np.stack(planar + dys, axis=-1)
