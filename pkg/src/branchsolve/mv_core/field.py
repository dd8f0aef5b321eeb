"""Grids and sheeted (q-valued) fields on the cylinder B_1(0) x torus.

Layout conventions
------------------
The unfolded disk grid has radial nodes ``rhat_a = a*h`` for ``a = 0..n_rhat-1``
(``h = 1/(n_rhat-1)``, ``a = 0`` is the axis) and angular nodes
``theta_hat_b = 2*pi*(b + 1/2)/n_theta_hat``. The half-node offset keeps every
sheeted node off the cut.

Sheet ``l`` (1-based) covers the angular sector ``(2*pi*(l-1)/q, 2*pi*l/q)`` of the
unfolded disk. Its nodes are ``r_i = rhat_i**q`` (``i = 1..n_rhat-1``) and
``theta_j = 2*pi*(j + 1/2)/n_theta`` with ``n_theta = n_theta_hat/q``. Crossing
``theta = 2*pi`` on sheet ``l`` continues onto sheet ``l+1`` (cyclically).

Sheeted data has shape ``(q, n_rhat-1, n_theta, *n_y)`` with an optional trailing
component axis for R^m-valued fields.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

import numpy as np

from ..errors import DimensionError, InvalidProblemError, ResolutionError


@dataclass(frozen=True)
class Grid:
    q: int
    k: int
    n: int = 3
    n_rhat: int = 65
    n_theta_hat: int = 48
    n_y: tuple = (16,)
    periods: tuple = (1.0,)

    def __post_init__(self):
        object.__setattr__(self, "n_y", tuple(int(v) for v in np.atleast_1d(self.n_y)))
        object.__setattr__(self, "periods", tuple(float(v) for v in np.atleast_1d(self.periods)))
        if self.q < 1:
            raise InvalidProblemError("q must be >= 1")
        if self.n < 3:
            raise InvalidProblemError("ambient dimension n must be >= 3")
        if gcd(self.k, self.q) != 1:
            raise InvalidProblemError(f"k={self.k} and q={self.q} are not relatively prime")
        if self.k <= self.q:
            raise InvalidProblemError(f"need k > q, got k={self.k}, q={self.q}")
        if len(self.n_y) != self.n - 2 or len(self.periods) != self.n - 2:
            raise DimensionError(f"need {self.n - 2} y-grid sizes and periods")
        if any(v < 1 for v in self.n_y) or any(p <= 0 for p in self.periods):
            raise ResolutionError("y-grid sizes must be >= 1 and periods > 0")
        if self.n_rhat < 4:
            raise ResolutionError("need at least 4 radial nodes")
        if self.n_theta_hat % self.q:
            raise ResolutionError(
                f"n_theta_hat={self.n_theta_hat} is not divisible by q={self.q}"
            )

    # -- radial -----------------------------------------------------------
    @property
    def h(self) -> float:
        return 1.0 / (self.n_rhat - 1)

    @property
    def rhat(self) -> np.ndarray:
        """Unfolded radial nodes including the axis (a = 0)."""
        return np.arange(self.n_rhat) * self.h

    @property
    def r(self) -> np.ndarray:
        """Sheeted radial nodes r_i = rhat_i**q, axis excluded."""
        return self.rhat[1:] ** self.q

    # -- angular ----------------------------------------------------------
    @property
    def n_theta(self) -> int:
        return self.n_theta_hat // self.q

    @property
    def theta(self) -> np.ndarray:
        return 2 * np.pi * (np.arange(self.n_theta) + 0.5) / self.n_theta

    @property
    def theta_hat(self) -> np.ndarray:
        return 2 * np.pi * (np.arange(self.n_theta_hat) + 0.5) / self.n_theta_hat

    # -- periodic directions ----------------------------------------------
    @property
    def y(self) -> list:
        return [np.arange(N) * p / N for N, p in zip(self.n_y, self.periods)]

    @property
    def dy(self) -> tuple:
        return tuple(p / N for N, p in zip(self.n_y, self.periods))

    @property
    def sheet_shape(self) -> tuple:
        return (self.q, self.n_rhat - 1, self.n_theta, *self.n_y)

    @property
    def unfolded_shape(self) -> tuple:
        return (self.n_rhat, self.n_theta_hat, *self.n_y)

    def y_mesh(self) -> list:
        return np.meshgrid(*self.y, indexing="ij") if self.y else []

    def sheet_coords(self):
        """Broadcastable (r, theta, [y...]) arrays shaped like a sheet's spatial block."""
        ny = len(self.n_y)
        r = self.r.reshape((-1, 1) + (1,) * ny)
        th = self.theta.reshape((1, -1) + (1,) * ny)
        ys = []
        for j, yj in enumerate(self.y):
            shape = [1, 1] + [1] * ny
            shape[2 + j] = -1
            ys.append(yj.reshape(shape))
        return r, th, ys

    def unfolded_coords(self):
        """Broadcastable (rhat, theta_hat, [y...]) arrays on the unfolded grid."""
        ny = len(self.n_y)
        rh = self.rhat.reshape((-1, 1) + (1,) * ny)
        th = self.theta_hat.reshape((1, -1) + (1,) * ny)
        ys = []
        for j, yj in enumerate(self.y):
            shape = [1, 1] + [1] * ny
            shape[2 + j] = -1
            ys.append(yj.reshape(shape))
        return rh, th, ys

    def wavenumbers(self) -> list:
        """Angular wavenumbers 2*pi*z/rho per y-direction in FFT order."""
        return [2 * np.pi * np.fft.fftfreq(N, d=1.0 / N) / p for N, p in zip(self.n_y, self.periods)]

    def with_(self, **changes) -> "Grid":
        params = dict(
            q=self.q, k=self.k, n=self.n, n_rhat=self.n_rhat,
            n_theta_hat=self.n_theta_hat, n_y=self.n_y, periods=self.periods,
        )
        params.update(changes)
        return Grid(**params)


def _freeze(a):
    if a is None:
        return None
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SheetedField:
    """A discrete q-valued function: one value (or R^m vector) per sheet and node.

    ``axis`` optionally stores the (single) value on the branch axis r = 0 per
    y-node. It is known exactly for solver output and left as None for sampled
    data, in which case consumers extrapolate it from the average part.
    """

    grid: Grid
    data: np.ndarray
    axis: np.ndarray = field(default=None)

    def __post_init__(self):
        data = _freeze(self.data)
        base = self.grid.sheet_shape
        if data.shape[: len(base)] != base or data.ndim - len(base) not in (0, 1):
            raise DimensionError(f"data shape {data.shape} does not match grid {base}")
        object.__setattr__(self, "data", data)
        if self.axis is not None:
            axis = _freeze(self.axis)
            want = tuple(self.grid.n_y) + data.shape[len(base):]
            axis = np.broadcast_to(axis, want).copy()
            axis.setflags(write=False)
            object.__setattr__(self, "axis", axis)

    @property
    def q(self) -> int:
        return self.grid.q

    @property
    def is_vector(self) -> bool:
        return self.data.ndim == len(self.grid.sheet_shape) + 1

    @property
    def m(self) -> int:
        return self.data.shape[-1] if self.is_vector else 1

    def component(self, i: int) -> "SheetedField":
        if not self.is_vector:
            raise DimensionError("scalar field has no components")
        ax = None if self.axis is None else self.axis[..., i]
        return SheetedField(self.grid, self.data[..., i], ax)

    @classmethod
    def stack(cls, comps) -> "SheetedField":
        comps = list(comps)
        grid = comps[0].grid
        data = np.stack([c.data for c in comps], axis=-1)
        if all(c.axis is not None for c in comps):
            axis = np.stack([c.axis for c in comps], axis=-1)
        else:
            axis = None
        return cls(grid, data, axis)

    @classmethod
    def zeros(cls, grid: Grid, m: int | None = None) -> "SheetedField":
        shape = grid.sheet_shape + (() if m is None else (m,))
        axis_shape = tuple(grid.n_y) + (() if m is None else (m,))
        return cls(grid, np.zeros(shape), np.zeros(axis_shape))

    @classmethod
    def from_function(cls, grid: Grid, func, axis=None) -> "SheetedField":
        """Sample ``func(l, r, theta, *y)`` (l is 1-based) on every sheet."""
        r, th, ys = grid.sheet_coords()
        sheets = []
        shape = grid.sheet_shape[1:]
        for l in range(1, grid.q + 1):
            vals = np.asarray(func(l, r, th, *ys), dtype=float)
            if vals.shape[: len(shape)] != shape:
                vals = np.broadcast_to(vals, shape + vals.shape[len(shape):] if vals.ndim > len(shape) else shape)
            sheets.append(vals)
        return cls(grid, np.stack(sheets), axis)

    def with_data(self, data, axis=None) -> "SheetedField":
        return SheetedField(self.grid, data, axis)

    def boundary_ring(self) -> np.ndarray:
        """Values at r = 1, shape (q, n_theta, *n_y[, m])."""
        return self.data[:, -1]

    def max_abs(self) -> float:
        vals = np.abs(self.data)
        if self.is_vector:
            vals = np.linalg.norm(self.data, axis=-1)
        return float(vals.max()) if vals.size else 0.0

    def _combine(self, other, op):
        if isinstance(other, SheetedField):
            if other.grid != self.grid:
                raise DimensionError("fields live on different grids")
            data = op(self.data, other.data)
            if self.axis is not None and other.axis is not None:
                axis = op(self.axis, other.axis)
            else:
                axis = None
        else:
            data = op(self.data, other)
            axis = None if self.axis is None else op(self.axis, other)
        return SheetedField(self.grid, data, axis)

    def __add__(self, other):
        return self._combine(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __mul__(self, c):
        if isinstance(c, SheetedField):
            return NotImplemented
        return self._combine(float(c), np.multiply)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0


def extrapolate_axis(ring1, ring2, ring3=None):
    """Axis value of a smooth radial profile from its first rings (h, 2h[, 3h]).

    Assumes an even expansion c0 + c2 rhat^2 + ... which holds for the
    angular mean of a smooth function.
    """
    if ring3 is None:
        return (4.0 * ring1 - ring2) / 3.0
    # c0 + c2 r^2 + c4 r^4 fitted through r = 1, 2, 3 (units of h)
    return (45.0 * ring1 - 18.0 * ring2 + 5.0 * ring3) / 32.0
