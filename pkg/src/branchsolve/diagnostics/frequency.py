"""Frequency function and ball-based functional inequality ratios."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateFieldError, DimensionError
from ..mv_core.field import SheetedField
from ..unfold import unfold, unfolded_gradient
from .quadrature import RadialYDensity, ball_integral, fill_axis_row, sphere_integral

MAX_RADIUS = 0.5


@dataclass(frozen=True)
class FrequencyProfile:
    center: tuple
    radii: np.ndarray
    values: np.ndarray
    numerators: np.ndarray  # rho^{2-n} * Dirichlet energy on B_rho
    denominators: np.ndarray  # rho^{1-n} * L2 mass on the sphere

    def to_csv(self) -> str:
        lines = ["rho,N"]
        lines += [f"{r:.17g},{v:.17g}" for r, v in zip(self.radii, self.values)]
        return "\n".join(lines) + "\n"


def _components(data, vector):
    if not vector:
        return [data]
    return [data[..., i] for i in range(data.shape[-1])]


def mass_density(g_data, grid, vector=False):
    """Sum over sheets of the theta-integral of |u|^2, on the unfolded (rhat, y) grid."""
    q = grid.q
    dth = 2 * np.pi / grid.n_theta_hat
    total = 0.0
    for c in _components(g_data, vector):
        total = total + q * (c**2).sum(axis=1) * dth
    return total


def energy_density(g, vector=False):
    """Sum over sheets of the theta-integral of |D u|^2 (x-gradient), unfolded (rhat, y) grid."""
    from ..unfold import UnfoldedField

    grid = g.grid
    q = grid.q
    dth = 2 * np.pi / grid.n_theta_hat
    rh = grid.rhat.reshape((-1,) + (1,) * len(grid.n_y))
    total = 0.0
    for c in _components(g.data, vector):
        dr, dt, dys = unfolded_gradient(UnfoldedField(grid, c))
        planar = (dr**2 + np.nan_to_num(dt) ** 2).sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            planar = planar / (q * rh ** (2 * q - 2))
        ysum = sum((dy**2).sum(axis=1) for dy in dys)
        total = total + (planar + q * ysum) * dth
    return fill_axis_row(np.asarray(total))


def _check_ball(grid, y0, rho):
    y0 = np.atleast_1d(np.asarray(y0, dtype=float))
    if y0.shape != (len(grid.n_y),):
        raise DimensionError(f"centre needs {len(grid.n_y)} y-coordinates")
    if not (0 < rho <= MAX_RADIUS) or rho > 0.5 * min(grid.periods):
        raise ValueError(f"radius {rho} outside (0, {MAX_RADIUS}] or larger than half a period")
    return y0


def frequency_function(f: SheetedField, y0, radii) -> FrequencyProfile:
    """N(rho) = rho * int_{B_rho} sum_l |D u_l|^2 / int_{dB_rho} sum_l |u_l|^2 about (0, y0)."""
    grid = f.grid
    n = grid.n
    radii = np.asarray(radii, dtype=float)
    y0 = np.atleast_1d(np.asarray(y0, dtype=float))
    for rho in radii:
        _check_ball(grid, y0, rho)
    g = unfold(f)
    A = RadialYDensity(grid, mass_density(g.data, grid, f.is_vector))
    E = RadialYDensity(grid, energy_density(g, f.is_vector))
    nums, dens = [], []
    for rho in radii:
        den = sphere_integral(A, y0, rho) * rho ** (1 - n)
        num = ball_integral(E, y0, rho) * rho ** (2 - n)
        scale = max(abs(num), 1e-300)
        if den <= 1e-14 * scale or den <= 1e-300:
            raise DegenerateFieldError(f"field vanishes on the sphere of radius {rho}")
        nums.append(num)
        dens.append(den)
    nums, dens = np.array(nums), np.array(dens)
    return FrequencyProfile(tuple(y0), radii, nums / dens, nums, dens)


@dataclass(frozen=True)
class InequalityReport:
    ratio: float
    lhs: float
    rhs: float
    extra: dict = field(default_factory=dict)


def poincare_ratio(f: SheetedField, R: float = 0.5, y0=None) -> InequalityReport:
    """||u - l||_{L2(B_R)} / (R ||D u||_{L2(B_R)}) with l the ball mean of the sheet average."""
    grid = f.grid
    if f.is_vector:
        raise DimensionError("poincare_ratio expects a scalar field")
    if y0 is None:
        y0 = [0.5 * p for p in grid.periods]
    y0 = _check_ball(grid, y0, R)
    dth = 2 * np.pi / grid.n_theta_hat
    g = unfold(f)
    avg_density = RadialYDensity(grid, g.data.sum(axis=1) * dth)
    vol = ball_integral(RadialYDensity(grid, np.full(grid.unfolded_shape[:1] + tuple(grid.n_y), 2 * np.pi)), y0, R)
    ell = ball_integral(avg_density, y0, R) / vol
    mass = ball_integral(RadialYDensity(grid, mass_density(g.data - ell, grid)), y0, R)
    energy = ball_integral(RadialYDensity(grid, energy_density(g)), y0, R)
    if energy <= 0:
        raise DegenerateFieldError("zero Dirichlet energy on the ball")
    lhs = np.sqrt(max(mass, 0.0))
    rhs = R * np.sqrt(energy)
    return InequalityReport(lhs / rhs, lhs, rhs, {"ell": ell})


def sobolev_ratio(f: SheetedField) -> InequalityReport:
    """||u||_{L^{2n/(n-2)}} / ||D u||_{L2} over the whole cylinder (f should vanish near r=1 and wrap-around in y)."""
    grid = f.grid
    if f.is_vector:
        raise DimensionError("sobolev_ratio expects a scalar field")
    n, q = grid.n, grid.q
    p = 2.0 * n / (n - 2)
    g = unfold(f)
    rh = grid.rhat
    # trapezoid weights in rhat, rectangle in theta_hat and y
    w = rh * grid.h
    w[-1] *= 0.5
    cell = (2 * np.pi / grid.n_theta_hat) * float(np.prod(grid.dy))
    shape = (-1,) + (1,) * (1 + len(grid.n_y))
    w = w.reshape(shape)
    jac = (q**2 * rh ** (2 * q - 2)).reshape(shape)
    lp = float((np.abs(g.data) ** p * jac * w).sum() * cell) ** (1.0 / p)
    dr, dt, dys = unfolded_gradient(g)
    dens = dr**2 + np.nan_to_num(dt) ** 2 + jac * sum(dy**2 for dy in dys)
    energy = float((dens * w).sum() * cell)
    if energy <= 0:
        raise DegenerateFieldError("zero Dirichlet energy")
    rhs = np.sqrt(energy)
    return InequalityReport(lp / rhs, lp, rhs, {"exponent": p})


