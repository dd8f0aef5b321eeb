"""Analytic and manufactured test data on the standard grids."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidProblemError
from ..mv_core.field import Grid, SheetedField
from ..unfold import UnfoldedField, fold, mode_admissible


def gen_branched_harmonic(grid: Grid, m: int, c: complex = 1.0, z=None, amp: float = 1.0,
                          y_mod: float = 0.0, override: bool = False) -> SheetedField:
    """Sheets of amp * Re(c z^{m/q}), i.e. Re(c r^{m/q} e^{i (m/q)(theta + 2 pi (l-1))}).

    With ``z`` and ``y_mod`` the field is multiplied by 1 + y_mod cos(2 pi z.y/rho);
    that product is not harmonic and is meant as test data only.
    """
    q = grid.q
    if not override and not mode_admissible(m, z, q, grid.k):
        raise InvalidProblemError(f"mode m={m} is not admissible for q={q}, k={grid.k}")
    c = complex(c)

    def func(l, r, th, *ys):
        val = amp * np.real(c * r ** (m / q) * np.exp(1j * (m / q) * (th + 2 * np.pi * (l - 1))))
        return val * _y_factor(grid, z, y_mod, ys)

    axis_val = amp * np.real(c) if m == 0 else 0.0
    ax = axis_val * _y_factor(grid, z, y_mod, [y for y in grid.y_mesh()]) if grid.y else axis_val
    return SheetedField.from_function(grid, func, axis=np.broadcast_to(ax, grid.n_y))


def _y_factor(grid, z, y_mod, ys):
    if z is None or y_mod == 0.0:
        return 1.0
    phase = 0.0
    for zj, y, p in zip(np.atleast_1d(z), ys, grid.periods):
        phase = phase + 2 * np.pi * zj * y / p
    return 1.0 + y_mod * np.cos(phase)


@dataclass(frozen=True)
class ModeTerm:
    """amp * P(rhat) * exp(i m theta_hat + i 2 pi z.y/rho), real part taken.

    ``coeffs`` maps powers j of rhat to coefficients. ``kind`` says which field
    the term belongs to: "u" (solution), "fr"/"ft" (x-plane polar flux
    components) or "fy<j>" (flux along y_j, 1-based).
    """

    m: int
    z: tuple
    coeffs: dict
    amp: complex = 1.0
    kind: str = "u"


@dataclass
class Manufactured:
    u: SheetedField
    g: SheetedField
    flux: SheetedField | None
    terms: list = field(default_factory=list)


def _kappa(grid, z):
    z = np.atleast_1d(np.asarray(z, dtype=float))
    return 2 * np.pi * z / np.asarray(grid.periods)


def _mode_factor(grid, t):
    rh, th, ys = grid.unfolded_coords()
    ph = t.m * th
    for kj, y in zip(_kappa(grid, t.z), ys):
        ph = ph + kj * y
    return np.exp(1j * ph), rh


def _poly(rh, coeffs, shift=0, weight=None):
    out = np.zeros_like(rh, dtype=complex)
    for j, c in coeffs.items():
        w = 1.0 if weight is None else weight(j)
        if w == 0:
            continue
        p = j + shift
        if p < 0:
            raise InvalidProblemError(f"power r^{j} produces a singular term r^{p}")
        out = out + c * w * np.power(rh, p)
    return out


def _discrete_radial(grid, t):
    """Solver stencil applied to the profile: (1/r)(r u')' - m^2 u / r^2 on rows 1..N-2."""
    h = grid.h
    r = grid.rhat
    P = _poly(r, t.coeffs)
    rp = r[:-1] + 0.5 * h
    out = np.zeros_like(P)
    a = np.arange(1, grid.n_rhat - 1)
    out[a] = (rp[a] * (P[a + 1] - P[a]) - rp[a - 1] * (P[a] - P[a - 1])) / (r[a] * h * h) - t.m ** 2 * P[a] / r[a] ** 2
    return out


def gen_manufactured(grid: Grid, terms, discrete: bool = False) -> Manufactured:
    """Build (u_exact, g[, flux]) with  Delta u = div f + g  holding exactly.

    By default g is the analytic image of u, so a solve with g and the trace of
    u recovers u up to the O(h^2) discretization error. ``discrete=True``
    instead applies the solver's radial stencil to the ``u`` terms, which makes
    the recovery exact up to round-off (flux terms still enter analytically).
    """
    q = grid.q
    k = grid.k
    shape = grid.unfolded_shape
    u0 = np.zeros(shape)
    g0 = np.zeros(shape)
    fr0 = np.zeros(shape)
    ft0 = np.zeros(shape)
    fy0 = [np.zeros(shape) for _ in grid.n_y]
    have_flux = False
    terms = list(terms)
    for t in terms:
        if t.m % k != 0:
            raise InvalidProblemError(f"mode m={t.m} is not k-fold symmetric (k={k})")
        if len(np.atleast_1d(t.z)) != len(grid.n_y):
            raise InvalidProblemError("mode z needs one entry per periodic direction")
        e, rh = _mode_factor(grid, t)
        kap = _kappa(grid, t.z)
        kap2 = float(np.sum(kap ** 2))
        if t.kind == "u":
            P = _poly(rh, t.coeffs)
            u0 += np.real(t.amp * P * e)
            if discrete:
                lap = _discrete_radial(grid, t)[:, None, None] if len(grid.n_y) == 1 else \
                    _discrete_radial(grid, t).reshape((-1,) + (1,) * (1 + len(grid.n_y)))
                w = np.power(rh, 2 * q - 2)
                with np.errstate(divide="ignore", invalid="ignore"):
                    gi = np.where(w > 0, lap / (q * q * np.where(w > 0, w, 1.0)), 0.0) - kap2 * P
                g0 += np.real(t.amp * gi * e)
            else:
                gi = _poly(rh, t.coeffs, shift=-2 * q, weight=lambda j: (j * j - t.m * t.m) / q ** 2)
                g0 += np.real(t.amp * (gi - kap2 * P) * e)
        elif t.kind == "fr":
            have_flux = True
            fr0 += np.real(t.amp * _poly(rh, t.coeffs) * e)
            div = _poly(rh, t.coeffs, shift=-q, weight=lambda j: (q + j) / q)
            g0 -= np.real(t.amp * div * e)
        elif t.kind == "ft":
            have_flux = True
            ft0 += np.real(t.amp * _poly(rh, t.coeffs) * e)
            div = _poly(rh, t.coeffs, shift=-q, weight=lambda j: 1j * t.m / q)
            g0 -= np.real(t.amp * div * e)
        elif t.kind.startswith("fy"):
            have_flux = True
            j = int(t.kind[2:]) - 1
            P = _poly(rh, t.coeffs)
            fy0[j] += np.real(t.amp * P * e)
            g0 -= np.real(t.amp * 1j * kap[j] * P * e)
        else:
            raise InvalidProblemError(f"unknown term kind {t.kind!r}")
    u = fold(UnfoldedField(grid, u0))
    g = fold(UnfoldedField(grid, g0))
    flux = None
    if have_flux:
        fr = fold(UnfoldedField(grid, fr0)).data
        ft = fold(UnfoldedField(grid, ft0)).data
        _, th, _ = grid.sheet_coords()
        c, s = np.cos(th), np.sin(th)
        comps = [c * fr - s * ft, s * fr + c * ft] + [fold(UnfoldedField(grid, a)).data for a in fy0]
        flux = SheetedField(grid, np.stack(comps, axis=-1), np.zeros(tuple(grid.n_y) + (grid.n,)))
    return Manufactured(u=u, g=g, flux=flux, terms=terms)


def standard_manufactured_terms(q: int, k: int):
    """Two u-modes (m = k and m = 3k) plus one flux term of each kind."""
    if (q, k) == (2, 3):
        return [
            ModeTerm(3, (0,), {3: 1.0, 5: 0.5}),
            ModeTerm(9, (1,), {9: 0.3, 11: -0.15}),
            ModeTerm(3, (1,), {2: 0.2, 4: -0.2}, kind="fr"),
            ModeTerm(3, (0,), {3: 0.1}, kind="ft"),
            ModeTerm(9, (1,), {4: 0.1}, kind="fy1"),
        ]
    m1, m2 = k, 2 * k if (2 * k) % q else 3 * k
    return [
        ModeTerm(m1, (0,), {m1: 1.0, m1 + 2: 0.5}),
        ModeTerm(m2, (1,), {m2: 0.3, m2 + 2: -0.15}),
        ModeTerm(m1, (1,), {q + 1: 0.2, q + 3: -0.2}, kind="fr"),
        ModeTerm(m1, (0,), {q + 1: 0.1}, kind="ft"),
        ModeTerm(m2, (1,), {2 * q: 0.1}, kind="fy1"),
    ]


def _smooth_bump(t):
    """exp(1 - 1/(1 - t^2)) on |t| < 1, zero outside; equals 1 at t = 0."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - t[inside] ** 2))
    return out


def random_average_free_field(grid: Grid, seed: int = 0, m_max: int = 6, z_max: int = 2,
                              compact: bool = False, symmetric: bool = False) -> SheetedField:
    """Random smooth average-free field built from unfolded modes with m != 0 (mod q).

    u_0 = Re sum_{m,z} a_{m,z} rhat^|m| (1 + b rhat^2) e^{i m theta_hat + i kappa_z . y}
    with standard normal coefficients. ``compact`` multiplies by bumps in r and in
    y (support r < 0.9 and y inside the open period cell). ``symmetric`` keeps only
    the k-fold admissible modes.
    """
    rng = np.random.default_rng(seed)
    q, k = grid.q, grid.k
    rh, th, ys = grid.unfolded_coords()
    acc = np.zeros(grid.unfolded_shape, dtype=complex)
    zs = np.arange(-z_max, z_max + 1)
    z_grid = np.stack(np.meshgrid(*([zs] * len(grid.n_y)), indexing="ij"), axis=-1).reshape(-1, len(grid.n_y))
    for m in range(1, m_max + 1):
        if m % q == 0 or (symmetric and m % k):
            continue
        for z in z_grid:
            a = complex(rng.standard_normal(), rng.standard_normal())
            b = rng.standard_normal()
            ph = m * th
            for kj, y in zip(_kappa(grid, z), ys):
                ph = ph + kj * y
            acc += a * rh ** m * (1 + b * rh**2) * np.exp(1j * ph)
    u0 = np.real(acc)
    if compact:
        cut = _smooth_bump(rh**q / 0.9)
        for y, p in zip(ys, grid.periods):
            cut = cut * _smooth_bump((y - 0.5 * p) / (0.45 * p))
        u0 = u0 * cut
    u0 = np.broadcast_to(u0, grid.unfolded_shape).copy()
    u0[0] = 0.0
    return fold(UnfoldedField(grid, u0))
