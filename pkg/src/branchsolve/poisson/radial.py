"""Per-mode radial two-point problems on the uniform rhat grid.

For angular mode m and y-wavenumber squared kappa2 the unknown profile solves

    (1/r)(r u')' - m^2/r^2 u - q^2 kappa2 r^(2q-2) u
        = q^2 r^(2q-2) s + (1/r)(r F_r)' + i m F_t / r,        u(1) = bc,

in conservative form with half-node radii r_{a+1/2}. Row 0 is the axis:
u(0) = 0 for m != 0 and a finite-volume disk cell of radius h/2 for m = 0.
Many modes are solved at once by a vectorized Thomas sweep; every mode is
processed independently, so results do not depend on how modes are batched.
"""

from __future__ import annotations

import numpy as np

from ..errors import NumericError


def _weight(rhat, q):
    # r^(2q-2) with the q = 1 convention 0^0 = 1 at the axis
    return np.power(rhat, 2 * q - 2)


def assemble(m, kappa2, q, n_rhat, source, bc, flux_r=None, flux_t=None):
    """Tridiagonal bands and right-hand side for a batch of modes.

    ``m``, ``kappa2``, ``bc`` have shape (B,); ``source``, ``flux_r``, ``flux_t``
    have shape (B, n_rhat). Unknowns are rows 0..n_rhat-2.
    Returns (lower, diag, upper, rhs) each of shape (B, n_rhat-1).
    """
    m = np.asarray(m, dtype=float)
    kappa2 = np.asarray(kappa2, dtype=float)
    B = m.shape[0]
    N = n_rhat
    h = 1.0 / (N - 1)
    r = np.arange(N) * h
    w = _weight(r, q)
    rp = r[:-1] + 0.5 * h  # r_{a+1/2}, a = 0..N-2

    a = np.arange(1, N - 1)
    lo_i = rp[a - 1] / (r[a] * h * h)
    up_i = rp[a] / (r[a] * h * h)

    lower = np.zeros((B, N - 1))
    upper = np.zeros((B, N - 1))
    diag = np.empty((B, N - 1))
    lower[:, 1:] = lo_i
    upper[:, 1:] = up_i
    diag[:, 1:] = -(lo_i + up_i) - (m[:, None] ** 2) / r[a] ** 2 - q * q * kappa2[:, None] * w[a]

    rhs = np.zeros((B, N - 1), dtype=complex)
    rhs[:] = q * q * w[: N - 1] * source[:, : N - 1]

    if flux_r is not None:
        fr_half = 0.5 * (flux_r[:, :-1] + flux_r[:, 1:])  # at r_{a+1/2}
        rhs[:, 1:] += (rp[a] * fr_half[:, a] - rp[a - 1] * fr_half[:, a - 1]) / (r[a] * h)
        rhs[:, 0] += 4.0 * fr_half[:, 0] / h
    if flux_t is not None:
        rhs[:, 1:] += 1j * m[:, None] * flux_t[:, a] / r[a]

    # axis row
    axis_mode = m == 0
    diag[:, 0] = np.where(axis_mode, -4.0 / (h * h) - q * q * kappa2 * w[0], 1.0)
    upper[:, 0] = np.where(axis_mode, 4.0 / (h * h), 0.0)
    rhs[~axis_mode, 0] = 0.0

    # Dirichlet value enters the last unknown row
    rhs[:, -1] -= upper[:, -1] * bc
    upper[:, -1] = 0.0
    return lower, diag, upper, rhs


def thomas(lower, diag, upper, rhs):
    """Batched tridiagonal solve, no pivoting (the systems are diagonally dominant)."""
    B, n = diag.shape
    c = np.empty((B, n))
    d = np.empty((B, n), dtype=complex)
    denom = diag[:, 0]
    if np.any(denom == 0):
        raise NumericError("singular tridiagonal system")
    c[:, 0] = upper[:, 0] / denom
    d[:, 0] = rhs[:, 0] / denom
    for i in range(1, n):
        denom = diag[:, i] - lower[:, i] * c[:, i - 1]
        if np.any(denom == 0):
            raise NumericError("singular tridiagonal system")
        c[:, i] = upper[:, i] / denom
        d[:, i] = (rhs[:, i] - lower[:, i] * d[:, i - 1]) / denom
    x = np.empty((B, n), dtype=complex)
    x[:, -1] = d[:, -1]
    for i in range(n - 2, -1, -1):
        x[:, i] = d[:, i] - c[:, i] * x[:, i + 1]
    return x


def solve_modes(m, kappa2, q, n_rhat, source, bc, flux_r=None, flux_t=None):
    """Solve a batch of mode problems; returns profiles of shape (B, n_rhat) including u(1) = bc."""
    lower, diag, upper, rhs = assemble(m, kappa2, q, n_rhat, source, bc, flux_r, flux_t)
    x = thomas(lower, diag, upper, rhs)
    out = np.empty((x.shape[0], n_rhat), dtype=complex)
    out[:, :-1] = x
    out[:, -1] = bc
    return out


def radial_mode_solve(m, z, q, rho, rhs, bc, flux_r=None, flux_t=None):
    """Solve one angular/y mode on the uniform grid implied by ``len(rhs)``.

    ``z`` and ``rho`` are sequences (one entry per periodic direction); the
    y-wavenumber is 2*pi*z_j/rho_j. Returns the complex radial profile on
    rhat = linspace(0, 1, len(rhs)).
    """
    rhs = np.asarray(rhs, dtype=complex)
    n_rhat = rhs.shape[0]
    z = np.atleast_1d(np.asarray(z, dtype=float))
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    kappa2 = float(np.sum((2 * np.pi * z / rho) ** 2))
    fr = None if flux_r is None else np.asarray(flux_r, dtype=complex)[None]
    ft = None if flux_t is None else np.asarray(flux_t, dtype=complex)[None]
    out = solve_modes(
        np.array([m]), np.array([kappa2]), q, n_rhat, rhs[None], np.array([bc], dtype=complex), fr, ft
    )
    return out[0]
