"""Independent reference computations used by the tests.

Nothing here calls into the package's numerical routines: closed forms are
evaluated directly and brute-force searches replace the optimized ones.
"""

import itertools

import numpy as np
from scipy.special import iv


def brute_force_G(a, b):
    """min over all permutations of sqrt(sum |a_l - b_sigma(l)|^2)."""
    a = np.atleast_2d(np.asarray(a, dtype=float).reshape(len(a), -1))
    b = np.atleast_2d(np.asarray(b, dtype=float).reshape(len(b), -1))
    best = np.inf
    for perm in itertools.permutations(range(len(b))):
        best = min(best, float(np.sqrt(((a - b[list(perm)]) ** 2).sum())))
    return best


def branched_power(q, m, r, theta, sheet, c=1.0):
    """Re(c z^{m/q}) on sheet ``sheet`` (1-based) at polar point (r, theta)."""
    return np.real(c * r ** (m / q) * np.exp(1j * (m / q) * (theta + 2 * np.pi * (sheet - 1))))


def branched_power_gradient(q, m, r, theta, sheet):
    """(d/dx1, d/dx2) of Re(z^{m/q}) on a sheet, from u_x1 + i u_x2 = conj(f'(z))."""
    ang = theta + 2 * np.pi * (sheet - 1)
    fprime = (m / q) * r ** (m / q - 1) * np.exp(1j * (m / q - 1) * ang)
    g = np.conj(fprime)
    return g.real, g.imag


def bessel_mode(m, q, kappa, rhat):
    """Regular solution of the unfolded mode equation with u(1) = 1: I_{m/q}(kappa rhat^q) / I_{m/q}(kappa)."""
    return iv(abs(m) / q, kappa * rhat**q) / iv(abs(m) / q, kappa)


def dense_holder_of_gradient(q, m, n_r, n_t, mu):
    """All-pairs Hoelder quotient of the analytic gradient of Re(z^{m/q}), summed over sheets and half-planes.

    Nodes follow the package convention: r = (a h)^q, theta = 2 pi (j + 1/2) / n_t.
    """
    h = 1.0 / (n_r - 1)
    r = (np.arange(1, n_r) * h) ** q
    th = 2 * np.pi * (np.arange(n_t) + 0.5) / n_t
    R, T = np.meshgrid(r, th, indexing="ij")
    z = R * np.exp(1j * T)
    total = 0.0
    for sheet in range(1, q + 1):
        gx, gy = branched_power_gradient(q, m, R, T, sheet)
        grad = gx + 1j * gy
        for half in (T < np.pi, T >= np.pi):
            gv, zv = grad[half], z[half]
            best = 0.0
            for s in range(0, gv.size, 512):
                dg = np.abs(gv[s:s + 512, None] - gv[None])
                dz = np.abs(zv[s:s + 512, None] - zv[None])
                ok = dz > 0
                best = max(best, float((dg[ok] / dz[ok] ** mu).max()))
            total += best
    return total


def centered_fd_gradient_on_sheet(values, r, theta):
    """Second-order polar finite differences on one sheet (interior nodes only).

    Returns (D_x1, D_x2) on nodes [1:-1, 1:-1] (radius, angle).
    """
    dr = (values[2:, 1:-1] - values[:-2, 1:-1]) / (r[2:] - r[:-2])[:, None]
    dth = (values[1:-1, 2:] - values[1:-1, :-2]) / (theta[2:] - theta[:-2])[None, :]
    rr = r[1:-1][:, None]
    tt = theta[1:-1][None, :]
    ur, ut = dr, dth / rr
    return np.cos(tt) * ur - np.sin(tt) * ut, np.sin(tt) * ur + np.cos(tt) * ut
