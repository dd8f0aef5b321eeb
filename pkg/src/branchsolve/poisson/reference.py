"""Independent finite-difference solver on the sheeted polar grid (no unfolding, no mode filtering).

The q sheets are glued across the cut into one angular ring of q*n_theta nodes
with spacing 2*pi/n_theta in x; the radial nodes r_i = rhat_i^q are used as a
nonuniform grid. The axis is a single unknown per y-node, closed by a
finite-volume balance over the small q-sheeted disk of radius r_1/2.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from ..errors import SizeGuardError
from ..mv_core.field import SheetedField
from ..unfold import fold, unfold

MAX_UNKNOWNS = 500_000


def _y_second_derivative(N, period, scheme):
    if N == 1:
        return sp.csr_matrix((1, 1))
    if scheme == "spectral":
        k = 2 * np.pi * np.fft.fftfreq(N, d=period / N)
        if N % 2 == 0:
            k[N // 2] = 0.0
        eye = np.eye(N)
        D2 = np.fft.ifft(-(k ** 2)[:, None] * np.fft.fft(eye, axis=0), axis=0).real
        return sp.csr_matrix(D2)
    h = period / N
    main = -2.0 * np.ones(N)
    off = np.ones(N)
    D2 = sp.diags([off[:-1], main, off[:-1]], [-1, 0, 1], shape=(N, N), format="lil")
    D2[0, N - 1] = 1.0
    D2[N - 1, 0] = 1.0
    return D2.tocsr() / h ** 2


def _y_first_derivative(N, period, scheme):
    if N == 1:
        return sp.csr_matrix((1, 1))
    if scheme == "spectral":
        k = 2 * np.pi * np.fft.fftfreq(N, d=period / N)
        if N % 2 == 0:
            k[N // 2] = 0.0
        eye = np.eye(N)
        D1 = np.fft.ifft((1j * k)[:, None] * np.fft.fft(eye, axis=0), axis=0).real
        return sp.csr_matrix(D1)
    h = period / N
    D1 = sp.diags([-np.ones(N - 1), np.ones(N - 1)], [-1, 1], shape=(N, N), format="lil")
    D1[0, N - 1] = -1.0
    D1[N - 1, 0] = 1.0
    return D1.tocsr() / (2 * h)


def _plane_operator(grid):
    """Sparse 2-D Laplacian on one y-layer: unknowns [axis, ring 1 .. ring N_r-1 interior].

    Returns (L, B) where B maps the boundary ring values to the right-hand side.
    """
    q, nt = grid.q, grid.n_theta
    M = q * nt
    dth = 2 * np.pi / nt
    r = np.concatenate([[0.0], grid.r])  # r_0 = 0 (axis), ..., r_{N-1} = 1
    n_int = grid.n_rhat - 2  # interior rings 1..N-2
    n = 1 + n_int * M
    rows, cols, vals = [], [], []
    brow, bcol, bval = [], [], []

    def idx(i, b):
        return 1 + (i - 1) * M + (b % M)

    # axis: 2 (mean ring1 - u_ax) / (r_half r_1), r_half = r_1/2
    r1 = r[1]
    c_ax = 2.0 / (0.5 * r1 * r1)
    rows.append(0); cols.append(0); vals.append(-c_ax)
    for b in range(M):
        rows.append(0); cols.append(idx(1, b)); vals.append(c_ax / M)

    for i in range(1, n_int + 1):
        rm = 0.5 * (r[i] + r[i - 1])
        rp = 0.5 * (r[i] + r[i + 1])
        dv = 0.5 * (r[i + 1] - r[i - 1])
        cm = rm / ((r[i] - r[i - 1]) * r[i] * dv)
        cp = rp / ((r[i + 1] - r[i]) * r[i] * dv)
        ca = 1.0 / (r[i] ** 2 * dth ** 2)
        for b in range(M):
            me = idx(i, b)
            rows += [me, me, me]
            cols += [me, idx(i, b + 1), idx(i, b - 1)]
            vals += [-(cm + cp + 2 * ca), ca, ca]
            if i == 1:
                rows.append(me); cols.append(0); vals.append(cm)
            else:
                rows.append(me); cols.append(idx(i - 1, b)); vals.append(cm)
            if i == n_int:
                brow.append(me); bcol.append(b); bval.append(cp)
            else:
                rows.append(me); cols.append(idx(i + 1, b)); vals.append(cp)
    L = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    B = sp.csr_matrix((bval, (brow, bcol)), shape=(n, M))
    return L, B


def _ring_order(a, grid):
    """(q, n_r, n_theta, ...) -> (n_r, q*n_theta, ...) ring ordering."""
    moved = np.moveaxis(a, 0, 1)
    return moved.reshape((a.shape[1], grid.q * grid.n_theta) + a.shape[3:])


def _flux_divergence(grid, flux, y_scheme):
    """Conservative x-plane divergence plus y-divergence of a sheeted flux, on the plane unknowns."""
    from .solver import flux_polar

    fr, ft, fy = flux_polar(flux)
    fr = _ring_order(fr, grid)  # (N-1, M, *ny)
    ft = _ring_order(ft, grid)
    q, nt = grid.q, grid.n_theta
    M = q * nt
    dth = 2 * np.pi / nt
    r = np.concatenate([[0.0], grid.r])
    n_int = grid.n_rhat - 2
    tail = fr.shape[2:]
    div = np.zeros((1 + n_int * M,) + tail)
    # f_r at half nodes; next to the axis use the ring-1 value
    fr_nodes = np.concatenate([fr[:1], fr], axis=0)  # index i -> ring i (0 uses ring 1)
    for i in range(1, n_int + 1):
        rm = 0.5 * (r[i] + r[i - 1])
        rp = 0.5 * (r[i] + r[i + 1])
        dv = 0.5 * (r[i + 1] - r[i - 1])
        f_p = 0.5 * (fr_nodes[i] + fr_nodes[i + 1])
        f_m = 0.5 * (fr_nodes[i] + fr_nodes[i - 1]) if i > 1 else fr_nodes[1]
        radial = (rp * f_p - rm * f_m) / (r[i] * dv)
        ang = (np.roll(ft[i - 1], -1, axis=0) - np.roll(ft[i - 1], 1, axis=0)) / (2 * r[i] * dth)
        div[1 + (i - 1) * M: 1 + i * M] = radial + ang
    # axis cell: outward flux of f_r through the circle r_1/2 over all sheets
    r_half = 0.5 * r[1]
    div[0] = 2.0 * fr[0].mean(axis=0) / r_half
    # y-divergence
    for j, a in enumerate(fy):
        a = _ring_order(a, grid)
        D1 = _y_first_derivative(grid.n_y[j], grid.periods[j], y_scheme).toarray()
        ax_y = 1 + j  # within (ring, M, *ny) minus leading radial index
        plane = np.zeros((1 + n_int * M,) + tail)
        plane[1:] = a[:n_int].reshape((n_int * M,) + tail)
        plane[0] = 0.0
        plane = np.moveaxis(np.tensordot(D1, np.moveaxis(plane, ax_y, 0), axes=(1, 0)), 0, ax_y)
        div = div + plane
    return div


def direct_fd_reference(p, y_scheme: str = "fd"):
    """Solve the Dirichlet problem of ``p`` on the sheeted grid by sparse direct solve."""
    grid = p.grid
    if len(grid.n_y) != 1:
        raise NotImplementedError("the reference solver supports n = 3 only")
    M = grid.q * grid.n_theta
    n_plane = 1 + (grid.n_rhat - 2) * M
    Ny = grid.n_y[0]
    total = n_plane * Ny
    if total > MAX_UNKNOWNS:
        raise SizeGuardError(f"{total} unknowns exceeds the reference solver guard {MAX_UNKNOWNS}")

    L, Bmat = _plane_operator(grid)
    Iy = sp.identity(Ny, format="csr")
    D2 = _y_second_derivative(Ny, grid.periods[0], y_scheme)
    # ordering: plane index major, y minor
    A = sp.kron(L, Iy, format="csr") + sp.kron(sp.identity(n_plane, format="csr"), D2, format="csr")

    rhs = np.zeros((n_plane, Ny))
    if p.g is not None:
        g_ring = _ring_order(p.g.data, grid)
        rhs[1:] += g_ring[: grid.n_rhat - 2].reshape(-1, Ny)
        rhs[0] += unfold(p.g).data[0, 0]
    if p.flux is not None:
        rhs += _flux_divergence(grid, p.flux, y_scheme)
    bvals = np.zeros((M, Ny))
    if p.phi is not None:
        bvals = _ring_order(p.phi.data[:, -1:], grid)[0]
    rhs -= Bmat @ bvals

    # minimum-degree ordering on A^T + A keeps the fill of the y-coupled system moderate
    lu = splu(A.tocsc(), permc_spec="MMD_AT_PLUS_A")
    sol = lu.solve(rhs.reshape(-1)).reshape(n_plane, Ny)
    axis = sol[0]
    body = sol[1:].reshape(grid.n_rhat - 2, M, Ny)
    data0 = np.concatenate([np.broadcast_to(axis, (1, M, Ny)), body, bvals[None]], axis=0)
    return fold(_as_unfolded(grid, data0))


def _as_unfolded(grid, data):
    from ..unfold import UnfoldedField

    return UnfoldedField(grid, data)
