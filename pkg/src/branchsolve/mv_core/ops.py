"""Pointwise operations on sheeted fields: average/free split, k-fold symmetry, difference quotients."""

from __future__ import annotations

import numpy as np

from ..errors import ResolutionError
from .field import SheetedField


def average_free_decompose(f: SheetedField):
    """Split ``f`` into its sheet average and the average-free remainder.

    Returns ``(average, free)`` where ``average`` is a plain array of shape
    ``(n_r, n_theta, *n_y[, m])`` and ``free`` is a SheetedField whose sheets
    sum to zero at every node.
    """
    average = f.data.mean(axis=0)
    free_data = f.data - average[None]
    free_axis = None if f.axis is None else np.zeros_like(f.axis)
    return average, SheetedField(f.grid, free_data, free_axis)


def sheet_shift(q: int, k: int) -> int:
    """Sheet offset d paired with a 2*pi/k rotation in the x-plane.

    Rotating x by 2*pi/k and moving every sheet index by ``d = -k^{-1} mod q``
    (plus one when the rotation crosses the cut) is the same node permutation
    as rotating the unfolded disk by ``2*pi*s/k`` with ``q*s = 1 mod k``.
    """
    if q == 1:
        return 0
    return (-pow(k, -1, q)) % q


def _kfold_index(grid, power: int = 1):
    """Index arrays (sheet, theta) of the image of each (sheet, theta) node under g**power."""
    q, k, nt = grid.q, grid.k, grid.n_theta
    if nt % k:
        raise ResolutionError(
            f"per-sheet angular count {nt} not divisible by k={k}; need n_theta_hat % (k*q) == 0"
        )
    d = sheet_shift(q, k)
    step = nt // k
    L, J = np.meshgrid(np.arange(q), np.arange(nt), indexing="ij")
    for _ in range(power % k):
        J = J + step
        cross = J // nt
        J = J % nt
        L = (L + d + cross) % q
    return L, J


def kfold_action(f: SheetedField, power: int = 1) -> SheetedField:
    """Pull back ``f`` along the x-rotation by ``power * 2*pi/k`` with sheet relabeling.

    The returned field takes at node (l, r, theta) the value of ``f`` at the
    rotated node (l', r, theta + 2*pi/k). Fields with a trailing vector axis are
    treated componentwise, which is the right action for rotation-invariant
    components (for example polar components of a flux).
    """
    L, J = _kfold_index(f.grid, power)
    # data[L, :, J] puts the (q, nt) block first; move radius back to axis 1
    moved = f.data[L, :, J]
    moved = np.moveaxis(moved, 2, 1)
    return SheetedField(f.grid, moved, f.axis)


def kfold_symmetry_defect(f: SheetedField) -> float:
    """Max nodal mismatch between ``f`` and its image under the generating rotation."""
    g = kfold_action(f, 1)
    if f.data.size == 0:
        return 0.0
    return float(np.abs(g.data - f.data).max())


def symmetrize(f: SheetedField) -> SheetedField:
    """Average ``f`` over the k rotation-relabel actions (a projection onto symmetric fields)."""
    k = f.grid.k
    acc = np.zeros_like(f.data)
    for s in range(k):
        acc = acc + kfold_action(f, s).data
    return SheetedField(f.grid, acc / k, f.axis)


def gluing_defect(f: SheetedField) -> float:
    """Mismatch across the cut between sheet l (theta -> 2*pi) and sheet l+1 (theta -> 0).

    Both sides are extrapolated to the cut with one-sided cubic stencils on the
    half-offset nodes, so a smoothly glued field gives an O(dtheta^4) defect and a
    mis-glued one an O(1) defect.
    """
    d = f.data
    # weights for extrapolating from nodes at 1/2, 3/2, 5/2, 7/2 spacings to 0
    w = np.array([35.0, -35.0, 21.0, -5.0]) / 16.0
    right = np.tensordot(w, d[:, :, :4], axes=([0], [2]))  # theta -> 0+, per sheet
    left = np.tensordot(w, d[:, :, ::-1][:, :, :4], axes=([0], [2]))  # theta -> 2pi-
    right = np.roll(right, -1, axis=0)  # sheet l+1
    return float(np.abs(left - right).max())


def difference_quotient(f: SheetedField, h: float, eta) -> SheetedField:
    """(f(x, y + h*eta) - f(x, y)) / h per sheet, periodic in y.

    Exact index shift when ``h*eta`` is a multiple of the y-spacing in every
    direction, trigonometric interpolation otherwise.
    """
    if h == 0:
        raise ValueError("difference quotient needs h != 0")
    grid = f.grid
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    if eta.shape != (len(grid.n_y),):
        raise ValueError(f"eta must have {len(grid.n_y)} components")
    shift = h * eta
    steps = shift / np.asarray(grid.dy)
    y_axes = tuple(range(3, 3 + len(grid.n_y)))
    if np.allclose(steps, np.round(steps), rtol=0, atol=1e-12):
        n_steps = [-int(s) for s in np.round(steps)]
        shifted = np.roll(f.data, n_steps, axis=y_axes)
        ax_shift = None
        if f.axis is not None:
            ax_shift = np.roll(f.axis, n_steps, axis=tuple(range(len(grid.n_y))))
    else:
        shifted = _spectral_shift(f.data, shift, grid, y_axes)
        ax_shift = None
        if f.axis is not None:
            ax_shift = _spectral_shift(f.axis, shift, grid, tuple(range(len(grid.n_y))))
    axis = None if f.axis is None else (ax_shift - f.axis) / h
    return SheetedField(grid, (shifted - f.data) / h, axis)


def _spectral_shift(a, shift, grid, axes):
    spec = np.fft.fftn(a, axes=axes)
    for ax, s, kw, N in zip(axes, shift, grid.wavenumbers(), grid.n_y):
        kk = kw.copy()
        phase = np.exp(1j * kk * s)
        if N % 2 == 0:
            # Nyquist mode is a cosine on the grid; shift it as such
            phase[N // 2] = np.cos(kk[N // 2] * s)
        shape = [1] * a.ndim
        shape[ax] = N
        spec = spec * phase.reshape(shape)
    return np.fft.ifftn(spec, axes=axes).real
