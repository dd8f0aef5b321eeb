"""Radial decay exponents, maximum-principle defect."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import linregress

from ..errors import ResolutionError
from ..mv_core.field import SheetedField
from ..mv_core.ops import average_free_decompose
from ..unfold import UnfoldedField, gradient_x, unfold


@dataclass(frozen=True)
class DecayFit:
    slope: float
    stderr: float
    radii: np.ndarray
    sup_abs: np.ndarray

    def to_csv(self) -> str:
        rows = ["r,sup_abs"] + [f"{r:.17g},{s:.17g}" for r, s in zip(self.radii, self.sup_abs)]
        return "\n".join(rows) + "\n"


def gradient_magnitude(f: SheetedField) -> np.ndarray:
    """|D f| at every sheet node (Frobenius norm for vector fields)."""
    g = unfold(f)
    if not f.is_vector:
        return np.linalg.norm(gradient_x(g).data, axis=-1)
    acc = 0.0
    for i in range(f.m):
        comp = UnfoldedField(f.grid, g.data[..., i])
        acc = acc + (gradient_x(comp).data ** 2).sum(axis=-1)
    return np.sqrt(acc)


def decay_exponent(f: SheetedField, use_gradient: bool = False, r_window=(1e-6, 1e-2),
                   free_only: bool = True) -> DecayFit:
    """Least-squares slope of log sup_{theta, y, sheets} |f| (or |D f|) against log r.

    With ``free_only`` (default) the sheet average is removed first, since a
    nonzero average part would dominate near the axis.
    """
    lo, hi = r_window
    if not (0 < lo < hi <= 0.2):
        raise ValueError(f"radius window {r_window} must lie inside (0, 0.2]")
    if free_only:
        f = average_free_decompose(f)[1]
    grid = f.grid
    sel = (grid.r >= lo) & (grid.r <= hi)
    if sel.sum() < 4:
        raise ResolutionError(f"only {int(sel.sum())} radii in {r_window}; need at least 4")
    if use_gradient:
        vals = gradient_magnitude(f)
    else:
        vals = np.abs(f.data)
        if f.is_vector:
            vals = np.linalg.norm(f.data, axis=-1)
    # sup over sheets, angles and y for each ring
    sup = np.moveaxis(vals, 1, 0).reshape(grid.n_rhat - 1, -1).max(axis=1)
    r, s = grid.r[sel], sup[sel]
    if np.any(s <= 0):
        raise ValueError("field vanishes on a ring in the window; slope undefined")
    fit = linregress(np.log(r), np.log(s))
    return DecayFit(float(fit.slope), float(fit.stderr), r, s)


def max_principle_check(f: SheetedField) -> float:
    """Largest excess of interior values over the boundary ring r = 1 (max and min sides).

    Returns ``max(sup_int - sup_bdry, inf_bdry - inf_int)`` over components;
    nonpositive for fields obeying the maximum principle.
    """
    data = f.data if f.is_vector else f.data[..., None]
    axis = None
    if f.axis is not None:
        axis = f.axis if f.is_vector else f.axis[..., None]
    worst = -np.inf
    for i in range(data.shape[-1]):
        c = data[..., i]
        bdry = c[:, -1]
        inner = c[:, :-1]
        hi = inner.max() if inner.size else -np.inf
        lo = inner.min() if inner.size else np.inf
        if axis is not None:
            hi = max(hi, axis[..., i].max())
            lo = min(lo, axis[..., i].min())
        worst = max(worst, hi - bdry.max(), bdry.min() - lo)
    return float(worst)
