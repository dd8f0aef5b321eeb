"""Discrete sup and Hoelder quantities for sheeted fields.

The Hoelder seminorm is the sheet-by-sheet, half-plane-by-half-plane version:
for each sheet l and each half-plane {x2 > 0}, {x2 < 0} the ordinary seminorm
of u_l is estimated, and the estimates are summed. Estimates maximize
|f(X) - f(X')| / |X - X'|^mu over a fixed, seeded pair sample and are therefore
lower bounds of the true seminorm.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .field import SheetedField

DEFAULT_RANDOM_PAIRS = 20000


@dataclass(frozen=True)
class NormReport:
    sup_abs: float
    holder_mu: float
    holder_seminorm_estimate: float
    # (sheet, half) -> estimate; half is "upper" or "lower"
    per_sheet: dict = field(default_factory=dict)


def _node_coords(grid):
    """Cartesian coordinates of all nodes of one sheet, shape (n_r, n_theta, *n_y, n)."""
    r, th, ys = grid.sheet_coords()
    shape = grid.sheet_shape[1:]
    x1 = np.broadcast_to(r * np.cos(th), shape)
    x2 = np.broadcast_to(r * np.sin(th), shape)
    comps = [x1, x2] + [np.broadcast_to(y, shape) for y in ys]
    return np.stack(comps, axis=-1)


def _pair_ratio(v1, v2, x1, x2, mu, periods, vec):
    dv = v1 - v2
    if vec:
        dv = np.linalg.norm(dv, axis=-1)
    else:
        dv = np.abs(dv)
    dx = x1 - x2
    if periods:
        # minimal periodic image in the y-directions
        p = np.asarray(periods)
        dy = dx[..., 2:]
        dy = dy - p * np.round(dy / p)
        dx = np.concatenate([dx[..., :2], dy], axis=-1)
    dist = np.linalg.norm(dx, axis=-1)
    ok = dist > 0
    if not np.any(ok):
        return 0.0
    return float((dv[ok] / dist[ok] ** mu).max())


def _structured_max(vals, coords, mu, periods):
    """Max ratio over all angular pairs per ring, y-pairs per (r, theta), and radial neighbours."""
    best = 0.0
    n_r, n_t = vals.shape[:2]
    vec = vals.ndim > coords.ndim - 1
    # move spatial y axes into one flat axis
    ny = coords.shape[2:-1]
    n_yflat = int(np.prod(ny)) if ny else 1
    V = vals.reshape((n_r, n_t, n_yflat) + ((vals.shape[-1],) if vec else ()))
    X = coords.reshape(n_r, n_t, n_yflat, coords.shape[-1])
    ia, ib = np.triu_indices(n_t, 1)
    if ia.size:
        best = max(best, _pair_ratio(V[:, ia], V[:, ib], X[:, ia], X[:, ib], mu, periods, vec))
    if n_yflat > 1:
        ja, jb = np.triu_indices(n_yflat, 1)
        # subsample y pairs on big grids to keep memory bounded
        if ja.size > 4096:
            sel = np.linspace(0, ja.size - 1, 4096).astype(int)
            ja, jb = ja[sel], jb[sel]
        best = max(best, _pair_ratio(V[:, :, ja], V[:, :, jb], X[:, :, ja], X[:, :, jb], mu, periods, vec))
    if n_r > 1:
        best = max(best, _pair_ratio(V[1:], V[:-1], X[1:], X[:-1], mu, periods, vec))
    return best


def _random_max(vals, coords, mu, periods, n_pairs, rng):
    n_nodes = int(np.prod(coords.shape[:-1]))
    if n_nodes < 2 or n_pairs <= 0:
        return 0.0
    vec = vals.ndim > coords.ndim - 1
    V = vals.reshape((n_nodes,) + ((vals.shape[-1],) if vec else ()))
    X = coords.reshape(n_nodes, coords.shape[-1])
    a = rng.integers(0, n_nodes, size=n_pairs)
    b = rng.integers(0, n_nodes, size=n_pairs)
    return _pair_ratio(V[a], V[b], X[a], X[b], mu, periods, vec)


def holder_seminorm(
    f: SheetedField,
    mu: float,
    derivative_order: int = 0,
    n_random: int = DEFAULT_RANDOM_PAIRS,
    seed: int = 0,
) -> NormReport:
    """Sampled estimate of the sheet-wise Hoelder seminorm of f (or of D f).

    ``derivative_order=1`` applies the seminorm to the full gradient
    (in-plane and y components) computed through the unfolded representation.
    """
    if not (0 < mu <= 1):
        raise ValueError(f"mu must lie in (0, 1], got {mu}")
    if derivative_order not in (0, 1):
        raise ValueError("derivative_order must be 0 or 1")
    grid = f.grid
    if derivative_order == 1:
        from ..unfold import gradient_x, unfold

        target = gradient_x(unfold(f))
    else:
        target = f
    data = target.data
    coords = _node_coords(grid)
    periods = grid.periods
    upper = grid.theta < np.pi
    rng = np.random.default_rng(seed)
    per_sheet = {}
    total = 0.0
    for l in range(grid.q):
        for name, mask in (("upper", upper), ("lower", ~upper)):
            vals = data[l][:, mask]
            X = coords[:, mask]
            est = _structured_max(vals, X, mu, periods)
            est = max(est, _random_max(vals, X, mu, periods, n_random, rng))
            per_sheet[(l + 1, name)] = est
            total += est
    sup = target.max_abs()
    return NormReport(sup_abs=sup, holder_mu=mu, holder_seminorm_estimate=total, per_sheet=per_sheet)


def sup_norm(f: SheetedField) -> float:
    return f.max_abs()
