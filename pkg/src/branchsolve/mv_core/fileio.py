"""Text container for sheeted and unfolded fields.

Header of ``key = value`` lines, a blank line, then CSV records
``sheet,i_r,i_theta,i_y...,value...``. Values are written with 17 significant
digits so a write/read cycle reproduces the arrays exactly.

Sheeted files number sheets 1..q; a stored axis trace uses sheet 0 with
i_r = i_theta = 0. Unfolded files use sheet 0 for every record and include the
axis row i_r = 0.
"""

from __future__ import annotations

import io

import numpy as np

from ..errors import DimensionError
from .field import Grid, SheetedField


def _fmt_list(vals):
    return ", ".join(repr(v) if isinstance(v, float) else str(v) for v in vals)


def _header(grid: Grid, representation: str, m: int, has_axis: bool) -> str:
    if representation == "sheeted":
        n_r, n_t = grid.n_rhat - 1, grid.n_theta
    else:
        n_r, n_t = grid.n_rhat, grid.n_theta_hat
    lines = [
        f"representation = {representation}",
        f"q = {grid.q}",
        f"k = {grid.k}",
        f"n = {grid.n}",
        f"N_r = {n_r}",
        f"N_theta = {n_t}",
        f"N_y = {_fmt_list(grid.n_y)}",
        f"rho = {_fmt_list([float(p) for p in grid.periods])}",
        f"m = {m}",
        f"axis = {'yes' if has_axis else 'no'}",
    ]
    return "\n".join(lines) + "\n\n"


def _records(prefix_cols, values) -> str:
    table = np.column_stack(prefix_cols + [values])
    n_idx = len(prefix_cols)
    buf = io.StringIO()
    fmt = ",".join(["%d"] * n_idx + ["%.17g"] * values.shape[1])
    np.savetxt(buf, table, fmt=fmt)
    return buf.getvalue()


def _index_columns(shape):
    idx = np.indices(shape).reshape(len(shape), -1)
    return [idx[i] for i in range(len(shape))]


def write_field(path, f) -> None:
    """Write a SheetedField or UnfoldedField."""
    from ..unfold import UnfoldedField

    grid = f.grid
    if isinstance(f, UnfoldedField):
        rep = "unfolded"
        data = f.data
        m = data.shape[-1] if data.ndim > len(grid.unfolded_shape) else 1
        flat = data.reshape(int(np.prod(grid.unfolded_shape)), m)
        cols = [np.zeros(flat.shape[0], dtype=int)] + _index_columns(grid.unfolded_shape)
        body = _records(cols, flat)
        head = _header(grid, rep, m, True)
    else:
        rep = "sheeted"
        m = f.m
        flat = f.data.reshape(int(np.prod(grid.sheet_shape)), m)
        cols = _index_columns(grid.sheet_shape)
        cols[0] = cols[0] + 1
        body = _records(cols, flat)
        if f.axis is not None:
            ax = f.axis.reshape(-1, m)
            ycols = _index_columns(tuple(grid.n_y))
            zeros = np.zeros(ax.shape[0], dtype=int)
            body = _records([zeros, zeros, zeros] + ycols, ax) + body
        head = _header(grid, rep, m, f.axis is not None)
    with open(path, "w") as fh:
        fh.write(head)
        fh.write(body)


def _parse_header(lines):
    meta = {}
    for line in lines:
        key, _, val = line.partition("=")
        meta[key.strip()] = val.strip()
    return meta


def read_field(path):
    """Read a field file written by :func:`write_field`."""
    from ..unfold import UnfoldedField

    with open(path) as fh:
        text = fh.read()
    head, sep, body = text.partition("\n\n")
    if not sep:
        raise DimensionError(f"{path}: missing blank line after header")
    meta = _parse_header([l for l in head.splitlines() if l.strip()])
    try:
        rep = meta.get("representation", "sheeted")
        q, k, n = int(meta["q"]), int(meta["k"]), int(meta["n"])
        n_r, n_t = int(meta["N_r"]), int(meta["N_theta"])
        n_y = tuple(int(v) for v in meta["N_y"].split(","))
        rho = tuple(float(v) for v in meta["rho"].split(","))
        m = int(meta.get("m", 1))
        has_axis = meta.get("axis", "no") == "yes"
    except (KeyError, ValueError) as exc:
        raise DimensionError(f"{path}: bad header ({exc})") from exc
    if rep == "unfolded":
        grid = Grid(q=q, k=k, n=n, n_rhat=n_r, n_theta_hat=n_t, n_y=n_y, periods=rho)
    else:
        grid = Grid(q=q, k=k, n=n, n_rhat=n_r + 1, n_theta_hat=n_t * q, n_y=n_y, periods=rho)
    table = np.loadtxt(io.StringIO(body), delimiter=",", ndmin=2)
    n_idx = 3 + len(n_y)
    if table.shape[1] != n_idx + m:
        raise DimensionError(f"{path}: expected {n_idx + m} columns, got {table.shape[1]}")
    idx = table[:, :n_idx].astype(int)
    vals = table[:, n_idx:]
    vec_tail = () if m == 1 else (m,)
    if rep == "unfolded":
        data = np.zeros(grid.unfolded_shape + vec_tail)
        data[tuple(idx[:, 1:].T)] = vals if m > 1 else vals[:, 0]
        return UnfoldedField(grid, data)
    data = np.zeros(grid.sheet_shape + vec_tail)
    axis = np.zeros(tuple(n_y) + vec_tail) if has_axis else None
    on_axis = idx[:, 0] == 0
    body_idx = idx[~on_axis]
    body_idx[:, 0] -= 1
    data[tuple(body_idx.T)] = vals[~on_axis] if m > 1 else vals[~on_axis, 0]
    if has_axis:
        ax_idx = idx[on_axis][:, 3:]
        axis[tuple(ax_idx.T)] = vals[on_axis] if m > 1 else vals[on_axis, 0]
    return SheetedField(grid, data, axis)
