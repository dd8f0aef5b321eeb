"""Dirichlet solver for  Delta u = div f + g  with q-valued, k-fold symmetric data.

The data are unfolded to the w-disk, Fourier analyzed in (theta_hat, y), and
each surviving mode is a radial two-point problem. Angular modes m = 0 (mod q)
form the sheet average and are all kept; the average-free remainder keeps only
the admissible modes (m = 0 mod k, m != 0 mod q). Nyquist modes are dropped.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionError, SymmetryError
from ..mv_core.field import Grid, SheetedField
from ..mv_core.ops import average_free_decompose, kfold_symmetry_defect
from ..unfold import UnfoldedField, fold, mode_admissible, unfold
from .radial import solve_modes
from .spectrum import analyze_array, mode_numbers, nyquist_mask, synthesize_array
from .weak import weak_residual_unfolded

LEAKAGE_TOL = 1e-10
DEFAULT_CHUNK = 256


@dataclass(frozen=True, eq=False)
class PoissonProblem:
    """Data for  Delta u = div f + g  in the cylinder, u = phi on r = 1.

    ``phi`` is any SheetedField whose outer ring (r = 1) carries the boundary
    values. ``flux`` has n components (f^x1, f^x2, f^y1, ...) per node.
    """

    grid: Grid
    phi: SheetedField | None = None
    g: SheetedField | None = None
    flux: SheetedField | None = None
    mu: float = 0.25
    sym_tol: float = 1e-8
    m_max: int | None = None
    z_max: int | None = None

    def __post_init__(self):
        for name in ("phi", "g", "flux"):
            fld = getattr(self, name)
            if fld is not None and fld.grid != self.grid:
                raise DimensionError(f"{name} lives on a different grid")
        if self.flux is not None and (not self.flux.is_vector or self.flux.m != self.grid.n):
            raise DimensionError(f"flux needs {self.grid.n} components per node")
        if self.g is not None and self.g.is_vector:
            raise DimensionError("g must be scalar")
        if not (0 < self.mu < 1.0 / self.grid.q):
            raise ValueError(f"mu must lie in (0, 1/q), got {self.mu}")


@dataclass
class SolveReport:
    forbidden_mode_energy: float = 0.0
    boundary_error: float = 0.0
    weak_residual: float = 0.0
    modes_solved: int = 0
    wall_time_ms: float = 0.0
    leakage: float = 0.0
    warnings: list = field(default_factory=list)

    def to_text(self) -> str:
        keys = ["forbidden_mode_energy", "boundary_error", "weak_residual", "modes_solved", "wall_time_ms"]
        lines = [f"{k} = {getattr(self, k)!r}" for k in keys]
        lines += [f"warning = {w}" for w in self.warnings]
        return "\n".join(lines) + "\n"


def flux_polar(flux: SheetedField):
    """x-plane polar components (f_r, f_theta) and the y-components of a sheeted flux."""
    grid = flux.grid
    _, th, _ = grid.sheet_coords()
    c, s = np.cos(th), np.sin(th)
    f1 = flux.data[..., 0]
    f2 = flux.data[..., 1]
    fr = c * f1 + s * f2
    ft = -s * f1 + c * f2
    fy = [flux.data[..., 2 + j] for j in range(len(grid.n_y))]
    return fr, ft, fy


def _unfold_array(grid, data, axis_value=None):
    axis = np.zeros(grid.n_y) if axis_value is None else axis_value
    return unfold(SheetedField(grid, data, axis)).data


def unfolded_flux(grid: Grid, flux: SheetedField):
    """w-frame flux (F_r, F_t) = q rhat^(q-1) (f_r, f_theta) and y-flux, all on the unfolded grid."""
    fr, ft, fy = flux_polar(flux)
    q = grid.q
    scale = (q * grid.rhat ** (q - 1)).reshape((-1,) + (1,) * (1 + len(grid.n_y)))
    Fr = _unfold_array(grid, fr) * scale
    Ft = _unfold_array(grid, ft) * scale
    # the axis row carries no in-plane flux
    Fr[0] = 0.0
    Ft[0] = 0.0
    fy0 = [_unfold_array(grid, a) for a in fy]
    return Fr, Ft, fy0


def check_symmetry(p: PoissonProblem):
    grid = p.grid
    checks = []
    if p.phi is not None:
        ring = SheetedField(grid, np.broadcast_to(p.phi.data[:, -1:], p.phi.data.shape))
        checks.append(("phi", ring))
    if p.g is not None:
        checks.append(("g", p.g))
    if p.flux is not None:
        fr, ft, fy = flux_polar(p.flux)
        for name, a in [("flux_r", fr), ("flux_theta", ft)] + [(f"flux_y{j + 1}", a) for j, a in enumerate(fy)]:
            checks.append((name, SheetedField(grid, a)))
    for name, fld in checks:
        scale = fld.max_abs()
        if scale == 0:
            continue
        defect = kfold_symmetry_defect(fld)
        if defect > p.sym_tol * scale:
            raise SymmetryError(f"{name} is not k-fold symmetric: defect {defect:.3e} (scale {scale:.3e})")


def solved_mode_mask(grid: Grid, m_max=None, z_max=None) -> np.ndarray:
    """Modes handed to the radial solver: sheet-average modes plus admissible ones, no Nyquist."""
    m = mode_numbers(grid.n_theta_hat)
    keep_m = np.array([(mm % grid.q == 0) or mode_admissible(int(mm), None, grid.q, grid.k) for mm in m])
    if m_max is not None:
        keep_m &= np.abs(m) <= m_max
    mask = np.broadcast_to(keep_m.reshape((-1,) + (1,) * len(grid.n_y)), (grid.n_theta_hat, *grid.n_y)).copy()
    if z_max is not None:
        for j, N in enumerate(grid.n_y):
            zj = np.abs(mode_numbers(N))
            shape = [1] * (1 + len(grid.n_y))
            shape[1 + j] = N
            mask &= (zj <= z_max).reshape(shape)
    mask &= ~nyquist_mask(grid)
    return mask


def kappa_vectors(grid: Grid):
    """Per-direction wavenumbers broadcastable over (n_theta_hat, *n_y)."""
    out = []
    for j, kw in enumerate(grid.wavenumbers()):
        shape = [1] * (1 + len(grid.n_y))
        shape[1 + j] = -1
        out.append(kw.reshape(shape))
    return out


def forbidden_energy(u: SheetedField) -> float:
    """Relative energy of the average-free part of u in non-admissible modes."""
    grid = u.grid
    _, free = average_free_decompose(u)
    free = SheetedField(grid, free.data, np.zeros(grid.n_y))
    c = analyze_array(grid, unfold(free).data)
    energy = (np.abs(c) ** 2).sum(axis=0)
    total = energy.sum()
    if total == 0:
        return 0.0
    m = mode_numbers(grid.n_theta_hat)
    ok = np.array([mode_admissible(int(mm), None, grid.q, grid.k) for mm in m])
    bad = energy[~ok].sum()
    return float(bad / total)


def _tail_energy(coeffs, mask):
    e = (np.abs(coeffs) ** 2).sum(axis=0)
    tot = e.sum()
    if tot == 0:
        return 0.0
    return float(e[~mask].sum() / tot)


def solve_dirichlet(p: PoissonProblem, workers: int = 1, chunk: int = DEFAULT_CHUNK,
                    compute_residual: bool = True, n_tests: int = 20, validate: bool = True):
    """Solve the Dirichlet problem; returns (SheetedField, SolveReport)."""
    t0 = time.perf_counter()
    grid = p.grid
    if validate:
        check_symmetry(p)
    report = SolveReport()
    q = grid.q
    ny = len(grid.n_y)
    N = grid.n_rhat
    spec_shape = (grid.n_theta_hat, *grid.n_y)

    if p.phi is not None:
        ring = p.phi.data[:, -1]
        ring0 = ring.reshape((grid.n_theta_hat,) + tuple(grid.n_y))
        bc_c = analyze_array(grid, ring0[None])[0]
    else:
        ring0 = np.zeros(spec_shape)
        bc_c = np.zeros(spec_shape, dtype=complex)

    g0 = None
    src = np.zeros((N,) + spec_shape, dtype=complex)
    if p.g is not None:
        g0 = unfold(p.g).data
        src += analyze_array(grid, g0)
    Fr = Ft = None
    fy0 = None
    Fr_c = Ft_c = None
    if p.flux is not None:
        Fr, Ft, fy0 = unfolded_flux(grid, p.flux)
        Fr_c = analyze_array(grid, Fr)
        Ft_c = analyze_array(grid, Ft)
        for kv, a in zip(kappa_vectors(grid), fy0):
            src += 1j * kv[None] * analyze_array(grid, a)

    mask = solved_mode_mask(grid, p.m_max, p.z_max)
    leak = max(
        _tail_energy(bc_c[None], mask),
        _tail_energy(src, mask),
        _tail_energy(Fr_c, mask) if Fr_c is not None else 0.0,
        _tail_energy(Ft_c, mask) if Ft_c is not None else 0.0,
    )
    report.leakage = leak
    if leak > LEAKAGE_TOL:
        report.warnings.append(f"data energy outside the solved modes: {leak:.3e} (spectral leakage)")

    idx = np.nonzero(mask)
    m_all = mode_numbers(grid.n_theta_hat)[idx[0]]
    kappa2 = np.zeros(m_all.shape)
    for j, kw in enumerate(grid.wavenumbers()):
        kappa2 = kappa2 + kw[idx[1 + j]] ** 2
    B = m_all.size
    sel = (slice(None),) + idx
    src_modes = src[sel].T  # (B, N)
    bc_modes = bc_c[idx]
    fr_modes = Fr_c[sel].T if Fr_c is not None else None
    ft_modes = Ft_c[sel].T if Ft_c is not None else None

    out = np.zeros((B, N), dtype=complex)
    bounds = [(s, min(s + chunk, B)) for s in range(0, B, max(1, chunk))]

    def run(b):
        s, e = b
        out[s:e] = solve_modes(
            m_all[s:e], kappa2[s:e], q, N, src_modes[s:e], bc_modes[s:e],
            None if fr_modes is None else fr_modes[s:e],
            None if ft_modes is None else ft_modes[s:e],
        )

    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            list(ex.map(run, bounds))
    else:
        for b in bounds:
            run(b)

    coeffs = np.zeros((N,) + spec_shape, dtype=complex)
    coeffs[sel] = out.T
    u0 = synthesize_array(grid, coeffs)
    # the axis row holds only m = 0 content; make it exactly constant in theta_hat
    u0[0] = u0[0].mean(axis=0, keepdims=True)
    u = fold(UnfoldedField(grid, u0))

    report.modes_solved = int(B)
    report.boundary_error = float(np.abs(u.data[:, -1] - (p.phi.data[:, -1] if p.phi is not None else 0.0)).max())
    report.forbidden_mode_energy = forbidden_energy(u)
    if compute_residual:
        report.weak_residual = weak_residual_unfolded(grid, u0, g0, Fr, Ft, fy0, n_tests=n_tests)
    report.wall_time_ms = (time.perf_counter() - t0) * 1e3
    return u, report
