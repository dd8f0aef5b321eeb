"""Picard iteration for small-data quasilinear systems  Delta u = div F(Du) + G(u, Du).

Each step solves a linear Poisson problem with the previous iterate's flux
F(Du) and source G(u, Du). Gradients go through the unfolded representation,
where iterates are smooth up to the axis.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DivergenceError, InvalidProblemError, InvariantViolation
from .mv_core.field import SheetedField
from .mv_core.norms import holder_seminorm
from .mv_core.ops import kfold_symmetry_defect
from .poisson.solver import PoissonProblem, solve_dirichlet, unfolded_flux
from .poisson.weak import WeakForm, test_fields
from .unfold import gradient_x, unfold


@dataclass(frozen=True)
class Nonlinearity:
    """F: (..., m, n) -> (..., m, n) and G: ((..., m), (..., m, n)) -> (..., m).

    ``P[..., kappa, i]`` is D_i u^kappa. ``G=None`` means G = 0.
    """

    m: int
    F: Callable
    G: Callable | None = None
    name: str = "custom"
    # True when F and G vanish identically, so T is constant in v
    trivial: bool = False

    def flux(self, P):
        return self.F(P)

    def source(self, Z, P):
        if self.G is None:
            return np.zeros(P.shape[:-1])
        return self.G(Z, P)


def _mse_F(P):
    s = np.sum(P * P, axis=(-2, -1), keepdims=True)
    # 1 - (1+s)^(-1/2) written to avoid cancellation for tiny s
    factor = s / (np.sqrt(1.0 + s) * (1.0 + np.sqrt(1.0 + s)))
    return P * factor


def builtin_mse() -> Nonlinearity:
    """Minimal surface equation written as Delta u = div(Du (1 - (1+|Du|^2)^{-1/2}))."""
    return Nonlinearity(m=1, F=_mse_F, name="mse")


def _mss_F(P):
    n = P.shape[-1]
    g = np.eye(n) + np.einsum("...ki,...kj->...ij", P, P)
    sqrt_det = np.sqrt(np.linalg.det(g))
    # rows of g^{-1} P^T, i.e. (g^{ij} P^kappa_j)
    ginv_P = np.linalg.solve(g, np.swapaxes(P, -1, -2))  # (..., n, m)
    return P - sqrt_det[..., None, None] * np.swapaxes(ginv_P, -1, -2)


def builtin_mss(m: int) -> Nonlinearity:
    """Graphical minimal surface system: F^i_kappa = P^kappa_i - sqrt(g) g^{ij} P^kappa_j."""
    if m < 1:
        raise InvalidProblemError("system size m must be >= 1")
    return Nonlinearity(m=m, F=_mss_F, name=f"mss:{m}")


def zero_nonlinearity(m: int = 1) -> Nonlinearity:
    return Nonlinearity(m=m, F=lambda P: np.zeros_like(P), name="zero", trivial=True)


_REGISTRY = {}


def register_nonlinearity(name: str, factory: Callable[[], Nonlinearity]) -> None:
    """Make a custom nonlinearity selectable by id string."""
    _REGISTRY[name] = factory


def nonlinearity_from_id(ident: str) -> Nonlinearity:
    ident = ident.strip()
    if ident == "mse":
        return builtin_mse()
    if ident.startswith("mss:"):
        return builtin_mss(int(ident.split(":", 1)[1]))
    if ident == "zero":
        return zero_nonlinearity()
    if ident in _REGISTRY:
        return _REGISTRY[ident]()
    raise InvalidProblemError(f"unknown nonlinearity {ident!r}")


def rotation_matrix(n: int, k: int) -> np.ndarray:
    R = np.eye(n)
    a = 2 * np.pi / k
    R[:2, :2] = [[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]]
    return R


def probe_invariants(nl: Nonlinearity, n: int = 3, k: int = 3, samples: int = 64, seed: int = 0) -> dict:
    """Numerical checks of F(0)=0, DF(0)=0, G(0,0)=0, DG(0,0)=0 and k-rotation equivariance."""
    rng = np.random.default_rng(seed)
    m = nl.m
    P = rng.standard_normal((samples, m, n))
    P /= np.linalg.norm(P, axis=(-2, -1), keepdims=True)
    Z = rng.standard_normal((samples, m))
    Z /= np.linalg.norm(Z, axis=-1, keepdims=True)
    zero_P = np.zeros((1, m, n))
    zero_Z = np.zeros((1, m))
    out = {"F0": float(np.abs(nl.flux(zero_P)).max()), "G0": float(np.abs(nl.source(zero_Z, zero_P)).max())}
    t = 1e-3
    Ft = nl.flux(t * P)
    out["F_quadratic"] = float(np.linalg.norm(Ft, axis=(-2, -1)).max() / t ** 2)
    Gt = nl.source(t * Z, t * P)
    out["G_quadratic"] = float(np.linalg.norm(Gt, axis=-1).max() / t ** 2)
    R = rotation_matrix(n, k)
    Pb = rng.standard_normal((samples, m, n)) * 0.5
    Zb = rng.standard_normal((samples, m)) * 0.5
    lhs = nl.flux(Pb @ R)
    rhs = nl.flux(Pb) @ R
    out["F_equivariance"] = float(np.abs(lhs - rhs).max())
    out["G_invariance"] = float(np.abs(nl.source(Zb, Pb @ R) - nl.source(Zb, Pb)).max())
    return out


@dataclass
class IterationTrace:
    iters: list = field(default_factory=list)
    update_norms: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    ratios: list = field(default_factory=list)
    symmetry_defects: list = field(default_factory=list)
    converged: bool = False

    def append(self, it, upd, res, ratio, defect):
        self.iters.append(it)
        self.update_norms.append(upd)
        self.residuals.append(res)
        self.ratios.append(ratio)
        self.symmetry_defects.append(defect)

    def __len__(self):
        return len(self.iters)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["iter", "update_norm", "residual", "ratio"])
        for row in zip(self.iters, self.update_norms, self.residuals, self.ratios):
            w.writerow([row[0]] + [repr(float(v)) for v in row[1:]])
        return buf.getvalue()


@dataclass(frozen=True)
class PicardOptions:
    tol: float = 1e-10
    residual_tol: float = 1e-8
    max_iters: int = 30
    relaxation: float = 1.0
    mu: float | None = None
    growth_limit: int = 3
    workers: int = 1
    symmetry_slack: float = 1e-10
    n_tests: int = 20


def _components(u: SheetedField, m: int):
    if m == 1:
        return [u if not u.is_vector else u.component(0)]
    return [u.component(i) for i in range(m)]


def _stack(comps):
    if len(comps) == 1:
        return comps[0]
    return SheetedField.stack(comps)


def gradient_tensor(u: SheetedField, m: int) -> np.ndarray:
    """Sheeted D u as an array (q, n_r, n_theta, *n_y, m, n)."""
    grads = [gradient_x(unfold(c)).data for c in _components(u, m)]
    return np.stack(grads, axis=-2)


def _values(u: SheetedField, m: int) -> np.ndarray:
    return u.data[..., None] if m == 1 and not u.is_vector else u.data


def _c1mu_norm(d: SheetedField, m: int, mu: float) -> float:
    total = 0.0
    for c in _components(d, m):
        rep = holder_seminorm(c, mu, derivative_order=1)
        total += c.max_abs() + rep.sup_abs + rep.holder_seminorm_estimate
    return total


def apply_T(nl: Nonlinearity, phi: SheetedField, v: SheetedField, workers: int = 1, mu: float | None = None):
    """One application of the fixed-point map: solve with data (F(Dv), G(v, Dv))."""
    grid = phi.grid
    m = nl.m
    mu = mu if mu is not None else 0.5 / grid.q
    P = gradient_tensor(v, m)
    Fv = nl.flux(P)  # (..., m, n)
    Gv = nl.source(_values(v, m), P)  # (..., m)
    out = []
    for kappa, phi_c in enumerate(_components(phi, m)):
        flux = SheetedField(grid, Fv[..., kappa, :], np.zeros(tuple(grid.n_y) + (grid.n,)))
        g = SheetedField(grid, Gv[..., kappa]) if nl.G is not None else None
        prob = PoissonProblem(grid, phi=phi_c, g=g, flux=flux, mu=mu)
        u_c, _ = solve_dirichlet(prob, workers=workers, compute_residual=False, validate=False)
        out.append(u_c)
    return _stack(out)


def weak_residual(u: SheetedField, nl: Nonlinearity, n_tests: int = 20, seed: int = 0) -> float:
    """Max over the seeded test family of the normalized weak-form defect of Delta u = div F(Du) + G."""
    grid = u.grid
    m = nl.m
    P = gradient_tensor(u, m)
    Fu = nl.flux(P)
    Gu = nl.source(_values(u, m), P)
    form = WeakForm(grid)
    tests = test_fields(grid, n_tests, seed)
    worst = 0.0
    for kappa, c in enumerate(_components(u, m)):
        u0 = unfold(c).data
        flux = SheetedField(grid, Fu[..., kappa, :], np.zeros(tuple(grid.n_y) + (grid.n,)))
        Fr, Ft, fy = unfolded_flux(grid, flux)
        g0 = None
        if nl.G is not None:
            g0 = unfold(SheetedField(grid, Gu[..., kappa])).data
        worst = max(worst, form.residual(u0, tests, g0, Fr, Ft, fy))
    return worst


def picard_solve(nl: Nonlinearity, phi: SheetedField, opts: PicardOptions | None = None):
    """Iterate u_{j+1} = T(u_j) from u_0 = 0. Returns (u, IterationTrace).

    Raises DivergenceError (with the trace attached) when the update norm grows
    for ``growth_limit`` consecutive steps or becomes non-finite, and
    InvariantViolation if an iterate loses k-fold symmetry.
    """
    opts = opts or PicardOptions()
    grid = phi.grid
    m = nl.m
    if (m == 1) == phi.is_vector and not (m == 1 and phi.is_vector and phi.m == 1):
        if m != phi.m:
            raise InvalidProblemError(f"boundary data has {phi.m} components, nonlinearity expects {m}")
    mu = opts.mu if opts.mu is not None else 0.5 / grid.q
    phi_defect = max(kfold_symmetry_defect(c) for c in _components(phi, m))
    trace = IterationTrace()
    u = SheetedField.zeros(grid, None if m == 1 else m)
    prev_update = None
    growth = 0
    for it in range(1, opts.max_iters + 1):
        Tu = apply_T(nl, phi, u, workers=opts.workers, mu=mu)
        if opts.relaxation != 1.0:
            new = u * (1.0 - opts.relaxation) + Tu * opts.relaxation
        else:
            new = Tu
        if not np.all(np.isfinite(new.data)):
            trace.append(it, math.inf, math.inf, math.inf, math.inf)
            raise DivergenceError(f"non-finite iterate at step {it}", trace)
        diff = new - u
        upd = _c1mu_norm(diff, m, mu)
        res = weak_residual(new, nl, n_tests=opts.n_tests)
        ratio = upd / prev_update if prev_update else math.nan
        defect = max(kfold_symmetry_defect(c) for c in _components(new, m))
        trace.append(it, upd, res, ratio, defect)
        if not math.isfinite(upd):
            raise DivergenceError(f"non-finite update norm at step {it}", trace)
        if defect > phi_defect + opts.symmetry_slack * max(1.0, new.max_abs()):
            raise InvariantViolation(f"iterate {it} lost k-fold symmetry (defect {defect:.3e})")
        if prev_update is not None and upd > prev_update:
            growth += 1
            if growth >= opts.growth_limit:
                raise DivergenceError(
                    f"update norm grew for {growth} consecutive steps (now {upd:.3e})", trace
                )
        else:
            growth = 0
        u = new
        prev_update = upd
        if upd <= opts.tol or (nl.trivial and opts.relaxation == 1.0):
            trace.converged = True
            break
    return u, trace
