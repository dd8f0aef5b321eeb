"""Command line entry point: ``branchsolve <command> --config <path> [--out DIR] [--threads N] [--seed S]``.

Exit codes: 0 success, 2 invariant violation or invalid problem,
3 divergence / no convergence, 4 I/O or config-file error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from ..diagnostics import (
    branch_set,
    cauchy_bound_fit,
    decay_exponent,
    frequency_function,
    max_principle_check,
)
from ..errors import BranchSolveError, DivergenceError
from ..mv_core.field import SheetedField
from ..mv_core.fileio import read_field, write_field
from ..nonlinear import PicardOptions, nonlinearity_from_id, picard_solve
from ..poisson import PoissonProblem, direct_fd_reference, solve_dirichlet
from .config import COMMANDS, ConfigSyntaxError, RunConfig, load_config, with_overrides
from .generators import (
    gen_branched_harmonic,
    gen_manufactured,
    random_average_free_field,
    standard_manufactured_terms,
)

log = logging.getLogger("branchsolve")

EXIT_OK, EXIT_INVARIANT, EXIT_DIVERGED, EXIT_IO = 0, 2, 3, 4


class FieldIOError(BranchSolveError, OSError):
    pass


def _read(cfg, path):
    full = cfg.path(path)
    try:
        return read_field(full)
    except (OSError, ValueError) as exc:
        raise FieldIOError(f"cannot read field file {full}: {exc}") from exc


def _write_text(path, text):
    with open(path, "w") as fh:
        fh.write(text)


def build_data(cfg: RunConfig):
    """Boundary data, source, flux and (when known) the exact solution for a config."""
    grid = cfg.grid()
    g = flux = exact = None
    if cfg.boundary == "zero":
        phi = SheetedField.zeros(grid)
    elif cfg.boundary == "harmonic":
        m = cfg.boundary_m if cfg.boundary_m is not None else cfg.k
        phi = gen_branched_harmonic(grid, m, z=cfg.boundary_z, y_mod=cfg.y_mod, amp=cfg.eps)
        if cfg.y_mod == 0.0:
            exact = phi
    elif cfg.boundary == "manufactured":
        man = gen_manufactured(grid, standard_manufactured_terms(cfg.q, cfg.k))
        phi, g, flux, exact = man.u * cfg.eps, man.g * cfg.eps, man.flux * cfg.eps, man.u * cfg.eps
    elif cfg.boundary == "random":
        phi = random_average_free_field(grid, seed=cfg.seed, symmetric=True) * cfg.eps
    else:
        phi = _read(cfg, cfg.boundary_file)
    if cfg.g_file:
        g = _read(cfg, cfg.g_file)
    if cfg.flux_file:
        flux = _read(cfg, cfg.flux_file)
    return phi, g, flux, exact


def _rel_linf(a, b):
    scale = max(np.abs(b.data).max(), 1e-300)
    return float(np.abs(a.data - b.data).max() / scale)


def cmd_solve_poisson(cfg, out):
    phi, g, flux, exact = build_data(cfg)
    prob = PoissonProblem(cfg.grid(), phi=phi, g=g, flux=flux)
    u, report = solve_dirichlet(prob, workers=cfg.threads)
    write_field(os.path.join(out, "u.field"), u)
    text = report.to_text()
    if exact is not None:
        text += f"max_error_vs_exact = {float(np.abs(u.data - exact.data).max())!r}\n"
    _write_text(os.path.join(out, "report.txt"), text)
    return EXIT_OK


def _vector_boundary(phi, m):
    if m == 1:
        return phi
    return SheetedField.stack([phi * (1.0 / (i + 1)) for i in range(m)])


def cmd_solve_nonlinear(cfg, out):
    nl = nonlinearity_from_id(cfg.nonlinearity)
    phi, _, _, _ = build_data(cfg)
    phi = _vector_boundary(phi, nl.m)
    opts = PicardOptions(tol=cfg.tol, residual_tol=cfg.residual_tol, max_iters=cfg.max_iters,
                         relaxation=cfg.relaxation, workers=cfg.threads)
    trace_path = os.path.join(out, "trace.csv")
    try:
        u, trace = picard_solve(nl, phi, opts)
    except DivergenceError as exc:
        if exc.trace is not None:
            _write_text(trace_path, exc.trace.to_csv())
        _write_text(os.path.join(out, "report.txt"), f"status = diverged\nmessage = {exc}\n")
        log.error("diverged: %s", exc)
        return EXIT_DIVERGED
    _write_text(trace_path, trace.to_csv())
    if not trace.converged:
        _write_text(os.path.join(out, "report.txt"),
                    f"status = not_converged\niterations = {len(trace)}\n"
                    f"update_norm = {trace.update_norms[-1]!r}\n")
        log.error("no convergence within %d iterations", cfg.max_iters)
        return EXIT_DIVERGED
    res = trace.residuals[-1]
    lines = [
        "status = converged",
        f"iterations = {len(trace)}",
        f"update_norm = {trace.update_norms[-1]!r}",
        f"weak_residual = {res!r}",
    ]
    if res > cfg.residual_tol:
        lines[0] = "status = residual_too_large"
        _write_text(os.path.join(out, "report.txt"), "\n".join(lines) + "\n")
        return EXIT_INVARIANT
    write_field(os.path.join(out, "u.field"), u)
    _write_text(os.path.join(out, "report.txt"), "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_diagnose(cfg, out):
    grid = cfg.grid()
    if cfg.field_file:
        f = _read(cfg, cfg.field_file)
        grid = f.grid
    else:
        f = build_data(cfg)[0]
    summary = []

    def attempt(name, fn):
        try:
            return fn()
        except (BranchSolveError, ValueError) as exc:
            summary.append(f"{name} = unavailable ({exc})")
            return None

    if not f.is_vector:
        fit = attempt("decay_slope", lambda: decay_exponent(f, False))
        if fit is not None:
            _write_text(os.path.join(out, "decay.csv"), fit.to_csv())
            summary.append(f"decay_slope = {fit.slope!r}")
            summary.append(f"decay_stderr = {fit.stderr!r}")
        gfit = attempt("gradient_slope", lambda: decay_exponent(f, True))
        if gfit is not None:
            _write_text(os.path.join(out, "decay_gradient.csv"), gfit.to_csv())
            summary.append(f"gradient_slope = {gfit.slope!r}")
    y0 = cfg.y0 if cfg.y0 is not None else tuple(0.5 * p for p in grid.periods)
    prof = attempt("frequency", lambda: frequency_function(f, y0, cfg.radii))
    if prof is not None:
        _write_text(os.path.join(out, "frequency.csv"), prof.to_csv())
    cf = attempt("cauchy", lambda: cauchy_bound_fit(f, cfg.p_max, cfg.R))
    if cf is not None:
        _write_text(os.path.join(out, "cauchy.csv"), cf.to_csv())
        summary.append(f"C_estimate = {cf.C_estimate!r}")
        summary += [f"warning = {w}" for w in cf.warnings]
    bs = branch_set(f)
    trace = bs.trace if bs.trace.ndim == len(grid.n_y) else bs.trace[..., 0]
    ys = [y.ravel() for y in np.meshgrid(*grid.y, indexing="ij")]
    head = ",".join(f"y{j + 1}" for j in range(len(ys))) + ",trace"
    rows = [head] + [",".join(f"{v:.17g}" for v in vals) for vals in zip(*ys, trace.ravel())]
    _write_text(os.path.join(out, "branch_set.csv"), "\n".join(rows) + "\n")
    summary.append(f"max_fourth_difference = {bs.max_fourth_difference!r}")
    summary.append(f"max_principle_defect = {max_principle_check(f)!r}")
    _write_text(os.path.join(out, "summary.txt"), "\n".join(summary) + "\n")
    return EXIT_OK


def cmd_gen_example(cfg, out):
    phi, g, flux, _ = build_data(cfg)
    write_field(os.path.join(out, "example.field"), phi)
    if g is not None:
        write_field(os.path.join(out, "g.field"), g)
    if flux is not None:
        write_field(os.path.join(out, "flux.field"), flux)
    return EXIT_OK


def cmd_cross_check(cfg, out):
    phi, g, flux, _ = build_data(cfg)
    prob = PoissonProblem(cfg.grid(), phi=phi, g=g, flux=flux)
    u, _ = solve_dirichlet(prob, workers=cfg.threads, compute_residual=False)
    ref = direct_fd_reference(prob, y_scheme=cfg.y_scheme)
    gap = _rel_linf(u, ref)
    ok = gap <= cfg.crosscheck_tol
    _write_text(os.path.join(out, "crosscheck.txt"),
                f"rel_linf = {gap!r}\ntolerance = {cfg.crosscheck_tol!r}\npass = {'yes' if ok else 'no'}\n")
    return EXIT_OK if ok else EXIT_INVARIANT


HANDLERS = {
    "solve-poisson": cmd_solve_poisson,
    "solve-nonlinear": cmd_solve_nonlinear,
    "diagnose": cmd_diagnose,
    "gen-example": cmd_gen_example,
    "cross-check": cmd_cross_check,
}


def run(config, out: str | None = None, threads: int | None = None, seed: int | None = None,
        command: str | None = None) -> int:
    """Execute a run. ``config`` is a RunConfig or a path to a config file."""
    try:
        cfg = config if isinstance(config, RunConfig) else load_config(config)
        if threads is None and os.environ.get("BRANCHSOLVE_THREADS"):
            threads = int(os.environ["BRANCHSOLVE_THREADS"])
        cfg = with_overrides(cfg, out=out, threads=threads, seed=seed, command=command).validate()
        out_dir = cfg.out
        os.makedirs(out_dir, exist_ok=True)
        return HANDLERS[cfg.command](cfg, out_dir)
    except (ConfigSyntaxError, FieldIOError, OSError) as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO
    except DivergenceError as exc:
        log.error("diverged: %s", exc)
        return EXIT_DIVERGED
    except BranchSolveError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_INVARIANT


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="branchsolve", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True)
    ap.add_argument("--out")
    ap.add_argument("--threads", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("-v", "--verbose", action="store_true")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    return run(args.config, out=args.out, threads=args.threads, seed=args.seed, command=args.command)


if __name__ == "__main__":
    sys.exit(main())
