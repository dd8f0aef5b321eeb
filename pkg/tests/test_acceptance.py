"""End-to-end acceptance checks, one test per criterion."""

import os
import time

import numpy as np
import pytest

from branchsolve.app import fixture_path
from branchsolve.app.cli import run
from branchsolve.app.generators import (
    gen_branched_harmonic,
    gen_manufactured,
    random_average_free_field,
    standard_manufactured_terms,
)
from branchsolve.diagnostics import (
    cauchy_bound_fit,
    decay_exponent,
    frequency_function,
    max_principle_check,
    poincare_ratio,
    sobolev_ratio,
)
from branchsolve.mv_core import Grid, read_field
from branchsolve.poisson import PoissonProblem, direct_fd_reference, forbidden_energy, solve_dirichlet
from conftest import record_criterion


def trace_rows(path):
    lines = open(path).read().strip().splitlines()[1:]
    return [[float(x) for x in l.split(",")] for l in lines]


@pytest.fixture(scope="module")
def runs(tmp_path_factory):
    """Run every shipped fixture once through the CLI."""
    base = tmp_path_factory.mktemp("fixtures")
    out = {}
    for name in ("q2k3_harmonic", "q2k3_manufactured", "q3k4_manufactured", "mse-eps1e-3",
                 "mss2-eps1e-3", "mse-cauchy"):
        d = base / name
        code = run(fixture_path(name), out=str(d))
        out[name] = (code, d)
    return out


def test_criterion_01_branched_harmonic_reproduction():
    errs = {}
    elapsed = None
    for n in (257, 513, 1025):
        grid = Grid(q=2, k=3, n_rhat=n, n_theta_hat=48, n_y=(1,))
        phi = gen_branched_harmonic(grid, 3)
        t0 = time.perf_counter()
        u, _ = solve_dirichlet(PoissonProblem(grid, phi=phi), workers=1)
        if n == 1025:
            elapsed = time.perf_counter() - t0
        errs[n] = float(np.abs(u.data - phi.data).max())
    r1, r2 = errs[257] / errs[513], errs[513] / errs[1025]
    ok = errs[1025] <= 1e-6 and 3.6 <= r1 <= 4.4 and 3.6 <= r2 <= 4.4 and elapsed <= 10.0
    record_criterion(1, ok, f"max error {errs[1025]:.3e}, ratios {r1:.3f} {r2:.3f}, time {elapsed:.2f} s")
    assert ok


def test_criterion_02_mode_congruences(runs):
    worst = 0.0
    for name in ("q2k3_harmonic", "q2k3_manufactured", "q3k4_manufactured"):
        code, d = runs[name]
        assert code == 0
        rep = dict(l.split(" = ", 1) for l in open(d / "report.txt").read().splitlines())
        worst = max(worst, float(rep["forbidden_mode_energy"]))
    for name in ("mse-eps1e-3", "mss2-eps1e-3", "mse-cauchy"):
        code, d = runs[name]
        assert code == 0
        u = read_field(d / "u.field")
        comps = [u] if not u.is_vector else [u.component(i) for i in range(u.m)]
        worst = max(worst, max(forbidden_energy(c) for c in comps))
    ok = worst <= 1e-12
    record_criterion(2, ok, f"max forbidden-mode relative energy {worst:.3e} over 6 fixtures")
    assert ok


def test_criterion_03_decay_exponent(runs):
    code, d = runs["q2k3_harmonic"]
    u = read_field(d / "u.field")
    s = decay_exponent(u, use_gradient=False, r_window=(1e-6, 1e-2)).slope
    g = decay_exponent(u, use_gradient=True, r_window=(1e-6, 1e-2)).slope
    ok = 1.48 <= s <= 1.52 and 0.48 <= g <= 0.52
    record_criterion(3, ok, f"slope {s:.5f}, gradient slope {g:.5f}")
    assert ok


def test_criterion_04_manufactured_with_flux():
    errs, res = [], []
    for n in (33, 65, 129):
        grid = Grid(q=2, k=3, n_rhat=n, n_theta_hat=48, n_y=(16,))
        man = gen_manufactured(grid, standard_manufactured_terms(2, 3))
        assert man.flux is not None and np.abs(man.flux.data).max() > 0
        u, rep = solve_dirichlet(PoissonProblem(grid, phi=man.u, g=man.g, flux=man.flux))
        errs.append(float(np.abs(u.data - man.u.data).max()))
        res.append(rep.weak_residual)
    ratios = [errs[0] / errs[1], errs[1] / errs[2]]
    ok = all(abs(r - 4) <= 0.4 for r in ratios) and max(res) <= 1e-8
    record_criterion(4, ok, f"error ratios {ratios[0]:.3f} {ratios[1]:.3f}, max weak residual {max(res):.2e}")
    assert ok


def test_criterion_05_contraction(runs):
    code, d = runs["mse-eps1e-3"]
    rows = trace_rows(d / "trace.csv")
    upd = rows[-1][1]
    late = [r[3] for r in rows if r[0] >= 3]
    mse_ok = code == 0 and upd <= 1e-9 and len(rows) <= 30 and all(x <= 0.5 for x in late)
    code2, d2 = runs["mss2-eps1e-3"]
    rows2 = trace_rows(d2 / "trace.csv")
    mss_ok = code2 == 0 and rows2[-1][1] <= 1e-9 and len(rows2) <= 30 and all(r[3] < 1 for r in rows2[1:])
    ok = mse_ok and mss_ok
    record_criterion(5, ok, f"MSE {len(rows)} iterations, final update {upd:.2e}, max ratio from it. 3 "
                            f"{max(late) if late else float('nan'):.2e}; MSS {len(rows2)} iterations, "
                            f"max ratio {max(r[3] for r in rows2[1:]):.2e}")
    assert ok


def test_criterion_06_oracle_equivalence():
    grid = Grid(q=2, k=3, n_rhat=65, n_theta_hat=48, n_y=(16,))
    man = gen_manufactured(grid, standard_manufactured_terms(2, 3))
    p = PoissonProblem(grid, phi=man.u, g=man.g, flux=man.flux)
    u, _ = solve_dirichlet(p)
    ref = direct_fd_reference(p)
    rel = float(np.abs(u.data - ref.data).max() / np.abs(ref.data).max())
    ok = rel <= 0.02
    record_criterion(6, ok, f"relative L-inf difference {rel:.4%} (65x48x16, flux included)")
    assert ok


def test_criterion_07_frequency_function(runs):
    grid = Grid(q=2, k=3, n_rhat=65, n_theta_hat=48, n_y=(16,))
    homog = frequency_function(gen_branched_harmonic(grid, 3), [0.5], [0.1, 0.2, 0.4]).values
    spread = float(np.abs(homog - homog.mean()).max())
    two = gen_branched_harmonic(grid, 3) + gen_branched_harmonic(grid, 9)
    vals = frequency_function(two, [0.5], [0.05, 0.1, 0.2, 0.3, 0.4]).values
    mono = float(np.diff(vals).min())
    code, d = runs["q2k3_harmonic"]
    u = read_field(d / "u.field")
    n_small = float(frequency_function(u, [0.0], [0.05]).values[0])
    ok = spread <= 1e-3 and mono >= -1e-6 and n_small >= 3 / 2 - 0.02
    record_criterion(7, ok, f"homogeneous spread {spread:.2e} (N={homog.mean():.6f}), two-mode min step "
                            f"{mono:.2e}, N(0.05) = {n_small:.6f}")
    assert ok


def test_criterion_08_cauchy_bounds(runs):
    code, d = runs["mse-cauchy"]
    assert code == 0
    u = read_field(d / "u.field")
    c4 = cauchy_bound_fit(u, 4, 0.25).C_estimate
    c6 = cauchy_bound_fit(u, 6, 0.25).C_estimate
    rel = abs(c6 - c4) / c4
    ok = rel < 0.2
    record_criterion(8, ok, f"C(p_max=4) = {c4:.5f}, C(p_max=6) = {c6:.5f}, relative change {rel:.2%}")
    assert ok


def test_criterion_09_functional_inequalities(runs):
    grid = Grid(q=2, k=3)
    P = [poincare_ratio(random_average_free_field(grid, seed=s)).ratio for s in range(100)]
    S = [sobolev_ratio(random_average_free_field(grid, seed=s, compact=True)).ratio for s in range(100)]
    defects = []
    code, d = runs["q2k3_harmonic"]
    defects.append(max_principle_check(read_field(d / "u.field")))
    for s in range(5):
        g = Grid(q=2, k=3, n_rhat=33, n_theta_hat=48, n_y=(8,))
        u, _ = solve_dirichlet(PoissonProblem(g, phi=random_average_free_field(g, seed=s, symmetric=True)))
        defects.append(max_principle_check(u))
    g34 = Grid(q=3, k=4, n_rhat=33, n_theta_hat=48, n_y=(8,))
    u, _ = solve_dirichlet(PoissonProblem(g34, phi=gen_branched_harmonic(g34, 4, z=[1], y_mod=0.5)))
    defects.append(max_principle_check(u))
    ok = max(P) < 10 and max(S) < 20 and max(defects) <= 1e-8
    record_criterion(9, ok, f"Poincare max {max(P):.4f}, Sobolev max {max(S):.4f} (100 fields each), "
                            f"max-principle defect {max(defects):.2e}")
    assert ok


def _outputs(d):
    files = {}
    for name in sorted(os.listdir(d)):
        data = open(os.path.join(d, name), "rb").read()
        if name == "report.txt":
            # elapsed time is the one intentionally run-dependent entry
            data = b"\n".join(l for l in data.splitlines() if not l.startswith(b"wall_time_ms"))
        files[name] = data
    return files


def test_criterion_10_determinism(tmp_path):
    results = {}
    for name in ("q2k3_manufactured", "mse-eps1e-3"):
        outs = []
        for t in (1, 4, 8):
            d = tmp_path / f"{name}-{t}"
            assert run(fixture_path(name), out=str(d), threads=t) == 0
            outs.append(_outputs(d))
        results[name] = all(o == outs[0] for o in outs[1:])
    ok = all(results.values())
    record_criterion(10, ok, "identical outputs for 1/4/8 threads: " +
                     ", ".join(f"{k} {'yes' if v else 'no'}" for k, v in results.items()))
    assert ok
