import numpy as np
import pytest

from branchsolve.app.generators import gen_branched_harmonic, gen_manufactured, standard_manufactured_terms
from branchsolve.errors import SizeGuardError
from branchsolve.mv_core import Grid
from branchsolve.poisson import PoissonProblem, direct_fd_reference, solve_dirichlet


def test_zero_data():
    grid = Grid(q=2, k=3, n_rhat=9, n_theta_hat=24, n_y=(4,))
    assert np.all(direct_fd_reference(PoissonProblem(grid)).data == 0)


def test_branched_harmonic_converges():
    errs, near = [], []
    # the angular FD error dominates at fixed n_theta, so refine both directions
    for n, nt in ((17, 48), (33, 96)):
        grid = Grid(q=2, k=3, n_rhat=n, n_theta_hat=nt, n_y=(1,))
        phi = gen_branched_harmonic(grid, 3)
        u = direct_fd_reference(PoissonProblem(grid, phi=phi))
        err = np.abs(u.data - phi.data)
        away = grid.r >= 0.25
        errs.append(err[:, away].max())
        near.append(err.max())
    assert errs[1] < errs[0] / 3.5  # second order away from the axis
    assert near[1] < near[0]        # at least first order overall


def test_agrees_with_spectral_solver_small_grid():
    grid = Grid(q=2, k=3, n_rhat=33, n_theta_hat=48, n_y=(8,))
    man = gen_manufactured(grid, standard_manufactured_terms(2, 3))
    p = PoissonProblem(grid, phi=man.u, g=man.g, flux=man.flux)
    u, _ = solve_dirichlet(p)
    ref = direct_fd_reference(p, y_scheme="spectral")
    rel = np.abs(u.data - ref.data).max() / np.abs(ref.data).max()
    assert rel <= 0.02


def test_size_guard():
    grid = Grid(q=2, k=3, n_rhat=1025, n_theta_hat=48, n_y=(16,))
    with pytest.raises(SizeGuardError):
        direct_fd_reference(PoissonProblem(grid))
