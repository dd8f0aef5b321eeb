import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from branchsolve.app.generators import (
    ModeTerm,
    gen_branched_harmonic,
    gen_manufactured,
    random_average_free_field,
    standard_manufactured_terms,
)
from branchsolve.diagnostics import decay_exponent, max_principle_check
from branchsolve.errors import DimensionError, SymmetryError
from branchsolve.mv_core import Grid, SheetedField, average_free_decompose, kfold_symmetry_defect
from branchsolve.poisson import PoissonProblem, analyze, forbidden_energy, solve_dirichlet
from branchsolve.unfold import mode_admissible, unfold


def solve(grid, **kw):
    return solve_dirichlet(PoissonProblem(grid, **kw))


def test_zero_data_gives_zero(grid23):
    u, rep = solve(grid23)
    assert np.all(u.data == 0)
    assert rep.forbidden_mode_energy == 0.0


def test_branched_harmonic_reproduced(grid23):
    phi = gen_branched_harmonic(grid23, 3)
    u, rep = solve(grid23, phi=phi)
    # u = r^3 cos(3 theta_hat) is reproduced by the radial stencil up to O(h^2)
    assert np.abs(u.data - phi.data).max() <= 2e-3
    assert rep.boundary_error <= 1e-14
    assert rep.weak_residual <= 1e-8
    assert rep.forbidden_mode_energy <= 1e-12


def test_average_part_solves_plain_dirichlet_problem():
    grid = Grid(q=2, k=3, n_rhat=65, n_theta_hat=48, n_y=(4,))
    # Re(z^3) is single valued, harmonic and threefold symmetric: identical on every sheet
    exact = lambda l, r, th, y: r**3 * np.cos(3 * th) + 0.5 + 0 * y
    phi = SheetedField.from_function(grid, exact)
    u, rep = solve(grid, phi=phi)
    r, th, _ = grid.sheet_coords()
    assert np.abs(u.data - exact(1, r, th, 0.0)).max() <= 1e-3
    assert np.allclose(u.axis, 0.5, atol=1e-12)
    _, free = average_free_decompose(u)
    assert np.abs(free.data).max() <= 1e-12


def test_manufactured_recovery_second_order():
    errs = []
    for n in (33, 65, 129):
        grid = Grid(q=2, k=3, n_rhat=n, n_theta_hat=48, n_y=(16,))
        man = gen_manufactured(grid, standard_manufactured_terms(2, 3))
        u, rep = solve(grid, phi=man.u, g=man.g, flux=man.flux)
        errs.append(np.abs(u.data - man.u.data).max())
        assert rep.weak_residual <= 1e-8
    r = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.all(np.abs(r - 4) <= 0.4), r


def test_single_harmonic_mode_has_zero_source(grid23):
    assert np.all(gen_manufactured(grid23, [ModeTerm(3, (0,), {3: 1.0})]).g.data == 0)
    # the discrete image is only a consistency error, O(h^2) away from the axis
    errs = []
    for n in (33, 65):
        grid = grid23.with_(n_rhat=n)
        g = gen_manufactured(grid, [ModeTerm(3, (0,), {3: 1.0})], discrete=True).g
        errs.append(np.abs(g.data[:, grid.r >= 0.25]).max())
    assert 3.5 <= errs[0] / errs[1] <= 4.5


def test_discrete_manufactured_is_recovered_exactly(grid23):
    man = gen_manufactured(grid23, [ModeTerm(3, (1,), {3: 1.0, 5: -0.5})], discrete=True)
    u, _ = solve(grid23, phi=man.u, g=man.g)
    assert np.abs(u.data - man.u.data).max() <= 1e-12


def test_empty_mode_list(grid23):
    man = gen_manufactured(grid23, [])
    assert np.all(man.u.data == 0) and np.all(man.g.data == 0) and man.flux is None


@settings(max_examples=10)
@given(st.integers(0, 2**31 - 1), st.floats(-3, 3), st.floats(-3, 3))
def test_linearity(seed, a, b):
    grid = Grid(q=2, k=3, n_rhat=17, n_theta_hat=24, n_y=(4,))
    f1 = random_average_free_field(grid, seed=seed, symmetric=True, m_max=9, z_max=1)
    f2 = random_average_free_field(grid, seed=seed + 1, symmetric=True, m_max=9, z_max=1)
    g1 = random_average_free_field(grid, seed=seed + 2, symmetric=True, m_max=9, z_max=1)
    u1, _ = solve(grid, phi=f1, g=g1)
    u2, _ = solve(grid, phi=f2)
    u12, _ = solve(grid, phi=f1 * a + f2 * b, g=g1 * a)
    combo = u1 * a + u2 * b
    scale = max(1.0, np.abs(combo.data).max())
    assert np.abs(u12.data - combo.data).max() <= 1e-10 * scale


def test_forbidden_mode_energy_and_symmetry_of_solution(grid34):
    man = gen_manufactured(grid34, standard_manufactured_terms(3, 4))
    u, rep = solve(grid34, phi=man.u, g=man.g, flux=man.flux)
    assert rep.forbidden_mode_energy <= 1e-12
    assert forbidden_energy(u) == rep.forbidden_mode_energy
    assert kfold_symmetry_defect(u) <= 1e-12
    s = analyze(unfold(u))
    e = s.mode_energy()
    m = s.m_values
    free_bad = np.array([(mm % 3 != 0) and not mode_admissible(int(mm), None, 3, 4) for mm in m])
    assert e[free_bad].sum() <= 1e-24 * e.sum()


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_maximum_principle(seed):
    grid = Grid(q=2, k=3, n_rhat=33, n_theta_hat=48, n_y=(8,))
    phi = random_average_free_field(grid, seed=seed, symmetric=True)
    u, _ = solve(grid, phi=phi)
    assert max_principle_check(u) <= 1e-8


def test_decay_rate_of_admissible_solution():
    grid = Grid(q=2, k=3, n_rhat=1025, n_theta_hat=48, n_y=(4,))
    phi = gen_branched_harmonic(grid, 3, z=[1], y_mod=0.5) + gen_branched_harmonic(grid, 9, amp=0.5)
    u, _ = solve(grid, phi=phi)
    fit = decay_exponent(u)
    assert 1 + 1 / 2 - 0.02 <= fit.slope <= 1.58


def test_parallel_chunks_are_bit_identical():
    grid = Grid(q=2, k=3, n_rhat=33, n_theta_hat=48, n_y=(16,))
    man = gen_manufactured(grid, standard_manufactured_terms(2, 3))
    p = PoissonProblem(grid, phi=man.u, g=man.g, flux=man.flux)
    ref, _ = solve_dirichlet(p)
    for workers, chunk in [(4, 7), (8, 64), (2, 1)]:
        u, _ = solve_dirichlet(p, workers=workers, chunk=chunk)
        assert np.array_equal(u.data, ref.data)


def test_asymmetric_data_rejected(grid23):
    phi = gen_branched_harmonic(grid23, 1, override=True)
    with pytest.raises(SymmetryError):
        solve(grid23, phi=phi)


def test_flux_equivariance_uses_polar_components(grid23):
    # a constant Cartesian flux is not equivariant; the same field in polar form is
    const = SheetedField(grid23, np.broadcast_to([1.0, 0.0, 0.0], grid23.sheet_shape + (3,)))
    with pytest.raises(SymmetryError):
        solve(grid23, flux=const)
    man = gen_manufactured(grid23, standard_manufactured_terms(2, 3))
    solve(grid23, phi=man.u, g=man.g, flux=man.flux)


def test_leakage_reported_when_truncating(grid23):
    man = gen_manufactured(grid23, standard_manufactured_terms(2, 3))
    _, rep = solve_dirichlet(PoissonProblem(grid23, phi=man.u, g=man.g, flux=man.flux, m_max=3))
    assert rep.leakage > 1e-10
    assert any("leakage" in w for w in rep.warnings)


def test_report_text_keys(grid23):
    _, rep = solve(grid23, phi=gen_branched_harmonic(grid23, 3))
    keys = [line.split("=")[0].strip() for line in rep.to_text().splitlines()]
    assert keys[:5] == ["forbidden_mode_energy", "boundary_error", "weak_residual", "modes_solved", "wall_time_ms"]


def test_problem_validation(grid23):
    with pytest.raises(ValueError):
        PoissonProblem(grid23, mu=0.5)
    with pytest.raises(DimensionError):
        PoissonProblem(grid23, flux=SheetedField.zeros(grid23, 2))
