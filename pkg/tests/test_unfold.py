import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from branchsolve.app.generators import gen_branched_harmonic, random_average_free_field
from branchsolve.errors import InvalidProblemError
from branchsolve.mv_core import Grid, SheetedField, kfold_symmetry_defect
from branchsolve.unfold import (
    UnfoldedField,
    fold,
    gradient_x,
    mode_admissible,
    rotate_unfolded,
    unfold,
)
from oracles import branched_power_gradient, centered_fd_gradient_on_sheet


def test_constant_round_trip(grid23):
    f = SheetedField(grid23, np.full(grid23.sheet_shape, 2.5), np.full(grid23.n_y, 2.5))
    g = unfold(f)
    assert np.all(g.data == 2.5)
    back = fold(g)
    assert np.all(back.data == 2.5) and np.all(back.axis == 2.5)


def test_branched_power_unfolds_to_cube(grid23):
    g = unfold(gen_branched_harmonic(grid23, 3))
    rh, th, _ = grid23.unfolded_coords()
    expect = np.broadcast_to(rh**3 * np.cos(3 * th), grid23.unfolded_shape)
    assert np.abs(g.data - expect).max() <= 1e-14


def test_fold_of_cube_gives_glued_sheets(grid23):
    from branchsolve.mv_core import gluing_defect

    g = UnfoldedField.from_function(grid23, lambda rh, th, y: rh**3 * np.cos(3 * th) + 0 * y)
    f = fold(g)
    assert gluing_defect(f) <= 1e-12
    assert np.abs(f.data - gen_branched_harmonic(grid23, 3).data).max() <= 1e-14


@given(st.integers(0, 2**31 - 1))
def test_fold_unfold_are_inverse_permutations(seed):
    rng = np.random.default_rng(seed)
    grid = Grid(q=3, k=4, n_rhat=6, n_theta_hat=12, n_y=(3,))
    f = SheetedField(grid, rng.standard_normal(grid.sheet_shape), rng.standard_normal(grid.n_y))
    back = fold(unfold(f))
    assert np.array_equal(back.data, f.data) and np.array_equal(back.axis, f.axis)
    data = rng.standard_normal(grid.unfolded_shape)
    data[0] = data[0, 0]  # axis row is a single value per y
    g = UnfoldedField(grid, data)
    assert np.array_equal(unfold(fold(g)).data, g.data)


@pytest.mark.parametrize("q,k,m,expected", [(2, 3, 3, True), (2, 3, 6, False), (2, 3, 4, False),
                                            (3, 4, 4, True), (3, 4, 12, False), (3, 4, 0, False)])
def test_mode_admissible(q, k, m, expected):
    assert mode_admissible(m, (0,), q, k) is expected


def test_smallest_admissible_mode_q3k4():
    assert min(m for m in range(1, 50) if mode_admissible(m, (0,), 3, 4)) == 4


def test_mode_admissible_rejects_common_factor():
    with pytest.raises(InvalidProblemError):
        mode_admissible(6, (0,), 2, 4)


def test_rotation_in_unfolded_disk_matches_sheet_symmetry(grid34):
    # symmetric sheeted field <=> unfolded field invariant under theta_hat -> theta_hat + 2 pi s / k
    f = random_average_free_field(grid34, seed=5, symmetric=True)
    g = unfold(f)
    assert kfold_symmetry_defect(f) <= 1e-12
    assert np.abs(rotate_unfolded(g).data - g.data).max() <= 1e-12
    h = random_average_free_field(grid34, seed=5, symmetric=False)
    assert np.abs(rotate_unfolded(unfold(h)).data - unfold(h).data).max() > 1e-3


@pytest.mark.parametrize("n_r", [17, 33])
def test_gradient_of_branched_power(n_r):
    grid = Grid(q=2, k=3, n_rhat=n_r, n_theta_hat=48, n_y=(4,))
    D = gradient_x(unfold(gen_branched_harmonic(grid, 3)))
    r, th, _ = grid.sheet_coords()
    mag = np.linalg.norm(D.data[..., :2], axis=-1)
    assert np.abs(mag - 1.5 * np.sqrt(np.broadcast_to(r, mag.shape[1:]))).max() <= 1e-12
    for l in (1, 2):
        gx, gy = branched_power_gradient(2, 3, r, th, l)
        assert np.abs(D.data[l - 1, ..., 0] - gx).max() <= 1e-12
        assert np.abs(D.data[l - 1, ..., 1] - gy).max() <= 1e-12
    assert np.abs(D.data[..., 2]).max() == 0.0
    assert D.axis is not None and np.all(D.axis[..., :2] == 0)


def test_gradient_of_y_linear_profile(grid23):
    # periodic stand-in for a function linear in y: only the y-component survives
    g = UnfoldedField.from_function(grid23, lambda rh, th, y: np.sin(2 * np.pi * y) + 0 * rh)
    D = gradient_x(g)
    y = grid23.y[0]
    assert np.abs(D.data[..., :2]).max() <= 1e-12
    assert np.abs(D.data[..., 2] - 2 * np.pi * np.cos(2 * np.pi * y)).max() <= 1e-12


def test_axis_gradient_undefined_for_low_modes(grid23):
    g = UnfoldedField.from_function(grid23, lambda rh, th, y: rh * np.cos(th) + 0 * y)
    assert gradient_x(g).axis is None


def test_gradient_matches_sheet_finite_differences():
    # random smooth unfolded field; compare with centered FD on the sheets, away from axis and cut
    errs = []
    for n_r, nt in ((33, 96), (65, 192)):
        grid = Grid(q=2, k=3, n_rhat=n_r, n_theta_hat=nt, n_y=(1,))
        g = UnfoldedField.from_function(
            grid, lambda rh, th, y: np.exp(rh * np.cos(th)) * np.sin(rh * np.sin(th) + 0.3) + rh**3 * np.cos(3 * th) + 0 * y
        )
        D = gradient_x(g).data
        f = fold(g).data
        r, th = grid.r, grid.theta
        ring = (r[1:-1] > 0.2) & (r[1:-1] < 0.9)
        err = 0.0
        for l in range(2):
            gx, gy = centered_fd_gradient_on_sheet(f[l, :, :, 0], r, th)
            err = max(err, np.abs(gx[ring] - D[l, 1:-1, 1:-1, 0, 0][ring]).max(),
                      np.abs(gy[ring] - D[l, 1:-1, 1:-1, 0, 1][ring]).max())
        errs.append(err)
    assert errs[1] < errs[0] / 3.0  # second-order FD oracle
    assert errs[1] < 1e-2
