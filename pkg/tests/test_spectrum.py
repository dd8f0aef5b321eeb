import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from branchsolve.mv_core import Grid
from branchsolve.poisson import analyze, synthesize
from branchsolve.unfold import UnfoldedField


def test_constant_has_only_zero_mode(grid23):
    s = analyze(UnfoldedField(grid23, np.full(grid23.unfolded_shape, 3.0)))
    e = s.mode_energy()
    assert e[0, 0] == pytest.approx(3.0**2 * grid23.n_rhat)
    e[0, 0] = 0
    assert e.max() <= 1e-25


def test_pure_mode_lands_on_plus_minus_three(grid23):
    g = UnfoldedField.from_function(grid23, lambda rh, th, y: rh**3 * np.cos(3 * th) * np.cos(2 * np.pi * y))
    s = analyze(g)
    e = s.mode_energy()
    total = e.sum()
    on = sum(e[m % 48, z % 8] for m in (3, -3) for z in (1, -1))
    assert on == pytest.approx(total, rel=1e-12)
    assert np.allclose(s.coefficient((1,), 3), grid23.rhat**3 / 4, atol=1e-15)
    assert s.hermitian_defect() <= 1e-14


@given(st.integers(0, 2**31 - 1))
def test_round_trip_and_parseval(seed):
    grid = Grid(q=2, k=3, n_rhat=5, n_theta_hat=12, n_y=(6,))
    data = np.random.default_rng(seed).standard_normal(grid.unfolded_shape)
    s = analyze(UnfoldedField(grid, data))
    back = synthesize(s).data
    assert np.abs(back - data).max() <= 1e-12 * np.abs(data).max()
    # forward-normalized transform: mean square equals coefficient energy
    lhs = (data**2).mean(axis=(1, 2))
    rhs = (np.abs(s.coefficients) ** 2).sum(axis=(1, 2))
    assert np.allclose(lhs, rhs, rtol=1e-12)
    assert s.hermitian_defect() <= 1e-12


def test_admissible_mask_q2k3(grid23):
    s = analyze(UnfoldedField(grid23, np.zeros(grid23.unfolded_shape)))
    ms = s.m_values[s.admissible_mask()[:, 0]]
    assert set(np.abs(ms)) == {3, 9, 15, 21}
