import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from branchsolve.app.generators import gen_branched_harmonic
from branchsolve.mv_core import Grid, SheetedField, read_field, write_field
from branchsolve.unfold import unfold


def test_header_layout(tmp_path, grid23):
    path = tmp_path / "u.field"
    write_field(path, gen_branched_harmonic(grid23, 3))
    head, body = path.read_text().split("\n\n", 1)
    keys = [line.split("=")[0].strip() for line in head.splitlines()]
    assert keys[:10] == ["representation", "q", "k", "n", "N_r", "N_theta", "N_y", "rho", "m", "axis"]
    first = body.splitlines()[0].split(",")
    assert len(first) == 3 + 1 + 1


@given(st.integers(0, 2**31 - 1), st.sampled_from([None, 2, 3]))
def test_round_trip_is_exact(tmp_path_factory, seed, m):
    rng = np.random.default_rng(seed)
    grid = Grid(q=3, k=4, n=4, n_rhat=5, n_theta_hat=12, n_y=(3, 2), periods=(1.0, 0.7))
    tail = () if m is None else (m,)
    axis = rng.standard_normal((3, 2) + tail) if seed % 2 else None
    f = SheetedField(grid, rng.standard_normal(grid.sheet_shape + tail) * 10.0 ** rng.integers(-8, 8), axis)
    path = tmp_path_factory.mktemp("io") / "f.field"
    write_field(path, f)
    g = read_field(path)
    assert g.grid == grid
    assert np.array_equal(g.data, f.data)
    assert (g.axis is None) == (f.axis is None)
    if f.axis is not None:
        assert np.array_equal(g.axis, f.axis)


def test_unfolded_round_trip(tmp_path, grid23):
    g = unfold(gen_branched_harmonic(grid23, 3, z=[1], y_mod=0.2))
    path = tmp_path / "g.field"
    write_field(path, g)
    assert "representation = unfolded" in path.read_text()
    back = read_field(path)
    assert np.array_equal(back.data, g.data)
