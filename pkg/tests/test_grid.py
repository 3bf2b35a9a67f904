import numpy as np
import pytest
from hypothesis import given, strategies as st

from phasetunnel.grid import GridSpec, PhaseField, inner_product, integrate_2d, make_grid


def test_position_lattice_excludes_the_right_endpoint():
    g = make_grid(-4.0, 4.0, 64)
    assert g.dx == pytest.approx(8.0 / 64)
    assert g.x[0] == pytest.approx(-4.0)
    assert g.x[-1] == pytest.approx(4.0 - g.dx)
    assert np.allclose(np.diff(g.x), g.dx)


def test_momentum_grid_spans_the_nyquist_band():
    g = make_grid(-4.0, 4.0, 64, n_p=128)
    # dp * n_p covers 2*pi*hbar/dx regardless of the folding choice
    assert g.dp * g.n_p == pytest.approx(2.0 * np.pi * g.hbar / g.dx)
    assert g.p[0] == pytest.approx(-np.pi * g.hbar / g.dx)
    assert np.allclose(np.diff(g.p), g.dp)


def test_np_must_be_nx_or_twice_nx():
    make_grid(-1.0, 1.0, 64, n_p=64)
    make_grid(-1.0, 1.0, 64, n_p=128)
    with pytest.raises(ValueError):
        make_grid(-1.0, 1.0, 64, n_p=96)


def test_nx_must_be_a_power_of_two():
    with pytest.raises(ValueError):
        make_grid(-1.0, 1.0, 96)
    with pytest.raises(ValueError):
        make_grid(-1.0, 1.0, 32)


def test_degenerate_box_rejected():
    with pytest.raises(ValueError):
        make_grid(2.0, -2.0, 64)


def test_field_shape_and_dtype_are_enforced(grid64):
    with pytest.raises(ValueError):
        PhaseField(grid64, np.zeros((grid64.n_x, grid64.n_p + 1)))
    with pytest.raises(ValueError):
        PhaseField(grid64, np.full((grid64.n_x, grid64.n_p), np.nan))
    f = PhaseField(grid64, np.ones((grid64.n_x, grid64.n_p)))
    assert f.values.dtype == np.float64


def test_integrate_2d_measures_cell_area(grid64):
    f = PhaseField(grid64, np.ones((grid64.n_x, grid64.n_p)))
    box_area = (grid64.n_x * grid64.dx) * (grid64.n_p * grid64.dp)
    assert integrate_2d(f) == pytest.approx(box_area)


def test_inner_product_is_symmetric(grid64, rng):
    a = PhaseField(grid64, rng.normal(size=(grid64.n_x, grid64.n_p)))
    b = PhaseField(grid64, rng.normal(size=(grid64.n_x, grid64.n_p)))
    assert inner_product(a, b) == pytest.approx(inner_product(b, a), rel=1e-12)


def test_inner_product_rejects_mismatched_grids(grid64):
    other = make_grid(-8.0, 8.0, 64, n_p=64)
    a = PhaseField(grid64, np.ones((grid64.n_x, grid64.n_p)))
    b = PhaseField(other, np.ones((other.n_x, other.n_p)))
    with pytest.raises(ValueError):
        inner_product(a, b)


def test_gridspec_is_hashable_and_comparable():
    a = make_grid(-4.0, 4.0, 64)
    b = make_grid(-4.0, 4.0, 64)
    assert a == b
    assert hash(a) == hash(b)
    assert a != make_grid(-4.0, 4.0, 128)


@given(
    half=st.floats(min_value=1.0, max_value=50.0),
    exp=st.integers(min_value=6, max_value=9),
    fold=st.booleans(),
)
def test_resolution_identities(half, exp, fold):
    n_x = 2**exp
    g = make_grid(-half, half, n_x, n_p=n_x if fold else 2 * n_x)
    assert g.dx * g.n_x == pytest.approx(2.0 * half)
    assert g.dp * g.dx * g.n_p == pytest.approx(2.0 * np.pi * g.hbar)
    assert g.cell_area == pytest.approx(g.dx * g.dp)
    assert isinstance(g, GridSpec)
