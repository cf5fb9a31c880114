import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ppmlr.grid import (Axis, AxisSpec, GridError, OutOfRangeError, StretchedGrid, allocate_sides, build_axis,
                        build_default_grid, locate, solve_ratio)

# Closed-form geometric-series closure 0.4 r (r^50 - 1)/(r - 1) = 90, solved by
# an independent bisection and frozen here.
Y_SIDE_RATIO = 1.0507030263101387


def _series_ratio(d, n, length):
    lo, hi = 1.0 + 1e-9, 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if d * mid * (mid ** n - 1.0) / (mid - 1.0) > length:
            hi = mid
        else:
            lo = mid
    return lo


def test_frozen_oracle_matches_independent_bisection():
    assert _series_ratio(0.4, 50, 90.0) == pytest.approx(Y_SIDE_RATIO, rel=1e-13)


@pytest.fixture(scope="module")
def default_grid():
    return build_default_grid()


def test_transverse_axis_layout():
    axis = build_axis(AxisSpec(-100.0, 100.0, -10.0, 10.0, 0.4, 150, 1.05))
    assert axis.n == 150
    assert axis.uniform_range == (50, 100)
    for r in axis.ratios:
        assert r == pytest.approx(Y_SIDE_RATIO, rel=1e-10)
        assert abs(r - 1.05) < 0.005
    np.testing.assert_allclose(axis.spacings[50:100], 0.4, rtol=1e-12)


def test_all_uniform_axis():
    axis = build_axis(AxisSpec(0.0, 10.0, 0.0, 10.0, 1.0, 10))
    np.testing.assert_allclose(axis.spacings, 1.0, rtol=1e-12)
    assert axis.edges[0] == 0.0 and axis.edges[-1] == 10.0


def test_sun_earth_axis_sides_close(default_grid):
    x = default_grid.x
    lo, hi = x.uniform_range
    assert hi - lo == 50
    s = x.spacings
    assert np.sum(s[:lo]) == pytest.approx(90.0, rel=1e-10)
    assert np.sum(s[hi:]) == pytest.approx(20.0, rel=1e-10)
    for r in x.ratios:
        assert 1.0 <= r <= 1.05 + 0.05
    # proportional allocation of the 106 stretched cells
    assert (lo, x.n - hi) == (71, 35)


def test_default_grid(default_grid):
    assert default_grid.shape == (156, 150, 150)
    assert min(a.spacings.min() for a in default_grid.axes) == pytest.approx(0.4, rel=1e-12)
    assert np.sum(default_grid.x.spacings) == pytest.approx(130.0, rel=1e-12)
    assert default_grid.x.edges[0] == -100.0 and default_grid.x.edges[-1] == 30.0
    assert default_grid.y.edges[0] == -100.0 and default_grid.y.edges[-1] == 100.0


def test_stretched_spacing_ratios_are_constant_per_side(default_grid):
    for axis in default_grid.axes:
        lo, hi = axis.uniform_range
        s = axis.spacings
        left = s[:lo][::-1]
        right = s[hi:]
        np.testing.assert_allclose(left[1:] / left[:-1], axis.ratios[0], rtol=1e-10)
        np.testing.assert_allclose(right[1:] / right[:-1], axis.ratios[1], rtol=1e-10)
        core = s[lo:hi]
        assert core.max() / core.min() == pytest.approx(1.0, abs=1e-12)


def test_centers_and_volumes(default_grid):
    x = default_grid.x
    np.testing.assert_array_equal(x.centers, 0.5 * (x.edges[:-1] + x.edges[1:]))
    assert np.sum(default_grid.volumes()) == pytest.approx(130.0 * 200.0 * 200.0, rel=1e-12)


def test_locate_examples(default_grid):
    unit = Axis.uniform(0.0, 10.0, 10)
    assert locate(unit, 3.5) == 3
    assert locate(unit, 0.0) == 0
    assert locate(unit, 10.0) == 9
    assert locate(unit, 4.0) == 3  # ties resolve to the lower cell
    i = locate(default_grid.x, 0.0)
    assert default_grid.x.edges[i] <= 0.0 <= default_grid.x.edges[i + 1]
    assert default_grid.x.spacings[i] == pytest.approx(0.4, rel=1e-12)
    assert default_grid.locate((0.0, 0.0, 0.0)) == (95, 74, 74)


def test_locate_out_of_range():
    with pytest.raises(OutOfRangeError):
        locate(Axis.uniform(0.0, 1.0, 4), 1.5)


def test_unsatisfiable_closure_names_side():
    with pytest.raises(GridError, match="low"):
        solve_ratio(0.4, 3, 1000.0, side="low")


def test_bad_specs():
    with pytest.raises(GridError):
        AxisSpec(0.0, 10.0, 5.0, 2.0, 1.0, 10)
    with pytest.raises(GridError):
        build_axis(AxisSpec(-10.0, 10.0, -1.0, 1.0, 0.3, 40))  # 2/0.3 is not an integer
    with pytest.raises(GridError):
        build_axis(AxisSpec(-100.0, 100.0, -10.0, 10.0, 0.4, 52))


def test_deterministic():
    spec = AxisSpec(-100.0, 30.0, -10.0, 10.0, 0.4, 156)
    a, b = build_axis(spec), build_axis(spec)
    assert a.edges.tobytes() == b.edges.tobytes()


@settings(max_examples=40, deadline=None)
@given(lo_ext=st.floats(5.0, 200.0), hi_ext=st.floats(5.0, 200.0), core=st.integers(2, 30),
       extra=st.integers(10, 80))
def test_axis_invariants(lo_ext, hi_ext, core, extra):
    d = 0.5
    spec = AxisSpec(-lo_ext - core * d / 2, hi_ext + core * d / 2, -core * d / 2, core * d / 2, d,
                    core + extra, 1.05)
    try:
        axis = build_axis(spec)
    except GridError:
        return  # closure may be unsatisfiable within the ratio bound
    assert np.all(np.diff(axis.edges) > 0)
    assert np.sum(axis.spacings) == pytest.approx(spec.max - spec.min, rel=1e-10)
    assert axis.edges[0] == spec.min and axis.edges[-1] == spec.max
    assert axis.n == spec.target_cells
    assert sum(allocate_sides(spec)) == extra


def test_uniform_grid_helper():
    g = StretchedGrid.uniform((4, 5, 6), (0.0, 0.0, 0.0), (1.0, 2.0, 3.0))
    assert g.shape == (4, 5, 6)
    assert g.cells == 120
