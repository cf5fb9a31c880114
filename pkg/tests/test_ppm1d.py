import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from ppmlr.physics import Constants, prim_to_cons
from ppmlr.ppm1d import (COMPACT, DEFAULT_SCHEME, MONOTONE, LagrangianStrip, Scheme, StepRejected, Strip1D,
                         ZoneParabola, as_scheme, lagrangian_step, reconstruct, remap, required_ghost, sweep_1d)
from ppmlr.reference import star_state
from ppmlr.tubes import SOD_LEFT, SOD_RIGHT, advection_error, fill_ghosts

ALL_SCHEMES = [DEFAULT_SCHEME, MONOTONE, COMPACT]
GAMMA = 5.0 / 3.0


def strip_state(n, rho=1.0, u=0.0, p=1.0):
    w = np.zeros((8, n))
    w[0], w[1], w[7] = rho, u, p
    return w


def smooth_periodic(n, g, rng):
    x = (np.arange(n) + 0.5) / n
    w = strip_state(n)
    phase = rng.uniform(0, 2 * np.pi, 8)
    w[0] = 1.0 + 0.3 * np.sin(2 * np.pi * x + phase[0])
    w[1] = 0.5 + 0.2 * np.cos(2 * np.pi * x + phase[1])
    w[2] = 0.1 * np.sin(4 * np.pi * x + phase[2])
    w[3] = 0.1 * np.cos(2 * np.pi * x + phase[3])
    w[4] = 0.4
    w[5] = 0.3 * np.sin(2 * np.pi * x + phase[5])
    w[6] = 0.2 * np.cos(2 * np.pi * x + phase[6])
    w[7] = 1.0 + 0.2 * np.cos(2 * np.pi * x + phase[7])
    full = np.zeros((8, n + 2 * g))
    full[:, g:-g] = w
    fill_ghosts(full, g, "periodic")
    return full


@pytest.mark.parametrize("scheme", ALL_SCHEMES, ids=str)
def test_constant_data(scheme):
    par = reconstruct(np.full(20, 3.0), 0.5, scheme)
    np.testing.assert_array_equal(par.left, 3.0)
    np.testing.assert_array_equal(par.right, 3.0)
    np.testing.assert_array_equal(par.six, 0.0)


@pytest.mark.parametrize("scheme", ALL_SCHEMES, ids=str)
def test_linear_data_is_exact(scheme):
    n, h = 24, 0.25
    edges = np.arange(n + 1) * h
    centers = 0.5 * (edges[:-1] + edges[1:])
    par = reconstruct(centers, h, scheme)
    r = scheme.radius
    np.testing.assert_allclose(par.left, edges[r:n - r], rtol=0, atol=1e-13)
    np.testing.assert_allclose(par.right, edges[r + 1:n - r + 1], rtol=0, atol=1e-13)
    np.testing.assert_allclose(par.six, 0.0, atol=1e-12)


@pytest.mark.parametrize("scheme", ALL_SCHEMES, ids=str)
def test_isolated_extremum_is_flattened(scheme):
    q = np.zeros(15)
    q[7] = 1.0
    par = reconstruct(q, 1.0, scheme)
    peak = 7 - scheme.radius
    assert par.left[peak] == par.right[peak] == par.avg[peak] == 1.0
    assert par.six[peak] == 0.0


def test_extremum_limiter_keeps_smooth_peaks():
    # a resolved sine peak keeps its curvature instead of being clipped
    n = 32
    q = np.sin(2 * np.pi * (np.arange(n) + 0.5) / n)
    par = reconstruct(q, 1.0 / n, DEFAULT_SCHEME)
    peak = int(np.argmax(q)) - DEFAULT_SCHEME.radius
    assert par.six[peak] != 0.0
    flat = reconstruct(q, 1.0 / n, MONOTONE)
    assert flat.six[int(np.argmax(q)) - MONOTONE.radius] == 0.0


def _zone_mean(par):
    # Simpson is exact for parabolas
    return (par(0.0) + 4.0 * par(0.5) + par(1.0)) / 6.0


@settings(max_examples=100, deadline=None)
@given(arrays(float, 20, elements=st.floats(-10, 10)), arrays(float, 20, elements=st.floats(0.1, 3.0)),
       st.sampled_from(ALL_SCHEMES))
def test_parabola_average_matches_zone_average(q, h, scheme):
    par = reconstruct(q, h, scheme)
    scale = max(1.0, np.max(np.abs(q)))
    np.testing.assert_allclose(_zone_mean(par), par.avg, rtol=0, atol=1e-14 * scale * 8)
    np.testing.assert_allclose(par.right_average(1.0), par.avg, rtol=0, atol=1e-14 * scale * 8)


@settings(max_examples=100, deadline=None)
@given(arrays(float, 20, elements=st.floats(-10, 10)), arrays(float, 20, elements=st.floats(0.1, 3.0)),
       st.sampled_from([MONOTONE, COMPACT]))
def test_monotone_parabolas_have_no_interior_extrema(q, h, scheme):
    par = reconstruct(q, h, scheme)
    lo = np.minimum(par.left, par.right)
    hi = np.maximum(par.left, par.right)
    slack = 1e-12 * max(1.0, np.max(np.abs(q)))
    for xi in np.linspace(0.0, 1.0, 21):
        v = par(xi)
        assert np.all(v >= lo - slack) and np.all(v <= hi + slack)


def test_zone_parabola_slicing():
    par = ZoneParabola(np.arange(4.0), np.arange(4.0) + 1, np.arange(4.0) + 0.5)
    assert par[1:3].left.tolist() == [1.0, 2.0]


def test_scheme_names_and_ghosts():
    assert as_scheme(None) is DEFAULT_SCHEME
    assert as_scheme("monotone") == MONOTONE
    assert as_scheme("compact") == COMPACT
    assert required_ghost() == 6 and required_ghost("compact") == 4
    with pytest.raises(ValueError):
        Scheme("compact", "extremum")
    with pytest.raises(ValueError):
        as_scheme("weno")


def test_quiescent_strip_is_a_fixed_point():
    g = DEFAULT_SCHEME.ghost
    w = strip_state(40 + 2 * g, rho=1.3, p=0.7)
    w[5] = 0.2
    lag = lagrangian_step(w, 0.1, 0.01)
    np.testing.assert_allclose(lag.interface.u, 0.0, atol=1e-14)
    out = sweep_1d(Strip1D(w, 0.1), 0.01)
    np.testing.assert_allclose(out, w[:, g:-g], rtol=1e-14, atol=1e-14)


def test_uniform_flow_translates_interfaces():
    g = DEFAULT_SCHEME.ghost
    w = strip_state(30 + 2 * g, u=0.7)
    dt = 0.02
    lag = lagrangian_step(w, 0.1, dt)
    np.testing.assert_allclose(lag.delta, 0.7 * dt, rtol=1e-13)
    np.testing.assert_allclose(lag.dx, 0.1, rtol=1e-13)
    np.testing.assert_allclose(lag.q[0], 1.0, rtol=1e-13)


def test_sod_interface_velocity_brackets_exact_contact():
    n = 64
    w = strip_state(n)
    w[0] = np.where(np.arange(n) < n // 2, SOD_LEFT[0], SOD_RIGHT[0])
    w[7] = np.where(np.arange(n) < n // 2, SOD_LEFT[2], SOD_RIGHT[2])
    _, u_star = star_state(SOD_LEFT, SOD_RIGHT, GAMMA)
    lag = lagrangian_step(w, 1.0 / n, 0.2 / n, c=Constants(gamma=GAMMA))
    u = lag.interface.u.max()
    assert 0.8 * u_star <= u <= 1.2 * u_star


def test_remap_with_unmoved_interfaces_is_identity(rng):
    m = 30
    q = rng.uniform(0.5, 2.0, (8, m))
    dx = rng.uniform(0.1, 0.3, m)
    lag = LagrangianStrip(q=q, dx=dx.copy(), delta=np.zeros(m + 1), mass=q[0] * dx, offset=0)
    out = remap(lag, dx)
    r = DEFAULT_SCHEME.radius
    np.testing.assert_array_equal(out, q[:, r + 1:m - r - 1])


def test_remap_preserves_constants(rng):
    m = 30
    q = np.ones((8, m)) * np.arange(1, 9)[:, None]
    dx0 = np.full(m, 0.2)
    delta = rng.uniform(-0.05, 0.05, m + 1)
    dxl = dx0 + delta[1:] - delta[:-1]
    lag = LagrangianStrip(q=q, dx=dxl, delta=delta, mass=q[0] * dxl, offset=0)
    out = remap(lag, dx0)
    np.testing.assert_allclose(out, q[:, 3:m - 3], rtol=1e-14)


def test_remap_rejects_crossed_interfaces():
    m = 20
    q = np.ones((8, m))
    dx0 = np.full(m, 0.1)
    delta = np.zeros(m + 1)
    delta[10] = 0.15
    dxl = dx0 + delta[1:] - delta[:-1]
    with pytest.raises(StepRejected):
        remap(LagrangianStrip(q=q, dx=dxl, delta=delta, mass=dxl, offset=0), dx0)


def test_remap_rejects_sweeping_past_a_zone():
    m = 20
    q = np.ones((8, m))
    dx0 = np.full(m, 0.1)
    delta = np.zeros(m + 1)
    delta[:] = -0.15   # a rigid shift by more than a zone width
    dxl = dx0 + delta[1:] - delta[:-1]
    with pytest.raises(StepRejected, match="swept past"):
        remap(LagrangianStrip(q=q, dx=dxl, delta=delta, mass=dxl, offset=0), dx0)


def test_lagrangian_step_rejects_inverted_zones():
    g = DEFAULT_SCHEME.ghost
    w = strip_state(20 + 2 * g)
    w[1] = np.where(np.arange(w.shape[1]) < w.shape[1] // 2, 50.0, -50.0)
    with pytest.raises(StepRejected):
        lagrangian_step(w, 0.1, 0.05)


@pytest.mark.parametrize("scheme", ALL_SCHEMES, ids=str)
def test_periodic_sweep_conserves(scheme, rng):
    n, g = 48, 6
    full = smooth_periodic(n, g, rng)
    h = 1.0 / n
    c = Constants()
    before = prim_to_cons(full[:, g:-g], c)
    out = sweep_1d(Strip1D(full, h, ghost=g), 0.2 * h, c, scheme)
    after = prim_to_cons(out, c)
    for k in (0, 1, 7):
        total = np.sum(before[k])
        assert abs(np.sum(after[k]) - total) <= 1e-12 * max(abs(total), np.sum(np.abs(before[k])))


def test_sweep_commutes_with_mirroring(rng):
    n, g = 40, 6
    full = smooth_periodic(n, g, rng)
    full[0, 20:30] += 0.5
    h = np.linspace(0.5, 1.5, n + 2 * g)
    dt = 0.05
    out = sweep_1d(Strip1D(full, h, ghost=g), dt)
    mirrored = full[:, ::-1].copy()
    mirrored[[1, 4]] *= -1.0   # normal velocity and normal field flip
    back = sweep_1d(Strip1D(mirrored, h[::-1].copy(), ghost=g), dt)[:, ::-1]
    back[[1, 4]] *= -1.0
    np.testing.assert_allclose(back, out, rtol=1e-13, atol=1e-13)


def test_sine_advection_accuracy():
    assert advection_error(128) < 1e-3


def test_strip_validation():
    with pytest.raises(ValueError):
        Strip1D(np.ones((8, 10)), 0.1, ghost=3)
    with pytest.raises(ValueError):
        Strip1D(np.ones((8, 12)), -0.1, ghost=4)
    with pytest.raises(ValueError):
        sweep_1d(Strip1D(np.ones((8, 20)), 0.1, ghost=4), 0.01)  # default scheme needs 6
