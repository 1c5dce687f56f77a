import numpy as np
import pytest
from hypothesis import given, strategies as st

from swedg.fluxes import (contravariant_volume_flux, ec_surface_flux, ec_surface_flux_normal, es_dissipation_rotated,
                          es_surface_flux_normal, h_flux_compact, llf_surface_flux, volume_flux_sharp, wave_averages)
from swedg.physics import PhysicsParams, entropy_vars, normal_flux, physical_flux, velocity

P = PhysicsParams()
G1, G10 = PhysicsParams(g=1.0), PhysicsParams(g=10.0)
primitive = st.tuples(st.floats(0.0, 3.0), st.floats(-2, 2), st.floats(-2, 2))
wet_primitive = st.tuples(st.floats(0.01, 3.0), st.floats(-2, 2), st.floats(-2, 2))


def state(h, u, v):
    return np.array([h, h * u, h * v], dtype=float)


def test_sharp_consistency_and_values():
    w = state(1, 2, 0)
    F, _ = volume_flux_sharp(w, w, G10)
    np.testing.assert_allclose(F, physical_flux(w, G10)[0])
    np.testing.assert_allclose(F, [2, 9, 0])
    F, _ = volume_flux_sharp(state(1, 0, 0), state(4, 0, 0), G1)
    assert F[1] == pytest.approx(2.0)


def test_contravariant_flux():
    wa, wb = state(1, 0.5, -0.2), state(1.5, -0.3, 0.1)
    F, G = volume_flux_sharp(wa, wb, P)
    cart = (0.1, 0.0, 0.0, 0.2)
    Ft, Gt = contravariant_volume_flux(wa, wb, cart, cart, P)
    np.testing.assert_allclose(Ft, 0.2 * F)
    np.testing.assert_allclose(Gt, 0.1 * G)
    zero = (0.0,) * 4
    Ft, Gt = contravariant_volume_flux(wa, wb, zero, zero, P)
    assert not Ft.any() and not Gt.any()


def test_contravariant_flux_linear_in_metrics(rng):
    wa, wb = state(1, 0.5, -0.2), state(1.5, -0.3, 0.1)
    F, G = volume_flux_sharp(wa, wb, P)
    ma, mb = rng.standard_normal(4), rng.standard_normal(4)
    x_xi, x_eta, y_xi, y_eta = 0.5 * (ma + mb)
    Ft, Gt = contravariant_volume_flux(wa, wb, ma, mb, P)
    np.testing.assert_allclose(Ft, F * y_eta - G * x_eta, atol=1e-14)
    np.testing.assert_allclose(Gt, -F * y_xi + G * x_xi, atol=1e-14)


def test_ec_flux_tadmor_example():
    wm, wp = state(1, 1, 0), state(4, -2, 0)
    F, _ = ec_surface_flux(wm, wp, G1)
    jq = entropy_vars(wp, 0.0, G1) - entropy_vars(wm, 0.0, G1)
    jpsi = 0.5 * (16 * -2 - 1 * 1)
    assert abs(jq @ F - jpsi) < 1e-12


def test_es_zero_jump_equals_ec():
    w = state(1.3, 0.4, -0.7)
    nx, ny = 0.6, 0.8
    np.testing.assert_allclose(es_surface_flux_normal(w, w, 0.2, 0.2, nx, ny, P),
                               ec_surface_flux_normal(w, w, nx, ny, P), atol=1e-14)
    np.testing.assert_allclose(es_surface_flux_normal(w, w, 0.2, 0.2, nx, ny, P), normal_flux(w, nx, ny, P), atol=1e-14)


def test_es_rejects_non_unit_normal():
    w = state(1, 0, 0)
    with pytest.raises(ValueError):
        es_surface_flux_normal(w, w, 0.0, 0.0, 1.0, 1.0, P)


def test_compact_values():
    w = state(1, 0, 0)
    assert h_flux_compact(w, w, 0.0, 0.0, 1.0, 0.0, P) == 0.0
    c = 0.5 * np.sqrt(10)
    assert h_flux_compact(w, np.zeros(3), 0.0, 0.0, 1.0, 0.0, G10) == pytest.approx(c / 2)
    assert h_flux_compact(w, np.zeros(3), 0.0, 0.0, 1.0, 0.0, G10) == pytest.approx(0.7906, abs=1e-4)


def test_llf_values():
    wm, wp = state(1, 0, 0), state(0.1, 0, 0)
    assert llf_surface_flux(wm, wp, 1.0, 0.0, G10)[0] == pytest.approx(0.45 * np.sqrt(10))
    w = state(0.7, 1.1, 0.3)
    np.testing.assert_allclose(llf_surface_flux(w, w, 0.6, 0.8, P), normal_flux(w, 0.6, 0.8, P))


def test_llf_supersonic_upwinds():
    """Fast flow to the right: the flux leans toward the left (upwind) state."""
    wm, wp = state(1.0, 10.0, 0), state(0.5, 10.0, 0)
    f = llf_surface_flux(wm, wp, 1.0, 0.0, P)[0]
    assert abs(f - wm[1]) < abs(f - wp[1])


def test_dry_side_sign_of_b():
    """With h- = 0 the third term <c> B u+ of the mean update is non-negative."""
    rng = np.random.default_rng(7)
    for _ in range(200):
        wp = state(rng.uniform(0.01, 2), rng.uniform(-2, 2), rng.uniform(-2, 2))
        ubar, cbar, _, B, _ = wave_averages(np.zeros(3), wp, 1.0, 0.0, P)
        assert np.sign(B) == np.sign(ubar) or B == 0
        assert cbar * B * velocity(wp, P)[0] >= -1e-14


@given(wet_primitive, wet_primitive, st.floats(-0.5, 0.5))
def test_tadmor_condition_flat_bottom(a, c, b):
    wm, wp = state(*a), state(*c)
    F, G = ec_surface_flux(wm, wp, P)
    jq = entropy_vars(wp, b, P) - entropy_vars(wm, b, P)
    jpsi_x = 0.5 * P.g * (c[0] ** 2 * c[1] - a[0] ** 2 * a[1])
    jpsi_y = 0.5 * P.g * (c[0] ** 2 * c[2] - a[0] ** 2 * a[2])
    scale = 1 + np.abs(F).max() * np.abs(jq).max()
    assert abs(jq @ F - jpsi_x) <= 1e-12 * scale
    assert abs(jq @ G - jpsi_y) <= 1e-12 * scale


@given(primitive, primitive, st.floats(-0.5, 0.5), st.floats(-0.5, 0.5), st.floats(0, 2 * np.pi))
def test_es_dissipation_nonnegative(a, c, bm, bp, angle):
    nx, ny = np.cos(angle), np.sin(angle)
    um, utm = nx * a[1] + ny * a[2], -ny * a[1] + nx * a[2]
    up, utp = nx * c[1] + ny * c[2], -ny * c[1] + nx * c[2]
    d, jq = es_dissipation_rotated(a[0], um, utm, bm, c[0], up, utp, bp, P.g)
    assert jq @ d >= -1e-14 * (1 + (jq @ jq))


@given(primitive, primitive, st.floats(-0.5, 0.5), st.floats(-0.5, 0.5), st.floats(0, 2 * np.pi))
def test_compact_matches_matrix_form(a, c, bm, bp, angle):
    nx, ny = np.cos(angle), np.sin(angle)
    wm, wp = state(*a), state(*c)
    full = es_surface_flux_normal(wm, wp, bm, bp, nx, ny, P)[0]
    assert abs(full - h_flux_compact(wm, wp, bm, bp, nx, ny, P)) <= 1e-12 * (1 + abs(full))


@given(primitive, primitive)
def test_wave_average_bounds(a, c):
    wm, wp = state(*a), state(*c)
    ubar, cbar, A, B, _ = wave_averages(wm, wp, 1.0, 0.0, P)
    lam = max(abs(ubar) + cbar, 0.0)
    assert A >= 2 * abs(ubar) - 1e-14
    assert abs(B) <= lam + 1e-14
    assert np.sign(B) == np.sign(ubar) or B == 0 or cbar == 0


@given(wet_primitive, wet_primitive, st.floats(0, 2 * np.pi))
def test_fluxes_symmetric(a, c, angle):
    wm, wp = state(*a), state(*c)
    for flux in (volume_flux_sharp, ec_surface_flux):
        F1, G1_ = flux(wm, wp, P)
        F2, G2 = flux(wp, wm, P)
        np.testing.assert_allclose(F1, F2, rtol=1e-14, atol=1e-14)
        np.testing.assert_allclose(G1_, G2, rtol=1e-14, atol=1e-14)


@given(wet_primitive, st.floats(-1, 1), st.floats(0, 2 * np.pi))
def test_two_point_fluxes_consistent(a, b, angle):
    w = state(*a)
    nx, ny = np.cos(angle), np.sin(angle)
    f, g = physical_flux(w, P)
    tol = 1e-13 * (1 + np.abs(f).max() + np.abs(g).max())
    for F, G in (volume_flux_sharp(w, w, P), ec_surface_flux(w, w, P)):
        assert np.abs(F - f).max() <= tol and np.abs(G - g).max() <= tol
    for flux in (es_surface_flux_normal(w, w, b, b, nx, ny, P), llf_surface_flux(w, w, nx, ny, P)):
        assert np.abs(flux - (nx * f + ny * g)).max() <= tol
