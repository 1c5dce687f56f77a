import numpy as np
import pytest
from hypothesis import given, strategies as st

from swedg.dg import (assemble_rhs, entropy_rate, interface_fluxes, split_source_terms, split_volume_terms,
                      split_volume_terms_direct,
                      standard_source_terms, standard_volume_terms)
from swedg.fluxes import volume_flux_sharp
from swedg.mesh import build_cartesian_mesh, build_curved_dam_mesh, build_warped_periodic_mesh
from swedg.physics import PhysicsParams
from swedg.scenarios import lake_bathymetry, make_scenario

from helpers import roundoff_scale

P = PhysicsParams()


def rest_lake(mesh, H):
    return np.stack([H - mesh.b, np.zeros_like(mesh.b), np.zeros_like(mesh.b)])


def random_state(mesh, rng, scale=0.3):
    h = 1.0 + scale * rng.random(mesh.x.shape)
    return np.stack([h, h * scale * rng.standard_normal(h.shape), h * scale * rng.standard_normal(h.shape)])


@pytest.mark.parametrize("N", [2, 3, 5])
def test_lake_at_rest_cartesian(N):
    mesh = build_cartesian_mesh(-2, 2, -2, 2, 6, 6, N).with_bathymetry(lake_bathymetry)
    assert np.abs(assemble_rhs(rest_lake(mesh, 1.0), mesh, P, "es")).max() <= 1e-11


@pytest.mark.parametrize("N", [3, 4])
def test_lake_at_rest_curved(N):
    mesh = build_curved_dam_mesh(6, 4, N).with_bathymetry(lambda x, y: lake_bathymetry(x / 5, y / 5) - 1.0)
    assert np.abs(assemble_rhs(rest_lake(mesh, 0.0), mesh, P, "es")).max() <= 1e-11


@pytest.mark.parametrize("L", [6.0, 1.0])
def test_constant_state_standard_mode(L):
    mesh = build_cartesian_mesh(0, L, 0, L, 3, 3, 4, periodic=(True, True))
    W = np.stack([np.full(mesh.x.shape, 2.0), np.full(mesh.x.shape, 0.3), np.full(mesh.x.shape, 0.1)])
    R = np.abs(assemble_rhs(W, mesh, P, "standard")).max()
    assert R <= 1e-13 * roundoff_scale(W, mesh, P)
    if L == 6.0:  # unit Jacobian: the absolute bound applies
        assert R <= 1e-12
        assert np.abs(standard_volume_terms(W, mesh, P)).max() <= 1e-12


def test_split_volume_n1_by_hand():
    """Single N=1 element: compare with an explicit loop over the flux-differencing sums."""
    mesh = build_cartesian_mesh(0.0, 0.6, 0.0, 0.4, 1, 1, 1)
    rng = np.random.default_rng(3)
    W = random_state(mesh, rng)
    Ds = mesh.ops.D_split
    y_eta, x_xi = 0.2, 0.3
    expect = np.zeros_like(W)
    for i in range(2):
        for j in range(2):
            for m in range(2):
                F, _ = volume_flux_sharp(W[:, 0, i, j], W[:, 0, m, j], P)
                _, G = volume_flux_sharp(W[:, 0, i, j], W[:, 0, i, m], P)
                expect[:, 0, i, j] += Ds[i, m] * F * y_eta + Ds[j, m] * G * x_xi
    np.testing.assert_allclose(split_volume_terms(W, mesh, P), expect, atol=1e-14)


def test_source_constant_b_vanishes():
    mesh = build_curved_dam_mesh(4, 2, 3).with_bathymetry(0.7)
    W = random_state(mesh, np.random.default_rng(0))
    assert np.abs(split_source_terms(W, mesh, P)).max() < 1e-12
    assert np.abs(standard_source_terms(W, mesh, P)).max() < 1e-12


def test_source_linear_b_is_exact_gradient():
    mesh = build_cartesian_mesh(0, 2, 0, 1, 3, 2, 3).with_bathymetry(lambda x, y: 0.3 * x - 0.2 * y)
    h = 1.5
    W = np.stack([np.full(mesh.x.shape, h), 0 * mesh.x, 0 * mesh.x])
    for S in (split_source_terms(W, mesh, P), standard_source_terms(W, mesh, P)):
        np.testing.assert_allclose(S[1] / mesh.J, -P.g * h * 0.3, rtol=1e-12)
        np.testing.assert_allclose(S[2] / mesh.J, P.g * h * 0.2, rtol=1e-12)
        assert not S[0].any()


def test_standard_volume_linear_h_divergence():
    """Linear h at rest: the divergence of (g h^2/2) is g h h_x exactly for N >= 2."""
    mesh = build_cartesian_mesh(0, 2, 0, 1, 2, 2, 2)
    h = 1.0 + 0.2 * mesh.x + 0.1 * mesh.y
    W = np.stack([h, 0 * h, 0 * h])
    L = standard_volume_terms(W, mesh, P) / mesh.J
    np.testing.assert_allclose(L[1], P.g * h * 0.2, atol=1e-12)
    np.testing.assert_allclose(L[2], P.g * h * 0.1, atol=1e-12)


def test_wall_rest_lake_has_no_mass_flux():
    mesh = build_cartesian_mesh(-1, 1, -1, 1, 3, 3, 3).with_bathymetry(lambda x, y: 0.1 * (x * x + y * y))
    acc = interface_fluxes(rest_lake(mesh, 1.0), mesh, P, "es")
    assert np.abs(acc[0, mesh.be, mesh.bs]).max() < 1e-15


@pytest.mark.parametrize("mode", ["es", "standard"])
def test_conservation_on_periodic_mesh(mode):
    rng = np.random.default_rng(5)
    mesh = build_warped_periodic_mesh(3, 3, 4)
    W = random_state(mesh, rng)
    total = mesh.integrate(assemble_rhs(W, mesh, P, mode))
    scale = mesh.integrate(np.abs(assemble_rhs(W, mesh, P, mode)))
    assert np.all(np.abs(total) <= 1e-12 * (1 + scale))


def test_mass_conserved_with_bathymetry():
    rng = np.random.default_rng(6)
    mesh = build_cartesian_mesh(0, 2, 0, 2, 3, 3, 3, periodic=(True, True)).with_bathymetry(
        lambda x, y: 0.1 * np.sin(np.pi * x) * np.cos(np.pi * y))
    R = assemble_rhs(random_state(mesh, rng), mesh, P, "es")
    assert abs(mesh.integrate(R[0])) <= 1e-12


def test_dam_break_entropy_rate():
    sc = make_scenario("wetdry_dambreak")
    mesh = sc.build_mesh(10, 10, 3)
    W = sc.initial_state(mesh)
    assert entropy_rate(W, assemble_rhs(W, mesh, P, "es"), mesh, P) <= 1e-12


def test_unknown_mode():
    mesh = build_cartesian_mesh(0, 1, 0, 1, 1, 1, 1)
    with pytest.raises(ValueError):
        assemble_rhs(rest_lake(mesh, 1.0), mesh, P, "upwind")


def test_forcing_and_viscous_hooks():
    mesh = build_cartesian_mesh(0, 1, 0, 1, 2, 2, 2)
    W = rest_lake(mesh, 1.0)
    R = assemble_rhs(W, mesh, P, "es", viscous=lambda w: np.ones_like(w), forcing=lambda x, y, t: 2 * np.ones((3,) + x.shape))
    np.testing.assert_allclose(R, 3.0, atol=1e-12)


@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3, 4]))
def test_entropy_inequality_random_states(seed, N):
    rng = np.random.default_rng(seed)
    mesh = build_warped_periodic_mesh(2, 2, N).with_bathymetry(
        lambda x, y: 0.2 * np.sin(np.pi * x) * np.sin(np.pi * y))
    W = random_state(mesh, rng, scale=0.5)
    assert entropy_rate(W, assemble_rhs(W, mesh, P, "es"), mesh, P) <= 1e-12


@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_expanded_split_kernel_matches_pairwise(seed, N):
    rng = np.random.default_rng(seed)
    mesh = build_curved_dam_mesh(2, 2, N)
    W = random_state(mesh, rng, scale=0.8)
    direct = split_volume_terms_direct(W, mesh, P)
    np.testing.assert_allclose(split_volume_terms(W, mesh, P), direct, atol=1e-13 * (1 + np.abs(direct).max()))
