import numpy as np
import pytest
from hypothesis import given, strategies as st

from swedg.dg import assemble_rhs
from swedg.mesh import (WALL, LineCurve, MeshError, NodalCurve, build_cartesian_mesh, build_curved_dam_mesh,
                        build_transfinite_element, build_warped_periodic_mesh, compute_metrics, d_eta, d_xi, dam_curve,
                        exterior_state, face_traces, mesh_from_coordinates)
from swedg.operators import operators
from swedg.physics import PhysicsParams

from helpers import roundoff_scale


def unit_square(N):
    c = [LineCurve((0, 0), (1, 0)), LineCurve((1, 0), (1, 1)), LineCurve((0, 1), (1, 1)), LineCurve((0, 0), (0, 1))]
    return build_transfinite_element(c, operators(N))


def test_unit_square_is_affine():
    ops = operators(4)
    x, y = unit_square(4)
    np.testing.assert_allclose(x, np.broadcast_to((ops.nodes[:, None] + 1) / 2, x.shape), atol=1e-15)
    np.testing.assert_allclose(y, np.broadcast_to((ops.nodes[None, :] + 1) / 2, y.shape), atol=1e-15)
    m = compute_metrics(x, y, 4)
    np.testing.assert_allclose(m.J, 0.25, atol=1e-14)
    np.testing.assert_allclose(m.nx[0], [[0] * 5, [1] * 5, [0] * 5, [-1] * 5], atol=1e-14)
    np.testing.assert_allclose(m.ny[0], [[-1] * 5, [0] * 5, [1] * 5, [0] * 5], atol=1e-14)


def test_parallelogram_constant_metrics():
    p = [(0, 0), (2, 0.5), (2.5, 2.0), (0.5, 1.5)]
    c = [LineCurve(p[0], p[1]), LineCurve(p[1], p[2]), LineCurve(p[3], p[2]), LineCurve(p[0], p[3])]
    x, y = build_transfinite_element(c, operators(3))
    m = compute_metrics(x, y, 3)
    (ax, ay), (bx, by) = np.subtract(p[1], p[0]), np.subtract(p[3], p[0])
    area = abs(ax * by - ay * bx)
    np.testing.assert_allclose(m.J, area / 4, atol=1e-13)
    assert abs(m.area()[0] - area) < 1e-13


def test_rotated_square_normals():
    r = np.sqrt(0.5)
    p = [(0, 0), (r, r), (0, 2 * r), (-r, r)]
    c = [LineCurve(p[0], p[1]), LineCurve(p[1], p[2]), LineCurve(p[3], p[2]), LineCurve(p[0], p[3])]
    m = compute_metrics(*build_transfinite_element(c, operators(2)), 2)
    np.testing.assert_allclose(np.hypot(m.nx, m.ny), 1.0, atol=1e-14)
    np.testing.assert_allclose([m.nx[0, 1, 0], m.ny[0, 1, 0]], [r, r], atol=1e-14)


def test_dam_edge_blend():
    N = 6
    ops = operators(N)
    ys = 2.5 * (ops.nodes + 1)
    dam = NodalCurve(ops, dam_curve(ys), ys)
    c = [LineCurve((-3, 0), (dam_curve(0), 0)), dam, LineCurve((-3, 5), (dam_curve(5), 5)), LineCurve((-3, 0), (-3, 5))]
    x, y = build_transfinite_element(c, ops)
    np.testing.assert_allclose(x[-1], dam_curve(y[-1]), atol=1e-13)
    assert x[0, 0] == -3 and y[-1, -1] == 5 and x[-1, -1] == pytest.approx(dam_curve(5.0), abs=1e-14)


def test_corner_mismatch_rejected():
    c = [LineCurve((0, 0), (1, 0)), LineCurve((1, 0.1), (1, 1)), LineCurve((0, 1), (1, 1)), LineCurve((0, 0), (0, 1))]
    with pytest.raises(MeshError):
        build_transfinite_element(c, operators(2))


def test_inverted_element_rejected():
    x, y = unit_square(2)
    with pytest.raises(MeshError):
        compute_metrics(x[::-1], y, 2)


def test_curved_dam_metrics():
    m = build_curved_dam_mesh(6, 4, 5)
    assert m.J.min() > 0
    D = m.ops.D
    np.testing.assert_allclose(d_eta(D, m.x_xi), d_xi(D, m.x_eta), atol=1e-12)
    np.testing.assert_allclose(d_eta(D, m.y_xi), d_xi(D, m.y_eta), atol=1e-12)
    with pytest.raises(MeshError):
        build_curved_dam_mesh(5, 4, 3)


def test_curved_dam_follows_dam_curve():
    m = build_curved_dam_mesh(8, 4, 4)
    on_dam = np.abs(m.x - dam_curve(m.y)) < 1e-12
    assert on_dam.sum() >= 4 * 5


def test_cartesian_jacobian_and_face_scaling():
    m = build_cartesian_mesh(-20, 20, -20, 20, 50, 50, 3)
    np.testing.assert_allclose(m.J, 0.16, rtol=1e-13)
    # a = J / J_surf: half the element width normal to the face
    np.testing.assert_allclose(m.a[:, [1, 3]], 0.4, rtol=1e-12)
    np.testing.assert_allclose(m.a[:, [0, 2]], 0.4, rtol=1e-12)


@pytest.mark.parametrize("Kx, Ky", [(1, 1), (3, 2), (5, 4)])
def test_face_counts(Kx, Ky):
    m = build_cartesian_mesh(0, 1, 0, 1, Kx, Ky, 2)
    interior = (Kx - 1) * Ky + Kx * (Ky - 1)
    assert len(m.em) == interior
    assert len(m.be) == 2 * (Kx + Ky)
    faces = list(zip(m.em, m.sm)) + list(zip(m.ep, m.sp)) + list(zip(m.be, m.bs))
    assert len(set(faces)) == 4 * Kx * Ky
    p = build_cartesian_mesh(0, 1, 0, 1, Kx, Ky, 2, periodic=(True, True))
    assert len(p.be) == 0 and len(p.em) == 2 * Kx * Ky


def test_mesh_needs_elements():
    with pytest.raises(MeshError):
        build_cartesian_mesh(0, 1, 0, 1, 0, 1, 2)


def test_exterior_state_wall():
    np.testing.assert_allclose(exterior_state(np.array([1.0, 1.0, 0.0]), 1.0, 0.0, WALL), [1, -1, 0])
    np.testing.assert_allclose(exterior_state(np.array([1.0, 0.0, 2.0]), 1.0, 0.0, WALL), [1, 0, 2])
    r = np.sqrt(0.5)
    np.testing.assert_allclose(exterior_state(np.array([1.0, 1.0, 0.0]), r, r, WALL), [1, 0, -1], atol=1e-15)
    with pytest.raises(ValueError):
        exterior_state(np.ones(3), 1.0, 0.0, "inflow")


def _meshes():
    return [build_cartesian_mesh(0, 2, 0, 1, 3, 2, 3), build_curved_dam_mesh(4, 3, 4),
            build_warped_periodic_mesh(3, 3, 5), build_cartesian_mesh(0, 1, 0, 1, 2, 2, 2, periodic=(True, False))]


@pytest.mark.parametrize("mesh", _meshes(), ids=["cartesian", "dam", "warped", "periodic-x"])
def test_watertight_and_opposed_normals(mesh):
    L = 2.0 if mesh.x.max() > 1.5 else 1.0
    xm, xp = mesh.interior_traces(mesh.x)
    ym, yp = mesh.interior_traces(mesh.y)
    dx = np.abs(xp - xm)
    dy = np.abs(yp - ym)
    # periodic pairs are offset by whole periods
    dx = np.minimum(dx, np.abs(dx - L))
    dy = np.minimum(dy, np.abs(dy - (mesh.y.max() - mesh.y.min())))
    assert dx.max() < 1e-10 and dy.max() < 1e-10
    nxm, nym, _ = mesh.interior_normals()
    np.testing.assert_allclose(mesh.gather_plus_to_face(nxm), -mesh.nx[mesh.ep, mesh.sp], atol=1e-12)
    np.testing.assert_allclose(mesh.gather_plus_to_face(nym), -mesh.ny[mesh.ep, mesh.sp], atol=1e-12)


@pytest.mark.parametrize("mesh", _meshes(), ids=["cartesian", "dam", "warped", "periodic-x"])
def test_free_stream(mesh):
    W = np.stack([np.full(mesh.x.shape, 1.3), np.full(mesh.x.shape, 0.4), np.full(mesh.x.shape, -0.2)])
    if len(mesh.be):
        W[1:] = 0.0  # walls reflect any flow; a state at rest is the free stream there
    params = PhysicsParams()
    for mode in ("es", "standard"):
        assert np.abs(assemble_rhs(W, mesh, params, mode)).max() <= 1e-13 * roundoff_scale(W, mesh, params)
    if mesh.N <= 3:
        assert np.abs(assemble_rhs(W, mesh, params, "es")).max() <= 1e-12



def test_mesh_from_coordinates_round_trip():
    m = build_curved_dam_mesh(4, 2, 3)
    m2 = mesh_from_coordinates(m.x, m.y, 3)
    np.testing.assert_array_equal(m2.J, m.J)
    assert len(m2.em) == len(m.em)


def test_interface_jump():
    m = build_cartesian_mesh(0, 1, 0, 1, 3, 3, 3)
    assert m.interface_jump(m.x**2 + m.y) < 1e-15
    ids = np.broadcast_to(np.arange(m.K)[:, None, None], m.x.shape).astype(float)
    assert m.interface_jump(ids) >= 1.0


@given(st.integers(1, 7), st.floats(0.1, 3), st.floats(0.1, 3))
def test_cartesian_area_sums_to_domain(N, Lx, Ly):
    m = build_cartesian_mesh(0, Lx, 0, Ly, 3, 2, N)
    assert abs(m.area().sum() - Lx * Ly) < 1e-12 * Lx * Ly


def test_face_traces_shape():
    u = np.arange(2 * 3 * 3, dtype=float).reshape(2, 3, 3)
    tr = face_traces(u)
    assert tr.shape == (2, 4, 3)
    np.testing.assert_array_equal(tr[0, 1], u[0, -1, :])
