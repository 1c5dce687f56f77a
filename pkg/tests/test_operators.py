import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.polynomial import legendre as npleg

from swedg.operators import build_deriv, build_lgl, build_modified_deriv, build_vandermonde, legendre_and_derivative, operators


def test_lgl_n1():
    x, w = build_lgl(1)
    np.testing.assert_array_equal(x, [-1.0, 1.0])
    np.testing.assert_allclose(w, [1.0, 1.0], atol=1e-15)


def test_lgl_n2():
    x, w = build_lgl(2)
    np.testing.assert_allclose(x, [-1.0, 0.0, 1.0], atol=1e-15)
    np.testing.assert_allclose(w, [1 / 3, 4 / 3, 1 / 3], atol=1e-15)


def test_lgl_n3_interior_nodes():
    x, _ = build_lgl(3)
    np.testing.assert_allclose(x[1:-1], [-np.sqrt(0.2), np.sqrt(0.2)], atol=1e-15)
    _, dL = legendre_and_derivative(3, x[1:-1])
    assert np.max(np.abs(dL)) < 1e-14


def test_lgl_rejects_n0():
    with pytest.raises(ValueError):
        build_lgl(0)


def test_deriv_n1():
    D = build_deriv(np.array([-1.0, 1.0]))
    np.testing.assert_allclose(D, [[-0.5, 0.5], [-0.5, 0.5]], atol=1e-15)


def test_deriv_of_square():
    x, _ = build_lgl(3)
    np.testing.assert_allclose(build_deriv(x) @ x**2, 2 * x, atol=1e-14)


@pytest.mark.parametrize("N", range(1, 16))
def test_deriv_annihilates_constants(N):
    assert np.max(np.abs(operators(N).D @ np.ones(N + 1))) < 1e-12


def test_modified_deriv_n1():
    ops = operators(1)
    np.testing.assert_allclose(ops.D_split, [[0.0, 1.0], [-1.0, 0.0]], atol=1e-15)


@pytest.mark.parametrize("N", [1, 2, 5, 9, 15])
def test_modified_deriv_identities(N):
    ops = operators(N)
    rows = ops.D_split.sum(axis=1)
    expect = np.zeros(N + 1)
    expect[0], expect[-1] = 1 / ops.weights[0], -1 / ops.weights[-1]
    np.testing.assert_allclose(rows, expect, atol=1e-10 * N**2)
    np.testing.assert_allclose(ops.D, -ops.S + ops.D_weak, atol=1e-13 * max(1, N**2))


@pytest.mark.parametrize("N", range(1, 16))
def test_sbp_and_quadrature(N):
    ops = operators(N)
    M = np.diag(ops.weights)
    MD = M @ ops.D
    assert np.max(np.abs(MD + MD.T - ops.boundary_matrix)) <= 1e-13
    for p in range(2 * N):
        exact = (1 - (-1) ** (p + 1)) / (p + 1)
        assert abs(ops.weights @ ops.nodes**p - exact) <= 1e-12


@pytest.mark.parametrize("N", [1, 3, 7, 15])
def test_vandermonde(N):
    ops = operators(N)
    np.testing.assert_allclose(ops.V @ ops.V_inv, np.eye(N + 1), atol=1e-12)
    modal = ops.V_inv @ np.ones(N + 1)
    assert abs(modal[0] - np.sqrt(2)) < 1e-13
    assert np.max(np.abs(modal[1:])) < 1e-13
    top = ops.V_inv @ npleg.legval(ops.nodes, np.eye(N + 1)[N])
    assert np.max(np.abs(top[:N])) < 1e-12 and abs(top[N]) > 0.1


def test_vandermonde_matches_direct_inverse():
    ops = operators(6)
    V, V_inv = build_vandermonde(6, ops.nodes)
    np.testing.assert_allclose(V_inv, np.linalg.inv(V), atol=1e-12)


def test_operators_are_read_only():
    with pytest.raises(ValueError):
        operators(3).D[0, 0] = 1.0


@given(st.integers(1, 15), st.integers(0, 2**32 - 1))
def test_modal_round_trip(N, seed):
    ops = operators(N)
    u = np.random.default_rng(seed).standard_normal(N + 1)
    np.testing.assert_allclose(ops.V @ (ops.V_inv @ u), u, atol=1e-12 * (1 + np.abs(u).max()))


@given(st.integers(1, 12))
def test_weak_operator_differs_by_surface_matrix(N):
    ops = operators(N)
    Dhat = build_modified_deriv(ops.D, ops.weights)[1]
    np.testing.assert_allclose(ops.D - Dhat, -ops.S, atol=1e-12 * N**2)
