"""One-dimensional reference-element operators on Legendre-Gauss-Lobatto nodes.

All matrices are dense ``(N+1, N+1)`` numpy arrays in row-major order, indexed
``A[i, j]`` with ``i`` the output (collocation) node and ``j`` the input node.
"""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import legendre as npleg


def legendre_and_derivative(N, x):
    """Evaluate L_N(x) and L_N'(x) by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    if N == 0:
        return np.ones_like(x), np.zeros_like(x)
    p_prev, p = np.ones_like(x), x.copy()
    dp_prev, dp = np.zeros_like(x), np.ones_like(x)
    for k in range(2, N + 1):
        p_prev, p = p, ((2 * k - 1) * x * p - (k - 1) * p_prev) / k
        dp_prev, dp = dp, dp_prev + (2 * k - 1) * p_prev
    return p, dp


def build_lgl(N, tol=1e-15, maxiter=100):
    """Legendre-Gauss-Lobatto nodes and weights for polynomial degree N.

    Interior nodes are the roots of L_N' found by damped Newton iteration on
    q(x) = (1 - x^2) L_N'(x), started from Chebyshev-Gauss-Lobatto points.
    Weights are 2 / (N (N+1) L_N(x_j)^2).
    """
    if N < 1:
        raise ValueError(f"LGL operators need N >= 1, got N={N}")
    x = -np.cos(np.pi * np.arange(N + 1) / N)
    interior = x[1:-1].copy()
    for _ in range(maxiter):
        # q = (1-x^2) L', q' = -N(N+1) L  (Legendre ODE)
        L, dL = legendre_and_derivative(N, interior)
        q = (1.0 - interior**2) * dL
        dq = -N * (N + 1) * L
        step = q / dq
        damp = 1.0
        while np.any(np.abs(step * damp) > 0.5 / N):
            damp *= 0.5
        interior = interior - damp * step
        if np.max(np.abs(step), initial=0.0) < tol:
            break
    x[1:-1] = np.sort(interior)
    x[0], x[-1] = -1.0, 1.0
    # enforce exact symmetry
    x = 0.5 * (x - x[::-1])
    L, _ = legendre_and_derivative(N, x)
    w = 2.0 / (N * (N + 1) * L**2)
    return x, w


def barycentric_weights(nodes):
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / np.prod(diff, axis=1)


def lagrange_matrix(nodes, x):
    """Matrix ``P[k, j] = l_j(x_k)`` of Lagrange basis values at points x."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    bw = barycentric_weights(nodes)
    diff = x[:, None] - nodes[None, :]
    exact = np.isclose(diff, 0.0, atol=1e-15, rtol=0.0)
    diff[exact] = 1.0
    P = bw[None, :] / diff
    P /= P.sum(axis=1, keepdims=True)
    rows = np.any(exact, axis=1)
    P[rows] = exact[rows].astype(float)
    return P


def build_deriv(nodes):
    """Lagrange derivative matrix ``D[i, j] = l_j'(x_i)``.

    Off-diagonals use barycentric weights; the diagonal is set by the negative
    row sum so that D annihilates constants to round-off.
    """
    bw = barycentric_weights(nodes)
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    D = (bw[None, :] / bw[:, None]) / diff
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


def surface_matrix(weights):
    S = np.zeros((len(weights), len(weights)))
    S[0, 0] = 1.0 / weights[0]
    S[-1, -1] = -1.0 / weights[-1]
    return S


def build_modified_deriv(D, weights):
    """Return ``(D_split, D_weak)``: ``2 D + S`` and ``-M^{-1} D^T M``."""
    S = surface_matrix(weights)
    D_split = 2.0 * D + S
    D_weak = -(D.T * weights[None, :]) / weights[:, None]
    return D_split, D_weak


def build_vandermonde(N, nodes):
    """Orthonormal-Legendre Vandermonde pair on the LGL nodes.

    ``V[i, j] = L_j(x_i) sqrt(j + 1/2)``. The inverse is assembled as the
    L2 projection onto the normalised Legendre modes, evaluated with the
    (N+1)-point Legendre-Gauss rule, which is exact for these degree-2N
    integrands.
    """
    scale = np.sqrt(np.arange(N + 1) + 0.5)
    V = npleg.legvander(nodes, N) * scale[None, :]
    xg, wg = npleg.leggauss(N + 1)
    Lg = npleg.legvander(xg, N) * scale[None, :]  # (l, i) -> L~_i(xg_l)
    ell = lagrange_matrix(nodes, xg)  # (l, j) -> l_j(xg_l)
    V_inv = np.einsum("li,lj,l->ij", Lg, ell, wg)
    return V, V_inv


@dataclass(frozen=True)
class Operators1D:
    N: int
    nodes: np.ndarray
    weights: np.ndarray
    D: np.ndarray
    D_split: np.ndarray
    D_weak: np.ndarray
    V: np.ndarray
    V_inv: np.ndarray

    @property
    def n(self):
        return self.N + 1

    @property
    def S(self):
        return surface_matrix(self.weights)

    @property
    def boundary_matrix(self):
        B = np.zeros((self.n, self.n))
        B[0, 0], B[-1, -1] = -1.0, 1.0
        return B

    def interpolation_matrix(self, x):
        return lagrange_matrix(self.nodes, x)


_cache = {}


def operators(N):
    """Cached :class:`Operators1D` for degree N (read-only arrays)."""
    if N not in _cache:
        nodes, weights = build_lgl(N)
        D = build_deriv(nodes)
        D_split, D_weak = build_modified_deriv(D, weights)
        V, V_inv = build_vandermonde(N, nodes)
        for arr in (nodes, weights, D, D_split, D_weak, V, V_inv):
            arr.setflags(write=False)
        _cache[N] = Operators1D(N, nodes, weights, D, D_split, D_weak, V, V_inv)
    return _cache[N]
