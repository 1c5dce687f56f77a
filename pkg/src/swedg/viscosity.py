"""Entropy-stable artificial viscosity for the momentum equations.

A modal smoothness indicator on h selects a per-element coefficient epsilon;
velocity gradients are lifted with the BR1 scheme and the viscous fluxes
``eps h grad(u)``, ``eps h grad(v)`` are discretised in strong form with
averaged interface fluxes.
"""

from dataclasses import dataclass

import numpy as np

from .mesh import add_faces_to_volume, d_eta, d_xi, face_traces
from .operators import operators
from .physics import velocity


@dataclass(frozen=True)
class ViscosityConfig:
    epsilon0: float = 0.0
    sigma_min: float = None
    sigma_max: float = None
    enabled: bool = True
    exclude_mean: bool = False

    def __post_init__(self):
        if self.epsilon0 < 0:
            raise ValueError(f"epsilon0 must be non-negative, got {self.epsilon0}")
        if self.sigma_min is not None and self.sigma_max is not None:
            if not self.sigma_min < self.sigma_max:
                raise ValueError("need sigma_min < sigma_max")

    def thresholds(self, N):
        lo = default_sigma_min(N) if self.sigma_min is None else self.sigma_min
        hi = lo + 2.0 if self.sigma_max is None else self.sigma_max
        return lo, hi


def default_sigma_min(N):
    return -(4.0 + 4.25 * np.log10(N)) - 1.0


def modal_coefficients(h, ops):
    """Orthonormal Legendre coefficients of nodal element fields ``(..., n, n)``."""
    return np.matmul(np.matmul(ops.V_inv, h), ops.V_inv.T)


def shock_indicator(h, N, exclude_mean=False, floor=1e-10):
    """Per-element sigma = log10 of the larger of two truncation-energy ratios.

    The first ratio is the energy in the top mode shell over the total, the
    second the energy in the next shell over the energy of modes up to N-1.
    ``floor`` is a relative amplitude: elements whose fluctuation is below
    ``floor`` times the mean (numerically constant fields), or whose shell
    ratios are below ``floor**2`` (round-off only), get ``-inf``. With
    ``exclude_mean`` the (0, 0) mode is left out of both denominators.
    """
    if N < 2:
        return np.full(h.shape[:-2], -np.inf)
    q2 = modal_coefficients(h, operators(N)) ** 2
    top = q2[..., N, :].sum(-1) + q2[..., :N, N].sum(-1)
    nxt = q2[..., N - 1, : N - 1].sum(-1) + q2[..., : N - 1, N - 1].sum(-1) + q2[..., N - 1, N - 1]
    total = q2.sum(axis=(-2, -1))
    lower = q2[..., :N, :N].sum(axis=(-2, -1))
    mean = q2[..., 0, 0]
    if exclude_mean:
        total = total - mean
        lower = lower - mean
    fluct = q2.sum(axis=(-2, -1)) - mean
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = np.where(total > 0, top / np.where(total > 0, total, 1.0), 0.0)
        r2 = np.where(lower > 0, nxt / np.where(lower > 0, lower, 1.0), 0.0)
        ratio = np.maximum(r1, r2)
        sigma = np.where(ratio > floor**2, np.log10(np.where(ratio > 0, ratio, 1.0)), -np.inf)
    flat = fluct <= floor**2 * np.maximum(mean, np.finfo(float).tiny)
    return np.where(flat, -np.inf, sigma)


def viscosity_coefficient(sigma, epsilon0, sigma_min, sigma_max):
    """0 below sigma_min, a sine ramp up to sigma_max, epsilon0 above."""
    sigma = np.asarray(sigma, dtype=float)
    with np.errstate(invalid="ignore"):
        delta = 1.0 + np.sin(np.pi * (sigma - 0.5 * (sigma_max + sigma_min)) / (sigma_max - sigma_min))
    return np.where(sigma < sigma_min, 0.0, np.where(sigma < sigma_max, 0.5 * epsilon0 * delta, epsilon0))


def element_viscosity(W, mesh, config, h_tol=0.0):
    """Per-element epsilon from the indicator on h; zero in elements dry below h_tol."""
    if not config.enabled or config.epsilon0 == 0.0 or mesh.N < 2:
        return np.zeros(mesh.K)
    lo, hi = config.thresholds(mesh.N)
    sigma = shock_indicator(W[0], mesh.N, exclude_mean=config.exclude_mean)
    eps = viscosity_coefficient(sigma, config.epsilon0, lo, hi)
    return np.where(W[0].max(axis=(1, 2)) < h_tol, 0.0, eps)


def _lifted_gradient(u, mesh):
    """BR1 gradient of a nodal field; returns (u_x, u_y)."""
    ops = mesh.ops
    Dw = ops.D_weak
    tr = face_traces(u)
    um, up = mesh.interior_traces(u)
    star = tr.copy()  # walls: interior trace
    avg = 0.5 * (um + up)
    star[mesh.em, mesh.sm] = avg
    star[mesh.ep[:, None], mesh.sp[:, None], mesh.plus_index] = avg
    w0 = ops.weights[0]
    # metrics stay outside the derivative so the lifting is the discrete
    # adjoint of the strong-form viscous divergence
    u_xi, u_eta = d_xi(Dw, u), d_eta(Dw, u)
    gx = mesh.y_eta * u_xi - mesh.y_xi * u_eta
    gy = -mesh.x_eta * u_xi + mesh.x_xi * u_eta
    add_faces_to_volume(star * mesh.jsurf * mesh.nx / w0, gx)
    add_faces_to_volume(star * mesh.jsurf * mesh.ny / w0, gy)
    return gx / mesh.J, gy / mesh.J


def br1_gradients(W, mesh, params):
    """Lifted gradients ``(U, V)`` of the desingularised velocities, each ``(2, K, n, n)``."""
    u, v = velocity(W, params)
    return np.stack(_lifted_gradient(u, mesh)), np.stack(_lifted_gradient(v, mesh))


def viscous_rhs(W, eps, mesh, params, grads=None):
    """(1/J)(L^v_xi + L^v_eta): viscous contribution to dW/dt, zero in h."""
    eps = np.asarray(eps, dtype=float)
    if np.any(eps < 0):
        raise ValueError("viscosity coefficients must be non-negative")
    out = np.zeros_like(W)
    if not np.any(eps > 0):
        return out
    U, V = br1_gradients(W, mesh, params) if grads is None else grads
    D = mesh.ops.D
    eh = eps[:, None, None] * W[0]
    Fv = np.stack([eh * U[0], eh * V[0]])  # x-fluxes of (hu, hv)
    Gv = np.stack([eh * U[1], eh * V[1]])
    Ft = Fv * mesh.y_eta - Gv * mesh.x_eta
    Gt = -Fv * mesh.y_xi + Gv * mesh.x_xi
    L = d_xi(D, Ft) + d_eta(D, Gt)

    fn = face_traces(Fv) * mesh.nx + face_traces(Gv) * mesh.ny  # own normal flux
    fm, fp = mesh.interior_traces(Fv)
    gm, gp = mesh.interior_traces(Gv)
    nx, ny, _ = mesh.interior_normals()
    star = np.zeros_like(fn)  # walls: zero normal viscous flux
    avg = 0.5 * ((fm + fp) * nx + (gm + gp) * ny)
    mesh.scatter_interior(avg, star)
    add_faces_to_volume(mesh.jsurf * (star - fn) / mesh.ops.weights[0], L)
    out[1:] = L / mesh.J
    return out
