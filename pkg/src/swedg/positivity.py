"""Positivity-preserving scaling limiter and the mean-height time-step bounds."""

from dataclasses import dataclass

import numpy as np

from .fluxes import wave_averages
from .mesh import WALL, exterior_state, face_traces
from .physics import entropy, velocity


class NegativeMeanError(RuntimeError):
    """An element average water height went negative."""

    def __init__(self, element, value):
        super().__init__(f"negative mean water height {value:.3e} in element {element}")
        self.element = element
        self.value = value


@dataclass
class LimiterReport:
    theta: np.ndarray
    averages: np.ndarray  # (3, K)
    min_before: float
    min_after: float
    n_limited: int
    n_dry: int


def element_average(u, mesh):
    """J-weighted LGL average over each element; leading axes preserved."""
    wq = mesh.quadrature_weights()
    return np.sum(u * wq, axis=(-2, -1)) / wq.sum(axis=(-2, -1))


def limiter_theta(hbar, hmin, guard=1e-14):
    """theta = min(1, hbar / (hbar - m)); 1 where the element is non-negative."""
    gap = hbar - hmin
    safe = np.where(gap < guard, 1.0, gap)
    theta = np.where(gap < guard, 1.0, np.minimum(1.0, hbar / safe))
    return np.where(hmin >= 0.0, 1.0, np.clip(theta, 0.0, 1.0))


def zero_dry_velocities(W, h_tol):
    dry = W[0] < h_tol
    W[1][dry] = 0.0
    W[2][dry] = 0.0
    return int(dry.sum())


def scale_to_mean(W, avg, theta):
    """theta (W - mean) + mean, element by element."""
    t = theta[None, :, None, None]
    scaled = t * (W - avg[:, :, None, None]) + avg[:, :, None, None]
    # theta = 1 must leave the element bit-for-bit unchanged
    return np.where(t == 1.0, W, scaled)


def neighbourhood_speed_bound(W, mesh, params):
    """Per-element max of |u| + 2 sqrt(g h) over the element and its face neighbours.

    |u| + 2c bounds the speed of a rarefaction running into a dry bed, so no
    physical velocity can exceed it within one CFL-limited step.
    """
    u, v = velocity(W, params)
    speed = (np.hypot(u, v) + 2.0 * np.sqrt(params.g * np.maximum(W[0], 0.0))).max(axis=(1, 2))
    bound = speed.copy()
    np.maximum.at(bound, mesh.em, speed[mesh.ep])
    np.maximum.at(bound, mesh.ep, speed[mesh.em])
    return bound


def cap_velocities(W, bound):
    """Scale momentum so that nodal speed <= bound (per element); returns count.

    Only kinetic energy is removed, so the total entropy cannot increase.
    """
    allowed = bound[:, None, None] * np.maximum(W[0], 0.0)
    mom = np.hypot(W[1], W[2])
    over = mom > allowed
    if np.any(over):
        scale = allowed[over] / mom[over]
        W[1][over] *= scale
        W[2][over] *= scale
    return int(over.sum())


def limit(W, mesh, params, speed_bound=None, mean_tol=1e-12):
    """Scale every element towards its mean so that nodal h >= 0.

    The same theta is applied to h, hu and hv. If ``speed_bound`` (per element)
    is given, nodal speeds are capped to it; finally nodes with h < h_tol get
    zero momentum. Raises :class:`NegativeMeanError` when an element mean is below
    ``-mean_tol`` times the largest mean.

    Returns:
        (limited state, LimiterReport)
    """
    avg = element_average(W, mesh)
    hbar = avg[0]
    tol = mean_tol * max(np.max(np.abs(hbar)), 1.0)
    bad = np.where(hbar < -tol)[0]
    if len(bad):
        k = int(bad[np.argmin(hbar[bad])])
        raise NegativeMeanError(k, float(hbar[k]))
    hmin = W[0].min(axis=(1, 2))
    theta = limiter_theta(np.maximum(hbar, 0.0), hmin)
    out = scale_to_mean(W, avg, theta)
    # round-off can leave -1e-17 at the minimising node
    np.maximum(out[0], 0.0, out=out[0])
    if speed_bound is not None:
        cap_velocities(out, speed_bound)
    n_dry = zero_dry_velocities(out, params.h_tol)
    report = LimiterReport(theta, avg, float(W[0].min()), float(out[0].min()), int(np.sum(theta < 1.0)), n_dry)
    return out, report


def quadrature_entropy(W, mesh, params):
    """Per-element integral of the total energy."""
    return np.sum(entropy(W, mesh.b, params) * mesh.quadrature_weights(), axis=(-2, -1))


def positivity_dt_bounds(wm, wp, a, nx, ny, w0, params):
    """Node-wise bounds (dt1, dt2) that keep the next element mean non-negative.

    ``wm`` is the interior trace, ``wp`` the exterior trace, ``a = J / J_surf``.
    Bounds that do not apply are ``inf``.
    """
    ubar, cbar, A, B, jun = wave_averages(wm, wp, nx, ny, params)
    den1 = A + 2.0 * ubar
    with np.errstate(divide="ignore", invalid="ignore"):
        dt1 = np.where(den1 > 0, w0 * a / np.where(den1 > 0, den1, 1.0), np.inf)
        hm = wm[0]
        prod = cbar * B * jun
        active = (hm > 0) & (B * jun < 0) & (prod != 0)
        dt2 = np.where(active, np.abs(w0 * a * params.g * hm / np.where(active, prod, 1.0)), np.inf)
    return dt1, dt2


def mesh_positivity_dt(W, mesh, params):
    """Smallest of the two bounds over all faces of the mesh (advisory)."""
    tr = face_traces(W)
    a = mesh.a
    ext = np.empty_like(tr)
    wm, wp = mesh.interior_traces(W)
    ext[:, mesh.em, mesh.sm] = wp
    ext[:, mesh.ep[:, None], mesh.sp[:, None], mesh.plus_index] = wm
    if len(mesh.be):
        wb = tr[:, mesh.be, mesh.bs]
        ext[:, mesh.be, mesh.bs] = exterior_state(wb, mesh.nx[mesh.be, mesh.bs], mesh.ny[mesh.be, mesh.bs], WALL)
    dt1, dt2 = positivity_dt_bounds(tr, ext, a, mesh.nx, mesh.ny, mesh.ops.weights[0], params)
    return float(min(dt1.min(), dt2.min()))
