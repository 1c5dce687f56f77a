"""Shallow water variable algebra: velocities, fluxes, entropy pair, rotation.

States are arrays with the conserved variables ``(h, hu, hv)`` along axis 0;
every function broadcasts over the trailing axes.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PhysicsParams:
    g: float = 9.81
    h_tol: float = 1e-4
    h_des: float = 1e-8

    def __post_init__(self):
        if not self.g > 0:
            raise ValueError(f"gravity must be positive, got {self.g}")
        if not 0 < self.h_des <= self.h_tol:
            raise ValueError("need 0 < h_des <= h_tol")


def velocity(w, params):
    """Desingularised velocities: zero wherever h < h_des."""
    h = w[0]
    wet = h >= params.h_des
    safe = np.where(wet, h, 1.0)
    u = np.where(wet, w[1] / safe, 0.0)
    v = np.where(wet, w[2] / safe, 0.0)
    return u, v


def physical_flux(w, params):
    """Return ``(f, g)`` with f the x-flux and g the y-flux, each shaped like w."""
    h = w[0]
    u, v = velocity(w, params)
    p = 0.5 * params.g * h * h
    hu, hv = h * u, h * v
    f = np.stack([hu, hu * u + p, hu * v])
    g = np.stack([hv, hv * u, hv * v + p])
    return f, g


def normal_flux(w, nx, ny, params):
    f, g = physical_flux(w, params)
    return nx * f + ny * g


def entropy_and_flux(w, b, params):
    """Total energy e and its fluxes (F, G); zero at dry nodes."""
    h = w[0]
    u, v = velocity(w, params)
    g = params.g
    kin = 0.5 * (u * u + v * v)
    e = h * kin + 0.5 * g * h * h + g * h * b
    common = kin + g * (h + b)
    return e, h * u * common, h * v * common


def entropy(w, b, params):
    return entropy_and_flux(w, b, params)[0]


def entropy_vars(w, b, params):
    """Entropy variables ``(g(h+b) - |u|^2/2, u, v)``."""
    u, v = velocity(w, params)
    return np.stack([params.g * (w[0] + b) - 0.5 * (u * u + v * v), u, v])


def _check_unit(nx, ny, tol=1e-10):
    err = np.abs(np.hypot(nx, ny) - 1.0)
    if np.any(err > tol):
        raise ValueError(f"normal is not unit length (max deviation {err.max():.3e})")


def rotate(a, b, nx, ny, check=True):
    """Rotate a vector pair (a, b) into the (normal, tangent) frame."""
    if check:
        _check_unit(nx, ny)
    return nx * a + ny * b, -ny * a + nx * b


def unrotate(a_n, a_t, nx, ny):
    return nx * a_n - ny * a_t, ny * a_n + nx * a_t


def rotate_state(w, nx, ny, check=True):
    hun, hut = rotate(w[1], w[2], nx, ny, check)
    return np.stack([w[0], hun, hut])


def unrotate_state(w, nx, ny):
    hu, hv = unrotate(w[1], w[2], nx, ny)
    return np.stack([w[0], hu, hv])


def max_wave_speed(wm, wp, nx, ny, params):
    """max over both traces of |u.n| + sqrt(g h)."""
    um, vm = velocity(wm, params)
    up, vp = velocity(wp, params)
    g = params.g
    lm = np.abs(nx * um + ny * vm) + np.sqrt(g * np.maximum(wm[0], 0.0))
    lp = np.abs(nx * up + ny * vp) + np.sqrt(g * np.maximum(wp[0], 0.0))
    return np.maximum(lm, lp)
