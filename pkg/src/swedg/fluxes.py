"""Two-point and interface fluxes for the shallow water equations.

Conventions: ``wm`` is the interior ("-") trace, ``wp`` the exterior ("+")
trace, jumps are ``wp - wm`` and the normal points from "-" to "+".
"""

import numpy as np

from .physics import normal_flux, max_wave_speed, rotate, unrotate, velocity


def _avg(a, b):
    return 0.5 * (a + b)


def sharp_from_primitives(h1, u1, v1, h2, u2, v2, g):
    """Entropy-conserving volume fluxes (F#, G#) from primitive pairs.

    The pressure part uses g<h>^2 - g<h^2>/2, i.e. g h1 h2 / 2.
    """
    hu = _avg(h1 * u1, h2 * u2)
    hv = _avg(h1 * v1, h2 * v2)
    ua, va = _avg(u1, u2), _avg(v1, v2)
    p = 0.5 * g * h1 * h2
    F = np.stack([hu, hu * ua + p, hu * va])
    G = np.stack([hv, hv * ua, hv * va + p])
    return F, G


def volume_flux_sharp(wa, wb, params):
    ua, va = velocity(wa, params)
    ub, vb = velocity(wb, params)
    return sharp_from_primitives(wa[0], ua, va, wb[0], ub, vb, params.g)


def contravariant_volume_flux(wa, wb, metrics_a, metrics_b, params):
    """Curvilinear two-point fluxes (F~, G~).

    ``metrics_*`` are ``(x_xi, x_eta, y_xi, y_eta)`` at the two nodes; only their
    arithmetic means enter.
    """
    F, G = volume_flux_sharp(wa, wb, params)
    x_xi, x_eta, y_xi, y_eta = (_avg(a, b) for a, b in zip(metrics_a, metrics_b))
    return F * y_eta - G * x_eta, -F * y_xi + G * x_xi


def ec_surface_flux(wm, wp, params):
    """Entropy-conserving interface fluxes (F*, G*) in x and y."""
    um, vm = velocity(wm, params)
    up, vp = velocity(wp, params)
    h = _avg(wm[0], wp[0])
    h2 = _avg(wm[0] ** 2, wp[0] ** 2)
    u, v = _avg(um, up), _avg(vm, vp)
    p = 0.5 * params.g * h2
    F = np.stack([h * u, h * u * u + p, h * u * v])
    G = np.stack([h * v, h * u * v, h * v * v + p])
    return F, G


def _rotated_primitives(w, b, nx, ny, params):
    u, v = velocity(w, params)
    un, ut = rotate(u, v, nx, ny, check=False)
    return w[0], un, ut, b


def wave_averages(wm, wp, nx, ny, params):
    """Averaged normal velocity and sound speed plus the A, B combinations."""
    um, vm = velocity(wm, params)
    up, vp = velocity(wp, params)
    unm = nx * um + ny * vm
    unp = nx * up + ny * vp
    g = params.g
    cbar = _avg(np.sqrt(g * np.maximum(wm[0], 0.0)), np.sqrt(g * np.maximum(wp[0], 0.0)))
    ubar = _avg(unm, unp)
    A = np.abs(ubar + cbar) + np.abs(ubar - cbar)
    B = np.abs(ubar + cbar) - np.abs(ubar - cbar)
    return ubar, cbar, A, B, unp - unm


def es_dissipation_rotated(hm, unm, utm, bm, hp, unp, utp, bp, g):
    """Return ``(R|Lambda|R^T [[q~]], [[q~]])`` in the rotated frame.

    Evaluated factor by factor (R^T, then the diagonal, then R) so it can serve
    as an independent check on the compact mass-flux formula.
    """
    h = _avg(hm, hp)
    u, v = _avg(unm, unp), _avg(utm, utp)
    c = _avg(np.sqrt(g * np.maximum(hm, 0.0)), np.sqrt(g * np.maximum(hp, 0.0)))
    jq1 = g * ((hp + bp) - (hm + bm)) - 0.5 * ((unp**2 + utp**2) - (unm**2 + utm**2))
    jq2 = unp - unm
    jq3 = utp - utm
    # R = [[1, 0, 1], [u+c, 0, u-c], [v, 1, v]]
    t1 = jq1 + (u + c) * jq2 + v * jq3
    t2 = jq3
    t3 = jq1 + (u - c) * jq2 + v * jq3
    s1 = np.abs(u + c) / (2.0 * g) * t1
    s2 = np.abs(h * u) * t2
    s3 = np.abs(u - c) / (2.0 * g) * t3
    d = np.stack([s1 + s3, (u + c) * s1 + (u - c) * s3, v * s1 + s2 + v * s3])
    return d, np.stack([jq1, jq2, jq3])


def es_surface_flux_normal(wm, wp, bm, bp, nx, ny, params, check=True):
    """Entropy-stable flux through a face with unit normal (nx, ny).

    Velocities are rotated into the normal frame, the x-direction EC flux minus
    the eigenvector dissipation is evaluated there, and momentum is rotated back.
    """
    if check:
        err = np.abs(np.hypot(nx, ny) - 1.0)
        if np.any(err > 1e-10):
            raise ValueError(f"normal is not unit length (max deviation {err.max():.3e})")
    g = params.g
    hm, unm, utm, _ = _rotated_primitives(wm, bm, nx, ny, params)
    hp, unp, utp, _ = _rotated_primitives(wp, bp, nx, ny, params)
    h = _avg(hm, hp)
    h2 = _avg(hm * hm, hp * hp)
    u, v = _avg(unm, unp), _avg(utm, utp)
    d, _ = es_dissipation_rotated(hm, unm, utm, bm, hp, unp, utp, bp, g)
    f1 = h * u - 0.5 * d[0]
    f2 = h * u * u + 0.5 * g * h2 - 0.5 * d[1]
    f3 = h * u * v - 0.5 * d[2]
    fx, fy = unrotate(f2, f3, nx, ny)
    return np.stack([f1, fx, fy])


def ec_surface_flux_normal(wm, wp, nx, ny, params):
    F, G = ec_surface_flux(wm, wp, params)
    return nx * F + ny * G


def h_flux_compact(wm, wp, bm, bp, nx, ny, params):
    """Mass component of the ES normal flux in closed form.

    <h><u_n> - (A g[[h+b]] + <c> B [[u_n]]) / (4g)
    """
    g = params.g
    ubar, cbar, A, B, jun = wave_averages(wm, wp, nx, ny, params)
    hbar = _avg(wm[0], wp[0])
    jH = (wp[0] + bp) - (wm[0] + bm)
    return hbar * ubar - (A * g * jH + cbar * B * jun) / (4.0 * g)


def llf_surface_flux(wm, wp, nx, ny, params):
    """Local Lax-Friedrichs flux: central normal flux minus lambda_max/2 [[w]]."""
    lam = max_wave_speed(wm, wp, nx, ny, params)
    central = 0.5 * (normal_flux(wm, nx, ny, params) + normal_flux(wp, nx, ny, params))
    return central - 0.5 * lam * (wp - wm)
