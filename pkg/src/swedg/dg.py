"""Semi-discrete DG spectral element operator for the shallow water equations.

State arrays are ``(3, K, n, n)``. The residual returned by :func:`assemble_rhs`
is the time derivative ``dW/dt``.

Two modes are supported:

``"es"``
    split-form flux differencing with entropy-conserving volume fluxes,
    entropy-stable interface fluxes and the split bathymetry source.
``"standard"``
    pointwise contravariant fluxes differentiated with D, local Lax-Friedrichs
    interface fluxes and a pointwise gradient source.
"""

import numpy as np

from .fluxes import es_surface_flux_normal, llf_surface_flux, sharp_from_primitives
from .mesh import add_faces_to_volume, d_eta, d_xi, exterior_state, face_traces, WALL
from .physics import entropy_vars, physical_flux, velocity

MODES = ("es", "standard")


# Two-point terms of the split volume flux as (sign, factor names): each is a
# product of arithmetic means taken over the node pair (i, m). Pressure terms
# (1/2 g h_i h_m <metric>) are handled separately.
_MEAN_TERMS = {
    0: (("hu", "mf"), ("hv", "mg")),
    1: (("hu", "u", "mf"), ("hv", "u", "mg")),
    2: (("hu", "v", "mf"), ("hv", "v", "mg")),
}


def _expanded_terms():
    """For every term, the (outer, inner) name splits of its mean-product expansion.

    prod_k (a_k,i + a_k,m)/2 summed against D_im equals 2^-n times the sum over
    subsets of factors: (product of the others at i) * D (product of the subset).
    """
    out = {}
    for comp, terms in _MEAN_TERMS.items():
        parts = []
        for names in terms:
            n = len(names)
            for mask in range(1 << n):
                outer = tuple(a for k, a in enumerate(names) if not mask >> k & 1)
                inner = tuple(sorted(a for k, a in enumerate(names) if mask >> k & 1))
                parts.append((0.5**n, outer, inner))
        out[comp] = parts
    return out


_EXPANSION = _expanded_terms()
_INNER = sorted({inner for parts in _EXPANSION.values() for _, _, inner in parts if inner}
                | {("h",), ("h", "mf"), ("h", "mg")})


def _direction_terms(apply, row, fields, g):
    """Volume sums of F# <m_f> + G# <m_g> along one reference direction.

    ``fields`` maps names to nodal arrays; ``apply`` applies the split
    derivative along the pairing axis to a stack of fields.
    """
    cache = {}

    def prod(names):
        key = tuple(sorted(names))
        if key not in cache:
            cache[key] = fields[key[0]] if len(key) == 1 else prod(key[:-1]) * fields[key[-1]]
        return cache[key]

    derived = dict(zip(_INNER, apply(np.stack([prod(k) for k in _INNER]))))
    out = np.empty((3,) + fields["h"].shape)
    for comp, parts in _EXPANSION.items():
        acc = np.zeros_like(fields["h"])
        for coef, outer, inner in parts:
            term = derived[inner] if inner else row
            acc += coef * (prod(outer) * term) if outer else coef * term
        out[comp] = acc
    h = fields["h"]
    for comp, metric in ((1, "mf"), (2, "mg")):
        out[comp] += 0.25 * g * (h * fields[metric] * derived[("h",)] + h * derived[tuple(sorted(("h", metric)))])
    return out


def split_volume_terms(W, mesh, params):
    """Flux-differencing volume sums with the modified matrix 2D + S.

    Algebraically identical to :func:`split_volume_terms_direct`; the two-point
    means are expanded so the sums become matrix products on nodal fields.
    """
    Ds = mesh.ops.D_split
    row = Ds.sum(axis=1)
    h = W[0]
    u, v = velocity(W, params)
    base = dict(h=h, u=u, v=v, hu=h * u, hv=h * v)
    Lxi = _direction_terms(lambda a: d_xi(Ds, a), row[:, None],
                           dict(base, mf=mesh.y_eta, mg=-mesh.x_eta), params.g)
    Leta = _direction_terms(lambda a: d_eta(Ds, a), row[None, :],
                            dict(base, mf=-mesh.y_xi, mg=mesh.x_xi), params.g)
    return Lxi + Leta


def split_volume_terms_direct(W, mesh, params):
    """Flux-differencing volume sums evaluated pair by pair (reference form)."""
    Ds = mesh.ops.D_split
    h = W[0]
    u, v = velocity(W, params)
    g = params.g

    # xi direction: pair node i with node m on the same eta line j -> (K, i, m, j)
    F, G = sharp_from_primitives(h[:, :, None, :], u[:, :, None, :], v[:, :, None, :],
                                 h[:, None, :, :], u[:, None, :, :], v[:, None, :, :], g)
    ye = 0.5 * (mesh.y_eta[:, :, None, :] + mesh.y_eta[:, None, :, :])
    xe = 0.5 * (mesh.x_eta[:, :, None, :] + mesh.x_eta[:, None, :, :])
    Lxi = np.einsum("im,vkimj->vkij", Ds, F * ye - G * xe, optimize=True)

    # eta direction: pair node j with node m on the same xi line i -> (K, i, j, m)
    F, G = sharp_from_primitives(h[:, :, :, None], u[:, :, :, None], v[:, :, :, None],
                                 h[:, :, None, :], u[:, :, None, :], v[:, :, None, :], g)
    yx = 0.5 * (mesh.y_xi[:, :, :, None] + mesh.y_xi[:, :, None, :])
    xx = 0.5 * (mesh.x_xi[:, :, :, None] + mesh.x_xi[:, :, None, :])
    Leta = np.einsum("jm,vkijm->vkij", Ds, -F * yx + G * xx, optimize=True)
    return Lxi + Leta


def contravariant_fluxes(W, mesh, params):
    f, g = physical_flux(W, params)
    return f * mesh.y_eta - g * mesh.x_eta, -f * mesh.y_xi + g * mesh.x_xi


def standard_volume_terms(W, mesh, params):
    """Sum_l D_il F~_lj + Sum_l D_jl G~_il with pointwise contravariant fluxes."""
    D = mesh.ops.D
    Ft, Gt = contravariant_fluxes(W, mesh, params)
    return d_xi(D, Ft) + d_eta(D, Gt)


def split_source_terms(W, mesh, params):
    """Well-balanced bathymetry source, already scaled by J.

    The split derivative combinations (metric times derivative plus derivative of
    metric-premultiplied b) cancel the pressure part of the split volume terms
    exactly for a lake at rest.
    """
    D = mesh.ops.D
    b = mesh.b
    h = W[0]
    bx = (mesh.y_eta * d_xi(D, b) + d_xi(D, mesh.y_eta * b)
          - mesh.y_xi * d_eta(D, b) - d_eta(D, mesh.y_xi * b))
    by = (-mesh.x_eta * d_xi(D, b) - d_xi(D, mesh.x_eta * b)
          + mesh.x_xi * d_eta(D, b) + d_eta(D, mesh.x_xi * b))
    S = np.zeros_like(W)
    S[1] = -0.5 * params.g * h * bx
    S[2] = -0.5 * params.g * h * by
    return S


def standard_source_terms(W, mesh, params):
    D = mesh.ops.D
    b = mesh.b
    b_xi, b_eta = d_xi(D, b), d_eta(D, b)
    S = np.zeros_like(W)
    S[1] = -params.g * W[0] * (mesh.y_eta * b_xi - mesh.y_xi * b_eta)
    S[2] = -params.g * W[0] * (-mesh.x_eta * b_xi + mesh.x_xi * b_eta)
    return S


def interface_fluxes(W, mesh, params, mode="es"):
    """Numerical fluxes J_surf n.F* on every element face, shaped ``(3, K, 4, n)``.

    Each interior face flux is evaluated once, from the '-' side, and applied
    with opposite sign on the '+' side. Wall faces use the mirror state.
    """
    acc = np.zeros((3, mesh.K, 4, mesh.n))
    bm, bp = mesh.interior_traces(mesh.b)
    wm, wp = mesh.interior_traces(W)
    nx, ny, js = mesh.interior_normals()
    if mode == "es":
        flux = es_surface_flux_normal(wm, wp, bm, bp, nx, ny, params, check=False)
    else:
        flux = llf_surface_flux(wm, wp, nx, ny, params)
    mesh.scatter_interior(flux * js, acc)

    if len(mesh.be):
        wb = mesh.boundary_traces(W)
        bb = mesh.boundary_traces(mesh.b)
        nxb, nyb = mesh.boundary_normals()
        jsb = mesh.jsurf[mesh.be, mesh.bs]
        ghost = exterior_state(wb, nxb, nyb, WALL)
        if mode == "es":
            flux = es_surface_flux_normal(wb, ghost, bb, bb, nxb, nyb, params, check=False)
        else:
            flux = llf_surface_flux(wb, ghost, nxb, nyb, params)
        acc[:, mesh.be, mesh.bs] = flux * jsb
    return acc


def surface_terms(W, mesh, params, mode="es"):
    """Face contributions lifted to the volume nodes (already divided by w_0).

    In ES mode the S-part of 2D + S carries the trace flux, so only the
    numerical flux is added; in standard mode the interior trace flux is
    subtracted here (strong form).
    """
    acc = interface_fluxes(W, mesh, params, mode)
    if mode == "standard":
        f, g = physical_flux(face_traces(W), params)
        acc -= mesh.jsurf * (mesh.nx * f + mesh.ny * g)
    out = np.zeros_like(W)
    add_faces_to_volume(acc / mesh.ops.weights[0], out)
    return out


def assemble_rhs(W, mesh, params, mode="es", viscous=None, forcing=None, t=0.0):
    """dW/dt = -(1/J)(L_xi + L_eta - S) + viscous + forcing.

    Args:
        viscous: optional callable ``W -> array`` returning the (already
            J-scaled) viscous contribution to dW/dt.
        forcing: optional callable ``(x, y, t) -> (3, K, n, n)`` array added to
            the residual (manufactured solutions).
    """
    if mode == "es":
        L = split_volume_terms(W, mesh, params) + surface_terms(W, mesh, params, mode)
        L -= split_source_terms(W, mesh, params)
    elif mode == "standard":
        L = standard_volume_terms(W, mesh, params) + surface_terms(W, mesh, params, mode)
        L -= standard_source_terms(W, mesh, params)
    else:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    R = -L / mesh.J
    if viscous is not None:
        R += viscous(W)
    if forcing is not None:
        R += forcing(mesh.x, mesh.y, t)
    return R


def entropy_rate(W, R, mesh, params):
    """Discrete entropy production  sum q . R J w_i w_j."""
    q = entropy_vars(W, mesh.b, params)
    return float(mesh.integrate(np.sum(q * R, axis=0)))
