"""Curvilinear quadrilateral meshes: transfinite elements, metrics, connectivity.

Element-local faces are numbered counter-clockwise starting at the bottom::

    face 0: eta = -1 (nodes ordered by xi)     face 2: eta = +1 (ordered by xi)
    face 1: xi  = +1 (nodes ordered by eta)    face 3: xi  = -1 (ordered by eta)

Nodal arrays are shaped ``(K, N+1, N+1)`` with index ``[k, i, j]`` for the node
at ``(xi_i, eta_j)``.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .operators import operators

WALL = "wall"
PERIODIC = "periodic"


class MeshError(ValueError):
    pass


# -- boundary curves ---------------------------------------------------------


class BoundaryCurve:
    """Parametrised curve s in [-1, 1] -> (x, y)."""

    def __init__(self, func):
        self.func = func

    def __call__(self, s):
        x, y = self.func(np.asarray(s, dtype=float))
        return np.broadcast_to(x, np.shape(s)).astype(float), np.broadcast_to(y, np.shape(s)).astype(float)

    def samples(self, ops):
        return self(ops.nodes)


class LineCurve(BoundaryCurve):
    def __init__(self, p0, p1):
        p0, p1 = np.asarray(p0, float), np.asarray(p1, float)
        super().__init__(lambda s: (p0[0] + 0.5 * (s + 1) * (p1[0] - p0[0]),
                                    p0[1] + 0.5 * (s + 1) * (p1[1] - p0[1])))


class NodalCurve(BoundaryCurve):
    """Degree-N curve given by its samples at the LGL nodes."""

    def __init__(self, ops, xs, ys):
        xs, ys = np.asarray(xs, float), np.asarray(ys, float)

        def func(s):
            P = ops.interpolation_matrix(np.ravel(s))
            return (P @ xs).reshape(np.shape(s)), (P @ ys).reshape(np.shape(s))

        super().__init__(func)


def transfinite_map(bottom, right, top, left, nodes):
    """Linear-blending transfinite interpolation of sampled edge curves.

    Each edge argument is an array ``(..., 2, n)`` holding x and y sampled at the
    LGL nodes: bottom/top along xi, right/left along eta.
    """
    xi = nodes[:, None]
    eta = nodes[None, :]
    out = []
    for c in range(2):
        g1, g2, g3, g4 = bottom[..., c, :], right[..., c, :], top[..., c, :], left[..., c, :]
        x1, x2 = g1[..., :1, None], g1[..., -1:, None]
        x4, x3 = g3[..., :1, None], g3[..., -1:, None]
        val = 0.5 * ((1 - xi) * g4[..., None, :] + (1 + xi) * g2[..., None, :]
                     + (1 - eta) * g1[..., :, None] + (1 + eta) * g3[..., :, None])
        val -= 0.25 * ((1 - xi) * ((1 - eta) * x1 + (1 + eta) * x4)
                       + (1 + xi) * ((1 - eta) * x2 + (1 + eta) * x3))
        out.append(val)
    return out[0], out[1]


def build_transfinite_element(curves, ops, tol=1e-8):
    """Nodal coordinates of one element bounded by (bottom, right, top, left)."""
    bottom, right, top, left = (np.array(c.samples(ops)) for c in curves)
    corners = [
        (bottom[:, 0], left[:, 0]),
        (bottom[:, -1], right[:, 0]),
        (top[:, -1], right[:, -1]),
        (top[:, 0], left[:, -1]),
    ]
    for a, b in corners:
        if np.max(np.abs(a - b)) > tol:
            raise MeshError(f"boundary curves do not meet at a corner: {a} vs {b}")
    return transfinite_map(bottom, right, top, left, ops.nodes)


# -- metrics -----------------------------------------------------------------


def d_xi(D, u):
    """Apply a 1D operator along the xi index: sum_m D[i, m] u[..., m, j]."""
    return np.matmul(D, u)


def d_eta(D, u):
    """Apply a 1D operator along the eta index: sum_m D[j, m] u[..., i, m]."""
    return np.matmul(u, D.T)


def face_traces(u):
    """``(..., K, n, n) -> (..., K, 4, n)`` values on the four faces."""
    return np.stack([u[..., :, 0], u[..., -1, :], u[..., :, -1], u[..., 0, :]], axis=-2)


def add_faces_to_volume(acc, out):
    """Scatter-add face data ``(..., K, 4, n)`` onto volume nodes of ``out``."""
    out[..., :, 0] += acc[..., 0, :]
    out[..., -1, :] += acc[..., 1, :]
    out[..., :, -1] += acc[..., 2, :]
    out[..., 0, :] += acc[..., 3, :]
    return out


@dataclass
class Mesh:
    N: int
    x: np.ndarray
    y: np.ndarray
    x_xi: np.ndarray
    x_eta: np.ndarray
    y_xi: np.ndarray
    y_eta: np.ndarray
    J: np.ndarray
    nx: np.ndarray  # (K, 4, n) outward unit normals
    ny: np.ndarray
    jsurf: np.ndarray  # (K, 4, n)
    # interior (and periodic) faces, one entry per face pair
    em: np.ndarray = field(default_factory=lambda: np.zeros(0, int))
    sm: np.ndarray = field(default_factory=lambda: np.zeros(0, int))
    ep: np.ndarray = field(default_factory=lambda: np.zeros(0, int))
    sp: np.ndarray = field(default_factory=lambda: np.zeros(0, int))
    flip: np.ndarray = field(default_factory=lambda: np.zeros(0, bool))
    periodic_pair: np.ndarray = field(default_factory=lambda: np.zeros(0, bool))
    # boundary faces
    be: np.ndarray = field(default_factory=lambda: np.zeros(0, int))
    bs: np.ndarray = field(default_factory=lambda: np.zeros(0, int))
    b: np.ndarray = None

    def __post_init__(self):
        if self.b is None:
            self.b = np.zeros_like(self.x)

    @property
    def K(self):
        return self.x.shape[0]

    @property
    def n(self):
        return self.N + 1

    @property
    def ops(self):
        return operators(self.N)

    @property
    def a(self):
        """Face scaling J / J_surf used by the positivity time-step bounds."""
        return face_traces(self.J) / self.jsurf

    @property
    def plus_index(self):
        """Node index map for the '+' side of each interior face."""
        idx = np.tile(np.arange(self.n), (len(self.em), 1))
        idx[self.flip] = idx[self.flip, ::-1]
        return idx

    def quadrature_weights(self):
        w = self.ops.weights
        return self.J * w[None, :, None] * w[None, None, :]

    def area(self):
        return self.quadrature_weights().sum(axis=(1, 2))

    def integrate(self, u):
        """Sum of ``u J w_i w_j`` over all nodes (leading axes preserved)."""
        return np.sum(u * self.quadrature_weights(), axis=(-3, -2, -1))

    def with_bathymetry(self, b):
        b = np.asarray(b(self.x, self.y) if callable(b) else b, dtype=float)
        return replace(self, b=np.broadcast_to(b, self.x.shape).copy())

    def interface_jump(self, u):
        """Largest jump of a nodal field across interior faces (0 for continuous fields)."""
        minus, plus = self.interior_traces(u)
        return float(np.max(np.abs(plus - minus), initial=0.0))

    def interior_traces(self, u):
        """Face values for both sides of each interior face: ``(..., F, n)`` pair."""
        tr = face_traces(u)
        minus = tr[..., self.em, self.sm, :]
        plus = tr[..., self.ep[:, None], self.sp[:, None], self.plus_index]
        return minus, plus

    def boundary_traces(self, u):
        return face_traces(u)[..., self.be, self.bs, :]

    def boundary_normals(self):
        return self.nx[self.be, self.bs], self.ny[self.be, self.bs]

    def interior_normals(self):
        return self.nx[self.em, self.sm], self.ny[self.em, self.sm], self.jsurf[self.em, self.sm]

    def scatter_interior(self, flux_m, acc):
        """Write a '-' side face quantity and its negation on the '+' side.

        ``flux_m`` is ``(..., F, n)``; ``acc`` is face-shaped ``(..., K, 4, n)``.
        """
        acc[..., self.em, self.sm, :] = flux_m
        plus = np.empty_like(flux_m)
        np.put_along_axis(plus, np.broadcast_to(self.plus_index, flux_m.shape), flux_m, axis=-1)
        acc[..., self.ep, self.sp, :] = -plus
        return acc

    def gather_plus_to_face(self, val_m):
        """Reorder a '-' ordered face array into '+' side node order."""
        out = np.empty_like(val_m)
        np.put_along_axis(out, np.broadcast_to(self.plus_index, val_m.shape), val_m, axis=-1)
        return out


def compute_metrics(x, y, N):
    """Metric terms, Jacobian, unit outward normals and surface Jacobians."""
    D = operators(N).D
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    squeeze = x.ndim == 2
    if squeeze:
        x, y = x[None], y[None]
    x_xi, x_eta = d_xi(D, x), d_eta(D, x)
    y_xi, y_eta = d_xi(D, y), d_eta(D, y)
    J = x_xi * y_eta - x_eta * y_xi
    bad = np.where(np.min(J, axis=(1, 2)) <= 0)[0]
    if len(bad):
        raise MeshError(f"non-positive Jacobian in element {int(bad[0])} (min J = {J[bad[0]].min():.3e})")
    ft = face_traces
    vx = np.stack([ft(y_xi)[:, 0], ft(y_eta)[:, 1], -ft(y_xi)[:, 2], -ft(y_eta)[:, 3]], axis=1)
    vy = np.stack([-ft(x_xi)[:, 0], -ft(x_eta)[:, 1], ft(x_xi)[:, 2], ft(x_eta)[:, 3]], axis=1)
    jsurf = np.hypot(vx, vy)
    mesh = Mesh(N, x, y, x_xi, x_eta, y_xi, y_eta, J, vx / jsurf, vy / jsurf, jsurf)
    return mesh


def _face_key(xm, ym, quantum, periodic):
    kx = int(np.rint(xm / quantum))
    ky = int(np.rint(ym / quantum))
    if periodic[0] is not None:
        x0, L = periodic[0]
        M = int(np.rint(L / quantum))
        kx = (kx - int(np.rint(x0 / quantum))) % M
    if periodic[1] is not None:
        y0, L = periodic[1]
        M = int(np.rint(L / quantum))
        ky = (ky - int(np.rint(y0 / quantum))) % M
    return kx, ky


def connect(mesh, periodic_x=None, periodic_y=None, tol=1e-10):
    """Pair element faces by coordinates; unmatched faces become walls.

    ``periodic_x = (x0, Lx)`` identifies faces whose midpoints differ by Lx in x
    (and likewise for y).
    """
    fx, fy = face_traces(mesh.x), face_traces(mesh.y)
    scale = max(np.ptp(mesh.x), np.ptp(mesh.y), 1.0)
    quantum = 1e-7 * scale
    periodic = (periodic_x, periodic_y)
    buckets = {}
    for k in range(mesh.K):
        for s in range(4):
            key = _face_key(fx[k, s].mean(), fy[k, s].mean(), quantum, periodic)
            buckets.setdefault(key, []).append((k, s))
    em, sm, ep, sp, flip, per, be, bs = [], [], [], [], [], [], [], []
    for members in buckets.values():
        if len(members) == 1:
            be.append(members[0][0])
            bs.append(members[0][1])
            continue
        if len(members) != 2:
            raise MeshError(f"non-conforming face shared by {len(members)} elements: {members}")
        (k1, s1), (k2, s2) = members
        dx = fx[k2, s2] - fx[k1, s1]
        dy = fy[k2, s2] - fy[k1, s1]
        dxr = fx[k2, s2, ::-1] - fx[k1, s1]
        dyr = fy[k2, s2, ::-1] - fy[k1, s1]
        # offsets are constant along the face for a genuine match
        aligned = np.ptp(dx) < tol * scale and np.ptp(dy) < tol * scale
        reversed_ = np.ptp(dxr) < tol * scale and np.ptp(dyr) < tol * scale
        if aligned and (not reversed_ or np.abs(dx).max() + np.abs(dy).max() <= np.abs(dxr).max() + np.abs(dyr).max()):
            off, fl = (dx.mean(), dy.mean()), False
        elif reversed_:
            off, fl = (dxr.mean(), dyr.mean()), True
        else:
            raise MeshError(f"face nodes of elements {k1}/{k2} do not coincide")
        is_periodic = abs(off[0]) > tol * scale or abs(off[1]) > tol * scale
        em.append(k1), sm.append(s1), ep.append(k2), sp.append(s2), flip.append(fl), per.append(is_periodic)
    return replace(
        mesh,
        em=np.array(em, int), sm=np.array(sm, int), ep=np.array(ep, int), sp=np.array(sp, int),
        flip=np.array(flip, bool), periodic_pair=np.array(per, bool),
        be=np.array(be, int), bs=np.array(bs, int),
    )


def mesh_from_coordinates(x, y, N, periodic_x=None, periodic_y=None):
    return connect(compute_metrics(x, y, N), periodic_x, periodic_y)


# -- generators --------------------------------------------------------------


def _structured(mapping, s_edges, t_edges, N):
    """Mesh of the logically Cartesian grid s_edges x t_edges pushed through mapping.

    Edge curves are sampled from the analytic map, so neighbours share face
    nodes exactly and the TFI reproduces the map on straight or parabolic edges.
    """
    nodes = operators(N).nodes
    Kx, Ky = len(s_edges) - 1, len(t_edges) - 1
    ix, iy = np.meshgrid(np.arange(Kx), np.arange(Ky), indexing="xy")
    ix, iy = ix.ravel(), iy.ravel()  # element k = ix + Kx * iy
    s0, s1 = s_edges[ix][:, None], s_edges[ix + 1][:, None]
    t0, t1 = t_edges[iy][:, None], t_edges[iy + 1][:, None]
    sn = s0 + 0.5 * (nodes[None] + 1) * (s1 - s0)
    tn = t0 + 0.5 * (nodes[None] + 1) * (t1 - t0)

    def edge(s, t):
        x, y = mapping(s, t)
        return np.stack([np.broadcast_to(x, np.broadcast(s, t).shape), np.broadcast_to(y, np.broadcast(s, t).shape)], axis=1)

    bottom = edge(sn, t0)
    top = edge(sn, t1)
    left = edge(s0, tn)
    right = edge(s1, tn)
    return transfinite_map(bottom, right, top, left, nodes)


def build_cartesian_mesh(x0, x1, y0, y1, Kx, Ky, N, periodic=(False, False)):
    """Uniform straight-sided mesh; element k = ix + Kx * iy."""
    if Kx < 1 or Ky < 1:
        raise MeshError("need at least one element per direction")
    xs = np.linspace(x0, x1, Kx + 1)
    ys = np.linspace(y0, y1, Ky + 1)
    x, y = _structured(lambda s, t: (s, t), xs, ys, N)
    return mesh_from_coordinates(
        x, y, N,
        periodic_x=(x0, x1 - x0) if periodic[0] else None,
        periodic_y=(y0, y1 - y0) if periodic[1] else None,
    )


def dam_curve(y):
    """Parabolic dam line x = y^2/25 - 1/4."""
    return y * y / 25.0 - 0.25


def build_curved_dam_mesh(Kx, Ky, N, x0=-10.0, x1=10.0, y0=-5.0, y1=5.0):
    """Mesh whose vertical lines bend toward the parabolic dam.

    The grid line s = -1/4 is mapped exactly onto the dam curve; the bending
    fades linearly to zero at x0 and x1 so the outer boundary stays straight.
    Kx must be even: half of the columns lie on each side of the dam.
    """
    if Kx % 2:
        raise MeshError("curved dam mesh needs an even number of columns")
    sd = -0.25
    s_edges = np.concatenate([np.linspace(x0, sd, Kx // 2 + 1), np.linspace(sd, x1, Kx // 2 + 1)[1:]])
    t_edges = np.linspace(y0, y1, Ky + 1)

    def mapping(s, t):
        phi = np.where(s <= sd, (s - x0) / (sd - x0), (x1 - s) / (x1 - sd))
        return s + phi * t * t / 25.0, t

    x, y = _structured(mapping, s_edges, t_edges, N)
    return mesh_from_coordinates(x, y, N)


def build_warped_periodic_mesh(Kx, Ky, N, L=2.0, amplitude=0.05):
    """Periodic mesh on [0, L]^2 with sinusoidally curved interior lines."""
    xs = np.linspace(0.0, L, Kx + 1)
    ys = np.linspace(0.0, L, Ky + 1)
    k = 2.0 * np.pi / L

    def mapping(s, t):
        return (s + amplitude * L * np.sin(k * s) * np.sin(k * t),
                t - amplitude * L * np.sin(k * s) * np.sin(k * t))

    x, y = _structured(mapping, xs, ys, N)
    return mesh_from_coordinates(x, y, N, periodic_x=(0.0, L), periodic_y=(0.0, L))


# -- boundary states and IO --------------------------------------------------


def exterior_state(w, nx, ny, tag, partner=None):
    """Ghost state for a face: mirror for walls, partner trace for periodic."""
    if tag == WALL:
        un = w[1] * nx + w[2] * ny
        return np.stack([w[0], w[1] - 2 * un * nx, w[2] - 2 * un * ny])
    if tag == PERIODIC:
        if partner is None:
            raise ValueError("periodic face needs the partner trace")
        return partner
    raise ValueError(f"unknown boundary tag {tag!r}")


def write_mesh(path, mesh):
    K, n = mesh.K, mesh.n
    k, i, j = np.meshgrid(np.arange(K), np.arange(n), np.arange(n), indexing="ij")
    cols = [k.ravel(), i.ravel(), j.ravel(), mesh.x.ravel(), mesh.y.ravel(), mesh.J.ravel(), mesh.b.ravel()]
    with open(path, "w") as fh:
        fh.write("element;i;j;x;y;J;b\n")
        for row in zip(*cols):
            fh.write(f"{row[0]};{row[1]};{row[2]};" + ";".join(repr(float(v)) for v in row[3:]) + "\n")
