"""SSPRK3 time integration with stage-wise limiting and viscosity."""

import logging
from dataclasses import dataclass, field

import numpy as np

from .dg import assemble_rhs
from .physics import PhysicsParams, entropy, velocity
from .positivity import NegativeMeanError, limit, neighbourhood_speed_bound, quadrature_entropy
from .viscosity import ViscosityConfig, element_viscosity, viscous_rhs

log = logging.getLogger(__name__)

SSP_STAGES = ((0.0, 1.0), (0.75, 0.25), (1.0 / 3.0, 2.0 / 3.0))
"""Rows (a, b): next stage = a W^n + b (W^(k) + dt R(W^(k)))."""

STAGE_TIMES = (0.0, 1.0, 0.5)
"""Time offsets (in units of dt) at which R(W^(k)) is evaluated."""


VISCOUS_DT_FACTOR = 4.0
"""The viscous spectral radius is about 0.65 eps (N+1)^4 / l^2 and SSPRK3 is
stable up to 2.51 on the negative real axis, so cfl = 0.5 keeps a margin of two."""


class NegativeDepthError(RuntimeError):
    """Nodal water height went negative with the limiter switched off."""

    def __init__(self, element, i, j, x, y, value):
        super().__init__(
            f"negative water height {value:.3e} at element {element}, node ({i}, {j}), "
            f"x = {x:.6g}, y = {y:.6g}"
        )
        self.element = element
        self.value = value
        self.location = (x, y)


class StepRejectedError(RuntimeError):
    pass


@dataclass
class SolverConfig:
    mode: str = "es"
    cfl: float = 0.5
    limiter: bool = True
    viscosity: ViscosityConfig = field(default_factory=ViscosityConfig)
    params: PhysicsParams = field(default_factory=PhysicsParams)
    max_halvings: int = 10
    check_limiter_entropy: bool = False
    speed_cap: bool = True

    def __post_init__(self):
        if not 0 < self.cfl <= 1:
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")
        if self.mode not in ("es", "standard"):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class StepRecord:
    step: int
    t: float
    dt: float
    mass: float
    entropy: float
    min_h: float
    n_limited: int
    max_eps: float

    FIELDS = ("step", "t", "dt", "mass", "entropy", "min_h", "n_limited", "max_eps")

    def as_tuple(self):
        return tuple(getattr(self, f) for f in self.FIELDS)


def compute_dt(W, mesh, params, cfl, eps=None, fallback_depth=None):
    """CFL time step from directional wave speeds in reference coordinates.

    For a uniform Cartesian mesh the advective part reduces to
    ``cfl * dx / ((2N+1) (|u| + sqrt(g h)))``. With viscosity the diffusive
    limit ``cfl * VISCOUS_DT_FACTOR * l^2 / (eps (N+1)^4)`` is also applied.
    """
    if cfl <= 0:
        raise ValueError("cfl must be positive")
    h = np.maximum(W[0], 0.0)
    u, v = velocity(W, params)
    c = np.sqrt(params.g * h)
    m_xi = np.hypot(mesh.y_eta, mesh.x_eta)
    m_eta = np.hypot(mesh.y_xi, mesh.x_xi)
    lam_xi = (np.abs(mesh.y_eta * u - mesh.x_eta * v) + c * m_xi) / mesh.J
    lam_eta = (np.abs(-mesh.y_xi * u + mesh.x_xi * v) + c * m_eta) / mesh.J
    lam = np.maximum(lam_xi, lam_eta).max()
    N = mesh.N
    if lam == 0.0:
        if fallback_depth is None:
            raise ValueError("domain is dry and no fallback depth was given")
        ell = (2.0 * mesh.J / np.maximum(m_xi, m_eta)).min()
        return cfl * ell / ((2 * N + 1) * np.sqrt(params.g * fallback_depth))
    dt = cfl / (2 * N + 1) * 2.0 / lam
    if eps is not None and np.max(eps) > 0:
        ell = (2.0 * mesh.J / np.maximum(m_xi, m_eta)).min(axis=(1, 2))
        dt = min(dt, cfl * VISCOUS_DT_FACTOR * np.min(ell**2 / np.maximum(eps, 1e-300)) / (N + 1) ** 4)
    return float(dt)


def ssprk3_combine(W0, Wk, R, dt, row):
    a, b = row
    return a * W0 + b * (Wk + dt * R)


def scalar_amplification(z):
    """One SSPRK3 step applied to w' = lambda w, with z = lambda dt."""
    w0 = 1.0
    w = w0
    for row in SSP_STAGES:
        w = ssprk3_combine(w0, w, z * w, 1.0, row)
    return w


class Solver:
    def __init__(self, mesh, config=None, forcing=None):
        self.mesh = mesh
        self.config = config or SolverConfig()
        self.params = self.config.params
        self.forcing = forcing
        self.last_eps = np.zeros(mesh.K)
        self.stage_eps = np.zeros(mesh.K)
        self.last_n_limited = 0
        self.limiter_entropy_excess = 0.0
        self.on_stage = None  # optional callable (stage input W, stage eps)

    def viscosity(self, W):
        cfg = self.config.viscosity
        if self.config.mode != "es" or not cfg.enabled or cfg.epsilon0 == 0.0:
            return np.zeros(self.mesh.K)
        return element_viscosity(W, self.mesh, cfg, self.params.h_tol)

    def rhs(self, W, t):
        eps = self.viscosity(W)
        self.stage_eps = eps
        self.last_eps = np.maximum(self.last_eps, eps)
        visc = None
        if np.any(eps > 0):
            visc = lambda state: viscous_rhs(state, eps, self.mesh, self.params)  # noqa: E731
        return assemble_rhs(W, self.mesh, self.params, self.config.mode, visc, self.forcing, t)

    def post_stage(self, W, speed_bound=None):
        if not self.config.limiter:
            if W[0].min() < 0:
                k, i, j = np.unravel_index(np.argmin(W[0]), W[0].shape)
                raise NegativeDepthError(int(k), int(i), int(j), float(self.mesh.x[k, i, j]),
                                         float(self.mesh.y[k, i, j]), float(W[0][k, i, j]))
            return W
        out, report = limit(W, self.mesh, self.params, speed_bound)
        self.last_n_limited = max(self.last_n_limited, report.n_limited)
        if self.config.check_limiter_entropy:
            before = quadrature_entropy(W, self.mesh, self.params)
            after = quadrature_entropy(out, self.mesh, self.params)
            self.limiter_entropy_excess = max(self.limiter_entropy_excess, float(np.max(after - before)))
        return out

    def step(self, W, t, dt):
        """One SSPRK3 step; raises NegativeMeanError if a stage mean goes negative."""
        self.last_eps = np.zeros(self.mesh.K)
        self.last_n_limited = 0
        bound = neighbourhood_speed_bound(W, self.mesh, self.params) if self.config.speed_cap else None
        Wk = W
        for row, ct in zip(SSP_STAGES, STAGE_TIMES):
            R = self.rhs(Wk, t + ct * dt)
            if self.on_stage is not None:
                self.on_stage(Wk, self.stage_eps)
            Wk = self.post_stage(ssprk3_combine(W, Wk, R, dt, row), bound)
        return Wk

    def dt(self, W):
        return compute_dt(W, self.mesh, self.params, self.config.cfl, self.viscosity(W))

    def advance(self, W, t, dt):
        """Step with rejection: halve dt on a negative mean, up to max_halvings."""
        for attempt in range(self.config.max_halvings + 1):
            try:
                return self.step(W, t, dt), dt
            except NegativeMeanError as err:
                log.warning("step at t=%.6g rejected (%s); halving dt", t, err)
                dt *= 0.5
        raise StepRejectedError(f"step at t={t:.6g} rejected {self.config.max_halvings + 1} times")

    def diagnostics(self, W, step, t, dt):
        mesh = self.mesh
        return StepRecord(
            step, t, dt,
            float(mesh.integrate(W[0])),
            float(mesh.integrate(entropy(W, mesh.b, self.params))),
            float(W[0].min()),
            int(self.last_n_limited),
            float(self.last_eps.max()) if self.last_eps.size else 0.0,
        )

    def run(self, W, T, t0=0.0, output_times=(), on_output=None, max_steps=None, dt_fixed=None):
        """Advance from t0 to T; returns (final state, list of StepRecord).

        ``on_output(t, W, eps)`` is called at t0, at every output time and at T;
        the step size is clipped so these times are hit exactly.
        """
        if T <= t0:
            raise ValueError("final time must exceed the start time")
        targets = sorted({float(s) for s in output_times if t0 < s < T} | {float(T)})
        t, n = t0, 0
        records = [self.diagnostics(W, 0, t, 0.0)]
        if on_output is not None:
            on_output(t, W, self.viscosity(W))
        while targets:
            dt = dt_fixed if dt_fixed is not None else self.dt(W)
            target = targets[0]
            hit = t + dt >= target * (1 - 1e-14)
            if hit:
                dt = target - t
            W, taken = self.advance(W, t, dt)
            hit = hit and taken == dt
            t = target if hit else t + taken
            n += 1
            records.append(self.diagnostics(W, n, t, taken))
            if hit:
                targets.pop(0)
                if on_output is not None:
                    on_output(t, W, self.last_eps)
            if max_steps is not None and n >= max_steps:
                break
        return W, records
