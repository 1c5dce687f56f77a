"""Catalogue of built-in test cases: domains, meshes, bathymetries, initial data.

Every constant that tests or the CLI need is read from here.
"""

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .mesh import build_cartesian_mesh, build_curved_dam_mesh, dam_curve

# on-the-line nodes are assigned to the downstream state
_EDGE_TOL = 1e-12


def _flat(x, y):
    return np.zeros_like(x)


@dataclass(frozen=True)
class Scenario:
    """A test case.

    ``initial(x, y, b)`` returns nodal ``(h, u, v)``; ``bathymetry(x, y)``
    returns b. ``desk`` holds the reduced (Kx, Ky) used by tests and defaults.
    """

    id: str
    domain: tuple
    mesh_kind: str
    resolution: tuple
    desk: tuple
    N: int
    g: float
    T: float
    initial: Callable
    bathymetry: Callable = _flat
    periodic: tuple = (False, False)
    epsilon0: float = 0.0
    output_times: tuple = ()
    sigma_min: float = None
    sigma_max: float = None
    cfl: float = 0.5
    notes: str = ""
    constants: dict = field(default_factory=dict)

    def build_mesh(self, Kx=None, Ky=None, N=None):
        Kx = self.desk[0] if Kx is None else Kx
        Ky = self.desk[1] if Ky is None else Ky
        N = self.N if N is None else N
        x0, x1, y0, y1 = self.domain
        if self.mesh_kind == "cartesian":
            mesh = build_cartesian_mesh(x0, x1, y0, y1, Kx, Ky, N, self.periodic)
        elif self.mesh_kind == "curved_dam":
            mesh = build_curved_dam_mesh(Kx, Ky, N, x0, x1, y0, y1)
        else:
            raise ValueError(f"unknown mesh kind {self.mesh_kind!r}")
        return mesh.with_bathymetry(self.bathymetry)

    def initial_state(self, mesh):
        h, u, v = self.initial(mesh.x, mesh.y, mesh.b)
        h = np.broadcast_to(np.asarray(h, float), mesh.x.shape)
        u = np.broadcast_to(np.asarray(u, float), mesh.x.shape)
        v = np.broadcast_to(np.asarray(v, float), mesh.x.shape)
        return np.stack([h, h * u, h * v])


# -- entropy glitch ------------------------------------------------------------


def _glitch_initial(x, y, b):
    return np.where(x < 0.0, 1.0, 0.1), 0.0, 0.0


# -- wet/dry dam break -----------------------------------------------------------


def _dambreak_initial(x, y, b):
    return np.where(x < 0.0, 10.0, 0.0), 0.0, 0.0


# -- oscillating lake ----------------------------------------------------------

LAKE = {"h0": 0.1, "a": 1.0, "sigma": 0.5, "g": 9.81}


def lake_omega(g=LAKE["g"], h0=LAKE["h0"], a=LAKE["a"]):
    return np.sqrt(2.0 * g * h0) / a


def lake_period(g=LAKE["g"]):
    return 2.0 * np.pi / lake_omega(g)


def lake_bathymetry(x, y):
    return LAKE["h0"] * (x * x + y * y) / LAKE["a"] ** 2


def lake_exact(x, y, t, g=LAKE["g"]):
    """Exact (h, u, v) of the orbiting pond; velocities are zero where dry."""
    h0, a, s = LAKE["h0"], LAKE["a"], LAKE["sigma"]
    w = lake_omega(g)
    b = lake_bathymetry(x, y)
    h = np.maximum(0.0, s * h0 / a**2 * (2 * x * np.cos(w * t) + 2 * y * np.sin(w * t) - s) + h0 - b)
    wet = h > 0
    u = np.where(wet, -s * w * np.sin(w * t), 0.0)
    v = np.where(wet, s * w * np.cos(w * t), 0.0)
    return h, u, v


def _lake_initial(x, y, b):
    return lake_exact(x, y, 0.0)


# -- three mounds ----------------------------------------------------------------


def mounds(x, y):
    m1 = 1.0 - 0.1 * np.sqrt((x - 30.0) ** 2 + (y - 22.5) ** 2)
    m2 = 1.0 - 0.1 * np.sqrt((x - 30.0) ** 2 + (y - 7.5) ** 2)
    m3 = 2.8 - 0.28 * np.sqrt((x - 47.5) ** 2 + (y - 15.0) ** 2)
    return np.maximum.reduce([np.zeros_like(m1), m1, m2, m3])


def _three_mound_initial(x, y, b):
    return np.where(x < 16.0, 1.875, 0.0), 0.0, 0.0


# -- conical island ----------------------------------------------------------------

ISLAND = {"h0": 0.32, "A": 0.064, "x_wave": 2.5, "xc": 12.5, "yc": 15.0, "rc": 3.6, "peak": 0.93, "g": 9.81}


def island_bathymetry(x, y):
    r = np.sqrt((x - ISLAND["xc"]) ** 2 + (y - ISLAND["yc"]) ** 2)
    return np.where(r <= ISLAND["rc"], ISLAND["peak"] * (1.0 - r / ISLAND["rc"]), 0.0)


def _island_initial(x, y, b):
    h0, A = ISLAND["h0"], ISLAND["A"]
    gamma = np.sqrt(3.0 * A / (4.0 * h0))
    eta = A / np.cosh(gamma * (x - ISLAND["x_wave"])) ** 2
    h = np.maximum(0.0, h0 + eta - b)
    u = np.where(h > 0, eta * np.sqrt(ISLAND["g"] / h0), 0.0)
    return h, u, 0.0


# -- parabolic partial dam break -------------------------------------------------


def _dam_initial(downstream):
    def initial(x, y, b):
        return np.where(x < dam_curve(y) - _EDGE_TOL, 10.0, downstream), 0.0, 0.0

    return initial


CATALOGUE = {
    s.id: s
    for s in [
        Scenario(
            "entropy_glitch", (-1.0, 1.0, -1.0, 1.0), "cartesian", (100, 100), (100, 8), 1, 10.0, 0.2,
            _glitch_initial, periodic=(False, True),
            notes="walls in x, periodic in y; run in both es and standard modes",
        ),
        Scenario(
            "wetdry_dambreak", (-20.0, 20.0, -20.0, 20.0), "cartesian", (50, 50), (25, 25), 3, 9.81, 1.0,
            _dambreak_initial, periodic=(False, True), epsilon0=0.1,
        ),
        Scenario(
            "oscillating_lake", (-2.0, 2.0, -2.0, 2.0), "cartesian", (200, 200), (50, 50), 3, LAKE["g"],
            lake_period(), _lake_initial, lake_bathymetry, epsilon0=0.01, sigma_min=-3.5, sigma_max=-1.5,
            output_times=tuple(lake_period() * f for f in (1 / 6, 1 / 3, 1 / 2)),
            constants=dict(LAKE, omega=lake_omega(), period=lake_period()),
        ),
        Scenario(
            "three_mound", (0.0, 75.0, 0.0, 45.0), "cartesian", (150, 100), (30, 18), 3, 9.81, 50.0,
            _three_mound_initial, mounds, epsilon0=0.2, output_times=(5.0, 10.0, 20.0, 30.0, 40.0),
        ),
        Scenario(
            "conical_island", (0.0, 25.0, 0.0, 30.0), "cartesian", (50, 50), (25, 30), 3, ISLAND["g"], 50.0,
            _island_initial, island_bathymetry, epsilon0=0.1, constants=dict(ISLAND),
        ),
        Scenario(
            "parabolic_dam_wet", (-10.0, 10.0, -5.0, 5.0), "curved_dam", (40, 40), (20, 20), 3, 1.0, 1.5,
            _dam_initial(5.0), epsilon0=0.025, output_times=(0.5, 1.0),
        ),
        Scenario(
            "parabolic_dam_dry", (-10.0, 10.0, -5.0, 5.0), "curved_dam", (40, 40), (20, 20), 3, 1.0, 1.0,
            _dam_initial(0.0), epsilon0=0.05, output_times=(0.5,),
            notes="epsilon0 = 0.025 is the recommended value for N = 7",
        ),
    ]
}


def make_scenario(scenario_id, **overrides):
    try:
        base = CATALOGUE[scenario_id]
    except KeyError:
        raise KeyError(f"unknown scenario {scenario_id!r}; known: {', '.join(CATALOGUE)}") from None
    return replace(base, **overrides) if overrides else base


def dam_epsilon0(N):
    """Base viscosity for the dry parabolic dam at degree N."""
    return 0.025 if N >= 7 else 0.05


# -- manufactured travelling wave (convergence studies) --------------------------

WAVE = {"L": 2.0, "mean": 2.0, "amp": 0.1, "g": 9.81}


def wave_profile(s):
    return WAVE["mean"] + WAVE["amp"] * np.sin(np.pi * s)


def wave_profile_derivative(s):
    return WAVE["amp"] * np.pi * np.cos(np.pi * s)


def wave_exact(x, y, t):
    """h = H(x + y - 2t), u = v = 1."""
    h = wave_profile(x + y - 2.0 * t)
    return np.stack([h, h, h])


def wave_forcing(g=WAVE["g"]):
    """Source making ``wave_exact`` a solution: (0, g h H', g h H')."""

    def forcing(x, y, t):
        s = x + y - 2.0 * t
        h = wave_profile(s)
        f = g * h * wave_profile_derivative(s)
        return np.stack([np.zeros_like(x), f, f])

    return forcing
