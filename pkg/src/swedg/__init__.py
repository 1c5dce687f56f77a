"""Entropy-stable nodal DG spectral element solver for the 2D shallow water equations.

Typical use::

    from swedg import make_scenario, Solver, SolverConfig

    sc = make_scenario("wetdry_dambreak")
    mesh = sc.build_mesh()
    W, records = Solver(mesh, SolverConfig()).run(sc.initial_state(mesh), sc.T)
"""

from .config import ConfigError, RunConfig, parse_config
from .dg import assemble_rhs, entropy_rate
from .mesh import Mesh, MeshError, build_cartesian_mesh, build_curved_dam_mesh, build_warped_periodic_mesh
from .operators import operators
from .physics import PhysicsParams
from .positivity import NegativeMeanError, limit
from .scenarios import CATALOGUE, Scenario, make_scenario
from .timeloop import NegativeDepthError, Solver, SolverConfig, StepRecord, StepRejectedError, compute_dt
from .viscosity import ViscosityConfig

__version__ = "0.1.0"

__all__ = [
    "CATALOGUE", "ConfigError", "Mesh", "MeshError", "NegativeDepthError", "NegativeMeanError",
    "PhysicsParams", "RunConfig", "Scenario", "Solver", "SolverConfig", "StepRecord", "StepRejectedError",
    "ViscosityConfig", "assemble_rhs", "build_cartesian_mesh", "build_curved_dam_mesh",
    "build_warped_periodic_mesh", "compute_dt", "entropy_rate", "limit", "make_scenario", "operators",
    "parse_config",
]
