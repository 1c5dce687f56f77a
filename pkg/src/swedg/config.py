"""Run configuration: flat sectioned ``key = value`` text overlaid on scenario defaults.

Example::

    [run]
    scenario = wetdry_dambreak
    T = 0.5

    [viscosity]
    epsilon0 = 0.2

Lines starting with ``#`` or ``;`` are comments. Unknown sections or keys and
malformed values raise :class:`ConfigError` citing the line number.
"""

import hashlib
import json
from dataclasses import asdict, dataclass, replace
from pathlib import Path

from .physics import PhysicsParams
from .scenarios import CATALOGUE, make_scenario
from .timeloop import SolverConfig
from .viscosity import ViscosityConfig


class ConfigError(ValueError):
    pass


def _bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _optional_float(text):
    return None if text.strip().lower() in ("", "none", "default") else float(text)


def _float_list(text):
    return tuple(float(s) for s in text.replace(",", " ").split())


def _str_list(text):
    return tuple(s.strip() for s in text.split(",") if s.strip())


# section -> key -> (RunConfig field, parser)
SCHEMA = {
    "run": {
        "scenario": ("scenario", str),
        "T": ("T", float),
        "cfl": ("cfl", float),
        "mode": ("mode", str),
        "max_steps": ("max_steps", int),
    },
    "mesh": {"N": ("N", int), "Kx": ("Kx", int), "Ky": ("Ky", int)},
    "physics": {"g": ("g", float), "h_tol": ("h_tol", float)},
    "viscosity": {
        "enabled": ("viscosity", _bool),
        "epsilon0": ("epsilon0", float),
        "sigma_min": ("sigma_min", _optional_float),
        "sigma_max": ("sigma_max", _optional_float),
        "exclude_mean": ("exclude_mean", _bool),
    },
    "limiter": {"enabled": ("limiter", _bool), "speed_cap": ("speed_cap", _bool)},
    "output": {
        "dir": ("output_dir", str),
        "times": ("output_times", _float_list),
        "slices": ("slices", _str_list),
        "snapshots": ("snapshots", _bool),
        "figures": ("figures", _bool),
    },
}


@dataclass(frozen=True)
class RunConfig:
    """Run-level parameters; ``None`` fields fall back to the scenario."""

    scenario: str
    T: float = None
    cfl: float = None
    mode: str = "es"
    max_steps: int = None
    N: int = None
    Kx: int = None
    Ky: int = None
    g: float = None
    h_tol: float = 1e-4
    viscosity: bool = True
    epsilon0: float = None
    sigma_min: float = None
    sigma_max: float = None
    exclude_mean: bool = False
    limiter: bool = True
    speed_cap: bool = True
    output_dir: str = "output"
    output_times: tuple = None
    slices: tuple = ()
    snapshots: bool = True
    figures: bool = False

    def __post_init__(self):
        if self.scenario not in CATALOGUE:
            raise ConfigError(f"unknown scenario {self.scenario!r}; known: {', '.join(CATALOGUE)}")

    def resolved(self):
        """Copy with every scenario-dependent field filled in from the catalogue."""
        sc = make_scenario(self.scenario)
        fill = dict(
            T=sc.T, cfl=sc.cfl, N=sc.N, Kx=sc.desk[0], Ky=sc.desk[1], g=sc.g,
            epsilon0=sc.epsilon0, sigma_min=sc.sigma_min, sigma_max=sc.sigma_max,
            output_times=sc.output_times,
        )
        cfg = replace(self, **{k: v for k, v in fill.items() if getattr(self, k) is None})
        cfg.validate()
        return cfg

    def validate(self):
        if self.T is not None and self.T <= 0:
            raise ConfigError(f"T must be positive, got {self.T}")
        if self.cfl is not None and not 0 < self.cfl <= 1:
            raise ConfigError(f"cfl must lie in (0, 1], got {self.cfl}")
        if self.mode not in ("es", "standard"):
            raise ConfigError(f"mode must be 'es' or 'standard', got {self.mode!r}")
        for name in ("N", "Kx", "Ky"):
            val = getattr(self, name)
            if val is not None and val < 1:
                raise ConfigError(f"{name} must be at least 1, got {val}")
        if self.epsilon0 is not None and self.epsilon0 < 0:
            raise ConfigError("epsilon0 must be non-negative")
        if self.sigma_min is not None and self.sigma_max is not None and self.sigma_min >= self.sigma_max:
            raise ConfigError("need sigma_min < sigma_max")

    def scenario_object(self):
        cfg = self.resolved()
        return make_scenario(self.scenario, g=cfg.g, N=cfg.N, T=cfg.T)

    def solver_config(self):
        cfg = self.resolved()
        visc = ViscosityConfig(cfg.epsilon0, cfg.sigma_min, cfg.sigma_max, cfg.viscosity, cfg.exclude_mean)
        return SolverConfig(
            mode=cfg.mode, cfl=cfg.cfl, limiter=cfg.limiter, viscosity=visc,
            params=PhysicsParams(g=cfg.g, h_tol=cfg.h_tol), speed_cap=cfg.speed_cap,
        )

    def digest(self):
        """Short SHA-256 of the resolved configuration, written into output headers."""
        blob = json.dumps(asdict(self.resolved()), sort_keys=True, default=list)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]




def parse_config(source):
    """Parse config text (or a path to a config file) into a :class:`RunConfig`."""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source and "=" not in source):
        try:
            text = Path(source).read_text()
        except OSError as err:
            raise ConfigError(f"cannot read config {source}: {err}") from None
    else:
        text = source
    values = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"line {lineno}: malformed section header {line!r}")
            section = line[1:-1].strip()
            if section not in SCHEMA:
                raise ConfigError(f"line {lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        if section is None:
            raise ConfigError(f"line {lineno}: key outside of any section")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in SCHEMA[section]:
            raise ConfigError(f"line {lineno}: unknown key {key!r} in [{section}]")
        name, parse = SCHEMA[section][key]
        try:
            values[name] = parse(val)
        except ValueError:
            raise ConfigError(f"line {lineno}: bad value {val!r} for key {key!r}") from None
    if "scenario" not in values:
        raise ConfigError("missing [run] scenario")
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg
