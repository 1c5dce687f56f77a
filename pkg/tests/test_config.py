from dataclasses import fields

import pytest

from swedg.config import ConfigError, RunConfig, parse_config
from swedg.scenarios import CATALOGUE


def test_defaults_come_from_catalogue():
    cfg = parse_config("[run]\nscenario = three_mound\n").resolved()
    sc = CATALOGUE["three_mound"]
    assert (cfg.T, cfg.N, cfg.Kx, cfg.Ky, cfg.epsilon0, cfg.cfl) == (sc.T, sc.N, *sc.desk, sc.epsilon0, sc.cfl)


def test_override_changes_only_that_field():
    base = parse_config("[run]\nscenario = three_mound\n").resolved()
    over = parse_config("[run]\nscenario = three_mound\n\n[viscosity]\nepsilon0 = 0.3\n").resolved()
    diff = [f.name for f in fields(RunConfig) if getattr(base, f.name) != getattr(over, f.name)]
    assert diff == ["epsilon0"] and over.epsilon0 == 0.3
    assert base.digest() != over.digest()


def test_solver_config_built_from_run_config():
    cfg = parse_config("[run]\nscenario = oscillating_lake\nmode = standard\n[limiter]\nenabled = off\n")
    sc = cfg.solver_config()
    assert sc.mode == "standard" and not sc.limiter and sc.viscosity.sigma_min == -3.5


@pytest.mark.parametrize("text, line, word", [
    ("[run]\nscenario = three_mound\nT = abc\n", 3, "'T'"),
    ("[run]\nscenario = three_mound\n# c\n[mesh]\nfoo = 1\n", 5, "'foo'"),
    ("[run]\nscenario = three_mound\n[nosuch]\n", 3, "nosuch"),
    ("N = 3\n", 1, "outside"),
    ("[run]\nscenario three_mound\n", 2, "key = value"),
    ("[limiter]\nenabled = maybe\n[run]\nscenario = three_mound\n", 2, "'enabled'"),
])
def test_malformed_reports_line_and_key(text, line, word):
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert f"line {line}" in str(err.value) and word in str(err.value)


@pytest.mark.parametrize("text", [
    "[run]\nT = 1\n",
    "[run]\nscenario = atlantis\n",
    "[run]\nscenario = three_mound\ncfl = 2\n",
    "[run]\nscenario = three_mound\n[mesh]\nN = 0\n",
    "[run]\nscenario = three_mound\n[viscosity]\nsigma_min = -1\nsigma_max = -2\n",
])
def test_invalid_configs_rejected(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_config_from_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("[run]\nscenario = wetdry_dambreak\nT = 0.5\n")
    assert parse_config(str(path)).T == 0.5
    with pytest.raises(ConfigError, match="cannot read"):
        parse_config(str(tmp_path / "missing.cfg"))
