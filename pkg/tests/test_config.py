import json

import numpy as np
import pytest

from g2moduli.config import (
    GridConfig,
    RunConfig,
    config_schema,
    get_config,
    load_config,
    resolve_config,
    save_config,
    section,
    set_config,
)
from g2moduli.default_config import DEFAULT_CONFIG
from g2moduli.dynamics.trajectory_engine import TrajectoryEngine
from g2moduli.exceptions import ConfigError


def test_defaults_match_run_config():
    assert RunConfig().to_dict() == DEFAULT_CONFIG


def test_set_config_merges_sections():
    set_config({"integrator": {"rtol": 1e-8}})
    cfg = get_config()
    assert cfg["integrator"]["rtol"] == 1e-8
    assert cfg["integrator"]["method"] == "DOP853"
    assert cfg["seed"] == DEFAULT_CONFIG["seed"]


def test_get_config_returns_a_copy():
    get_config()["seed"]["t_max"] = 1.0
    assert get_config()["seed"]["t_max"] == DEFAULT_CONFIG["seed"]["t_max"]


def test_section_fills_missing_keys():
    assert section(None, "fit") == DEFAULT_CONFIG["fit"]
    fit = section({"fit": {"min_time": 20.0}}, "fit")
    assert fit["min_time"] == 20.0
    assert fit["min_samples"] == DEFAULT_CONFIG["fit"]["min_samples"]


def test_missing_path_gives_defaults():
    assert load_config(None) == RunConfig()


def test_round_trip(tmp_path):
    cfg = RunConfig.model_validate({"seed": {"t_max": 200.0}, "grids": {"tprime": {"start": -1, "stop": 1, "step": 0.5}}})
    path = save_config(cfg, str(tmp_path / "nested" / "run.json"))
    loaded = load_config(path)
    assert loaded == cfg
    assert loaded.seed.t_max == 200.0


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(str(tmp_path / "absent.json"))


@pytest.mark.parametrize(
    "payload",
    [
        {"integrator": {"rtol": 1.0}},
        {"integrator": {"method": "Euler"}},
        {"seed": {"t0": 0.1}},
        {"seed": {"t0": 1e-2, "t_max": 1e-3}},
        {"events": {"escape_threshold": 5.0}},
        {"grids": {"tprime": {"start": 1.0, "stop": -1.0, "step": 0.1}}},
        {"grids": {}},
        {"portrait": {"window": [1.0, -1.0, -1.0, 1.0]}},
        {"workers": 0},
    ],
)
def test_invalid_values_rejected(tmp_path, payload):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(str(path))


def test_malformed_json_rejected(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(str(path))


def test_grid_values():
    values = GridConfig(start=-0.2, stop=1.0, step=0.05).values()
    assert len(values) == 25
    assert values[4] == 0.0
    assert values[-1] == 1.0
    assert np.array_equal(GridConfig(start=0.5, stop=0.5, step=0.1).values(), [0.5])


def test_schema_lists_sections():
    schema = config_schema()
    assert {"integrator", "seed", "events", "fit", "boundary", "grids", "portrait"} <= set(schema["properties"])


def test_engines_without_config_follow_global_config():
    set_config({"seed": {"t_max": 50.0}, "fit": {"min_time": 5.0}})
    assert TrajectoryEngine().t_max == 50.0
    assert section({"fit": {"min_samples": 10}}, "fit") == {**DEFAULT_CONFIG["fit"], "min_time": 5.0, "min_samples": 10}
    # explicit keys still win
    assert TrajectoryEngine({"seed": {"t_max": 70.0}}).t_max == 70.0


def test_resolve_config_fills_top_level_keys():
    set_config({"workers": 3})
    resolved = resolve_config({"results_dir": "elsewhere"})
    assert resolved["workers"] == 3
    assert resolved["results_dir"] == "elsewhere"
    assert resolved["seed"] == DEFAULT_CONFIG["seed"]
