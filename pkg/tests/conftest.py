import copy

import pytest

from g2moduli import config as config_module
from g2moduli.default_config import DEFAULT_CONFIG
from g2moduli.dynamics.trajectory_engine import TrajectoryEngine
from g2moduli.instantons.local_families import Family, seed_jet


@pytest.fixture(autouse=True)
def reset_global_config(monkeypatch):
    """Each test starts from the defaults; the CLI and set_config write the global."""
    monkeypatch.setattr(config_module, "_config", None)


@pytest.fixture
def config(tmp_path):
    """Default config writing into a per-test results directory."""
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    cfg["results_dir"] = str(tmp_path / "results")
    return cfg


@pytest.fixture
def fast_config(config):
    """Shorter horizon with a one-decade fit window [20, 200]."""
    config["seed"]["t_max"] = 200.0
    config["fit"]["min_time"] = 20.0
    return config


@pytest.fixture(scope="session")
def engine():
    return TrajectoryEngine()


@pytest.fixture(scope="session")
def tprime_zero(engine):
    """T' at gamma' = 0 to t = 1e3: the explicit gamma' = 0 member."""
    return engine.integrate(seed_jet(Family.TPRIME, 0.0))


@pytest.fixture(scope="session")
def tprime_half(engine):
    return engine.integrate(seed_jet(Family.TPRIME, 0.5))


@pytest.fixture(scope="session")
def tprime_escape(engine):
    return engine.integrate(seed_jet(Family.TPRIME, 1.2))


@pytest.fixture(scope="session")
def tgamma_one(engine):
    return engine.integrate(seed_jet(Family.T_GAMMA, 1.0))
