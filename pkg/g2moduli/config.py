"""Run configuration.

Two views of the same settings: the plain nested dict the engines read
(``get_config`` / ``set_config``; engines given no config, or a partial one,
fall back to it through ``section``), and the validated ``RunConfig`` model used
to load, check and save JSON config files.
"""

import copy
import json
import logging
import os
from typing import Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, PositiveFloat, PositiveInt, ValidationError, field_validator, model_validator

import g2moduli.default_config as default_config
from g2moduli.exceptions import ConfigError

logger = logging.getLogger(__name__)

_D = default_config.DEFAULT_CONFIG

# Use default config but allow it to be overridden
_config: Optional[Dict] = None


def _merge(base: Dict, override: Dict) -> Dict:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def initialize_config():
    """Initialize the configuration with default values."""
    global _config
    if _config is None:
        _config = copy.deepcopy(default_config.DEFAULT_CONFIG)


def set_config(config: Dict):
    """Update the configuration with custom values (nested sections are merged)."""
    global _config
    if _config is None:
        _config = copy.deepcopy(default_config.DEFAULT_CONFIG)
    _config = _merge(_config, config)


def get_config() -> Dict:
    """Get the current configuration."""
    if _config is None:
        initialize_config()
    return copy.deepcopy(_config)


def resolve_config(config: Optional[Dict] = None) -> Dict:
    """The active global config with ``config`` merged over it."""
    return _merge(get_config(), config or {})


def section(config: Optional[Dict], name: str) -> Dict:
    """Return one config section; keys missing from ``config`` come from the active global config."""
    base = get_config().get(name, {})
    if not config:
        return base
    return _merge(base, config.get(name, {}) or {})


class MetricConfig(BaseModel):
    quad_tol: PositiveFloat = _D["metric"]["quad_tol"]
    fd_step: PositiveFloat = _D["metric"]["fd_step"]


class IntegratorConfig(BaseModel):
    method: Literal["DOP853", "RK45"] = _D["integrator"]["method"]
    rtol: float = Field(_D["integrator"]["rtol"], ge=1e-14, le=1e-3)
    atol: PositiveFloat = _D["integrator"]["atol"]
    first_step: Optional[PositiveFloat] = _D["integrator"]["first_step"]
    max_step: Optional[PositiveFloat] = _D["integrator"]["max_step"]
    max_steps: PositiveInt = _D["integrator"]["max_steps"]
    samples_per_decade: PositiveInt = _D["integrator"]["samples_per_decade"]


class SeedConfig(BaseModel):
    t0: PositiveFloat = _D["seed"]["t0"]
    series_radius: PositiveFloat = _D["seed"]["series_radius"]
    t_max: PositiveFloat = _D["seed"]["t_max"]

    @model_validator(mode="after")
    def _check_times(self):
        if self.t0 > self.series_radius:
            raise ValueError(f"t0={self.t0} exceeds the series radius {self.series_radius}")
        if self.t_max <= self.t0:
            raise ValueError(f"t_max={self.t_max} must exceed t0={self.t0}")
        return self


class EventConfig(BaseModel):
    escape_threshold: float = _D["events"]["escape_threshold"]
    convergence_radius: PositiveFloat = _D["events"]["convergence_radius"]
    convergence_min_time: PositiveFloat = _D["events"]["convergence_min_time"]
    invariance_band: PositiveFloat = _D["events"]["invariance_band"]
    stop_on_convergence: bool = _D["events"]["stop_on_convergence"]
    regions: List[str] = Field(default_factory=lambda: list(_D["events"]["regions"]))

    @field_validator("escape_threshold")
    @classmethod
    def _escape_above_critical_values(cls, value: float) -> float:
        # every critical coordinate has modulus <= 1
        if value <= 10.0:
            raise ValueError("escape_threshold must exceed 10x the largest critical coordinate (10)")
        return value


class FitConfig(BaseModel):
    min_time: PositiveFloat = _D["fit"]["min_time"]
    window_fraction: float = Field(_D["fit"]["window_fraction"], gt=0.0, lt=1.0)
    min_samples: PositiveInt = _D["fit"]["min_samples"]
    underflow: PositiveFloat = _D["fit"]["underflow"]


class BoundaryConfig(BaseModel):
    tol: PositiveFloat = _D["boundary"]["tol"]
    max_iter: PositiveInt = _D["boundary"]["max_iter"]
    use_reflection: bool = _D["boundary"]["use_reflection"]


class GridConfig(BaseModel):
    start: float
    stop: float
    step: PositiveFloat

    @model_validator(mode="after")
    def _check_order(self):
        if self.start > self.stop:
            raise ValueError(f"grid start {self.start} exceeds stop {self.stop}")
        return self

    def values(self) -> np.ndarray:
        """Grid values, rounded so that e.g. -1.5 + 10 * 0.05 is exactly -1.0."""
        count = int(np.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return np.round(self.start + self.step * np.arange(count), 12)


class PortraitConfig(BaseModel):
    window: List[float] = Field(default_factory=lambda: list(_D["portrait"]["window"]))
    grid_points: int = Field(_D["portrait"]["grid_points"], ge=3)
    streamline_seeds: int = Field(_D["portrait"]["streamline_seeds"], ge=1)
    streamline_steps: int = Field(_D["portrait"]["streamline_steps"], ge=2)
    streamline_time: PositiveFloat = _D["portrait"]["streamline_time"]
    fan: List[float] = Field(default_factory=lambda: list(_D["portrait"]["fan"]))

    @field_validator("window")
    @classmethod
    def _check_window(cls, value: List[float]) -> List[float]:
        if len(value) != 4 or value[0] >= value[1] or value[2] >= value[3]:
            raise ValueError("window must be [x_min, x_max, y_min, y_max] with min < max")
        return value

    @field_validator("fan")
    @classmethod
    def _check_fan(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("fan must list at least one parameter")
        return value


def _default_grids() -> Dict[str, GridConfig]:
    return {name: GridConfig(**grid) for name, grid in _D["grids"].items()}


class RunConfig(BaseModel):
    """Validated run configuration; ``model_dump()`` is the dict the engines read."""

    results_dir: str = _D["results_dir"]
    workers: PositiveInt = _D["workers"]
    metric: MetricConfig = Field(default_factory=MetricConfig)
    integrator: IntegratorConfig = Field(default_factory=IntegratorConfig)
    seed: SeedConfig = Field(default_factory=SeedConfig)
    events: EventConfig = Field(default_factory=EventConfig)
    fit: FitConfig = Field(default_factory=FitConfig)
    boundary: BoundaryConfig = Field(default_factory=BoundaryConfig)
    grids: Dict[str, GridConfig] = Field(default_factory=_default_grids)
    portrait: PortraitConfig = Field(default_factory=PortraitConfig)

    @field_validator("grids")
    @classmethod
    def _check_grids(cls, value: Dict[str, GridConfig]) -> Dict[str, GridConfig]:
        if not value:
            raise ValueError("at least one parameter grid is required")
        return value

    def to_dict(self) -> Dict:
        return self.model_dump()


def load_config(path: Optional[str] = None) -> RunConfig:
    """Load a JSON config file; a missing path yields the defaults."""
    if not path:
        return RunConfig()
    if not os.path.exists(path):
        raise ConfigError(f"Config file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = f.read()
        cfg = RunConfig.model_validate_json(raw)
    except (OSError, ValidationError) as e:
        raise ConfigError(f"Invalid config {path}: {e}") from e
    logger.debug("Loaded config from %s", path)
    return cfg


def save_config(cfg: RunConfig, path: str) -> str:
    """Write a config as indented JSON."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(cfg.model_dump_json(indent=2))
        f.write("\n")
    return path


def config_schema() -> Dict:
    """JSON schema of the config file format."""
    return RunConfig.model_json_schema()


def dump_config(cfg: RunConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2)


# Initialize with default config
initialize_config()
