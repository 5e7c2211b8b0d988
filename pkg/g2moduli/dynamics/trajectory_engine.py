"""Trajectory Engine: adaptive integration of the coupled system (r, f+, f-).

The radius is evolved alongside the instanton coefficients with r' = sqrt(1 - r^-3),
so one adaptive stepper drives the whole run and no root finding happens per step.
The scipy stepper is advanced one step at a time; its dense output fills a
log-spaced sample grid and pins down the escape time inside the escaping step.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, NamedTuple, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import integrate as sp_integrate
from scipy import optimize

from g2moduli.config import section
from g2moduli.exceptions import ConfigError, DomainError
from g2moduli.geometry.bs_metric import MetricSample, SQRT3, one_minus_inverse_cube, r_of_t
from g2moduli.instantons.instanton_system import NK_F_PLUS, InstantonState, rhs_full
from g2moduli.instantons.local_families import SeriesJet
from g2moduli.dynamics.regions import Region, resolve_regions

logger = logging.getLogger(__name__)

_SOLVERS = {"DOP853": sp_integrate.DOP853, "RK45": sp_integrate.RK45}
# extra right-hand side evaluations per dense-output call
_DENSE_EXTRA = {"DOP853": 3, "RK45": 0}


class Termination(str, Enum):
    REACHED_T_MAX = "ReachedTMax"
    CONVERGED = "Converged"
    ESCAPED = "Escaped"
    STEP_FAILURE = "StepFailure"


@dataclass(frozen=True)
class EventSpec:
    escape_threshold: float = 1e3
    convergence_radius: float = 1e-3
    convergence_min_time: float = 50.0
    invariance_band: float = 1e-9
    stop_on_convergence: bool = False
    regions: Sequence[Region] = ()

    def __post_init__(self):
        if not self.escape_threshold > 10.0:
            raise ConfigError(f"escape_threshold={self.escape_threshold} must exceed 10")
        if not self.convergence_radius > 0.0:
            raise ConfigError(f"convergence_radius={self.convergence_radius} must be positive")

    @classmethod
    def from_config(cls, config: Optional[Dict] = None) -> "EventSpec":
        events = section(config, "events")
        return cls(
            escape_threshold=events["escape_threshold"],
            convergence_radius=events["convergence_radius"],
            convergence_min_time=events["convergence_min_time"],
            invariance_band=events["invariance_band"],
            stop_on_convergence=events["stop_on_convergence"],
            regions=tuple(resolve_regions(events["regions"])),
        )

    def in_ball(self, f_plus: float, f_minus: float) -> bool:
        return math.hypot(f_plus - NK_F_PLUS, f_minus) <= self.convergence_radius


class Crossing(NamedTuple):
    region: str
    t: float
    kind: str  # "enter" or "exit"


@dataclass
class IntegratorStats:
    method: str
    steps: int = 0
    rejected_steps: int = 0
    nfev: int = 0
    final_step: float = 0.0


@dataclass
class Trajectory:
    t: np.ndarray
    r: np.ndarray
    f_plus: np.ndarray
    f_minus: np.ndarray
    seed: SeriesJet
    t0: float
    t_max: float
    rtol: float
    termination: Termination
    stats: IntegratorStats
    t_escape: Optional[float] = None
    converged_at: Optional[float] = None
    crossings: List[Crossing] = field(default_factory=list)
    message: str = ""

    @property
    def final_state(self) -> InstantonState:
        return InstantonState(float(self.f_plus[-1]), float(self.f_minus[-1]))

    @property
    def t_end(self) -> float:
        return float(self.t[-1])

    def __len__(self) -> int:
        return len(self.t)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"t": self.t, "r": self.r, "f_plus": self.f_plus, "f_minus": self.f_minus})

    def summary(self) -> Dict:
        return {
            "family": self.seed.family.value,
            "parameter": self.seed.parameter,
            "termination": self.termination.value,
            "t_end": self.t_end,
            "t_escape": self.t_escape,
            "converged_at": self.converged_at,
            "f_plus": float(self.f_plus[-1]),
            "f_minus": float(self.f_minus[-1]),
            "samples": len(self),
            "steps": self.stats.steps,
            "rejected_steps": self.stats.rejected_steps,
            "final_step": self.stats.final_step,
        }


def coupled_rhs(t: float, y: np.ndarray) -> np.ndarray:
    """Right-hand side of (r, f+, f-) with the metric read off the evolved radius."""
    r = y[0]
    w = one_minus_inverse_cube(r)
    rate = math.sqrt(w)
    sample = MetricSample(r=r, A=(r / 3.0) * rate, B=r / SQRT3, t=t)
    d_plus, d_minus = rhs_full(t, (y[1], y[2]), sample)
    return np.array([rate, d_plus, d_minus])


def output_grid(t0: float, t_max: float, samples_per_decade: int) -> np.ndarray:
    """Points 10**(k / samples_per_decade) strictly inside (t0, t_max), so decades land exactly."""
    lo = math.floor(math.log10(t0) * samples_per_decade) + 1
    hi = math.ceil(math.log10(t_max) * samples_per_decade) - 1
    grid = 10.0 ** (np.arange(lo, hi + 1) / samples_per_decade)
    return grid[(grid > t0) & (grid < t_max)]


class TrajectoryEngine:
    """Integrates seeded solutions from t0 to t_max with escape and convergence events.

    Reads the ``integrator``, ``seed`` and ``events`` sections of the config;
    missing keys fall back to the defaults.
    """

    def __init__(self, config: dict = None):
        self.config = config or {}
        integrator = section(self.config, "integrator")
        seed = section(self.config, "seed")

        self.method = integrator["method"]
        if self.method not in _SOLVERS:
            raise ConfigError(f"Unsupported integrator: {self.method}")
        self.rtol = integrator["rtol"]
        self.atol = integrator["atol"]
        self.first_step = integrator["first_step"]
        self.max_step = integrator["max_step"] or math.inf
        self.max_steps = integrator["max_steps"]
        self.samples_per_decade = integrator["samples_per_decade"]

        self.t0 = seed["t0"]
        self.t_max = seed["t_max"]
        self.series_radius = seed["series_radius"]
        self.events = EventSpec.from_config(self.config)

    def integrate(
        self,
        seed: SeriesJet,
        t0: Optional[float] = None,
        t_max: Optional[float] = None,
        rtol: Optional[float] = None,
        events: Optional[EventSpec] = None,
    ) -> Trajectory:
        """Integrate one seeded solution.

        Args:
            seed: series jet evaluated at t0 for the initial (f+, f-)
            t0: seed time, within the series radius
            t_max: horizon
            rtol: relative tolerance in [1e-14, 1e-3]
            events: escape / convergence / region watchers

        Returns:
            Trajectory with samples on the log-spaced grid plus the seed and end points
        """
        t0 = self.t0 if t0 is None else t0
        t_max = self.t_max if t_max is None else t_max
        rtol = self.rtol if rtol is None else rtol
        events = events or self.events

        if not 0.0 < t0 <= self.series_radius:
            raise DomainError(f"seed time t0={t0} outside (0, {self.series_radius}]")
        if not t_max > t0:
            raise DomainError(f"t_max={t_max} must exceed t0={t0}")
        if not 1e-14 <= rtol <= 1e-3:
            raise DomainError(f"rtol={rtol} outside [1e-14, 1e-3]")

        start = seed.evaluate(t0)
        y0 = np.array([r_of_t(t0), start.f_plus, start.f_minus])
        options = {"rtol": rtol, "atol": self.atol, "max_step": self.max_step}
        if self.first_step:
            options["first_step"] = self.first_step
        solver = _SOLVERS[self.method](coupled_rhs, t0, y0, t_max, **options)

        grid = output_grid(t0, t_max, self.samples_per_decade)
        times, states = [t0], [y0.copy()]
        cursor = 0
        steps = 0
        dense_calls = 0
        termination = Termination.REACHED_T_MAX
        t_escape = None
        converged_at = None
        message = ""

        while solver.status == "running":
            t_old = solver.t
            solver.step()
            if solver.status == "failed":
                termination = Termination.STEP_FAILURE
                message = solver.message or "step failed"
                break
            steps += 1
            t_new, y_new = solver.t, solver.y
            if not np.all(np.isfinite(y_new)):
                termination = Termination.STEP_FAILURE
                message = f"non-finite state at t={t_new:.6g}"
                break

            escaped = max(abs(y_new[1]), abs(y_new[2])) > events.escape_threshold
            due = cursor < len(grid) and grid[cursor] <= t_new
            if escaped or due:
                dense = solver.dense_output()
                dense_calls += 1
                if escaped:
                    t_escape = self._locate_escape(dense, t_old, t_new, events.escape_threshold)
                while cursor < len(grid) and grid[cursor] <= t_new:
                    if escaped and grid[cursor] >= t_escape:
                        break
                    times.append(float(grid[cursor]))
                    states.append(dense(grid[cursor]))
                    cursor += 1
                if escaped:
                    times.append(t_escape)
                    states.append(dense(t_escape))
                    termination = Termination.ESCAPED
                    break

            if converged_at is None and t_new >= events.convergence_min_time and events.in_ball(y_new[1], y_new[2]):
                converged_at = float(t_new)
                if events.stop_on_convergence:
                    if t_new > times[-1]:
                        times.append(float(t_new))
                        states.append(y_new.copy())
                    termination = Termination.CONVERGED
                    break

            if steps >= self.max_steps and solver.status == "running":
                termination = Termination.STEP_FAILURE
                message = f"max_steps={self.max_steps} reached at t={t_new:.6g}"
                break

        if termination in (Termination.REACHED_T_MAX, Termination.STEP_FAILURE):
            if solver.t > times[-1] and np.all(np.isfinite(solver.y)):
                times.append(float(solver.t))
                states.append(solver.y.copy())
        if termination is Termination.REACHED_T_MAX:
            final = states[-1]
            if times[-1] >= events.convergence_min_time and events.in_ball(final[1], final[2]):
                termination = Termination.CONVERGED
        if termination is Termination.STEP_FAILURE:
            logger.warning("%s %.6g: step failure (%s)", seed.family.value, seed.parameter, message)

        n_stages = solver.n_stages
        attempts = (solver.nfev - 2 - _DENSE_EXTRA[self.method] * dense_calls) // n_stages
        stats = IntegratorStats(
            method=self.method,
            steps=steps,
            rejected_steps=max(0, attempts - steps),
            nfev=solver.nfev,
            final_step=float(solver.step_size or 0.0),
        )

        data = np.array(states)
        trajectory = Trajectory(
            t=np.array(times),
            r=data[:, 0],
            f_plus=data[:, 1],
            f_minus=data[:, 2],
            seed=seed,
            t0=t0,
            t_max=t_max,
            rtol=rtol,
            termination=termination,
            stats=stats,
            t_escape=t_escape,
            converged_at=converged_at,
            message=message,
        )
        trajectory.crossings = region_crossings(trajectory, events.regions)
        logger.debug(
            "%s %.6g: %s at t=%.6g after %d steps",
            seed.family.value, seed.parameter, termination.value, trajectory.t_end, steps,
        )
        return trajectory

    @staticmethod
    def _locate_escape(dense, t_old: float, t_new: float, threshold: float) -> float:
        def excess(t):
            y = dense(t)
            return max(abs(y[1]), abs(y[2])) - threshold

        if excess(t_old) >= 0.0:
            return float(t_old)
        return float(optimize.brentq(excess, t_old, t_new, xtol=1e-14, rtol=1e-12))


def integrate(
    seed: SeriesJet,
    t0: float = None,
    t_max: float = None,
    tol: float = None,
    events: EventSpec = None,
    config: dict = None,
) -> Trajectory:
    """Module-level convenience wrapper around ``TrajectoryEngine.integrate``."""
    return TrajectoryEngine(config).integrate(seed, t0=t0, t_max=t_max, rtol=tol, events=events)


def region_crossings(trajectory: Trajectory, regions: Sequence[Region]) -> List[Crossing]:
    """Enter/exit events of each region along the samples, in time order."""
    crossings = []
    for region in regions:
        inside = region.mask(trajectory.f_plus, trajectory.f_minus)
        if inside[0]:
            crossings.append(Crossing(region.name, float(trajectory.t[0]), "enter"))
        changes = np.flatnonzero(inside[1:] != inside[:-1]) + 1
        for index in changes:
            kind = "enter" if inside[index] else "exit"
            crossings.append(Crossing(region.name, float(trajectory.t[index]), kind))
    return sorted(crossings, key=lambda item: item.t)


@dataclass
class InvarianceReport:
    region: str
    band: float
    entered_at: Optional[float]
    exits: List[float]
    max_excursion: float

    @property
    def entered(self) -> bool:
        return self.entered_at is not None

    @property
    def invariant(self) -> bool:
        return not self.exits

    def to_dict(self) -> Dict:
        return {
            "region": self.region,
            "band": self.band,
            "entered_at": self.entered_at,
            "exits": self.exits,
            "max_excursion": self.max_excursion,
            "invariant": self.invariant,
        }


def check_region_invariance(trajectory: Trajectory, region: Region, band: float = 1e-9) -> InvarianceReport:
    """First entry into ``region`` and every later sample that leaves it by more than ``band``."""
    inside = region.mask(trajectory.f_plus, trajectory.f_minus)
    if not inside.any():
        return InvarianceReport(region.name, band, None, [], 0.0)
    first = int(np.argmax(inside))
    exits = []
    excursion = 0.0
    for index in range(first + 1, len(trajectory)):
        distance = region.distance_outside(float(trajectory.f_plus[index]), float(trajectory.f_minus[index]))
        if not inside[index]:
            excursion = max(excursion, distance)
        if distance > band:
            exits.append(float(trajectory.t[index]))
    if exits:
        logger.warning("%s left %s at t=%.6g (band %.1e)", trajectory.seed.family.value, region.name, exits[0], band)
    return InvarianceReport(region.name, band, float(trajectory.t[first]), exits, excursion)


def coupled_r_error(trajectory: Trajectory) -> float:
    """|r(t_end) - r_of_t(t_end)| for the evolved radius."""
    t_end = trajectory.t_end
    return abs(float(trajectory.r[-1]) - r_of_t(t_end))
