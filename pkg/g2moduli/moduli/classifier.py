"""Moduli Classifier: long-time behaviour of a trajectory.

Bounded solutions are either constant at a flat critical point or converge to
the nearly-Kähler instanton with quadratic decay; everything else escapes in
finite time. Runs that stop for numerical reasons are marked Inconclusive.
"""

import logging
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np
from pydantic import BaseModel, Field

from g2moduli.dynamics.trajectory_engine import Termination, Trajectory
from g2moduli.exceptions import FitError
from g2moduli.instantons.instanton_system import flat_points
from g2moduli.instantons.local_families import Family
from g2moduli.moduli.decay_fit import DecayFit, fit_decay

logger = logging.getLogger(__name__)

FLAT_TOLERANCE = 1e-12


class Outcome(str, Enum):
    FLAT = "Flat"
    CONVERGES_TO_NK = "ConvergesToNK"
    BLOW_UP = "BlowUp"
    INCONCLUSIVE = "Inconclusive"

    @property
    def bounded(self) -> bool:
        return self is not Outcome.BLOW_UP


class ClassificationRecord(BaseModel):
    """Outcome of one (family, parameter) run; decay fields are set for ConvergesToNK only."""

    family: Family
    parameter: float
    outcome: Outcome
    mu: Optional[float] = None
    nu: Optional[float] = None
    fitted_exponent: Optional[float] = None
    residual: Optional[float] = None
    connection_rate: Optional[float] = None
    t_escape: Optional[float] = None
    termination: Optional[str] = None
    t_end: Optional[float] = None
    converged_at: Optional[float] = None
    flat_point: Optional[str] = None
    error: Optional[str] = None
    trajectory: Optional[Any] = Field(default=None, exclude=True, repr=False)

    def to_json_dict(self) -> Dict:
        return self.model_dump(mode="json")

    def reflected_matches(self, other: "ClassificationRecord", tol: float = 0.0) -> bool:
        """True when ``other`` is this record's image under f- -> -f-."""
        if self.outcome != other.outcome:
            return False
        if self.outcome is Outcome.CONVERGES_TO_NK:
            return (
                abs(self.mu - other.mu) <= tol
                and abs(self.nu + other.nu) <= tol
                and abs(self.fitted_exponent - other.fitted_exponent) <= tol
            )
        if self.outcome is Outcome.BLOW_UP:
            return abs(self.t_escape - other.t_escape) <= tol
        return True


def constant_flat_point(trajectory: Trajectory, tol: float = FLAT_TOLERANCE) -> Optional[str]:
    """Name of the flat point the trajectory sits on throughout, if any."""
    for point in flat_points():
        if (
            np.max(np.abs(trajectory.f_plus - point.state.f_plus)) <= tol
            and np.max(np.abs(trajectory.f_minus - point.state.f_minus)) <= tol
        ):
            return point.kind.value
    return None


class ModuliClassifier:
    """Maps terminated trajectories to classification records."""

    def __init__(self, config: dict = None):
        self.config = config or {}

    def classify(self, trajectory: Trajectory) -> ClassificationRecord:
        seed = trajectory.seed
        base = {
            "family": seed.family,
            "parameter": seed.parameter,
            "termination": trajectory.termination.value,
            "t_end": trajectory.t_end,
            "converged_at": trajectory.converged_at,
            "trajectory": trajectory,
        }

        if trajectory.termination is Termination.STEP_FAILURE:
            return ClassificationRecord(outcome=Outcome.INCONCLUSIVE, error=trajectory.message, **base)

        if trajectory.termination is Termination.ESCAPED:
            return ClassificationRecord(outcome=Outcome.BLOW_UP, t_escape=trajectory.t_escape, **base)

        flat = constant_flat_point(trajectory)
        if flat is not None:
            return ClassificationRecord(outcome=Outcome.FLAT, flat_point=flat, **base)

        if trajectory.termination is not Termination.CONVERGED:
            message = f"bounded but outside the convergence ball at t={trajectory.t_end:.6g}"
            logger.warning("%s %.6g: %s", seed.family.value, seed.parameter, message)
            return ClassificationRecord(outcome=Outcome.INCONCLUSIVE, error=message, **base)

        try:
            fit = fit_decay(trajectory.t, trajectory.f_plus, trajectory.f_minus, config=self.config)
        except FitError as e:
            logger.warning("%s %.6g: decay fit failed: %s", seed.family.value, seed.parameter, e)
            return ClassificationRecord(outcome=Outcome.INCONCLUSIVE, error=str(e), **base)

        return ClassificationRecord(outcome=Outcome.CONVERGES_TO_NK, **_fit_fields(fit), **base)


def _fit_fields(fit: DecayFit) -> Dict:
    return {
        "mu": fit.mu,
        "nu": fit.nu,
        "fitted_exponent": fit.fitted_exponent,
        "residual": fit.residual,
        "connection_rate": fit.connection_rate,
    }


def classify(trajectory: Trajectory, config: dict = None) -> ClassificationRecord:
    return ModuliClassifier(config).classify(trajectory)
