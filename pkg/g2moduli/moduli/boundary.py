"""Bisection for the edge of the moduli space inside a one-parameter family.

Each probe integrates one family member and only asks whether it escapes.
The search does not care which end of the bracket blows up, so the same code
finds gamma = 0 for T_gamma (blow-up below) and gamma' = 1 for T' (blow-up above).
"""

import dataclasses
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from g2moduli.config import section
from g2moduli.dynamics.trajectory_engine import Termination, TrajectoryEngine
from g2moduli.exceptions import BracketError
from g2moduli.instantons.local_families import Family, seed_jet

logger = logging.getLogger(__name__)


@dataclass
class BoundaryResult:
    family: Family
    gamma_crit: float
    lo: float
    hi: float
    iterations: int
    reflected: bool = False
    history: List[Tuple[float, bool]] = field(default_factory=list)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def to_dict(self) -> Dict:
        return {
            "family": self.family.value,
            "gamma_crit": self.gamma_crit,
            "lo": self.lo,
            "hi": self.hi,
            "width": self.width,
            "iterations": self.iterations,
            "reflected": self.reflected,
            "history": [{"parameter": p, "escaped": escaped} for p, escaped in self.history],
        }


class BoundaryLocator:
    """Bisects a parameter bracket on the predicate "the solution escapes"."""

    def __init__(self, config: dict = None, engine: Optional[TrajectoryEngine] = None):
        self.config = config or {}
        boundary = section(self.config, "boundary")
        self.tol = boundary["tol"]
        self.max_iter = boundary["max_iter"]
        self.use_reflection = boundary["use_reflection"]
        self.engine = engine or TrajectoryEngine(self.config)
        # probes only need escape vs bounded
        self.events = dataclasses.replace(self.engine.events, stop_on_convergence=True, regions=())

    def escapes(self, family: Family, parameter: float) -> bool:
        trajectory = self.engine.integrate(seed_jet(family, parameter), events=self.events)
        if trajectory.termination is Termination.STEP_FAILURE:
            logger.warning("probe %s %.6g failed (%s); counted as bounded", family.value, parameter, trajectory.message)
        return trajectory.termination is Termination.ESCAPED

    def locate(self, family: Family, bracket: Sequence[float], tol: Optional[float] = None) -> BoundaryResult:
        family = Family(family)
        lo, hi = float(bracket[0]), float(bracket[1])
        tol = self.tol if tol is None else tol
        if not lo < hi:
            raise BracketError(f"bracket [{lo}, {hi}] must satisfy lo < hi")

        if family is Family.TPRIME and self.use_reflection and hi <= 0.0:
            mirrored = self.locate(family, (-hi, -lo), tol)
            return BoundaryResult(
                family=family,
                gamma_crit=-mirrored.gamma_crit,
                lo=-mirrored.hi,
                hi=-mirrored.lo,
                iterations=mirrored.iterations,
                reflected=True,
                history=[(-p, escaped) for p, escaped in mirrored.history],
            )

        history = []
        lo_escapes = self.escapes(family, lo)
        hi_escapes = self.escapes(family, hi)
        history += [(lo, lo_escapes), (hi, hi_escapes)]
        if lo_escapes == hi_escapes:
            state = "escape" if lo_escapes else "stay bounded"
            raise BracketError(f"both ends of [{lo}, {hi}] {state}; the bracket does not straddle the boundary")

        iterations = 0
        while hi - lo >= tol and iterations < self.max_iter:
            mid = 0.5 * (lo + hi)
            mid_escapes = self.escapes(family, mid)
            history.append((mid, mid_escapes))
            if mid_escapes == lo_escapes:
                lo = mid
            else:
                hi = mid
            iterations += 1
            logger.debug("bracket [%.9f, %.9f] after %d probes", lo, hi, iterations)

        result = BoundaryResult(family, 0.5 * (lo + hi), lo, hi, iterations, history=history)
        logger.info("%s boundary at %.6f (width %.1e)", family.value, result.gamma_crit, result.width)
        return result


def locate_boundary(
    family: Family,
    bracket: Sequence[float],
    tol_param: Optional[float] = None,
    config: dict = None,
) -> BoundaryResult:
    return BoundaryLocator(config).locate(family, bracket, tol_param)
