"""Local solution families at the singular orbit.

Two one-parameter families extend smoothly over the singular orbit S^3:
T_gamma on the trivial homogeneous bundle (f- = 0, f+ = gamma t^2 + O(t^4)) and
T'_gamma' on the non-trivial one (f+(0) = 1, f-(0) = gamma'). Besides the
truncated jets this module carries the two closed-form members of the
f- = 0 family, which serve as exact oracles.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

from g2moduli.exceptions import DomainError
from g2moduli.instantons.instanton_system import InstantonState

logger = logging.getLogger(__name__)

TRUNCATION_ORDER = 4


class Family(str, Enum):
    T_GAMMA = "tgamma"
    TPRIME = "tprime"

    @property
    def label(self) -> str:
        return "T_gamma" if self is Family.T_GAMMA else "T'_gamma'"


Coefficients = Tuple[Tuple[int, float], ...]


@dataclass(frozen=True)
class SeriesJet:
    """Truncated power series in t for (f+, f-), exact through order t^3."""

    family: Family
    parameter: float
    plus: Coefficients
    minus: Coefficients
    truncation_order: int = TRUNCATION_ORDER

    def evaluate(self, t: float) -> InstantonState:
        if t < 0.0:
            raise DomainError(f"series time t={t} is negative")
        return InstantonState(_horner(self.plus, t), _horner(self.minus, t))

    def reflected(self) -> "SeriesJet":
        """Jet of the reflected solution (f+, -f-)."""
        minus = tuple((power, -coefficient) for power, coefficient in self.minus)
        parameter = -self.parameter if self.family is Family.TPRIME else self.parameter
        return SeriesJet(self.family, parameter, self.plus, minus, self.truncation_order)


def _horner(coefficients: Coefficients, t: float) -> float:
    """Horner evaluation of a sparse series sum c_k t^k, highest power first."""
    value = 0.0
    previous = None
    for power, coefficient in sorted(coefficients, reverse=True):
        if previous is not None:
            value *= t ** (previous - power)
        value += coefficient
        previous = power
    if previous is None:
        return 0.0
    return value * t ** previous


def tprime_jet(gamma_prime: float) -> SeriesJet:
    c = 3.0 * (gamma_prime * gamma_prime - 1.0)
    return SeriesJet(
        family=Family.TPRIME,
        parameter=gamma_prime,
        plus=((0, 1.0), (2, c / 8.0)),
        minus=((0, gamma_prime), (2, c * gamma_prime / 4.0)),
    )


def t_gamma_jet(gamma: float) -> SeriesJet:
    return SeriesJet(
        family=Family.T_GAMMA,
        parameter=gamma,
        plus=((2, gamma),),
        minus=((2, 0.0),),
    )


def seed_jet(family: Family, parameter: float) -> SeriesJet:
    family = Family(family)
    if family is Family.TPRIME:
        return tprime_jet(parameter)
    return t_gamma_jet(parameter)


def tprime_series(gamma_prime: float, t: float) -> InstantonState:
    return tprime_jet(gamma_prime).evaluate(t)


def t_gamma_series(gamma: float, t: float) -> InstantonState:
    return t_gamma_jet(gamma).evaluate(t)


@dataclass(frozen=True)
class ClosedFormValue:
    state: InstantonState
    warning: Optional[str] = None


def clarke_breakdown_radius(gamma: float) -> Optional[float]:
    """Radius where the closed form's denominator vanishes; None when gamma >= 0."""
    if gamma >= 0.0:
        return None
    return math.sqrt(1.0 + 3.0 / (2.0 * abs(gamma)))


def clarke_closed_form(gamma: float, r: float) -> ClosedFormValue:
    """Explicit T_gamma member on the Bryant–Salamon metric.

    Negative gamma is evaluated but flagged: the solution breaks down at
    ``clarke_breakdown_radius(gamma)``.
    """
    if r < 1.0:
        raise DomainError(f"radius r={r} is below the singular orbit r=1")
    warning = None
    if gamma < 0.0:
        warning = f"gamma={gamma} < 0 breaks down at r={clarke_breakdown_radius(gamma):.6g}"
        logger.warning(warning)
    numerator = 2.0 * gamma * (r - 1.0) - 3.0 * r
    denominator = 2.0 * gamma * r * (r * r - 1.0) + 3.0 * r
    if denominator == 0.0:
        raise DomainError(f"closed form is singular at r={r} for gamma={gamma}")
    f_plus = (2.0 / 3.0) * (1.0 + numerator / denominator)
    return ClosedFormValue(InstantonState(f_plus, 0.0), warning)


def lotay_oliveira_closed_form(r: float) -> InstantonState:
    """Explicit member of the T' family at gamma' = 0."""
    if r < 1.0:
        raise DomainError(f"radius r={r} is below the singular orbit r=1")
    return InstantonState((2.0 / 3.0) * (1.0 + 1.0 / (r * (r + 1.0))), 0.0)


def closed_form_derivative(gamma: Optional[float], r: float) -> float:
    """d f+/dr of clarke_closed_form(gamma) or, for gamma None, of the gamma' = 0 form."""
    if gamma is None:
        # exact derivative of (2/3)(1 + 1/(r(r+1)))
        return -(2.0 / 3.0) * (2.0 * r + 1.0) / (r * (r + 1.0)) ** 2
    numerator = 2.0 * gamma * (r - 1.0) - 3.0 * r
    denominator = 2.0 * gamma * r * (r * r - 1.0) + 3.0 * r
    d_numerator = 2.0 * gamma - 3.0
    d_denominator = 2.0 * gamma * (3.0 * r * r - 1.0) + 3.0
    return (2.0 / 3.0) * (d_numerator * denominator - numerator * d_denominator) / denominator ** 2
