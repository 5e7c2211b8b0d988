"""SU(2)^3-invariant instanton equations on the Bryant–Salamon metric and its cone.

An invariant connection is A = f+ sum T_i (x) e+_i + f- sum T_i (x) e-_i and the
instanton condition reduces to a planar ODE for (f+, f-). Far out the full
system is asymptotic to the conical system, whose log-time form is autonomous.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, NamedTuple, Tuple

import numpy as np

from g2moduli.exceptions import DomainError, SingularPointError
from g2moduli.geometry.bs_metric import MetricSample, metric_at_r, t_of_r

logger = logging.getLogger(__name__)

SQRT3 = math.sqrt(3.0)
NK_F_PLUS = 2.0 / 3.0

# rotation by 2pi/3 in shifted coordinates
ROTATION = 0.5 * np.array([[-1.0, SQRT3], [-SQRT3, -1.0]])


class InstantonState(NamedTuple):
    f_plus: float
    f_minus: float

    def norm(self) -> float:
        return max(abs(self.f_plus), abs(self.f_minus))

    def is_finite(self) -> bool:
        return math.isfinite(self.f_plus) and math.isfinite(self.f_minus)


class CriticalKind(str, Enum):
    FLAT_ORIGIN = "flat_origin"
    FLAT_PLUS_PLUS = "flat_plus_plus"
    FLAT_PLUS_MINUS = "flat_plus_minus"
    NEARLY_KAHLER = "nearly_kahler"

    @property
    def is_flat(self) -> bool:
        return self is not CriticalKind.NEARLY_KAHLER


@dataclass(frozen=True)
class CriticalPoint:
    state: InstantonState
    kind: CriticalKind


_CRITICAL_POINTS = (
    CriticalPoint(InstantonState(0.0, 0.0), CriticalKind.FLAT_ORIGIN),
    CriticalPoint(InstantonState(1.0, 1.0), CriticalKind.FLAT_PLUS_PLUS),
    CriticalPoint(InstantonState(1.0, -1.0), CriticalKind.FLAT_PLUS_MINUS),
    CriticalPoint(InstantonState(NK_F_PLUS, 0.0), CriticalKind.NEARLY_KAHLER),
)


def critical_points() -> List[CriticalPoint]:
    """Critical points of the conical system, flat ones first."""
    return list(_CRITICAL_POINTS)


def flat_points() -> List[CriticalPoint]:
    return [point for point in _CRITICAL_POINTS if point.kind.is_flat]


def rhs_full(t: float, s: Tuple[float, float], m: MetricSample) -> InstantonState:
    """Instanton ODE on the Bryant–Salamon metric.

    Evaluated as f+' = (f+/A)(1 - f+) + (f-^2 - f+) A/B^2, which equals
    (f+/A)(1 - A^2/B^2 - f+) + f-^2 A/B^2 and vanishes exactly at the flat points.
    ``t`` only guards the domain; the metric enters through ``m``.
    """
    if t <= 0.0:
        raise DomainError(f"geodesic time t={t} must be positive; seed from the series instead")
    if m.A <= 0.0:
        raise SingularPointError(f"A={m.A} vanishes at r={m.r}; seed from the series instead")
    f_plus, f_minus = s
    ratio = m.A / (m.B * m.B)
    df_plus = (f_plus / m.A) * (1.0 - f_plus) + (f_minus * f_minus - f_plus) * ratio
    df_minus = (2.0 * f_minus / m.A) * (f_plus - 1.0)
    return InstantonState(df_plus, df_minus)


def cone_field_autonomous(s: Tuple[float, float]) -> InstantonState:
    """Conical system in log-time tau = log t, unshifted coordinates."""
    f_plus, f_minus = s
    return InstantonState(
        2.0 * f_plus - 3.0 * f_plus * f_plus + f_minus * f_minus,
        6.0 * f_minus * (f_plus - 1.0),
    )


def rhs_cone(t: float, s: Tuple[float, float]) -> InstantonState:
    """Instanton ODE on the G2-cone over the nearly-Kähler S^3 x S^3."""
    if t <= 0.0:
        raise SingularPointError(f"conical system is singular at t={t}")
    d_plus, d_minus = cone_field_autonomous(s)
    return InstantonState(d_plus / t, d_minus / t)


def to_shifted(s: Tuple[float, float]) -> InstantonState:
    """(f+, f-) -> (g+, g-) with f+ = g+ + 2/3, f- = sqrt3 g-."""
    return InstantonState(s[0] - NK_F_PLUS, s[1] / SQRT3)


def from_shifted(g: Tuple[float, float]) -> InstantonState:
    return InstantonState(g[0] + NK_F_PLUS, SQRT3 * g[1])


def rhs_autonomous(g: Tuple[float, float]) -> InstantonState:
    """Autonomous conical field in shifted coordinates; S3-equivariant."""
    g_plus, g_minus = g
    return InstantonState(
        3.0 * g_minus * g_minus - g_plus * (3.0 * g_plus + 2.0),
        2.0 * g_minus * (3.0 * g_plus - 1.0),
    )


def reflect(s: Tuple[float, float]) -> InstantonState:
    """(f+, f-) -> (f+, -f-). Works the same on shifted states and on vectors."""
    return InstantonState(s[0], -s[1])


def rotate_cone(g: Tuple[float, float]) -> InstantonState:
    """Order-three rotation of the shifted plane."""
    g_plus, g_minus = g
    return InstantonState(
        ROTATION[0, 0] * g_plus + ROTATION[0, 1] * g_minus,
        ROTATION[1, 0] * g_plus + ROTATION[1, 1] * g_minus,
    )


def s3_orbit(g: Tuple[float, float]) -> List[InstantonState]:
    """The six images of a shifted state under the group generated by rotate_cone and reflect."""
    once = rotate_cone(g)
    twice = rotate_cone(once)
    base = [InstantonState(*g), once, twice]
    return base + [reflect(item) for item in base]


@dataclass(frozen=True)
class Linearization:
    point: CriticalPoint
    jacobian: np.ndarray
    eigenvalues: np.ndarray

    @property
    def stable(self) -> bool:
        return bool(np.all(self.eigenvalues.real < 0.0))


def linearize(point: CriticalPoint) -> Linearization:
    """Jacobian of the log-time conical field at a critical point."""
    f_plus, f_minus = point.state
    jacobian = np.array([
        [2.0 - 6.0 * f_plus, 2.0 * f_minus],
        [6.0 * f_minus, 6.0 * (f_plus - 1.0)],
    ])
    eigenvalues = np.sort(np.linalg.eigvals(jacobian).real)
    return Linearization(point=point, jacobian=jacobian, eigenvalues=eigenvalues)


def full_vs_cone_gap(r: float, s: Tuple[float, float]) -> float:
    """max-norm of rhs_full - rhs_cone at cone time r.

    The cone time is the cone radius r (where A = r/3, B = r/sqrt3); the full
    system is evaluated at its own geodesic time t(r) on the same orbit.
    """
    sample = metric_at_r(r)
    t = t_of_r(r)
    full = rhs_full(t, s, sample.with_t(t))
    cone = rhs_cone(r, s)
    return max(abs(full[0] - cone[0]), abs(full[1] - cone[1]))


def full_vs_cone_slope(
    s: Tuple[float, float] = (0.9, 0.4),
    r_min: float = 10.0,
    r_max: float = 1e3,
    samples: int = 25,
) -> Tuple[float, float]:
    """Fitted (slope, log-constant) of log|rhs_full - rhs_cone| against log r."""
    radii = np.geomspace(r_min, r_max, samples)
    gaps = np.array([full_vs_cone_gap(float(r), s) for r in radii])
    slope, intercept = np.polyfit(np.log(radii), np.log(gaps), 1)
    logger.debug("full-vs-cone gap at %s: slope %.4f", s, slope)
    return float(slope), float(intercept)


def critical_point_table() -> Dict[str, Dict[str, object]]:
    """Critical points with their shifted images and log-time eigenvalues."""
    table = {}
    for point in _CRITICAL_POINTS:
        lin = linearize(point)
        table[point.kind.value] = {
            "f_plus": point.state.f_plus,
            "f_minus": point.state.f_minus,
            "shifted": tuple(to_shifted(point.state)),
            "eigenvalues": [float(value) for value in lin.eigenvalues],
        }
    return table
