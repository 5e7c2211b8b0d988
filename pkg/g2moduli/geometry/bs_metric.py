"""Bryant–Salamon metric: closed-form coefficients on the spinor bundle of S^3.

The cohomogeneity-one metric is dt^2 + A^2 sum (e+_i)^2 + B^2 sum (e-_i)^2.
In the rescaled radius r = sqrt(3) B, r in [1, inf), the torsion-free
solution is

    A(r) = (r/3) sqrt(1 - r^-3),    B(r) = r / sqrt(3),

with dr/dt = sqrt(1 - r^-3). The scale is fixed (B(0) = 1/sqrt(3)); there is
no free scale parameter.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
import pandas as pd
from scipy import integrate, optimize, special

from g2moduli.exceptions import DomainError

SQRT3 = math.sqrt(3.0)

# lim_{r -> inf} (t(r) - r) = B(-1/3, 1/2) / 3, with B the (continued) Beta function
RADIAL_OFFSET = special.gamma(-1.0 / 3.0) * math.sqrt(math.pi) / special.gamma(1.0 / 6.0) / 3.0


@dataclass(frozen=True)
class MetricSample:
    """Metric coefficients at one point of the orbit space.

    ``t`` is None when the sample was built from r alone (see ``metric_at_r``).
    """

    r: float
    A: float
    B: float
    t: Optional[float] = None

    @property
    def a(self) -> float:
        """Potential a = (B^3 + B A^2) / 8 of the closed G2-structure."""
        return (self.B ** 3 + self.B * self.A ** 2) / 8.0

    @property
    def p(self) -> float:
        """Cohomology constant p = (B^3 - 3 B A^2) / 8."""
        return (self.B ** 3 - 3.0 * self.B * self.A ** 2) / 8.0

    def with_t(self, t: float) -> "MetricSample":
        return MetricSample(r=self.r, A=self.A, B=self.B, t=t)


@dataclass(frozen=True)
class MetricProfile:
    """A pair of coefficient functions of r together with the radial rate dr/dt."""

    name: str
    coefficients: Callable[[float], Tuple[float, float]]
    radial_rate: Callable[[float], float]


def _check_radius(r: float) -> None:
    if not r >= 1.0:
        raise DomainError(f"radius r={r} is below the singular orbit r=1")


def one_minus_inverse_cube(r: float) -> float:
    # 1 - r^-3 without cancellation near r = 1
    return -math.expm1(-3.0 * math.log1p(r - 1.0))


def metric_at_r(r: float) -> MetricSample:
    """Closed-form (A, B) at radius r >= 1; the t field is left unset."""
    _check_radius(r)
    A = (r / 3.0) * math.sqrt(one_minus_inverse_cube(r))
    B = r / SQRT3
    return MetricSample(r=r, A=A, B=B)


def dr_dt(r: float) -> float:
    """Radial rate dr/dt = sqrt(1 - r^-3); zero exactly at the singular orbit."""
    _check_radius(r)
    return math.sqrt(one_minus_inverse_cube(r))


def _t_integrand(u: float) -> float:
    # dt = dr / sqrt(1 - r^-3) after r = 1 + u^2
    if u == 0.0:
        return 2.0 / SQRT3
    w = -math.expm1(-3.0 * math.log1p(u * u))
    return 2.0 * u / math.sqrt(w)


def t_of_r(r: float, tol: float = 1e-12) -> float:
    """Geodesic distance from the singular orbit to radius r."""
    _check_radius(r)
    if r == 1.0:
        return 0.0
    value, _ = integrate.quad(_t_integrand, 0.0, math.sqrt(r - 1.0), epsabs=tol, epsrel=tol, limit=200)
    return value


def r_of_t(t: float, tol: float = 1e-12) -> float:
    """Inverse of ``t_of_r``; t(r) >= r - 1 brackets the root in [1, t + 1]."""
    if t < 0.0:
        raise DomainError(f"geodesic distance t={t} is negative")
    if t == 0.0:
        return 1.0
    return optimize.brentq(lambda r: t_of_r(r, tol) - t, 1.0, t + 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)


def metric_at_t(t: float, tol: float = 1e-12) -> MetricSample:
    return metric_at_r(r_of_t(t, tol)).with_t(t)


def _bryant_salamon_coefficients(r: float) -> Tuple[float, float]:
    sample = metric_at_r(r)
    return sample.A, sample.B


def _cone_coefficients(r: float) -> Tuple[float, float]:
    return r / 3.0, r / SQRT3


BRYANT_SALAMON = MetricProfile("bryant_salamon", _bryant_salamon_coefficients, dr_dt)
# On the cone r = sqrt(3) B is the geodesic variable itself
CONE = MetricProfile("cone", _cone_coefficients, lambda r: 1.0)


def hitchin_residual(
    sample: MetricSample,
    h: float = 1e-5,
    profile: MetricProfile = BRYANT_SALAMON,
) -> Tuple[float, float]:
    """Residuals of A' = (1 - A^2/B^2)/2 and B' = A/B at ``sample``.

    Derivatives along t are taken from ``profile`` by a central difference in r
    times dr/dt; the right-hand sides use the sample's own (A, B), so a sample
    that is not on the profile shows up as a non-zero residual.
    """
    r = sample.r
    if r - h < 1.0:
        raise DomainError(f"residual needs an interior point, got r={r} with step {h}")
    A_hi, B_hi = profile.coefficients(r + h)
    A_lo, B_lo = profile.coefficients(r - h)
    rate = profile.radial_rate(r)
    A_dot = (A_hi - A_lo) / (2.0 * h) * rate
    B_dot = (B_hi - B_lo) / (2.0 * h) * rate
    res_A = A_dot - 0.5 * (1.0 - sample.A ** 2 / sample.B ** 2)
    res_B = B_dot - sample.A / sample.B
    return res_A, res_B


def derived_potentials(r: float) -> Tuple[float, float]:
    """(a, p) of the closed G2-structure at radius r."""
    sample = metric_at_r(r)
    return sample.a, sample.p


def hitchin_potential_residual(r: float) -> Tuple[float, float]:
    """Residual of 4 a'^6 = 3a^4 - 8pa^3 + 6p^2a^2 - p^4, and dp/dr.

    a' is computed by the chain rule from the closed form: da/dr = r^2 / (6 sqrt 3),
    dp/dr from the derivatives of A^2 and B. The first residual is relative to
    max(1, |rhs|) since both sides grow like r^12.
    """
    _check_radius(r)
    sample = metric_at_r(r)
    a, p = sample.a, sample.p
    # dB/dr = 1/sqrt3, d(A^2)/dr = (2r + r^-2)/9
    dB = 1.0 / SQRT3
    dA2 = (2.0 * r + r ** -2) / 9.0
    B, A2 = sample.B, sample.A ** 2
    da_dr = (3.0 * B ** 2 * dB + dB * A2 + B * dA2) / 8.0
    dp_dr = (3.0 * B ** 2 * dB - 3.0 * (dB * A2 + B * dA2)) / 8.0
    a_dot = da_dr * dr_dt(r)
    lhs = 4.0 * a_dot ** 6
    rhs = 3.0 * a ** 4 - 8.0 * p * a ** 3 + 6.0 * p ** 2 * a ** 2 - p ** 4
    return (lhs - rhs) / max(1.0, abs(rhs)), dp_dr


def cone_deviation(r: float) -> Tuple[float, float]:
    """Relative deviation of (A, B) from the cone (r/3, r/sqrt3) at cone radius r.

    |g - g_C| measured with the cone metric is of this size, O(r^-3).
    """
    sample = metric_at_r(r)
    return abs(sample.A / (r / 3.0) - 1.0), abs(sample.B / (r / SQRT3) - 1.0)


def metric_table(r_min: float = 1.0, r_max: float = 100.0, samples: int = 200, tol: float = 1e-12) -> pd.DataFrame:
    """Log-spaced table of r, t, A, B, dr_dt; t accumulated interval by interval."""
    _check_radius(r_min)
    if r_max < r_min or samples < 2:
        raise DomainError(f"need r_max >= r_min and samples >= 2, got [{r_min}, {r_max}] x {samples}")
    radii = np.geomspace(r_min, r_max, samples)
    radii[0], radii[-1] = r_min, r_max
    rows = []
    t = t_of_r(r_min, tol)
    u_prev = math.sqrt(r_min - 1.0)
    for i, r in enumerate(radii):
        if i > 0:
            u = math.sqrt(r - 1.0)
            step, _ = integrate.quad(_t_integrand, u_prev, u, epsabs=tol, epsrel=tol, limit=200)
            t += step
            u_prev = u
        sample = metric_at_r(float(r))
        rows.append({"r": float(r), "t": t, "A": sample.A, "B": sample.B, "dr_dt": dr_dt(float(r))})
    return pd.DataFrame(rows, columns=["r", "t", "A", "B", "dr_dt"])
