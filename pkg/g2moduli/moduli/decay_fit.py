"""Asymptotic decay of converging solutions towards the nearly-Kähler instanton.

Near (2/3, 0) the solutions behave like f+ = 2/3 + mu t^-2 + O(t^-3),
f- = nu t^-2 + O(t^-3). The coefficients decay with exponent -2; the connection
1-form picks up one more power of t^-1 from the coframe, so its rate is -3.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from g2moduli.config import section
from g2moduli.exceptions import FitError
from g2moduli.instantons.instanton_system import NK_F_PLUS

logger = logging.getLogger(__name__)

# fraction of a decade the tail may fall short of (grid rounding)
_SPAN_SLACK = 1e-6


@dataclass(frozen=True)
class DecayFit:
    mu: float
    nu: float
    fitted_exponent: float
    residual: float
    exponent_plus: float
    exponent_minus: Optional[float]
    t_fit: float
    samples: int
    minus_underflow: bool = False

    @property
    def connection_rate(self) -> float:
        """Decay rate of the connection 1-form: coefficient exponent minus one."""
        return self.fitted_exponent - 1.0

    def to_dict(self) -> Dict:
        return {
            "mu": self.mu,
            "nu": self.nu,
            "fitted_exponent": self.fitted_exponent,
            "connection_rate": self.connection_rate,
            "residual": self.residual,
            "exponent_plus": self.exponent_plus,
            "exponent_minus": self.exponent_minus,
            "t_fit": self.t_fit,
            "samples": self.samples,
            "minus_underflow": self.minus_underflow,
        }


def fit_window_start(t_max: float, config: Optional[Dict] = None) -> float:
    fit = section(config, "fit")
    return max(fit["min_time"], fit["window_fraction"] * t_max)


def fit_decay(
    t: np.ndarray,
    f_plus: np.ndarray,
    f_minus: np.ndarray,
    t_fit: Optional[float] = None,
    config: Optional[Dict] = None,
) -> DecayFit:
    """Fit the tail from t_fit to the end of a converging solution.

    The exponent is a shared-slope least-squares fit of log|f+ - 2/3| and log|f-|
    against log t (separate intercepts); per-component slopes are reported too.
    mu and nu come from a linear fit of each component on (t^-2, t^-3).

    Raises:
        FitError: fewer than ``min_samples`` tail samples, a tail shorter than
            one decade, or a component that sits exactly on 2/3.
    """
    fit = section(config, "fit")
    t = np.asarray(t, dtype=float)
    f_plus = np.asarray(f_plus, dtype=float)
    f_minus = np.asarray(f_minus, dtype=float)
    if t_fit is None:
        t_fit = fit_window_start(float(t[-1]), config)

    # the window opens at the last sample at or before t_fit, so a log grid that
    # misses t_fit still covers [t_fit, t_max]
    first = max(int(np.searchsorted(t, t_fit * (1.0 + 1e-12), side="right")) - 1, 0)
    tail = np.arange(t.size) >= first
    count = int(tail.sum())
    if count < fit["min_samples"]:
        raise FitError(f"tail from t = {t_fit:g} has {count} samples, need {fit['min_samples']}")
    tt = t[tail]
    span = np.log10(tt[-1] / tt[0])
    if span < 1.0 - _SPAN_SLACK:
        raise FitError(f"tail spans {span:.3f} decades of t, need at least one")

    dev_plus = np.abs(f_plus[tail] - NK_F_PLUS)
    dev_minus = np.abs(f_minus[tail])
    if np.any(dev_plus == 0.0):
        raise FitError("f_plus equals 2/3 inside the fit window; no decay to fit")
    log_t = np.log(tt)
    log_plus = np.log(dev_plus)

    basis = np.column_stack([tt ** -2, tt ** -3])
    mu = float(np.linalg.lstsq(basis, f_plus[tail] - NK_F_PLUS, rcond=None)[0][0])
    exponent_plus = float(np.polyfit(log_t, log_plus, 1)[0])

    underflow = bool(np.all(dev_minus < fit["underflow"]))
    if underflow:
        logger.debug("f_minus below %.0e on the tail; exponent from f_plus only", fit["underflow"])
        slope, intercept = np.polyfit(log_t, log_plus, 1)
        residual = float(np.max(np.abs(log_plus - (slope * log_t + intercept))))
        return DecayFit(
            mu=mu,
            nu=0.0,
            fitted_exponent=float(slope),
            residual=residual,
            exponent_plus=exponent_plus,
            exponent_minus=None,
            t_fit=float(t_fit),
            samples=count,
            minus_underflow=True,
        )

    if np.any(dev_minus == 0.0):
        raise FitError("f_minus vanishes inside the fit window without underflowing throughout")
    log_minus = np.log(dev_minus)
    nu = float(np.linalg.lstsq(basis, f_minus[tail], rcond=None)[0][0])
    exponent_minus = float(np.polyfit(log_t, log_minus, 1)[0])

    # shared slope, one intercept per component
    zeros = np.zeros(count)
    ones = np.ones(count)
    design = np.vstack([
        np.column_stack([log_t, ones, zeros]),
        np.column_stack([log_t, zeros, ones]),
    ])
    target = np.concatenate([log_plus, log_minus])
    coefficients = np.linalg.lstsq(design, target, rcond=None)[0]
    residual = float(np.max(np.abs(target - design @ coefficients)))

    return DecayFit(
        mu=mu,
        nu=nu,
        fitted_exponent=float(coefficients[0]),
        residual=residual,
        exponent_plus=exponent_plus,
        exponent_minus=exponent_minus,
        t_fit=float(t_fit),
        samples=count,
    )
