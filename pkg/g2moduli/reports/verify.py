"""Invariant Suite: every numerical claim the library relies on, as PASS/FAIL checks.

Each check is a small rule with a measured value and a threshold. A check that
raises is recorded as FAIL with the error and the suite keeps going.

Usage:
    from g2moduli.reports.verify import run_checks

    report = run_checks()
    report.passed            # False if any check failed
    report.to_dict()         # JSON-ready
"""

import logging
import math
import os
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from g2moduli.config import resolve_config, section
from g2moduli.dynamics.regions import H_MINUS, R_INFINITY, R_ZERO
from g2moduli.dynamics.trajectory_engine import Termination, TrajectoryEngine, check_region_invariance, coupled_r_error
from g2moduli.exceptions import UnsupportedWeightError
from g2moduli.geometry.bs_metric import (
    BRYANT_SALAMON,
    CONE,
    MetricSample,
    dr_dt,
    hitchin_potential_residual,
    hitchin_residual,
    metric_at_r,
    r_of_t,
    t_of_r,
)
from g2moduli.instantons import instanton_system as system
from g2moduli.instantons.local_families import (
    Family,
    clarke_closed_form,
    closed_form_derivative,
    lotay_oliveira_closed_form,
    seed_jet,
    t_gamma_series,
    tprime_series,
)
from g2moduli.moduli.boundary import BoundaryLocator
from g2moduli.moduli.classifier import ModuliClassifier, Outcome
from g2moduli.moduli.cone_solutions import cone_line_residual
from g2moduli.moduli.index_table import index_lookup
from g2moduli.moduli.scanner import ParameterScanner
from g2moduli.reports.writers import write_json

logger = logging.getLogger(__name__)

OVERRIDABLE = ("rhs_full", "rhs_cone", "rhs_autonomous")


@dataclass
class CheckResult:
    name: str
    description: str
    passed: bool
    value: Optional[float] = None
    threshold: Optional[str] = None
    detail: str = ""

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "description": self.description,
            "status": self.status,
            "value": self.value,
            "threshold": self.threshold,
            "detail": self.detail,
        }


@dataclass
class VerifyReport:
    results: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def failures(self) -> List[CheckResult]:
        return [result for result in self.results if not result.passed]

    def get(self, name: str) -> CheckResult:
        for result in self.results:
            if result.name == name:
                return result
        raise KeyError(name)

    def to_dict(self) -> Dict:
        return {
            "passed": self.passed,
            "total": len(self.results),
            "failed": len(self.failures),
            "checks": [result.to_dict() for result in self.results],
        }


_REGISTRY: List[tuple] = []


def check(name: str, description: str):
    """Register a suite method as a named check."""

    def wrap(method):
        _REGISTRY.append((name, description, method))
        return method

    return wrap


def check_names() -> List[str]:
    return [name for name, _, _ in _REGISTRY]


class InvariantSuite:
    """Runs registered checks against the library, with optional function overrides.

    ``overrides`` replaces ``rhs_full``, ``rhs_cone`` or ``rhs_autonomous`` in the
    residual-style checks, so a deliberately broken field can be shown to fail.
    """

    def __init__(self, config: dict = None, overrides: Optional[Dict[str, Callable]] = None):
        self.config = config or {}
        unknown = set(overrides or {}) - set(OVERRIDABLE)
        if unknown:
            raise ValueError(f"cannot override {sorted(unknown)}; choose from {OVERRIDABLE}")
        self.fns = {name: getattr(system, name) for name in OVERRIDABLE}
        self.fns.update(overrides or {})
        self.engine = TrajectoryEngine(self.config)
        self.classifier = ModuliClassifier(self.config)
        self._scan = None

    def run(self, only: Optional[Sequence[str]] = None) -> VerifyReport:
        report = VerifyReport()
        for name, description, method in _REGISTRY:
            if only is not None and name not in only:
                continue
            try:
                result = method(self)
                result.name, result.description = name, description
            except Exception as e:  # a crashing check is a failing check
                logger.exception("check %s raised", name)
                result = CheckResult(name, description, False, detail=f"{type(e).__name__}: {e}")
            logger.info("%s %s %s", result.status, name, result.detail)
            report.results.append(result)
        return report

    # ----- helpers -----

    @staticmethod
    def _result(passed: bool, value: float, threshold: str, detail: str = "") -> CheckResult:
        return CheckResult("", "", bool(passed), float(value), threshold, detail)

    def _integrate(self, family: Family, parameter: float, **kwargs):
        return self.engine.integrate(seed_jet(family, parameter), **kwargs)

    def _tprime_scan(self):
        if self._scan is None:
            scanner = ParameterScanner(self.config, log_runs=False)
            self._scan = scanner.scan_grid(Family.TPRIME)
        return self._scan

    def _full_minus_cone(self, r: float, s) -> float:
        sample = metric_at_r(r)
        t = t_of_r(r)
        full = self.fns["rhs_full"](t, s, sample.with_t(t))
        cone = self.fns["rhs_cone"](r, s)
        return max(abs(full[0] - cone[0]), abs(full[1] - cone[1]))

    # ----- metric -----

    @check("metric_hitchin_residual", "closed-form A, B solve the Hitchin flow (r in [1.1, 100], h = 1e-5)")
    def metric_hitchin(self) -> CheckResult:
        h = section(self.config, "metric")["fd_step"]
        worst = 0.0
        for r in np.geomspace(1.1, 100.0, 200):
            res_a, res_b = hitchin_residual(metric_at_r(float(r)), h, BRYANT_SALAMON)
            worst = max(worst, abs(res_a), abs(res_b))
        return self._result(worst < 1e-8, worst, "< 1e-8")

    @check("metric_cone_residual", "the cone pair (t/3, t/sqrt3) solves the Hitchin flow")
    def metric_cone(self) -> CheckResult:
        worst = 0.0
        for r in np.geomspace(1.1, 100.0, 50):
            r = float(r)
            sample = MetricSample(r=r, A=r / 3.0, B=r / math.sqrt(3.0), t=r)
            res_a, res_b = hitchin_residual(sample, 1e-5, CONE)
            worst = max(worst, abs(res_a), abs(res_b))
        return self._result(worst < 1e-8, worst, "< 1e-8 (rounding)")

    @check("metric_potential_residual", "4 a'^6 = 3a^4 - 8pa^3 + 6p^2a^2 - p^4 with p constant")
    def metric_potentials(self) -> CheckResult:
        worst_eq, worst_dp = 0.0, 0.0
        for r in np.geomspace(1.01, 100.0, 200):
            residual, dp = hitchin_potential_residual(float(r))
            worst_eq = max(worst_eq, abs(residual))
            worst_dp = max(worst_dp, abs(dp))
        detail = f"relative residual {worst_eq:.2e}, max |dp/dr| {worst_dp:.2e}"
        return self._result(worst_eq < 1e-8 and worst_dp < 1e-8, max(worst_eq, worst_dp), "< 1e-8", detail)

    # ----- instanton system -----

    @check("closed_form_residuals", "Clarke (gamma = 0.1, 1, 10) and Lotay-Oliveira solve the full system")
    def closed_forms(self) -> CheckResult:
        worst = 0.0
        for r in np.geomspace(1.01, 100.0, 200):
            r = float(r)
            sample = metric_at_r(r)
            t = t_of_r(r)
            members = [(g, clarke_closed_form(g, r).state) for g in (0.1, 1.0, 10.0)]
            members.append((None, lotay_oliveira_closed_form(r)))
            for gamma, state in members:
                derivative = closed_form_derivative(gamma, r) * dr_dt(r)
                rhs = self.fns["rhs_full"](t, state, sample.with_t(t))
                worst = max(worst, abs(derivative - rhs[0]), abs(rhs[1]))
        return self._result(worst < 1e-8, worst, "< 1e-8")

    @check("cone_zero_set", "rhs_cone vanishes exactly at the four critical points and nowhere else in [-2, 2]^2")
    def cone_zero_set(self) -> CheckResult:
        field_at = lambda s: np.asarray(self.fns["rhs_cone"](1.0, s), dtype=float)
        at_points = max(np.max(np.abs(field_at(p.state))) for p in system.critical_points())
        grid = np.linspace(-2.0, 2.0, 81)
        values = np.array([[field_at((x, y)) for x in grid] for y in grid])
        roots = []
        for i in range(len(grid) - 1):
            for j in range(len(grid) - 1):
                cell = values[i:i + 2, j:j + 2].reshape(4, 2)
                if np.all(np.ptp(np.sign(cell), axis=0) > 0) or np.any(np.all(cell == 0.0, axis=1)):
                    guess = ((grid[j] + grid[j + 1]) / 2, (grid[i] + grid[i + 1]) / 2)
                    solution = optimize.root(field_at, guess, tol=1e-14)
                    if solution.success:
                        roots.append(solution.x)
        known = np.array([p.state for p in system.critical_points()])
        stray = [root for root in roots if np.min(np.max(np.abs(known - root), axis=1)) > 1e-8
                 and np.max(np.abs(root)) <= 2.0]
        found = {int(np.argmin(np.max(np.abs(known - root), axis=1))) for root in roots
                 if np.min(np.max(np.abs(known - root), axis=1)) <= 1e-8}
        passed = at_points <= 1e-15 and not stray and len(found) == len(known)
        detail = f"{len(roots)} refined roots, {len(stray)} stray, {len(found)} critical points recovered"
        return self._result(passed, float(len(stray)), "0 stray zeros", detail)

    @check("linearization", "eigenvalues: flat points {2, -6}, nearly-Kähler point -2 (double)")
    def linearization(self) -> CheckResult:
        worst = 0.0
        for point in system.critical_points():
            expected = [-2.0, -2.0] if point.kind is system.CriticalKind.NEARLY_KAHLER else [-6.0, 2.0]
            eigenvalues = system.linearize(point).eigenvalues
            worst = max(worst, float(np.max(np.abs(eigenvalues - expected))))
        return self._result(worst < 1e-12, worst, "< 1e-12")

    @check("full_vs_cone_slope", "log-log slope of |rhs_full - rhs_cone| over r in [10, 1e3]")
    def full_vs_cone(self) -> CheckResult:
        slopes = []
        for state in ((0.9, 0.4), (0.5, -0.3), (1.2, 0.8)):
            radii = np.geomspace(10.0, 1e3, 25)
            gaps = np.array([self._full_minus_cone(float(r), state) for r in radii])
            slopes.append(float(np.polyfit(np.log(radii), np.log(gaps), 1)[0]))
        worst = max(slopes)
        return self._result(worst <= -3.9, worst, "<= -3.9", "slopes " + ", ".join(f"{s:.4f}" for s in slopes))

    @check("sign_structure", "f-' > 0 in R_INFINITY, f-' < 0 in R_ZERO, f+' > 0 on the wall f+ = 2/3")
    def sign_structure(self) -> CheckResult:
        violations = 0
        for r in np.geomspace(1.05, 1e3, 40):
            r = float(r)
            sample = metric_at_r(r)
            t = t_of_r(r)
            m = sample.with_t(t)
            for f_plus in np.linspace(1.05, 4.0, 8):
                for f_minus in np.linspace(1.05, 4.0, 8):
                    violations += self.fns["rhs_full"](t, (f_plus, f_minus), m)[1] <= 0.0
            for f_plus in np.linspace(0.67, 0.99, 8):
                for f_minus in np.linspace(0.05, 0.95, 8):
                    violations += self.fns["rhs_full"](t, (f_plus, f_minus), m)[1] >= 0.0
            for f_minus in np.linspace(0.05, 3.0, 8):
                violations += self.fns["rhs_full"](t, (2.0 / 3.0, f_minus), m)[0] <= 0.0
        return self._result(violations == 0, float(violations), "0 violations")

    @check("symmetry_suite", "reflection and order-three rotation act as symmetries of the fields")
    def symmetries(self) -> CheckResult:
        rhs_cone = self.fns["rhs_cone"]
        rhs_autonomous = self.fns["rhs_autonomous"]
        errors = []
        s = (0.9, 0.4)
        errors.append(np.max(np.abs(np.subtract(rhs_cone(1.0, system.reflect(s)), system.reflect(rhs_cone(1.0, s))))))
        g = (0.2, -0.1)
        lhs = system.rotate_cone(rhs_autonomous(g))
        rhs = rhs_autonomous(system.rotate_cone(g))
        errors.append(np.max(np.abs(np.subtract(lhs, rhs))))
        thrice = system.rotate_cone(system.rotate_cone(system.rotate_cone(g)))
        errors.append(np.max(np.abs(np.subtract(thrice, g))))
        orbit = system.s3_orbit(system.to_shifted((0.0, 0.0)))
        flats = [system.to_shifted(p.state) for p in system.flat_points()]
        errors.append(max(min(np.max(np.abs(np.subtract(item, flat))) for flat in flats) for item in orbit))
        errors.append(max(np.max(np.abs(item)) for item in system.s3_orbit((0.0, 0.0))))
        worst = float(max(errors))
        return self._result(worst < 1e-14, worst, "< 1e-14")

    @check("cone_line_residual", "the straight-line cone solution and its two images solve rhs_cone")
    def cone_lines(self) -> CheckResult:
        residual = cone_line_residual(cone_rhs=self.fns["rhs_cone"])
        return self._result(residual < 1e-10, residual, "< 1e-10")

    # ----- local families -----

    @check("series_order_of_contact", "truncated series meet the exact solutions to order t^4 (halving slope)")
    def series_contact(self) -> CheckResult:
        def error_tprime(t):
            return abs(tprime_series(0.0, t).f_plus - lotay_oliveira_closed_form(r_of_t(t)).f_plus)

        def error_tgamma(t):
            return abs(t_gamma_series(1.0, t).f_plus - clarke_closed_form(1.0, r_of_t(t)).state.f_plus)

        slopes = []
        for error in (error_tprime, error_tgamma):
            for t in (0.04, 0.02):
                slopes.append(math.log2(error(t) / error(t / 2.0)))
        worst = min(slopes)
        return self._result(worst >= 3.8, worst, ">= 3.8", "slopes " + ", ".join(f"{s:.3f}" for s in slopes))

    @check("series_reflection", "tprime_series(-g', t) = reflect(tprime_series(g', t)) exactly")
    def series_reflection(self) -> CheckResult:
        mismatches = 0
        for gamma_prime in np.linspace(-1.5, 1.5, 31):
            for t in (0.0, 0.01, 0.05):
                mismatches += tprime_series(-gamma_prime, t) != system.reflect(tprime_series(gamma_prime, t))
        return self._result(mismatches == 0, float(mismatches), "0 mismatches")

    # ----- trajectories -----

    @check("trajectory_vs_oracle", "T' gamma' = 0 from t0 = 1e-2 matches the Lotay-Oliveira solution to t = 1e3")
    def trajectory_oracle(self) -> CheckResult:
        trajectory = self._integrate(Family.TPRIME, 0.0, t0=1e-2, t_max=1e3, rtol=1e-10)
        exact = np.array([lotay_oliveira_closed_form(float(r)).f_plus for r in trajectory.r])
        error = float(max(np.max(np.abs(trajectory.f_plus - exact)), np.max(np.abs(trajectory.f_minus))))
        return self._result(error < 1e-6 and trajectory.t_end == 1e3, error, "< 1e-6")

    @check("reflection_equivariance", "integrating the reflected seed gives the reflected trajectory bitwise")
    def reflection_equivariance(self) -> CheckResult:
        mismatches = 0
        for gamma_prime in (0.5, 1.05):
            up = self._integrate(Family.TPRIME, gamma_prime, t_max=200.0)
            down = self._integrate(Family.TPRIME, -gamma_prime, t_max=200.0)
            same = (
                np.array_equal(up.t, down.t)
                and np.array_equal(up.r, down.r)
                and np.array_equal(up.f_plus, down.f_plus)
                and np.array_equal(up.f_minus, -down.f_minus)
            )
            mismatches += not same
        return self._result(mismatches == 0, float(mismatches), "bitwise equal")

    @check("region_invariance", "R_ZERO (gamma' = 0.5), R_INFINITY (gamma' = 1.2), H_MINUS (gamma' = -0.5) are never left")
    def region_invariance(self) -> CheckResult:
        band = section(self.config, "events")["invariance_band"]
        cases = ((0.5, R_ZERO), (1.2, R_INFINITY), (-0.5, H_MINUS))
        details, exits = [], 0
        for gamma_prime, region in cases:
            report = check_region_invariance(self._integrate(Family.TPRIME, gamma_prime), region, band)
            exits += len(report.exits) + (not report.entered)
            details.append(f"{region.name}: entered {report.entered_at}, exits {len(report.exits)}")
        return self._result(exits == 0, float(exits), "0 exits", "; ".join(details))

    @check("tolerance_convergence", "halving rtol moves the endpoint by less than 10x the smaller rtol")
    def tolerance_convergence(self) -> CheckResult:
        coarse = self._integrate(Family.TPRIME, 0.5, t_max=100.0, rtol=1e-8)
        fine = self._integrate(Family.TPRIME, 0.5, t_max=100.0, rtol=5e-9)
        change = float(np.max(np.abs(np.subtract(coarse.final_state, fine.final_state))))
        return self._result(change < 10 * 5e-9, change, "< 5e-8")

    @check("coupled_radius", "evolved r agrees with r_of_t at the final time")
    def coupled_radius(self) -> CheckResult:
        trajectory = self._integrate(Family.TPRIME, 0.0, t_max=1e3)
        relative = coupled_r_error(trajectory) / float(trajectory.r[-1])
        return self._result(relative < 10 * trajectory.rtol, relative, "< 10 rtol (relative)")

    # ----- moduli -----

    @check("tprime_trichotomy", "T' grid: ConvergesToNK for |g'| < 1, Flat at +-1, BlowUp beyond")
    def tprime_trichotomy(self) -> CheckResult:
        wrong = []
        for record in self._tprime_scan():
            p = record.parameter
            expected = Outcome.CONVERGES_TO_NK if abs(p) < 1 else Outcome.FLAT if abs(p) == 1 else Outcome.BLOW_UP
            if record.outcome is not expected:
                wrong.append(f"{p:g}:{record.outcome.value}")
        return self._result(not wrong, float(len(wrong)), "0 misclassified", ", ".join(wrong[:10]))

    @check("classification_reflection", "classify(T', g') and classify(T', -g') agree with nu -> -nu")
    def classification_reflection(self) -> CheckResult:
        by_parameter = {record.parameter: record for record in self._tprime_scan()}
        mismatches = 0
        for p, record in by_parameter.items():
            if p > 0 and -p in by_parameter:
                mismatches += not record.reflected_matches(by_parameter[-p], tol=1e-12)
        return self._result(mismatches == 0, float(mismatches), "0 mismatches")

    @check("decay_rates", "ConvergesToNK exponents in [-2.05, -1.95], residual < 0.05, connection rate -3 +- 0.05")
    def decay_rates(self) -> CheckResult:
        records = [r for r in self._tprime_scan() if r.outcome is Outcome.CONVERGES_TO_NK]
        for gamma in (0.25, 0.5, 1.0):
            records.append(self.classifier.classify(self._integrate(Family.T_GAMMA, gamma)))
        bad = []
        worst = 0.0
        for record in records:
            if record.outcome is not Outcome.CONVERGES_TO_NK:
                bad.append(f"{record.family.value} {record.parameter:g}: {record.outcome.value}")
                continue
            worst = max(worst, abs(record.fitted_exponent + 2.0))
            if (
                abs(record.fitted_exponent + 2.0) > 0.05
                or record.residual >= 0.05
                or abs(record.connection_rate + 3.0) > 0.05
            ):
                bad.append(f"{record.family.value} {record.parameter:g}: exponent {record.fitted_exponent:.4f}")
            if record.family is Family.T_GAMMA and (record.nu != 0.0 or record.mu == 0.0):
                bad.append(f"tgamma {record.parameter:g}: mu {record.mu}, nu {record.nu}")
        gamma_zero = next((r for r in records if r.family is Family.TPRIME and r.parameter == 0.0), None)
        detail = ""
        if gamma_zero is not None:
            detail = (
                f"T'_0: mu {gamma_zero.mu:.6f}, exponent {gamma_zero.fitted_exponent:.4f}, "
                f"connection rate {gamma_zero.connection_rate:.4f}"
            )
        if bad:
            detail = "; ".join(bad[:10])
        return self._result(not bad, worst, "|exponent + 2| <= 0.05", detail)

    @check("tprime_boundary", "T' boundary at +1 and, by reflection, -1 within 1e-3")
    def tprime_boundary(self) -> CheckResult:
        locator = BoundaryLocator(self.config, self.engine)
        upper = locator.locate(Family.TPRIME, (0.5, 1.5), 1e-3).gamma_crit
        lower = locator.locate(Family.TPRIME, (-1.5, -0.5), 1e-3).gamma_crit
        error = max(abs(upper - 1.0), abs(lower + 1.0))
        return self._result(error <= 1e-3, error, "<= 1e-3", f"boundaries {lower:.6f}, {upper:.6f}")

    @check("tgamma_boundary", "T_gamma boundary at 0 within 1e-3; gamma = -0.05 breaks down")
    def tgamma_boundary(self) -> CheckResult:
        locator = BoundaryLocator(self.config, self.engine)
        boundary = locator.locate(Family.T_GAMMA, (-0.2, 0.2), 1e-3).gamma_crit
        negative = self._integrate(Family.T_GAMMA, -0.05)
        escaped = negative.termination is Termination.ESCAPED
        detail = f"boundary {boundary:.6f}; gamma=-0.05 {negative.termination.value} at t={negative.t_end:.4f}"
        return self._result(abs(boundary) <= 1e-3 and escaped, abs(boundary), "<= 1e-3", detail)

    @check("index_table", "index +1 on (-2, 0), -1 on (-4, -2), error at -2")
    def index_table(self) -> CheckResult:
        ok = index_lookup(-1.0) == 1 and index_lookup(-3.0) == -1
        try:
            index_lookup(-2.0)
            ok = False
        except UnsupportedWeightError:
            pass
        return self._result(ok, 0.0 if ok else 1.0, "exact")


def run_checks(
    overrides: Optional[Dict[str, Callable]] = None,
    config: dict = None,
    only: Optional[Sequence[str]] = None,
) -> VerifyReport:
    return InvariantSuite(config, overrides).run(only)


def cmd_verify(
    config: dict = None,
    out: Optional[str] = None,
    only: Optional[Sequence[str]] = None,
    overrides: Optional[Dict[str, Callable]] = None,
) -> Tuple[int, VerifyReport]:
    """Run the suite and write the JSON report.

    Returns:
        (exit code, report): 0 when every check passed, 1 otherwise
    """
    config = config or {}
    out = out or os.path.join(resolve_config(config)["results_dir"], "verify_report.json")
    report = run_checks(overrides, config, only)
    write_json(report.to_dict(), out)
    if not report.passed:
        logger.warning("%d of %d checks failed", len(report.failures), len(report.results))
    return (0 if report.passed else 1), report
