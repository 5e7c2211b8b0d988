import math

import numpy as np
import pytest

from g2moduli.dynamics.regions import H_MINUS, H_PLUS, R_INFINITY, R_ZERO, resolve_regions
from g2moduli.dynamics.trajectory_engine import (
    EventSpec,
    Termination,
    TrajectoryEngine,
    check_region_invariance,
    coupled_r_error,
    integrate,
    output_grid,
)
from g2moduli.exceptions import ConfigError, DomainError
from g2moduli.geometry.bs_metric import t_of_r
from g2moduli.instantons.local_families import Family, clarke_closed_form, lotay_oliveira_closed_form, seed_jet


def test_region_membership():
    assert R_ZERO.contains(0.8, 0.5)
    assert not R_ZERO.contains(1.0, 0.5)
    assert R_ZERO.contains(1.0, 0.5, band=1e-6)
    assert R_INFINITY.contains(2.0, 5.0)
    assert H_PLUS.contains(-3.0, 0.1) and not H_PLUS.contains(-3.0, -0.1)
    assert H_MINUS.contains(0.0, -1e-3)
    assert R_ZERO.distance_outside(0.8, 0.5) == 0.0
    assert R_ZERO.distance_outside(1.25, 0.5) == pytest.approx(0.25)
    mask = R_ZERO.mask(np.array([0.8, 1.2]), np.array([0.5, 0.5]))
    assert mask.tolist() == [True, False]


def test_resolve_regions():
    assert [r.name for r in resolve_regions(["r_zero", "H_MINUS"])] == ["R_ZERO", "H_MINUS"]
    with pytest.raises(ConfigError):
        resolve_regions(["R_ONE"])


def test_event_spec_validation():
    with pytest.raises(ConfigError):
        EventSpec(escape_threshold=5.0)
    with pytest.raises(ConfigError):
        EventSpec(convergence_radius=0.0)
    spec = EventSpec.from_config({"events": {"convergence_radius": 1e-2}})
    assert spec.convergence_radius == 1e-2
    assert spec.escape_threshold == 1e3
    assert spec.in_ball(2.0 / 3.0 + 5e-3, 0.0)


def test_output_grid_lands_on_decades():
    grid = output_grid(1e-2, 1e3, 100)
    assert grid[0] > 1e-2 and grid[-1] < 1e3
    assert len(grid) == 499
    assert 1.0 in grid and 100.0 in grid
    assert np.all(np.diff(grid) > 0.0)


def test_engine_rejects_bad_arguments(engine):
    seed = seed_jet(Family.TPRIME, 0.5)
    with pytest.raises(DomainError):
        engine.integrate(seed, t0=0.0)
    with pytest.raises(DomainError):
        engine.integrate(seed, t0=0.2)
    with pytest.raises(DomainError):
        engine.integrate(seed, t_max=1e-3)
    with pytest.raises(DomainError):
        engine.integrate(seed, rtol=1e-2)
    with pytest.raises(ConfigError):
        TrajectoryEngine({"integrator": {"method": "Euler"}})


def test_trajectory_matches_lotay_oliveira(tprime_zero):
    assert tprime_zero.termination is Termination.CONVERGED
    assert tprime_zero.t_end == 1e3
    assert tprime_zero.t[0] == 1e-2
    exact = np.array([lotay_oliveira_closed_form(float(r)).f_plus for r in tprime_zero.r])
    assert np.max(np.abs(tprime_zero.f_plus - exact)) < 1e-6
    assert np.all(tprime_zero.f_minus == 0.0)


def test_trajectory_matches_clarke():
    trajectory = integrate(seed_jet(Family.T_GAMMA, 1.0), t0=1e-3, t_max=100.0)
    exact = np.array([clarke_closed_form(1.0, float(r)).state.f_plus for r in trajectory.r])
    assert np.max(np.abs(trajectory.f_plus - exact)) < 1e-5
    assert np.all(trajectory.f_minus == 0.0)


def test_samples_on_log_grid(tprime_zero):
    t = tprime_zero.t
    assert np.all(np.diff(t) > 0.0)
    assert len(tprime_zero) == len(output_grid(1e-2, 1e3, 100)) + 2
    frame = tprime_zero.to_frame()
    assert list(frame.columns) == ["t", "r", "f_plus", "f_minus"]


def test_coupled_radius_tracks_geodesic_time(tprime_zero):
    relative = coupled_r_error(tprime_zero) / float(tprime_zero.r[-1])
    assert relative < 10 * tprime_zero.rtol


def test_flat_members_stay_constant(engine):
    for family, parameter, state in [
        (Family.TPRIME, 1.0, (1.0, 1.0)),
        (Family.TPRIME, -1.0, (1.0, -1.0)),
        (Family.T_GAMMA, 0.0, (0.0, 0.0)),
    ]:
        trajectory = engine.integrate(seed_jet(family, parameter), t_max=100.0)
        assert trajectory.termination is Termination.REACHED_T_MAX
        assert np.all(trajectory.f_plus == state[0])
        assert np.all(trajectory.f_minus == state[1])


def test_escape_detected(tprime_escape):
    assert tprime_escape.termination is Termination.ESCAPED
    assert tprime_escape.t_escape is not None
    assert tprime_escape.t_end == tprime_escape.t_escape < 1e3
    final = tprime_escape.final_state
    assert max(abs(final.f_plus), abs(final.f_minus)) == pytest.approx(1e3, rel=1e-6)


def test_negative_gamma_breaks_down_at_closed_form_pole(engine):
    trajectory = engine.integrate(seed_jet(Family.T_GAMMA, -0.5), t0=1e-3)
    assert trajectory.termination is Termination.ESCAPED
    # the closed form's denominator vanishes at r = 2
    assert trajectory.t_escape == pytest.approx(t_of_r(2.0), abs=5e-3)
    assert trajectory.t_escape < t_of_r(2.0)


def test_reflected_seed_gives_reflected_trajectory(engine):
    for gamma_prime in (0.5, 1.05):
        up = engine.integrate(seed_jet(Family.TPRIME, gamma_prime), t_max=200.0)
        down = engine.integrate(seed_jet(Family.TPRIME, -gamma_prime), t_max=200.0)
        np.testing.assert_array_equal(up.t, down.t)
        np.testing.assert_array_equal(up.f_plus, down.f_plus)
        np.testing.assert_array_equal(up.f_minus, -down.f_minus)
        assert up.termination is down.termination


def test_region_invariance(tprime_half, tprime_escape, engine):
    report = check_region_invariance(tprime_half, R_ZERO, 1e-9)
    assert report.entered and report.invariant
    assert report.entered_at < 0.1

    report = check_region_invariance(tprime_escape, R_INFINITY, 1e-9)
    assert report.entered and report.invariant

    lower = engine.integrate(seed_jet(Family.TPRIME, -0.5))
    report = check_region_invariance(lower, H_MINUS, 1e-9)
    assert report.entered and report.invariant
    assert report.to_dict()["invariant"] is True


def test_region_crossings_recorded(tprime_half):
    names = {(c.region, c.kind) for c in tprime_half.crossings}
    assert ("R_ZERO", "enter") in names
    assert ("R_ZERO", "exit") not in names
    assert ("H_PLUS", "enter") in names


def test_convergence_time_recorded(tprime_half):
    assert tprime_half.termination is Termination.CONVERGED
    assert tprime_half.converged_at is not None
    assert 50.0 <= tprime_half.converged_at <= 1e3


def test_stop_on_convergence(engine):
    events = EventSpec(stop_on_convergence=True)
    trajectory = engine.integrate(seed_jet(Family.TPRIME, 0.0), events=events)
    assert trajectory.termination is Termination.CONVERGED
    assert trajectory.t_end == trajectory.converged_at
    assert trajectory.t_end < 1e3


def test_tolerance_halving_moves_endpoint_little(engine):
    seed = seed_jet(Family.TPRIME, 0.5)
    coarse = engine.integrate(seed, t_max=100.0, rtol=1e-8)
    fine = engine.integrate(seed, t_max=100.0, rtol=5e-9)
    change = max(abs(a - b) for a, b in zip(coarse.final_state, fine.final_state))
    assert change < 5e-8


def test_step_budget_exhaustion_is_step_failure():
    engine = TrajectoryEngine({"integrator": {"max_steps": 5}})
    trajectory = engine.integrate(seed_jet(Family.TPRIME, 0.5))
    assert trajectory.termination is Termination.STEP_FAILURE
    assert "max_steps" in trajectory.message
    assert math.isfinite(trajectory.t_end)


def test_summary_fields(tprime_half):
    summary = tprime_half.summary()
    assert summary["family"] == "tprime"
    assert summary["parameter"] == 0.5
    assert summary["termination"] == "Converged"
    assert summary["steps"] > 0
