import math

import numpy as np
import pytest

from g2moduli.exceptions import DomainError, SingularPointError
from g2moduli.geometry.bs_metric import metric_at_r, t_of_r
from g2moduli.instantons.instanton_system import (
    NK_F_PLUS,
    CriticalKind,
    InstantonState,
    critical_point_table,
    critical_points,
    flat_points,
    from_shifted,
    full_vs_cone_gap,
    full_vs_cone_slope,
    linearize,
    reflect,
    rhs_autonomous,
    rhs_cone,
    rhs_full,
    rotate_cone,
    s3_orbit,
    to_shifted,
)


def _metric(r):
    t = t_of_r(r)
    return t, metric_at_r(r).with_t(t)


def test_critical_points_order_and_kinds():
    points = critical_points()
    assert [p.kind for p in points] == [
        CriticalKind.FLAT_ORIGIN,
        CriticalKind.FLAT_PLUS_PLUS,
        CriticalKind.FLAT_PLUS_MINUS,
        CriticalKind.NEARLY_KAHLER,
    ]
    assert [tuple(p.state) for p in points[:3]] == [(0.0, 0.0), (1.0, 1.0), (1.0, -1.0)]
    assert points[3].state == (NK_F_PLUS, 0.0)
    assert len(flat_points()) == 3
    assert not CriticalKind.NEARLY_KAHLER.is_flat


def test_rhs_cone_vanishes_at_critical_points():
    for point in critical_points():
        value = rhs_cone(1.0, point.state)
        assert max(abs(value[0]), abs(value[1])) <= 1e-15


def test_rhs_cone_off_critical_point():
    value = rhs_cone(2.0, (0.5, 0.5))
    # (2 f+ - 3 f+^2 + f-^2) / t, 6 f- (f+ - 1) / t
    assert value == pytest.approx((0.25, -0.75), abs=1e-15)


def test_rhs_cone_singular_at_zero():
    with pytest.raises(SingularPointError):
        rhs_cone(0.0, (0.5, 0.5))


def test_rhs_full_flat_points_exactly_zero():
    for r in (1.01, 2.0, 50.0):
        t, m = _metric(r)
        for point in flat_points():
            assert rhs_full(t, point.state, m) == (0.0, 0.0)


def test_rhs_full_guards_domain():
    _, m = _metric(2.0)
    with pytest.raises(DomainError):
        rhs_full(0.0, (0.5, 0.5), m)
    with pytest.raises(SingularPointError):
        rhs_full(0.1, (0.5, 0.5), metric_at_r(1.0))


def test_rhs_full_reflection_symmetry():
    t, m = _metric(3.0)
    s = (0.8, 0.3)
    assert rhs_full(t, reflect(s), m) == reflect(rhs_full(t, s, m))


def test_sign_structure():
    t, m = _metric(5.0)
    # f-' > 0 in R_INFINITY, f-' < 0 in R_ZERO
    assert rhs_full(t, (1.5, 2.0), m).f_minus > 0.0
    assert rhs_full(t, (0.8, 0.5), m).f_minus < 0.0
    # f+' > 0 on the wall f+ = 2/3 away from f- = 0
    assert rhs_full(t, (2.0 / 3.0, 0.5), m).f_plus > 0.0


def test_shifted_coordinates_round_trip():
    s = InstantonState(0.9, -0.4)
    g = to_shifted(s)
    assert g == pytest.approx((0.9 - 2.0 / 3.0, -0.4 / math.sqrt(3.0)), abs=1e-15)
    assert from_shifted(g) == pytest.approx(tuple(s), abs=1e-15)
    assert to_shifted((NK_F_PLUS, 0.0)) == (0.0, 0.0)


def test_autonomous_field_matches_cone_field():
    for s in [(0.9, 0.4), (0.1, -0.7), (1.5, 1.2)]:
        t = 3.0
        g_dot = rhs_autonomous(to_shifted(s))
        f_dot = rhs_cone(t, s)
        # d/dtau = t d/dt, f+ = g+ + 2/3, f- = sqrt3 g-
        assert t * f_dot[0] == pytest.approx(g_dot[0], abs=1e-13)
        assert t * f_dot[1] == pytest.approx(math.sqrt(3.0) * g_dot[1], abs=1e-13)


def test_rotation_has_order_three():
    g = (0.2, -0.1)
    thrice = rotate_cone(rotate_cone(rotate_cone(g)))
    assert thrice == pytest.approx(g, abs=1e-14)


def test_rotation_is_a_symmetry_of_the_autonomous_field():
    for g in [(0.2, -0.1), (-0.5, 0.3), (0.7, 0.7)]:
        assert rotate_cone(rhs_autonomous(g)) == pytest.approx(rhs_autonomous(rotate_cone(g)), abs=1e-14)
        assert reflect(rhs_autonomous(g)) == rhs_autonomous(reflect(g))


def test_rotation_permutes_flat_points():
    flats = [to_shifted(p.state) for p in flat_points()]
    orbit = s3_orbit(to_shifted((0.0, 0.0)))
    assert len(orbit) == 6
    for image in orbit:
        assert min(max(abs(image[0] - f[0]), abs(image[1] - f[1])) for f in flats) < 1e-14
    assert all(item == (0.0, 0.0) for item in s3_orbit((0.0, 0.0)))


def test_linearization_eigenvalues():
    for point in critical_points():
        lin = linearize(point)
        if point.kind is CriticalKind.NEARLY_KAHLER:
            np.testing.assert_allclose(lin.eigenvalues, [-2.0, -2.0], atol=1e-12)
            assert lin.stable
        else:
            np.testing.assert_allclose(lin.eigenvalues, [-6.0, 2.0], atol=1e-12)
            assert not lin.stable


def test_critical_point_table():
    table = critical_point_table()
    assert set(table) == {kind.value for kind in CriticalKind}
    assert table["nearly_kahler"]["shifted"] == (0.0, 0.0)
    assert table["flat_origin"]["eigenvalues"] == pytest.approx([-6.0, 2.0], abs=1e-12)


def test_full_minus_cone_gap_decays_like_inverse_fourth_power():
    slope, _ = full_vs_cone_slope((0.9, 0.4), 10.0, 1e3, 25)
    assert slope == pytest.approx(-4.0, abs=0.05)
    assert full_vs_cone_gap(100.0, (0.9, 0.4)) < full_vs_cone_gap(10.0, (0.9, 0.4))


def test_full_rhs_at_nearly_kahler_point_is_not_stationary():
    t, m = _metric(2.0)
    value = rhs_full(t, (NK_F_PLUS, 0.0), m)
    # A^2/B^2 = (1 - r^-3)/3 reduces f+' to 2 r^-3 / (9A)
    assert value.f_plus == pytest.approx(0.0445436, abs=1e-7)
    assert value.f_plus == pytest.approx(2.0 * 2.0 ** -3 / (9.0 * m.A), rel=1e-12)
    assert value.f_minus == 0.0


@pytest.mark.parametrize("r", [1.05, 1.5, 3.0, 10.0, 100.0])
@pytest.mark.parametrize("s", [(0.9, 0.4), (-0.3, 1.7), (1.4, -0.8)])
def test_full_rhs_matches_instanton_equations_off_axis(r, s):
    t, m = _metric(r)
    f_plus, f_minus = s
    ratio = m.A ** 2 / m.B ** 2
    expected_plus = (f_plus / m.A) * (1.0 - ratio - f_plus) + f_minus ** 2 * m.A / m.B ** 2
    expected_minus = (2.0 * f_minus / m.A) * (f_plus - 1.0)
    value = rhs_full(t, s, m)
    assert value.f_plus == pytest.approx(expected_plus, rel=1e-12, abs=1e-12)
    assert value.f_minus == pytest.approx(expected_minus, rel=1e-12, abs=1e-12)
