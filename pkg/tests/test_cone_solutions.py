import numpy as np
import pytest

from g2moduli.exceptions import DomainError
from g2moduli.instantons.instanton_system import InstantonState, critical_points, rhs_cone
from g2moduli.moduli.cone_solutions import cone_line_images, cone_line_residual, cone_line_solution


def test_line_solution_endpoints():
    assert cone_line_solution(1e-8).f_plus == pytest.approx(0.0, abs=1e-15)
    assert cone_line_solution(1e8).f_plus == pytest.approx(2.0 / 3.0, rel=1e-12)
    assert cone_line_solution(1.0) == (0.5, 0.0)
    with pytest.raises(DomainError):
        cone_line_solution(0.0)


def test_images_connect_flat_points_to_nearly_kahler():
    early = [state for state, _ in cone_line_images(1e-9)]
    late = [state for state, _ in cone_line_images(1e9)]
    flats = [point.state for point in critical_points() if point.kind.is_flat]
    for state in early:
        assert min(max(abs(state[0] - f[0]), abs(state[1] - f[1])) for f in flats) < 1e-12
    for state in late:
        assert state == pytest.approx((2.0 / 3.0, 0.0), abs=1e-12)


def test_line_solutions_solve_cone_system():
    assert cone_line_residual() < 1e-10
    assert cone_line_residual(np.geomspace(0.1, 10.0, 20)) < 1e-10


def test_sign_flipped_field_is_detected():
    def flipped(t, s):
        value = rhs_cone(t, s)
        return InstantonState(-value[0], -value[1])

    assert cone_line_residual(cone_rhs=flipped) > 1e-2
