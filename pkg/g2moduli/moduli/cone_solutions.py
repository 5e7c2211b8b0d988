"""Explicit straight-line solutions of the conical system.

The segment f- = 0 from the flat origin to the nearly-Kähler point is solved by
f+ = 2t^2 / (1 + 3t^2); its two images under the order-three rotation connect
the other flat points to the nearly-Kähler point.
"""

from typing import Callable, List, Sequence, Tuple

import numpy as np

from g2moduli.exceptions import DomainError
from g2moduli.instantons.instanton_system import (
    SQRT3,
    InstantonState,
    from_shifted,
    rhs_cone,
    rotate_cone,
    to_shifted,
)


def cone_line_solution(t: float) -> InstantonState:
    if t <= 0.0:
        raise DomainError(f"cone time t={t} must be positive")
    return InstantonState(2.0 * t * t / (1.0 + 3.0 * t * t), 0.0)


def cone_line_derivative(t: float) -> InstantonState:
    return InstantonState(4.0 * t / (1.0 + 3.0 * t * t) ** 2, 0.0)


def _rotate_vector(v: Tuple[float, float]) -> InstantonState:
    # tangent vectors convert without the 2/3 shift
    shifted = rotate_cone((v[0], v[1] / SQRT3))
    return InstantonState(shifted[0], SQRT3 * shifted[1])


def cone_line_images(t: float) -> List[Tuple[InstantonState, InstantonState]]:
    """(state, derivative) of the line solution and its two rotated images."""
    state = cone_line_solution(t)
    velocity = cone_line_derivative(t)
    images = [(state, velocity)]
    shifted = to_shifted(state)
    for _ in range(2):
        shifted = rotate_cone(shifted)
        velocity = _rotate_vector(velocity)
        images.append((from_shifted(shifted), velocity))
    return images


def cone_line_residual(times: Sequence[float] = None, cone_rhs: Callable = rhs_cone) -> float:
    """Largest |d/dt s - cone_rhs(t, s)| over the three line solutions."""
    if times is None:
        times = np.geomspace(0.01, 100.0, 200)
    worst = 0.0
    for t in times:
        for state, velocity in cone_line_images(float(t)):
            field = cone_rhs(float(t), state)
            worst = max(worst, abs(velocity[0] - field[0]), abs(velocity[1] - field[1]))
    return worst
