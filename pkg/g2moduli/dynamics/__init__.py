from .regions import H_MINUS, H_PLUS, R_INFINITY, R_ZERO, Region
from .trajectory_engine import EventSpec, Termination, Trajectory, TrajectoryEngine, integrate

__all__ = [
    "H_MINUS",
    "H_PLUS",
    "R_INFINITY",
    "R_ZERO",
    "Region",
    "EventSpec",
    "Termination",
    "Trajectory",
    "TrajectoryEngine",
    "integrate",
]
