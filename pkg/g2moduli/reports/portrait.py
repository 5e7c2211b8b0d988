"""Phase portrait of the conical system and the fan of T' solutions.

Everything is returned as data first (vector field grid, streamline polylines,
fan trajectories) and then drawn into one SVG. The left panel shows the
autonomous field in shifted coordinates with the four critical points; the
right panel shows T' solutions in (f+, f-) over the invariant regions R_ZERO and
R_INFINITY, together with the straight cone solution from the flat point (1, 1)
to the nearly-Kähler point that the converging members approach.
"""

import logging
import os
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import matplotlib
from matplotlib.figure import Figure
from matplotlib.patches import Rectangle
import numpy as np
import pandas as pd
from scipy.integrate import solve_ivp

from g2moduli.config import resolve_config, section
from g2moduli.dynamics.regions import R_INFINITY, R_ZERO, Region
from g2moduli.dynamics.trajectory_engine import TrajectoryEngine
from g2moduli.instantons.instanton_system import critical_points, rhs_autonomous, to_shifted
from g2moduli.instantons.local_families import Family, seed_jet
from g2moduli.moduli.cone_solutions import cone_line_images
from g2moduli.reports.writers import write_frame

logger = logging.getLogger(__name__)

_SVG_RC = {"svg.hashsalt": "g2moduli", "svg.fonttype": "none"}
_ESCAPE_FACTOR = 3.0


def axis_values(lo: float, hi: float, n: int) -> np.ndarray:
    # rounding makes symmetric windows exactly symmetric
    return np.round(np.linspace(lo, hi, n), 12)


def vector_field(window: Sequence[float], grid_points: int) -> pd.DataFrame:
    """rhs_autonomous on a grid_points x grid_points mesh of the shifted window."""
    xs = axis_values(window[0], window[1], grid_points)
    ys = axis_values(window[2], window[3], grid_points)
    rows = []
    for y in ys:
        for x in xs:
            dx, dy = rhs_autonomous((float(x), float(y)))
            rows.append((float(x), float(y), dx, dy))
    return pd.DataFrame(rows, columns=["g_plus", "g_minus", "dg_plus", "dg_minus"])


def streamlines(window: Sequence[float], seeds: int, steps: int, duration: float) -> pd.DataFrame:
    """Forward log-time integrations of rhs_autonomous from a seeds x seeds mesh.

    Each line has at most ``steps`` points and ends early once it leaves the
    window enlarged threefold.
    """
    xs = axis_values(window[0], window[1], seeds)
    ys = axis_values(window[2], window[3], seeds)
    limit = _ESCAPE_FACTOR * max(abs(value) for value in window)

    def leaves(tau, g):
        return limit - max(abs(g[0]), abs(g[1]))

    leaves.terminal = True
    leaves.direction = -1

    times = np.linspace(0.0, duration, steps)
    frames = []
    line = 0
    for y in ys:
        for x in xs:
            solution = solve_ivp(
                lambda tau, g: rhs_autonomous(g),
                (0.0, duration),
                [float(x), float(y)],
                method="RK45",
                t_eval=times,
                events=leaves,
                rtol=1e-8,
                atol=1e-10,
            )
            frames.append(pd.DataFrame({"line": line, "g_plus": solution.y[0], "g_minus": solution.y[1]}))
            line += 1
    return pd.concat(frames, ignore_index=True)


def tprime_fan(parameters: Sequence[float], config: Optional[Dict] = None) -> pd.DataFrame:
    """T' trajectories for each gamma' in ``parameters``."""
    engine = TrajectoryEngine(config)
    frames = []
    for gamma_prime in parameters:
        trajectory = engine.integrate(seed_jet(Family.TPRIME, gamma_prime))
        frame = trajectory.to_frame()[["t", "f_plus", "f_minus"]]
        frame.insert(0, "gamma_prime", float(gamma_prime))
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)


def limiting_line(times: Optional[Sequence[float]] = None) -> pd.DataFrame:
    """The rotated cone line solution running from (1, 1) to (2/3, 0)."""
    if times is None:
        times = np.geomspace(1e-4, 1e4, 200)
    rows = []
    for t in times:
        # the image starting near (1, 1) is the one with f- > 0
        state = next(s for s, _ in cone_line_images(float(t)) if s.f_minus > 0.0)
        rows.append((float(t), state.f_plus, state.f_minus))
    return pd.DataFrame(rows, columns=["t", "f_plus", "f_minus"])


def _shade(axes, region: Region, x_hi: float, y_hi: float, color: str):
    plus_lo, plus_hi, minus_lo, minus_hi = region.bounds()
    plus_hi = min(plus_hi, x_hi)
    minus_hi = min(minus_hi, y_hi)
    patch = Rectangle((plus_lo, minus_lo), plus_hi - plus_lo, minus_hi - minus_lo, color=color, alpha=0.15)
    patch.set_gid(f"region-{region.name}")
    axes.add_patch(patch)


def render_svg(
    field: pd.DataFrame,
    lines: pd.DataFrame,
    fan: pd.DataFrame,
    window: Sequence[float],
    path: str,
) -> str:
    figure = Figure(figsize=(11, 5))
    left, right = figure.subplots(1, 2)

    left.quiver(field["g_plus"], field["g_minus"], field["dg_plus"], field["dg_minus"],
                color="0.6", angles="xy", pivot="mid")
    for _, line in lines.groupby("line", sort=True):
        left.plot(line["g_plus"], line["g_minus"], color="tab:blue", linewidth=0.8)
    for point in critical_points():
        g = to_shifted(point.state)
        if window[0] <= g[0] <= window[1] and window[2] <= g[1] <= window[3]:
            color = "tab:red" if point.kind.is_flat else "tab:green"
            (marker,) = left.plot([g[0]], [g[1]], marker="o", markersize=8, color=color, linestyle="none")
            marker.set_gid(f"critical-point-{point.kind.value}")
    left.set_xlim(window[0], window[1])
    left.set_ylim(window[2], window[3])
    left.set_xlabel("g+")
    left.set_ylabel("g-")
    left.set_title("conical system (log time)")

    # R_INFINITY is unbounded; shade it up to the visible edge
    x_lo, x_hi = 0.5, 1.5
    y_lo = min(-0.25, max(float(fan["f_minus"].min()), -1.5) - 0.1)
    y_hi = 1.5
    _shade(right, R_ZERO, x_hi, y_hi, "tab:orange")
    _shade(right, R_INFINITY, x_hi, y_hi, "tab:purple")
    line = limiting_line()
    (limit,) = right.plot(line["f_plus"], line["f_minus"], color="black", linestyle="--", linewidth=1.0,
                          label="limiting line")
    limit.set_gid("limiting-line")
    for gamma_prime, member in fan.groupby("gamma_prime", sort=True):
        f_plus = member["f_plus"].to_numpy()
        f_minus = member["f_minus"].to_numpy()
        label = f"gamma'={gamma_prime:g}"
        if np.ptp(f_plus) == 0.0 and np.ptp(f_minus) == 0.0:
            right.plot([f_plus[0]], [f_minus[0]], marker="s", linestyle="none", label=label)
        else:
            right.plot(f_plus, f_minus, linewidth=1.0, label=label)
    right.set_xlim(x_lo, x_hi)
    right.set_ylim(y_lo, y_hi)
    right.set_xlabel("f+")
    right.set_ylabel("f-")
    right.set_title("T' solutions")
    right.legend(loc="upper left", fontsize="small")

    with matplotlib.rc_context(_SVG_RC):
        figure.savefig(path, format="svg", metadata={"Date": None})
    return path


@dataclass
class PortraitFiles:
    vector_field: str
    streamlines: str
    tprime_fan: str
    svg: str

    def as_dict(self) -> Dict[str, str]:
        return dict(self.__dict__)


def cmd_portrait(config: Optional[Dict] = None, out_dir: Optional[str] = None) -> PortraitFiles:
    """Write the vector field, streamlines, T' fan and the SVG figure into ``out_dir``."""
    config = config or {}
    portrait = section(config, "portrait")
    out_dir = out_dir or os.path.join(resolve_config(config)["results_dir"], "portrait")
    os.makedirs(out_dir, exist_ok=True)

    window = portrait["window"]
    field = vector_field(window, portrait["grid_points"])
    lines = streamlines(window, portrait["streamline_seeds"], portrait["streamline_steps"], portrait["streamline_time"])
    fan = tprime_fan(portrait["fan"], config)

    files = PortraitFiles(
        vector_field=write_frame(field, os.path.join(out_dir, "vector_field.csv"), "vector_field"),
        streamlines=write_frame(lines, os.path.join(out_dir, "streamlines.csv"), "streamlines"),
        tprime_fan=write_frame(fan, os.path.join(out_dir, "tprime_fan.csv"), "tprime_fan"),
        svg=render_svg(field, lines, fan, window, os.path.join(out_dir, "phase_portrait.svg")),
    )
    logger.info("portrait written to %s", out_dir)
    return files
