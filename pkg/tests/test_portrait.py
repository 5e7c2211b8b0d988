import numpy as np
import pandas as pd
import pytest

from g2moduli.reports.portrait import axis_values, cmd_portrait, limiting_line, streamlines, tprime_fan, vector_field


def test_axis_values_are_symmetric():
    values = axis_values(-1.0, 1.0, 21)
    assert np.array_equal(values, -values[::-1])
    assert values[10] == 0.0


def test_vector_field_is_reflection_symmetric():
    n = 9
    field = vector_field([-1.0, 1.0, -1.0, 1.0], n)
    assert len(field) == n * n
    grid = field.to_numpy().reshape(n, n, 4)
    mirrored = grid[::-1]
    assert np.array_equal(grid[..., 0], mirrored[..., 0])
    assert np.array_equal(grid[..., 1], -mirrored[..., 1])
    assert np.array_equal(grid[..., 2], mirrored[..., 2])
    assert np.array_equal(grid[..., 3], -mirrored[..., 3])


def test_vector_field_vanishes_at_nearly_kahler_point():
    field = vector_field([-1.0, 1.0, -1.0, 1.0], 5)
    origin = field[(field["g_plus"] == 0.0) & (field["g_minus"] == 0.0)]
    assert origin[["dg_plus", "dg_minus"]].to_numpy().tolist() == [[0.0, 0.0]]


def test_streamlines_stay_bounded():
    lines = streamlines([-1.0, 1.0, -1.0, 1.0], 3, 50, 2.0)
    assert set(lines["line"]) == set(range(9))
    assert lines.groupby("line").size().max() <= 50
    assert lines[["g_plus", "g_minus"]].abs().to_numpy().max() <= 3.0 + 1e-6


def test_fan_flat_member_is_constant():
    fan = tprime_fan([0.0, 1.0], {"seed": {"t_max": 50.0}})
    flat = fan[fan["gamma_prime"] == 1.0]
    assert (flat["f_plus"] == 1.0).all() and (flat["f_minus"] == 1.0).all()
    moving = fan[fan["gamma_prime"] == 0.0]
    assert np.ptp(moving["f_plus"].to_numpy()) > 0.1


@pytest.fixture
def portrait_files(config, tmp_path):
    config["seed"]["t_max"] = 50.0
    config["portrait"].update(grid_points=5, streamline_seeds=2, streamline_steps=30, fan=[0.0, 0.5, 1.0])
    return cmd_portrait(config, str(tmp_path / "portrait"))


def test_portrait_writes_all_artefacts(portrait_files):
    files = portrait_files.as_dict()
    assert set(files) == {"vector_field", "streamlines", "tprime_fan", "svg"}
    assert len(pd.read_csv(files["vector_field"])) == 25
    assert list(pd.read_csv(files["tprime_fan"]).columns) == ["gamma_prime", "t", "f_plus", "f_minus"]


def test_svg_marks_critical_points(portrait_files):
    with open(portrait_files.svg, encoding="utf-8") as f:
        svg = f.read()
    assert svg.count('id="critical-point-') == 4
    assert 'id="critical-point-flat_origin"' in svg


def test_limiting_line_joins_flat_point_to_nearly_kahler():
    line = limiting_line()
    first = line.iloc[0]
    last = line.iloc[-1]
    assert (first["f_plus"], first["f_minus"]) == pytest.approx((1.0, 1.0), abs=1e-6)
    assert (last["f_plus"], last["f_minus"]) == pytest.approx((2.0 / 3.0, 0.0), abs=1e-6)
    # straight segment f- = 3 (f+ - 2/3)
    assert np.allclose(line["f_minus"], 3.0 * (line["f_plus"] - 2.0 / 3.0), atol=1e-12)


def test_svg_shows_regions_and_limiting_line(portrait_files):
    with open(portrait_files.svg, encoding="utf-8") as f:
        svg = f.read()
    assert 'id="region-R_ZERO"' in svg
    assert 'id="region-R_INFINITY"' in svg
    assert 'id="limiting-line"' in svg
