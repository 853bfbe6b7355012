import numpy as np

from stpp_lab.plotting import line_chart_svg, summary_slice_charts


def test_basic_chart(tmp_path):
    path = tmp_path / "c.svg"
    line_chart_svg(
        path,
        [
            {"x": [0, 1, 2], "y": [0.0, 0.5, 1.0], "label": "G"},
            {"x": [0, 1, 2], "y": [0.1, 0.4, 0.9], "label": "F", "dashed": True, "markers": True},
        ],
        "r",
        "value",
        title="demo",
    )
    svg = path.read_text()
    assert "<polyline" in svg
    assert "stroke-dasharray" in svg
    assert "demo" in svg


def test_nan_breaks_polyline(tmp_path):
    path = tmp_path / "c.svg"
    line_chart_svg(
        path,
        [{"x": [0, 1, 2, 3, 4], "y": [0.0, 1.0, np.nan, 1.0, 0.0], "label": "s"}],
        "x",
        "y",
    )
    svg = path.read_text()
    assert svg.count("<polyline") == 2


def test_all_nan_annotated(tmp_path):
    path = tmp_path / "c.svg"
    line_chart_svg(
        path,
        [{"x": [0, 1], "y": [np.nan, np.nan], "label": "s"}],
        "x",
        "y",
    )
    assert "no defined cells to plot" in path.read_text()


def test_slice_charts(tmp_path):
    r = np.repeat([0.05, 0.1, 0.15], 3)
    t = np.tile([0.05, 0.1, 0.15], 3)
    summary = {
        "r": r,
        "t": t,
        "F_hat": np.linspace(0, 0.8, 9),
        "G_hat": np.linspace(0, 0.7, 9),
    }
    paths = summary_slice_charts(summary, tmp_path, stem="demo")
    assert sorted(p.name for p in paths) == ["demo_vs_r.svg", "demo_vs_t.svg"]
    for p in paths:
        assert p.read_text().startswith("<svg")
