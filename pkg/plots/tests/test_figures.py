import json

import numpy as np
import pytest

from banditplots.cli import main
from banditplots.figures import (
    FigureSpec,
    FigureSpecError,
    SeriesSpec,
    extract_series,
    render_figure,
)

RUN_HEADER = "T,metric,mean,stddev,trials"
SWEEP_HEADER = "sweep_key,sweep_value,T,metric,mean,stddev,trials"

# run-style aggregate: two metrics over four horizons
RUN_VALUES = {
    "nontarget_selections": {1000: 185.0, 10000: 870.2, 100000: 3666.9, 1000000: 14520.0},
    "total_cost": {1000: 185.0, 10000: 870.2, 100000: 3666.9, 1000000: 14520.0},
}
# sweep-style aggregate: one metric, two sweep values
SWEEP_VALUES = {
    "0.5": {1000: 276.0, 10000: 1170.0},
    "0.7": {1000: 457.0, 10000: 3890.0},
}


@pytest.fixture
def run_csv(tmp_path):
    lines = [RUN_HEADER]
    for metric, per_T in RUN_VALUES.items():
        for T, v in per_T.items():
            lines.append(f"{T},{metric},{v!r},1.5,10")
    p = tmp_path / "aggregate.csv"
    p.write_text("\n".join(lines) + "\n")
    return p


@pytest.fixture
def sweep_csv(tmp_path):
    lines = [SWEEP_HEADER]
    for value, per_T in SWEEP_VALUES.items():
        for T, v in per_T.items():
            lines.append(f"phi,{value},{T},nontarget_selections,{v!r},2.0,10")
    p = tmp_path / "sweep.csv"
    p.write_text("\n".join(lines) + "\n")
    return p


def _panel(series, **kw):
    return {"series": series, "loglog": True, "reference_line": True, **kw}


def test_four_panel_figure_golden_series(run_csv, sweep_csv, tmp_path):
    """Fig-1-style layout: four log-log panels, y=x reference, exact series."""
    spec = FigureSpec.from_dict({
        "dpi": 200,
        "panels": [
            _panel([{"csv": str(run_csv), "metric": "nontarget_selections",
                     "label": "player A"}], title="(a)"),
            _panel([{"csv": str(run_csv), "metric": "total_cost",
                     "label": "player A"}], title="(b)"),
            _panel([{"csv": str(sweep_csv), "metric": "nontarget_selections",
                     "label": "budget 0.5", "where": {"sweep_value": "0.5"}},
                    {"csv": str(sweep_csv), "metric": "nontarget_selections",
                     "label": "budget 0.7", "where": {"sweep_value": "0.7"}}],
                   title="(c)"),
            _panel([{"csv": str(run_csv), "metric": "total_cost",
                     "label": "player A"}], title="(d)"),
        ],
    })
    out = tmp_path / "fig.png"
    panels = render_figure(spec, out)
    assert out.exists() and out.stat().st_size > 0
    assert len(panels) == 4
    # golden comparison of the plotted values
    a = panels[0].series[0]
    np.testing.assert_array_equal(a.x, sorted(RUN_VALUES["nontarget_selections"]))
    np.testing.assert_array_equal(
        a.y, [RUN_VALUES["nontarget_selections"][T] for T in sorted(RUN_VALUES["nontarget_selections"])])
    c05 = panels[2].series[0]
    np.testing.assert_array_equal(c05.y, [276.0, 1170.0])
    c07 = panels[2].series[1]
    np.testing.assert_array_equal(c07.y, [457.0, 3890.0])
    # reference line spans the data's x-range exactly
    assert panels[0].reference == (1000.0, 1000000.0)
    assert panels[2].reference == (1000.0, 10000.0)


def test_rendering_is_read_only_and_repeatable(run_csv, tmp_path):
    spec = FigureSpec.from_dict({"panels": [
        _panel([{"csv": str(run_csv), "metric": "total_cost", "label": "x"}])]})
    before = run_csv.read_bytes()
    p1 = render_figure(spec, tmp_path / "a.png")
    p2 = render_figure(spec, tmp_path / "b.png")
    assert run_csv.read_bytes() == before
    np.testing.assert_array_equal(p1[0].series[0].y, p2[0].series[0].y)
    np.testing.assert_array_equal(p1[0].series[0].x, p2[0].series[0].x)


def test_single_point_series_renders(tmp_path):
    p = tmp_path / "one.csv"
    p.write_text(RUN_HEADER + "\n1000000,total_cost,113000.0,9.0,10\n")
    spec = FigureSpec.from_dict({"panels": [
        _panel([{"csv": str(p), "metric": "total_cost", "label": "single"}])]})
    panels = render_figure(spec, tmp_path / "one.png")
    np.testing.assert_array_equal(panels[0].series[0].x, [1000000.0])
    assert panels[0].reference == (1000000.0, 1000000.0)


def test_missing_column_is_descriptive(run_csv, tmp_path):
    spec = SeriesSpec(csv=str(run_csv), metric="total_cost", label="x", y="median")
    with pytest.raises(FigureSpecError, match="median"):
        extract_series(spec)


def test_missing_metric_rows_error(run_csv):
    spec = SeriesSpec(csv=str(run_csv), metric="regret_sideways", label="x")
    with pytest.raises(FigureSpecError, match="regret_sideways"):
        extract_series(spec)


def test_nonpositive_values_rejected_on_log_axes(tmp_path):
    p = tmp_path / "zero.csv"
    p.write_text(RUN_HEADER + "\n1000,total_cost,0.0,0.0,10\n10000,total_cost,5.0,0.0,10\n")
    spec = FigureSpec.from_dict({"panels": [
        _panel([{"csv": str(p), "metric": "total_cost", "label": "x"}])]})
    with pytest.raises(FigureSpecError, match="non-positive"):
        render_figure(spec, tmp_path / "zero.png")
    # with log axes off the same data renders fine
    linear = FigureSpec.from_dict({"panels": [
        {"series": [{"csv": str(p), "metric": "total_cost", "label": "x"}],
         "loglog": False, "reference_line": False}]})
    render_figure(linear, tmp_path / "linear.png")


def test_error_band_uses_stddev_column(run_csv, tmp_path):
    spec = FigureSpec.from_dict({"panels": [
        {"series": [{"csv": str(run_csv), "metric": "total_cost", "label": "x"}],
         "loglog": True, "reference_line": False, "error_band": True}]})
    panels = render_figure(spec, tmp_path / "band.png")
    np.testing.assert_array_equal(panels[0].series[0].yerr,
                                  [1.5, 1.5, 1.5, 1.5])


def test_spec_validation_errors():
    with pytest.raises(FigureSpecError, match="no panels"):
        FigureSpec.from_dict({"panels": []})
    with pytest.raises(FigureSpecError, match="no series"):
        FigureSpec.from_dict({"panels": [{"series": []}]})
    with pytest.raises(FigureSpecError, match="metric"):
        FigureSpec.from_dict({"panels": [{"series": [{"csv": "a.csv", "label": "x"}]}]})


def test_cli_render_roundtrip(run_csv, tmp_path):
    doc = {"panels": [
        _panel([{"csv": str(run_csv), "metric": "total_cost", "label": "cost"}],
               title="cost growth")]}
    spec_path = tmp_path / "fig.json"
    spec_path.write_text(json.dumps(doc))
    out = tmp_path / "fig.png"
    assert main(["render", "--spec", str(spec_path), "--out", str(out)]) == 0
    assert out.exists()


def test_cli_bad_spec_exits_nonzero(tmp_path, capsys):
    spec_path = tmp_path / "fig.json"
    spec_path.write_text("{\"panels\": []}")
    assert main(["render", "--spec", str(spec_path),
                 "--out", str(tmp_path / "x.png")]) == 2
    assert "error" in capsys.readouterr().err
