import math
import re
from pathlib import Path

import numpy as np
import pytest

from medplots.cli import main
from medplots.render import FigureSpec, SchemaError, baseline_curve, read_results, render

DATA = Path(__file__).parent / "data"

HEADER = "m,k,scoring,critical_dim,seeds_tried,wall_time_s"


def write_csv(path: Path, rows: list[str], manifest: bool = True) -> Path:
    lines = (["# manifest: {}"] if manifest else []) + [HEADER] + rows
    path.write_text("\n".join(lines) + "\n")
    return path


def synthetic_exact_fit_csv(path: Path) -> Path:
    rows = []
    for m in (5, 10, 20, 40, 80, 160):
        d = 2 + 3 * math.log(m)
        rows.append(f"{m},2,linear,{d},1;2,0.5")
    return write_csv(path, rows)


def test_read_results_skips_comments_and_parses(tmp_path):
    p = write_csv(tmp_path / "r.csv", ["5,2,linear,3,1;2,0.1", "10,2,linear,not-found,1,0.2"])
    rows = read_results(p)
    assert len(rows) == 1  # not-found rows are dropped
    assert rows[0] == {"m": 5, "k": 2, "scoring": "linear", "critical_dim": 3.0}


def test_read_results_rejects_empty(tmp_path):
    p = tmp_path / "e.csv"
    p.write_text("")
    with pytest.raises(SchemaError):
        read_results(p)


def test_read_results_rejects_bad_columns(tmp_path):
    p = tmp_path / "b.csv"
    p.write_text("m,k,critical_dim\n5,2,3\n")
    with pytest.raises(SchemaError) as err:
        read_results(p)
    assert "scoring" in str(err.value)


def test_render_fit_legend_coefficients(tmp_path):
    csv = synthetic_exact_fit_csv(tmp_path / "synth.csv")
    out = tmp_path / "fig.png"
    fig = render(FigureSpec(input_csv=csv, kind="critical-d-vs-logm", output=out, overlay_fit=True))
    assert out.exists()
    labels = [line.get_label() for line in fig.axes[0].lines]
    fit_label = next(lb for lb in labels if lb.startswith("fit:"))
    a, b = map(float, re.findall(r"-?\d+\.\d+", fit_label))
    assert a == pytest.approx(2.0, abs=0.01)
    assert b == pytest.approx(3.0, abs=0.01)


def test_render_baseline_overlay_passes_through_published_point(tmp_path):
    rows = [f"{m},2,linear,{d},1,0.1" for m, d in [(5, 3), (20, 6), (80, 12), (300, 18)]]
    csv = write_csv(tmp_path / "r.csv", rows)
    out = tmp_path / "fig1a.png"
    fig = render(FigureSpec(input_csv=csv, kind="critical-m-vs-d", output=out, overlay_baseline=True))
    baseline = next(ln for ln in fig.axes[0].lines if "baseline" in ln.get_label())
    x, y = baseline.get_xdata(), baseline.get_ydata()
    assert x.min() <= 10 <= x.max()
    assert np.interp(10.0, x, y) == pytest.approx(38.6768, abs=0.01)


def test_render_log_axis_for_dim_vs_m(tmp_path):
    csv = synthetic_exact_fit_csv(tmp_path / "s.csv")
    fig = render(FigureSpec(input_csv=csv, kind="critical-d-vs-logm", output=tmp_path / "f.png"))
    assert fig.axes[0].get_xscale() == "log"


def test_render_is_deterministic_in_the_data(tmp_path):
    csv = synthetic_exact_fit_csv(tmp_path / "s.csv")
    figs = [
        render(FigureSpec(input_csv=csv, kind="critical-d-vs-logm", output=tmp_path / f"f{i}.png", overlay_fit=True))
        for i in range(2)
    ]
    for la, lb in zip(figs[0].axes[0].lines, figs[1].axes[0].lines):
        np.testing.assert_array_equal(la.get_xdata(), lb.get_xdata())
        np.testing.assert_array_equal(la.get_ydata(), lb.get_ydata())


def test_render_empty_csv_errors_without_output(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    out = tmp_path / "nope.png"
    code = main(["--input", str(empty), "--kind", "critical-m-vs-d", "--out", str(out)])
    assert code == 2
    assert not out.exists()


def test_render_fit_json_override(tmp_path):
    csv = synthetic_exact_fit_csv(tmp_path / "s.csv")
    fit_json = tmp_path / "fit.json"
    fit_json.write_text('{"a": 1.5, "b": 2.5, "r_squared": 1.0}')
    fig = render(
        FigureSpec(
            input_csv=csv,
            kind="critical-d-vs-logm",
            output=tmp_path / "f.png",
            overlay_fit=True,
            fit_json=fit_json,
        )
    )
    fit_label = next(ln.get_label() for ln in fig.axes[0].lines if ln.get_label().startswith("fit:"))
    assert "1.500" in fit_label and "2.500" in fit_label


def test_cli_renders_both_kinds_from_acceptance_sweep(tmp_path):
    sweep_csv = DATA / "acceptance_sweep.csv"
    for kind, extra in [
        ("critical-m-vs-d", ["--overlay-baseline"]),
        ("critical-d-vs-logm", ["--overlay-fit"]),
    ]:
        out = tmp_path / f"{kind}.png"
        code = main(["--input", str(sweep_csv), "--kind", kind, "--out", str(out)] + extra)
        assert code == 0
        assert out.exists() and out.stat().st_size > 0


def test_acceptance_sweep_baseline_overlay_hits_published_point(tmp_path):
    # the sweep's dimension range spans d=10, where the cubic curve is 38.6768
    fig = render(
        FigureSpec(
            input_csv=DATA / "acceptance_sweep.csv",
            kind="critical-m-vs-d",
            output=tmp_path / "fig.png",
            overlay_baseline=True,
        )
    )
    baseline = next(ln for ln in fig.axes[0].lines if "baseline" in ln.get_label())
    assert np.interp(10.0, baseline.get_xdata(), baseline.get_ydata()) == pytest.approx(38.6768, abs=0.01)


def test_baseline_curve_published_values():
    assert baseline_curve(10.0) == pytest.approx(38.6768, abs=1e-9)
    assert baseline_curve(0.0) == pytest.approx(-10.5322, abs=1e-9)
