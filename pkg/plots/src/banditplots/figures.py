"""Render multi-panel log-log figures from experiment aggregate CSVs.

Consumes the CSV schema written by the banditpoison CLI: long-format rows
``T,metric,mean,stddev,trials``, optionally prefixed by ``sweep_key`` and
``sweep_value`` columns for sweep outputs.  A figure spec selects one metric
per series (optionally filtered on column values), lays the panels out in a
row, and draws the y=x reference line across each panel's data range.

Inputs are read-only; rendering the same spec twice plots identical series.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


class FigureSpecError(ValueError):
    """A figure spec references missing files/columns or unusable values."""


@dataclass(frozen=True)
class SeriesSpec:
    """One plotted line: rows of ``csv`` where metric matches and ``where`` holds."""

    csv: str
    metric: str
    label: str
    where: dict[str, str] = field(default_factory=dict)
    x: str = "T"
    y: str = "mean"


@dataclass(frozen=True)
class PanelSpec:
    series: tuple[SeriesSpec, ...]
    title: str = ""
    xlabel: str = "T"
    ylabel: str = ""
    loglog: bool = True
    reference_line: bool = True
    error_band: bool = False


@dataclass(frozen=True)
class FigureSpec:
    panels: tuple[PanelSpec, ...]
    dpi: int = 200

    @staticmethod
    def from_dict(doc: dict) -> "FigureSpec":
        panels = []
        for i, p in enumerate(doc.get("panels", [])):
            series = []
            for j, s in enumerate(p.get("series", [])):
                for key in ("csv", "metric", "label"):
                    if key not in s:
                        raise FigureSpecError(
                            f"panels[{i}].series[{j}]: missing {key!r}")
                series.append(SeriesSpec(
                    csv=s["csv"], metric=s["metric"], label=s["label"],
                    where={k: str(v) for k, v in s.get("where", {}).items()},
                    x=s.get("x", "T"), y=s.get("y", "mean")))
            if not series:
                raise FigureSpecError(f"panels[{i}]: no series")
            panels.append(PanelSpec(
                series=tuple(series), title=p.get("title", ""),
                xlabel=p.get("xlabel", "T"), ylabel=p.get("ylabel", ""),
                loglog=bool(p.get("loglog", True)),
                reference_line=bool(p.get("reference_line", True)),
                error_band=bool(p.get("error_band", False))))
        if not panels:
            raise FigureSpecError("figure spec has no panels")
        return FigureSpec(panels=tuple(panels), dpi=int(doc.get("dpi", 200)))

    @staticmethod
    def load(path) -> "FigureSpec":
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise FigureSpecError(f"cannot load figure spec {path}: {exc}") from exc
        return FigureSpec.from_dict(doc)


@dataclass(frozen=True)
class SeriesData:
    label: str
    x: np.ndarray
    y: np.ndarray
    yerr: np.ndarray | None = None


@dataclass(frozen=True)
class PanelData:
    title: str
    series: tuple[SeriesData, ...]
    reference: tuple[float, float] | None  # x-range of the y=x line


def _read_rows(path: str) -> tuple[list[dict], list[str]]:
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            rows = list(reader)
            columns = reader.fieldnames or []
    except OSError as exc:
        raise FigureSpecError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise FigureSpecError(f"{path}: no data rows")
    return rows, list(columns)


def extract_series(spec: SeriesSpec, want_err: bool = False) -> SeriesData:
    rows, columns = _read_rows(spec.csv)
    needed = [spec.x, spec.y, "metric", *spec.where]
    if want_err:
        needed.append("stddev")
    for col in needed:
        if col not in columns:
            raise FigureSpecError(f"{spec.csv}: missing column {col!r}")
    picked = [
        r for r in rows
        if r["metric"] == spec.metric
        and all(r[k] == v for k, v in spec.where.items())
    ]
    if not picked:
        raise FigureSpecError(
            f"{spec.csv}: no rows with metric={spec.metric!r} and {spec.where}")
    picked.sort(key=lambda r: float(r[spec.x]))
    x = np.array([float(r[spec.x]) for r in picked])
    y = np.array([float(r[spec.y]) for r in picked])
    yerr = np.array([float(r["stddev"]) for r in picked]) if want_err else None
    return SeriesData(label=spec.label, x=x, y=y, yerr=yerr)


def render_figure(spec: FigureSpec, out_path) -> list[PanelData]:
    """Write the figure to ``out_path`` and return the plotted series values."""
    n = len(spec.panels)
    fig, axes = plt.subplots(1, n, figsize=(3.2 * n, 3.0), squeeze=False)
    rendered: list[PanelData] = []
    for ax, panel in zip(axes[0], spec.panels):
        series_data = []
        for s in panel.series:
            data = extract_series(s, want_err=panel.error_band)
            if panel.loglog and ((data.x <= 0).any() or (data.y <= 0).any()):
                raise FigureSpecError(
                    f"{s.csv}: series {s.label!r} has non-positive values "
                    f"on a log-log panel")
            series_data.append(data)
            marker = "o"
            if len(data.x) == 1:
                ax.plot(data.x, data.y, marker, label=data.label)
            else:
                ax.plot(data.x, data.y, marker + "-", label=data.label)
            if panel.error_band and data.yerr is not None and len(data.x) > 1:
                ax.fill_between(data.x, data.y - data.yerr, data.y + data.yerr,
                                alpha=0.2)
        reference = None
        if panel.reference_line:
            lo = min(float(d.x.min()) for d in series_data)
            hi = max(float(d.x.max()) for d in series_data)
            reference = (lo, hi)
            ax.plot([lo, hi], [lo, hi], "k--", linewidth=0.8, label="y = x")
        if panel.loglog:
            ax.set_xscale("log")
            ax.set_yscale("log")
        ax.set_title(panel.title, fontsize=9)
        ax.set_xlabel(panel.xlabel)
        if panel.ylabel:
            ax.set_ylabel(panel.ylabel)
        ax.legend(fontsize=6)
        rendered.append(PanelData(title=panel.title, series=tuple(series_data),
                                  reference=reference))
    fig.tight_layout()
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, dpi=spec.dpi)
    plt.close(fig)
    return rendered
