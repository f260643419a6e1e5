#!/usr/bin/env python3
"""Render the two benchmark figures from the CSVs written by
scripts/reproduce_experiments.py.

Each figure is a row of four log-log panels (non-target selections and
cumulative cost for each setup) with the y=x reference line.  Requires the
companion banditplots package (see plots/ at the repository root).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]


def _series(csv: str, metric: str, label: str, where: dict | None = None) -> dict:
    s = {"csv": csv, "metric": metric, "label": label}
    if where:
        s["where"] = where
    return s


def _panel(title: str, ylabel: str, series: list[dict]) -> dict:
    return {
        "title": title,
        "xlabel": "T",
        "ylabel": ylabel,
        "loglog": True,
        "reference_line": True,
        "series": series,
    }


def easy_figure_spec(results: Path) -> dict:
    exp3 = str(results / "easy_exp3" / "aggregate.csv")
    gen = str(results / "easy_exp3_general" / "aggregate.csv")
    exprb = str(results / "easy_exprb" / "aggregate.csv")
    noatk = str(results / "easy_noattack" / "aggregate.csv")
    rb = [
        _series(exprb, "nontarget_selections", f"ExpRb phi=T^{p}",
                where={"sweep_value": p})
        for p in ("0.5", "0.7", "0.9")
    ]
    rb_cost = [
        _series(exprb, "total_cost", f"ExpRb phi=T^{p}", where={"sweep_value": p})
        for p in ("0.5", "0.7", "0.9")
    ]
    return {
        "dpi": 200,
        "panels": [
            _panel("(a) easy template", "T - N_T(target)",
                   [_series(noatk, "nontarget_selections", "no attack"),
                    _series(exp3, "nontarget_selections", "Exp3"), *rb]),
            _panel("(b) easy template", "C_T",
                   [_series(exp3, "total_cost", "Exp3"), *rb_cost]),
            _panel("(c) general template", "T - N_T(target)",
                   [_series(gen, "nontarget_selections", "Exp3")]),
            _panel("(d) general template", "C_T",
                   [_series(gen, "total_cost", "Exp3")]),
        ],
    }


def hard_figure_spec(results: Path) -> dict:
    eps = str(results / "hard_eps" / "aggregate.csv")
    exprb = str(results / "hard_exprb" / "aggregate.csv")
    noatk = str(results / "hard_noattack" / "aggregate.csv")
    eps_sel = [
        _series(eps, "nontarget_selections", f"eps={v}", where={"sweep_value": v})
        for v in ("0.1", "0.25", "0.4")
    ]
    eps_cost = [
        _series(eps, "total_cost", f"eps={v}", where={"sweep_value": v})
        for v in ("0.1", "0.25", "0.4")
    ]
    rb_sel = [
        _series(exprb, "nontarget_selections", f"ExpRb phi=T^{p}",
                where={"sweep_value": p})
        for p in ("0.5", "0.7", "0.9")
    ]
    rb_cost = [
        _series(exprb, "total_cost", f"ExpRb phi=T^{p}", where={"sweep_value": p})
        for p in ("0.5", "0.7", "0.9")
    ]
    exp3_25_sel = _series(eps, "nontarget_selections", "Exp3 eps=0.25",
                          where={"sweep_value": "0.25"})
    exp3_25_cost = _series(eps, "total_cost", "Exp3 eps=0.25",
                           where={"sweep_value": "0.25"})
    return {
        "dpi": 200,
        "panels": [
            _panel("(a) epsilon sweep", "T - N_T(target)",
                   [_series(noatk, "nontarget_selections", "no attack"), *eps_sel]),
            _panel("(b) epsilon sweep", "C_T", eps_cost),
            _panel("(c) budget sweep", "T - N_T(target)", [exp3_25_sel, *rb_sel]),
            _panel("(d) budget sweep", "C_T", [exp3_25_cost, *rb_cost]),
        ],
    }


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--results", default=str(ROOT / "results"))
    ap.add_argument("--out", default=str(ROOT / "results" / "figures"))
    args = ap.parse_args()
    try:
        from banditplots.cli import main as plots_cli
    except ImportError:
        print("banditplots is not installed; run `pip install -e plots/` first",
              file=sys.stderr)
        return 1
    results = Path(args.results)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    code = 0
    for name, spec in (("easy_scenario", easy_figure_spec(results)),
                       ("hard_scenario", hard_figure_spec(results))):
        spec_path = out / f"{name}.json"
        spec_path.write_text(json.dumps(spec, indent=2) + "\n")
        png = out / f"{name}.png"
        code = max(code, plots_cli(["render", "--spec", str(spec_path),
                                    "--out", str(png)]))
        print(f"wrote {png}")
    return code


if __name__ == "__main__":
    sys.exit(main())
