"""Command-line entry point: run experiments, sweeps, and bound verifications.

Configs are single JSON documents with sections {environment, player,
attacker, experiment} (plus an optional verify section).  Outputs are written
to --out: aggregate.csv, trials.jsonl, bounds.json (verify only), and
manifest.json with content digests.  CSV/JSONL bodies are byte-identical
across reruns of the same config; only the manifest carries a timestamp.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .attackers import AttackerConfig, optimal_epsilon
from .environments import EnvironmentSpec
from .harness import (
    AggregateSummary,
    ExperimentConfig,
    check_lemma1,
    check_thm1,
    check_thm2,
    check_thm3,
    equivalence_check,
    exp3_bound_constant,
    lower_bound_experiment,
    run_experiment,
)
from .players import PlayerSpec

THEOREMS = ("thm1", "thm2", "thm3", "lemma1", "lower_bound", "equivalence")


class ConfigError(ValueError):
    """Invalid configuration, with the offending field in the message."""


def _require(mapping: dict, key: str, section: str):
    if key not in mapping:
        raise ConfigError(f"{section}.{key}: missing required field")
    return mapping[key]


def _parse_environment(raw: dict) -> EnvironmentSpec:
    kind = _require(raw, "kind", "environment")
    try:
        if kind == "constant":
            losses = tuple(float(x) for x in _require(raw, "losses", "environment"))
            return EnvironmentSpec(kind="constant", losses=losses)
        if kind == "example1":
            return EnvironmentSpec(kind="example1")
        if kind == "table":
            return EnvironmentSpec(kind="table", path=str(_require(raw, "path", "environment")))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"environment: {exc}") from exc
    raise ConfigError(f"environment.kind: unknown kind {kind!r}")


def _parse_player(raw: dict) -> PlayerSpec:
    kind = _require(raw, "kind", "player")
    try:
        if kind == "exp3":
            eta = raw.get("eta", "auto")
            if isinstance(eta, dict):
                return PlayerSpec(kind="exp3", eta=None,
                                  beta=float(_require(eta, "beta", "player.eta")),
                                  alpha=float(_require(eta, "alpha", "player.eta")))
            if isinstance(eta, str):
                if eta != "auto":
                    raise ConfigError(
                        f"player.eta: expected a number, \"auto\", or {{beta, alpha}}, got {eta!r}"
                    )
                return PlayerSpec(kind="exp3", eta="auto")
            return PlayerSpec(kind="exp3", eta=float(eta))
        if kind == "exprb":
            return PlayerSpec(kind="exprb", eta=None,
                              phi_exponent=float(_require(raw, "phi_exponent", "player")))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"player: {exc}") from exc
    raise ConfigError(f"player.kind: unknown kind {kind!r}")


def _parse_attacker(raw: dict) -> AttackerConfig:
    strategy = _require(raw, "strategy", "attacker")
    target = int(raw.get("target_arm", 0))
    alpha = float(raw.get("alpha", 0.5))
    epsilon = raw.get("epsilon")
    try:
        if epsilon == "optimal":
            epsilon = optimal_epsilon(alpha)
        elif epsilon is not None:
            epsilon = float(epsilon)
        return AttackerConfig(strategy=strategy, target=target, alpha=alpha, epsilon=epsilon)
    except ValueError as exc:
        raise ConfigError(f"attacker: {exc}") from exc


def parse_config(doc: dict) -> ExperimentConfig:
    for section in ("environment", "player", "attacker", "experiment"):
        if section not in doc:
            raise ConfigError(f"{section}: missing required section")
    exp = doc["experiment"]
    try:
        return ExperimentConfig(
            environment=_parse_environment(doc["environment"]),
            player=_parse_player(doc["player"]),
            attacker=_parse_attacker(doc["attacker"]),
            horizons=tuple(int(T) for T in _require(exp, "horizons", "experiment")),
            trials=int(exp.get("trials", 10)),
            base_seed=int(exp.get("base_seed", 0)),
            record_policy=bool(exp.get("record_policy", False)),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"experiment: {exc}") from exc


def load_config(path) -> tuple[ExperimentConfig, dict]:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(doc), doc


def _fmt(v) -> str:
    # repr of a float is its shortest round-trip decimal form.
    if isinstance(v, float):
        return repr(v)
    return str(v)


def aggregate_csv_rows(agg: AggregateSummary, prefix: dict | None = None) -> list[str]:
    head = list(prefix or {})
    rows = [",".join(head + ["T", "metric", "mean", "stddev", "trials"])]
    pre = [str(prefix[k]) for k in head] if prefix else []
    for T in sorted(agg.results):
        n = len(agg.results[T])
        for metric in agg.metric_names():
            rows.append(",".join(
                pre + [str(T), metric, _fmt(agg.mean(T, metric)),
                       _fmt(agg.std(T, metric)), str(n)]
            ))
    return rows


def trials_jsonl_rows(agg: AggregateSummary, extra: dict | None = None) -> list[str]:
    rows = []
    for T in sorted(agg.results):
        for i, s in enumerate(agg.results[T]):
            rec = dict(extra or {})
            rec.update({
                "T": T,
                "trial": i,
                "seed": s.seed,
                "selections": list(s.selections),
                "total_cost": s.total_cost,
                "regret_template": s.regret_template,
                "regret_clean": s.regret_clean,
            })
            rows.append(json.dumps(rec, sort_keys=True))
    return rows


def _write(path: Path, body: str) -> dict:
    path.parent.mkdir(parents=True, exist_ok=True)
    data = body.encode()
    path.write_bytes(data)
    return {"name": path.name, "bytes": len(data),
            "sha256": hashlib.sha256(data).hexdigest()}


def _write_manifest(out_dir: Path, config_doc: dict, outputs: list[dict]) -> None:
    manifest = {
        "tool": "banditpoison",
        "version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "config": config_doc,
        "outputs": outputs,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    from dataclasses import replace

    if args.seed is not None:
        cfg = replace(cfg, base_seed=args.seed)
    if args.trials is not None:
        cfg = replace(cfg, trials=args.trials)
    return cfg


def cmd_run(args) -> int:
    cfg, doc = load_config(args.config)
    cfg = _apply_overrides(cfg, args)
    agg = run_experiment(cfg)
    out = Path(args.out)
    outputs = [
        _write(out / "aggregate.csv", "\n".join(aggregate_csv_rows(agg)) + "\n"),
        _write(out / "trials.jsonl", "\n".join(trials_jsonl_rows(agg)) + "\n"),
    ]
    _write_manifest(out, doc, outputs)
    if not args.quiet:
        for T in sorted(agg.results):
            print(f"T={T}: target_fraction={agg.mean(T, 'target_fraction'):.4f} "
                  f"mean_cost={agg.mean(T, 'total_cost'):.2f}")
        print(f"wrote {out / 'aggregate.csv'}")
    return 0


def _swept_configs(cfg: ExperimentConfig, key: str, values: list):
    from dataclasses import replace

    if key == "T":
        horizons = tuple(sorted(int(v) for v in values))
        yield from ((str(T), replace(cfg, horizons=(T,))) for T in horizons)
    elif key == "epsilon":
        for v in values:
            eps = optimal_epsilon(cfg.attacker.alpha) if v == "optimal" else float(v)
            att = AttackerConfig(strategy=cfg.attacker.strategy, target=cfg.attacker.target,
                                 alpha=cfg.attacker.alpha, epsilon=eps)
            yield _fmt(eps), replace(cfg, attacker=att)
    elif key == "phi":
        if cfg.player.kind != "exprb":
            raise ConfigError("sweep.phi: player must be exprb to sweep the budget exponent")
        for v in values:
            yield _fmt(float(v)), replace(cfg, player=PlayerSpec(
                kind="exprb", eta=None, phi_exponent=float(v)))
    else:
        raise ConfigError(f"sweep key {key!r} not one of T, epsilon, phi")


def cmd_sweep(args) -> int:
    cfg, doc = load_config(args.config)
    cfg = _apply_overrides(cfg, args)
    values = args.values
    if not values:
        raise ConfigError("sweep: empty value list")
    if cfg.attacker.strategy != "general" and args.key == "epsilon":
        raise ConfigError("sweep.epsilon: attacker strategy must be general")
    csv_rows: list[str] = []
    jsonl_rows: list[str] = []
    for value, sub_cfg in _swept_configs(cfg, args.key, values):
        agg = run_experiment(sub_cfg)
        rows = aggregate_csv_rows(agg, prefix={"sweep_key": args.key, "sweep_value": value})
        if csv_rows:
            rows = rows[1:]  # drop repeated header
        csv_rows.extend(rows)
        jsonl_rows.extend(trials_jsonl_rows(
            agg, extra={"sweep_key": args.key, "sweep_value": value}))
        if not args.quiet:
            for T in sorted(agg.results):
                print(f"{args.key}={value} T={T}: "
                      f"target_fraction={agg.mean(T, 'target_fraction'):.4f} "
                      f"mean_cost={agg.mean(T, 'total_cost'):.2f}")
    out = Path(args.out)
    outputs = [
        _write(out / "aggregate.csv", "\n".join(csv_rows) + "\n"),
        _write(out / "trials.jsonl", "\n".join(jsonl_rows) + "\n"),
    ]
    _write_manifest(out, doc, outputs)
    if not args.quiet:
        print(f"wrote {out / 'aggregate.csv'}")
    return 0


def _verify_reports(cfg: ExperimentConfig, doc: dict, theorem: str) -> list:
    verify = doc.get("verify", {})
    rho = verify.get("rho")
    M = verify.get("M")
    strategy = cfg.attacker.strategy

    if theorem in ("thm1", "thm2", "thm3"):
        want = "easy" if theorem == "thm1" else "general"
        if strategy != want:
            raise ConfigError(
                f"verify.{theorem}: needs attacker strategy {want!r}, config has {strategy!r}")
        if theorem in ("thm1", "thm3") and rho is None:
            env = cfg.environment.build(max(cfg.horizons))
            margin = 1.0 - float(env.column(cfg.attacker.target).max())
            if margin <= 0.0 and theorem == "thm1":
                raise ConfigError(
                    "verify.rho: target arm loss reaches 1; the easy-scenario "
                    "bound needs an explicit rho in (0, 1]")
            rho = margin if margin > 0.0 else 1.0
        agg = run_experiment(cfg)
        reports = []
        for T in cfg.horizons:
            K = len(agg.results[T][0].selections)
            if M == "auto":
                # Bound constant of the configured Exp3 victim at this horizon.
                eta, _g, _p = cfg.player.resolve(K, T)
                m_val = exp3_bound_constant(eta, T, K, cfg.attacker.alpha)
            elif M is not None:
                m_val = float(M)
            else:
                m_val = None  # checkers fall back to sqrt(2 K ln K)
            if theorem == "thm1":
                reports.extend(check_thm1(agg, T, rho=rho, M=m_val))
            elif theorem == "thm2":
                reports.extend(check_thm2(agg, T, M=m_val))
            else:
                reports.extend(check_thm3(agg, T, rho=rho, M=m_val))
        return reports

    if theorem == "lemma1":
        if cfg.player.kind != "exp3" or cfg.attacker.strategy != "none":
            raise ConfigError(
                "verify.lemma1: needs a plain exp3 player and attacker strategy \"none\"")
        agg = run_experiment(cfg)
        reports = []
        for T in cfg.horizons:
            reports.extend(check_lemma1(agg, T))
        return reports

    if theorem == "lower_bound":
        alpha = cfg.attacker.alpha
        beta = cfg.player.beta if cfg.player.beta is not None else 1.0
        _agg, exponent = lower_bound_experiment(
            alpha, cfg.horizons, cfg.trials, beta=beta, base_seed=cfg.base_seed)
        from .harness import _report

        return [_report("lower_bound_cost_exponent", exponent, alpha - 0.1, 0.0, "ge")]

    if theorem == "equivalence":
        if cfg.attacker.strategy not in ("easy", "general"):
            raise ConfigError(
                "verify.equivalence: attacker strategy must be easy or general")
        from .harness import _report

        reports = []
        for T in cfg.horizons:
            env = cfg.environment.build(T)
            same = equivalence_check(env, cfg.attacker, cfg.player, T, cfg.base_seed)
            reports.append(_report(f"equivalence_T{T}", 1.0 if same else 0.0, 1.0, 0.0, "ge"))
        return reports

    raise ConfigError(f"unknown theorem {theorem!r}; expected one of {THEOREMS}")


def cmd_verify(args) -> int:
    cfg, doc = load_config(args.config)
    cfg = _apply_overrides(cfg, args)
    reports = _verify_reports(cfg, doc, args.theorem)
    out = Path(args.out)
    body = json.dumps([r.as_dict() for r in reports], indent=2, sort_keys=True) + "\n"
    outputs = [_write(out / "bounds.json", body)]
    _write_manifest(out, doc, outputs)
    ok = all(r.satisfied for r in reports)
    if not args.quiet:
        for r in reports:
            cmp = ">=" if r.relation == "ge" else "<="
            print(f"[{'PASS' if r.satisfied else 'FAIL'}] {r.bound}: "
                  f"{r.lhs:.6g} {cmp} {r.rhs:.6g} (slack {r.slack:.3g})")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="banditpoison",
        description="Loss-poisoning attacks on adversarial bandits: run, sweep, verify.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("config", help="JSON experiment config")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override base_seed")
        p.add_argument("--trials", type=int, default=None, help="override trial count")
        p.add_argument("--quiet", action="store_true")

    p_run = sub.add_parser("run", help="run one experiment and export results")
    common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run the experiment across parameter values")
    common(p_sweep)
    p_sweep.add_argument("--key", required=True, choices=("T", "epsilon", "phi"))
    p_sweep.add_argument("--values", nargs="+", required=True)
    p_sweep.set_defaults(func=cmd_sweep)

    p_verify = sub.add_parser("verify", help="check a selection/cost bound numerically")
    common(p_verify)
    p_verify.add_argument("--theorem", required=True, choices=THEOREMS)
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
