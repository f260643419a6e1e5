import hashlib
import json

import pytest

from banditpoison.cli import main

EASY_CONFIG = {
    "environment": {"kind": "constant", "losses": [0.5, 0.0]},
    "player": {"kind": "exp3", "eta": {"beta": 0.25, "alpha": 0.5}},
    "attacker": {"strategy": "easy", "target_arm": 0, "alpha": 0.5},
    "experiment": {"horizons": [200, 400], "trials": 3, "base_seed": 11},
}


def _write_config(tmp_path, doc, name="config.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def test_run_writes_outputs_and_exits_zero(tmp_path, capsys):
    cfg = _write_config(tmp_path, EASY_CONFIG)
    out = tmp_path / "out"
    assert main(["run", cfg, "--out", str(out)]) == 0
    agg = (out / "aggregate.csv").read_text().splitlines()
    assert agg[0] == "T,metric,mean,stddev,trials"
    assert any(line.startswith("200,target_fraction,") for line in agg)
    trials = [json.loads(l) for l in (out / "trials.jsonl").read_text().splitlines()]
    assert len(trials) == 6  # 2 horizons x 3 trials
    assert trials[0]["seed"] == 11
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"] == EASY_CONFIG


def test_rerun_is_byte_identical(tmp_path):
    cfg = _write_config(tmp_path, EASY_CONFIG)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["run", cfg, "--out", str(out1), "--quiet"]) == 0
    assert main(["run", cfg, "--out", str(out2), "--quiet"]) == 0
    assert (out1 / "aggregate.csv").read_bytes() == (out2 / "aggregate.csv").read_bytes()
    assert (out1 / "trials.jsonl").read_bytes() == (out2 / "trials.jsonl").read_bytes()


def test_manifest_digests_match_files(tmp_path):
    cfg = _write_config(tmp_path, EASY_CONFIG)
    out = tmp_path / "out"
    assert main(["run", cfg, "--out", str(out), "--quiet"]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    for entry in manifest["outputs"]:
        digest = hashlib.sha256((out / entry["name"]).read_bytes()).hexdigest()
        assert digest == entry["sha256"]


def test_seed_and_trials_overrides(tmp_path):
    cfg = _write_config(tmp_path, EASY_CONFIG)
    out = tmp_path / "out"
    assert main(["run", cfg, "--out", str(out), "--seed", "99",
                 "--trials", "2", "--quiet"]) == 0
    trials = [json.loads(l) for l in (out / "trials.jsonl").read_text().splitlines()]
    assert [t["seed"] for t in trials if t["T"] == 200] == [99, 100]


def test_invalid_epsilon_names_the_constraint(tmp_path, capsys):
    doc = json.loads(json.dumps(EASY_CONFIG))
    doc["attacker"] = {"strategy": "general", "target_arm": 0,
                       "alpha": 0.5, "epsilon": 0.6}
    cfg = _write_config(tmp_path, doc)
    assert main(["run", cfg, "--out", str(tmp_path / "out")]) == 2
    err = capsys.readouterr().err
    assert "epsilon" in err and "1 - alpha" in err


def test_missing_config_file_exits_nonzero(tmp_path, capsys):
    assert main(["run", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == 2
    assert "cannot read config" in capsys.readouterr().err


def test_missing_section_has_field_level_message(tmp_path, capsys):
    doc = {"environment": EASY_CONFIG["environment"]}
    cfg = _write_config(tmp_path, doc)
    assert main(["run", cfg, "--out", str(tmp_path / "out")]) == 2
    assert "player: missing required section" in capsys.readouterr().err


def test_sweep_epsilon_groups_output(tmp_path):
    doc = json.loads(json.dumps(EASY_CONFIG))
    doc["attacker"] = {"strategy": "general", "target_arm": 0,
                       "alpha": 0.5, "epsilon": 0.25}
    doc["experiment"]["horizons"] = [200]
    cfg = _write_config(tmp_path, doc)
    out = tmp_path / "out"
    assert main(["sweep", cfg, "--key", "epsilon", "--values", "0.1", "0.25",
                 "--out", str(out), "--quiet"]) == 0
    lines = (out / "aggregate.csv").read_text().splitlines()
    assert lines[0] == "sweep_key,sweep_value,T,metric,mean,stddev,trials"
    values = {l.split(",")[1] for l in lines[1:]}
    assert values == {"0.1", "0.25"}
    trial_rows = [json.loads(l) for l in (out / "trials.jsonl").read_text().splitlines()]
    assert {t["sweep_value"] for t in trial_rows} == {"0.1", "0.25"}


def test_sweep_phi_requires_exprb(tmp_path, capsys):
    cfg = _write_config(tmp_path, EASY_CONFIG)
    assert main(["sweep", cfg, "--key", "phi", "--values", "0.5",
                 "--out", str(tmp_path / "out")]) == 2
    assert "exprb" in capsys.readouterr().err


def test_sweep_requires_values(tmp_path):
    cfg = _write_config(tmp_path, EASY_CONFIG)
    with pytest.raises(SystemExit):
        main(["sweep", cfg, "--key", "epsilon", "--out", str(tmp_path / "out")])


def test_verify_equivalence_passes(tmp_path):
    cfg = _write_config(tmp_path, EASY_CONFIG)
    out = tmp_path / "out"
    assert main(["verify", cfg, "--theorem", "equivalence",
                 "--out", str(out), "--quiet"]) == 0
    reports = json.loads((out / "bounds.json").read_text())
    assert len(reports) == 2
    assert all(r["satisfied"] for r in reports)
    assert {"bound", "lhs", "rhs", "slack", "satisfied"} <= set(reports[0])


def test_verify_lemma1_zero_loss_arm_rhs_is_T_over_K(tmp_path):
    doc = json.loads(json.dumps(EASY_CONFIG))
    doc["attacker"] = {"strategy": "none", "target_arm": 0}
    doc["experiment"]["horizons"] = [400]
    cfg = _write_config(tmp_path, doc)
    out = tmp_path / "out"
    assert main(["verify", cfg, "--theorem", "lemma1",
                 "--out", str(out), "--quiet"]) == 0
    reports = json.loads((out / "bounds.json").read_text())
    arm1 = next(r for r in reports if r["bound"] == "lemma1_arm_1")
    assert arm1["rhs"] == pytest.approx(400 / 2)


def test_verify_lemma1_rejects_attacked_config(tmp_path, capsys):
    cfg = _write_config(tmp_path, EASY_CONFIG)
    assert main(["verify", cfg, "--theorem", "lemma1",
                 "--out", str(tmp_path / "out")]) == 2
    assert "lemma1" in capsys.readouterr().err


def test_verify_thm1_with_auto_bound_constant(tmp_path):
    doc = json.loads(json.dumps(EASY_CONFIG))
    doc["experiment"]["horizons"] = [500]
    doc["verify"] = {"M": "auto"}
    cfg = _write_config(tmp_path, doc)
    out = tmp_path / "out"
    code = main(["verify", cfg, "--theorem", "thm1", "--out", str(out), "--quiet"])
    reports = json.loads((out / "bounds.json").read_text())
    assert {r["bound"] for r in reports} == {"thm1_selections", "thm1_cost"}
    assert code == (0 if all(r["satisfied"] for r in reports) else 1)


def test_verify_thm2_with_optimal_epsilon(tmp_path):
    doc = json.loads(json.dumps(EASY_CONFIG))
    doc["environment"] = {"kind": "constant", "losses": [1.0, 0.0]}
    doc["attacker"] = {"strategy": "general", "target_arm": 0,
                       "alpha": 0.5, "epsilon": "optimal"}
    doc["experiment"]["horizons"] = [400]
    doc["verify"] = {"M": "auto"}
    cfg = _write_config(tmp_path, doc)
    out = tmp_path / "out"
    main(["verify", cfg, "--theorem", "thm2", "--out", str(out), "--quiet"])
    reports = json.loads((out / "bounds.json").read_text())
    # epsilon resolved to (1 - 0.5)/2 = 0.25: cost rhs carries T^0.75/0.75
    cost = next(r for r in reports if r["bound"] == "thm2_cost")
    T = 400
    assert cost["rhs"] > T ** 0.75 / 0.75


def test_verify_thm_strategy_mismatch(tmp_path, capsys):
    cfg = _write_config(tmp_path, EASY_CONFIG)
    assert main(["verify", cfg, "--theorem", "thm2",
                 "--out", str(tmp_path / "out")]) == 2
    assert "general" in capsys.readouterr().err


def test_verify_lower_bound_small(tmp_path):
    doc = json.loads(json.dumps(EASY_CONFIG))
    doc["player"] = {"kind": "exp3", "eta": {"beta": 1.0, "alpha": 0.5}}
    doc["experiment"]["horizons"] = [500, 2000, 8000]
    doc["experiment"]["trials"] = 4
    cfg = _write_config(tmp_path, doc)
    out = tmp_path / "out"
    code = main(["verify", cfg, "--theorem", "lower_bound",
                 "--out", str(out), "--quiet"])
    reports = json.loads((out / "bounds.json").read_text())
    assert reports[0]["bound"] == "lower_bound_cost_exponent"
    assert code in (0, 1)


def test_run_example1_environment(tmp_path):
    doc = {
        "environment": {"kind": "example1"},
        "player": {"kind": "exp3", "eta": "auto"},
        "attacker": {"strategy": "easy", "target_arm": 1},
        "experiment": {"horizons": [300], "trials": 2, "base_seed": 0},
    }
    cfg = _write_config(tmp_path, doc)
    assert main(["run", cfg, "--out", str(tmp_path / "out"), "--quiet"]) == 0


def test_run_exprb_player(tmp_path):
    doc = json.loads(json.dumps(EASY_CONFIG))
    doc["player"] = {"kind": "exprb", "phi_exponent": 0.5}
    cfg = _write_config(tmp_path, doc)
    assert main(["run", cfg, "--out", str(tmp_path / "out"), "--quiet"]) == 0
