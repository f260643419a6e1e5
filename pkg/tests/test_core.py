import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from banditpoison.core import (
    DomainError,
    EnvDomainError,
    MalformedTraceError,
    RoundRecord,
    Trace,
    TrialSummary,
    compute_regret,
    export_trace_csv,
    summarize_trace,
    validate_loss,
)
from banditpoison.environments import make_constant_env, make_example1_env, make_table_env


def test_validate_loss_interior_and_boundary():
    assert validate_loss(0.5) == 0.5
    assert validate_loss(1.0) == 1.0
    assert validate_loss(0.0) == 0.0


@pytest.mark.parametrize("bad", [1.2, -0.1, float("nan"), 2.0])
def test_validate_loss_rejects_out_of_range(bad):
    with pytest.raises(DomainError):
        validate_loss(bad)


def test_round_record_cost_identity_enforced():
    RoundRecord(t=1, arm=0, clean_loss=0.2, perturbed_loss=0.9, cost=abs(0.9 - 0.2))
    with pytest.raises(DomainError):
        RoundRecord(t=1, arm=0, clean_loss=0.2, perturbed_loss=0.9, cost=0.5)


def test_round_record_policy_must_be_distribution():
    RoundRecord(t=1, arm=0, clean_loss=0.0, perturbed_loss=0.0, cost=0.0,
                policy=(0.5, 0.5))
    with pytest.raises(DomainError):
        RoundRecord(t=1, arm=0, clean_loss=0.0, perturbed_loss=0.0, cost=0.0,
                    policy=(0.7, 0.5))


def _records(arms, clean, pert):
    return [
        RoundRecord(t=i + 1, arm=a, clean_loss=c, perturbed_loss=p, cost=abs(p - c))
        for i, (a, c, p) in enumerate(zip(arms, clean, pert))
    ]


def test_summarize_trace_direct_sum():
    recs = _records([0, 0, 0], [0.9, 0.8, 1.0], [1.0, 1.0, 1.0])
    s = summarize_trace(recs, K=2)
    assert s.selections == (3, 0)
    assert s.total_cost == pytest.approx(0.1 + 0.2 + 0.0)


def test_summarize_trace_empty_errors():
    with pytest.raises(MalformedTraceError):
        summarize_trace([], K=2)


def test_summarize_trace_noncontiguous_errors():
    recs = _records([0, 1], [0.5, 0.5], [0.5, 0.5])
    recs = [recs[1], recs[0]]  # t = 2, 1
    with pytest.raises(MalformedTraceError):
        summarize_trace(recs, K=2)


def test_trial_summary_selections_must_sum_to_horizon():
    with pytest.raises(MalformedTraceError):
        TrialSummary(T=5, selections=(2, 2), total_cost=0.0)


def test_trial_summary_cost_within_horizon():
    with pytest.raises(DomainError):
        TrialSummary(T=2, selections=(1, 1), total_cost=3.0)


def _trace_of_arms(arms, env):
    arms = np.asarray(arms)
    clean = env.losses_for(arms)
    return Trace(arms, clean, clean, np.zeros(len(arms)), env.K)


def test_regret_always_arm1_on_example1_is_sqrt_T():
    T = 10**4
    env = make_example1_env(T)
    trace = _trace_of_arms(np.ones(T, dtype=np.int64), env)
    assert compute_regret(trace, env, "clean") == pytest.approx(100.0)


def test_regret_of_best_arm_trace_is_zero():
    env = make_constant_env([0.5, 0.1], 50)
    trace = _trace_of_arms(np.ones(50, dtype=np.int64), env)
    assert compute_regret(trace, env, "clean") == 0.0


def test_regret_two_round_hand_enumeration():
    # chosen (arm 0, arm 0): 0.2 + 0.4 = 0.6; hindsight sums 0.6 and 0.9.
    env = make_table_env(np.array([[0.2, 0.8], [0.4, 0.1]]))
    trace = _trace_of_arms([0, 0], env)
    assert compute_regret(trace, env, "clean") == pytest.approx(0.0)


def test_regret_undefined_lookup_errors():
    env = make_constant_env([0.2, 0.8], 3)
    trace = _trace_of_arms([0, 0, 0, 0], make_constant_env([0.2, 0.8], 4))
    with pytest.raises(EnvDomainError):
        compute_regret(trace, env, "clean")


def test_regret_unknown_mode_errors():
    env = make_constant_env([0.2, 0.8], 2)
    trace = _trace_of_arms([0, 0], env)
    with pytest.raises(ValueError):
        compute_regret(trace, env, "typo")


@st.composite
def _table_and_arms(draw):
    T = draw(st.integers(1, 30))
    K = draw(st.integers(2, 4))
    table = draw(
        st.lists(
            st.lists(st.floats(0, 1, allow_nan=False), min_size=K, max_size=K),
            min_size=T, max_size=T,
        )
    )
    arms = draw(st.lists(st.integers(0, K - 1), min_size=T, max_size=T))
    return np.array(table), arms


@given(_table_and_arms())
@settings(max_examples=100)
def test_regret_matches_bruteforce_enumeration(data):
    table, arms = data
    env = make_table_env(table)
    trace = _trace_of_arms(arms, env)
    # independent oracle: plain python loops over rounds and arms
    chosen = sum(table[t][a] for t, a in enumerate(arms))
    best = min(sum(table[t][a] for t in range(len(arms))) for a in range(env.K))
    assert compute_regret(trace, env, "clean") == pytest.approx(chosen - best, abs=1e-9)


@given(_table_and_arms())
@settings(max_examples=60)
def test_selection_counts_sum_to_horizon_and_cost_bounded(data):
    table, arms = data
    env = make_table_env(table)
    clean = env.losses_for(np.asarray(arms))
    pert = np.minimum(1.0, clean + 0.3)
    trace = Trace(np.asarray(arms), clean, pert, np.abs(pert - clean), env.K)
    s = summarize_trace(trace, env.K)
    assert sum(s.selections) == len(arms)
    assert 0.0 <= s.total_cost <= len(arms)


def test_trace_records_roundtrip():
    env = make_constant_env([0.25, 0.75], 3)
    arms = np.array([1, 0, 1])
    clean = env.losses_for(arms)
    pert = np.array([1.0, 0.25, 1.0])
    pol = np.array([[0.5, 0.5], [0.4, 0.6], [0.25, 0.75]])
    trace = Trace(arms, clean, pert, np.abs(pert - clean), 2, policies=pol)
    recs = list(trace)
    assert [r.t for r in recs] == [1, 2, 3]
    assert recs[0].policy == (0.5, 0.5)
    assert recs[1].cost == pytest.approx(0.0)
    again = summarize_trace(recs, 2)
    assert again.selections == summarize_trace(trace, 2).selections


def test_export_trace_csv(tmp_path):
    arms = np.array([0, 1])
    clean = np.array([0.5, 0.0])
    pert = np.array([0.5, 1.0])
    trace = Trace(arms, clean, pert, np.abs(pert - clean), 2,
                  policies=np.array([[0.5, 0.5], [0.25, 0.75]]))
    path = tmp_path / "trace.csv"
    export_trace_csv(trace, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,arm,clean_loss,perturbed_loss,cost,pi_0,pi_1"
    assert lines[1].split(",")[:2] == ["1", "0"]
    # values round-trip through repr
    assert float(lines[2].split(",")[4]) == 1.0
    assert float(lines[2].split(",")[6]) == 0.75
