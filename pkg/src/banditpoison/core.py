"""Domain primitives, trace bookkeeping, and regret/cost metrics.

Everything downstream (environments, players, attackers, harness) shares the
vocabulary defined here: bounded losses in [0, 1], 1-based round indices, and
per-round perturbation cost |perturbed - clean|.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Iterator, Sequence

import numpy as np

# Arms are plain integer indices in [0, K).
ArmId = int


class DomainError(ValueError):
    """A value lies outside its mathematical domain (e.g. loss not in [0, 1])."""


class EnvDomainError(DomainError):
    """A (round, arm) lookup falls outside the environment's domain."""


class MalformedTraceError(ValueError):
    """A round-record sequence is empty or its round indices are not 1..T."""


class ParameterError(ValueError):
    """An algorithm parameter violates its required range."""


class IngestionError(ValueError):
    """A file could not be parsed into a valid environment."""


class UsageError(ValueError):
    """An operation was applied to a configuration it is not defined for."""


def validate_loss(x: float) -> float:
    """Return ``x`` unchanged if it is a valid bounded loss in [0, 1]."""
    x = float(x)
    if not 0.0 <= x <= 1.0:  # also rejects NaN
        raise DomainError(f"loss value {x!r} outside [0, 1]")
    return x


def validate_arm(a: int, K: int) -> int:
    """Return ``a`` unchanged if it is a valid arm index for ``K`` arms."""
    a = int(a)
    if not 0 <= a < K:
        raise DomainError(f"arm index {a} outside [0, {K})")
    return a


@dataclass(frozen=True)
class RoundRecord:
    """Full audit trail of one round.

    ``t`` is 1-based.  ``cost`` must equal |perturbed_loss - clean_loss|
    exactly; it is recomputed from the stored losses on construction so the
    identity can never drift.  ``policy`` is the sampling distribution used in
    this round and is optional because full policy traces are large at long
    horizons.
    """

    t: int
    arm: ArmId
    clean_loss: float
    perturbed_loss: float
    cost: float
    policy: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.t < 1:
            raise MalformedTraceError(f"round index {self.t} is not 1-based")
        validate_loss(self.clean_loss)
        validate_loss(self.perturbed_loss)
        if self.cost != abs(self.perturbed_loss - self.clean_loss):
            raise DomainError(
                f"cost {self.cost!r} != |perturbed - clean| at t={self.t}"
            )
        if self.policy is not None:
            p = np.asarray(self.policy, dtype=float)
            if (p < 0.0).any() or abs(float(p.sum()) - 1.0) > 1e-9:
                raise DomainError(f"policy {self.policy!r} is not a distribution")


class Trace:
    """Columnar trace of one trial: arrays indexed by round, rounds 1..T.

    Behaves as a sequence of :class:`RoundRecord` while keeping storage compact
    enough for T = 1e6 runs.  All arrays are read-only after construction.
    """

    def __init__(
        self,
        arms: np.ndarray,
        clean: np.ndarray,
        perturbed: np.ndarray,
        costs: np.ndarray,
        K: int,
        policies: np.ndarray | None = None,
    ) -> None:
        T = len(arms)
        if T == 0:
            raise MalformedTraceError("empty trace")
        if not (len(clean) == len(perturbed) == len(costs) == T):
            raise MalformedTraceError("trace columns have mismatched lengths")
        if policies is not None and policies.shape != (T, K):
            raise MalformedTraceError("policy column has wrong shape")
        self.arms = np.ascontiguousarray(arms, dtype=np.int64)
        self.clean = np.ascontiguousarray(clean, dtype=np.float64)
        self.perturbed = np.ascontiguousarray(perturbed, dtype=np.float64)
        self.costs = np.ascontiguousarray(costs, dtype=np.float64)
        self.policies = policies
        self.K = int(K)
        for a in (self.arms, self.clean, self.perturbed, self.costs):
            a.flags.writeable = False
        if self.policies is not None:
            self.policies.flags.writeable = False

    @property
    def T(self) -> int:
        return len(self.arms)

    def __len__(self) -> int:
        return len(self.arms)

    def record(self, t: int) -> RoundRecord:
        """Materialize the record of round ``t`` (1-based)."""
        if not 1 <= t <= self.T:
            raise MalformedTraceError(f"round {t} outside 1..{self.T}")
        i = t - 1
        pol = None
        if self.policies is not None:
            pol = tuple(float(x) for x in self.policies[i])
        return RoundRecord(
            t=t,
            arm=int(self.arms[i]),
            clean_loss=float(self.clean[i]),
            perturbed_loss=float(self.perturbed[i]),
            cost=float(self.costs[i]),
            policy=pol,
        )

    def __iter__(self) -> Iterator[RoundRecord]:
        for t in range(1, self.T + 1):
            yield self.record(t)


@dataclass(frozen=True)
class TrialSummary:
    """Per-trial aggregates: selection counts, total cost, regrets.

    ``selections[a]`` counts the rounds where arm ``a`` was chosen and must sum
    to the horizon.  Regrets are optional until filled by
    :func:`compute_regret` (``summarize_trace`` computes counts and cost only).
    """

    T: int
    selections: tuple[int, ...]
    total_cost: float
    regret_template: float | None = None
    regret_clean: float | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        if sum(self.selections) != self.T:
            raise MalformedTraceError(
                f"selections sum {sum(self.selections)} != horizon {self.T}"
            )
        if not -1e-9 <= self.total_cost <= self.T + 1e-9:
            raise DomainError(f"total cost {self.total_cost} outside [0, T]")

    def with_regrets(self, regret_template: float, regret_clean: float) -> "TrialSummary":
        return replace(self, regret_template=regret_template, regret_clean=regret_clean)


def _trace_from_records(records: Sequence[RoundRecord], K: int) -> Trace:
    arms = np.array([r.arm for r in records], dtype=np.int64)
    clean = np.array([r.clean_loss for r in records], dtype=np.float64)
    pert = np.array([r.perturbed_loss for r in records], dtype=np.float64)
    costs = np.array([r.cost for r in records], dtype=np.float64)
    return Trace(arms, clean, pert, costs, K)


def _as_trace(records: "Trace | Sequence[RoundRecord]", K: int | None = None) -> Trace:
    if isinstance(records, Trace):
        return records
    records = list(records)
    if not records:
        raise MalformedTraceError("empty trace")
    for i, r in enumerate(records):
        if r.t != i + 1:
            raise MalformedTraceError(
                f"round indices not contiguous: expected t={i + 1}, got t={r.t}"
            )
    if K is None:
        K = max(r.arm for r in records) + 1
    return _trace_from_records(records, K)


def summarize_trace(records: "Trace | Sequence[RoundRecord]", K: int,
                    seed: int | None = None) -> TrialSummary:
    """Count per-arm selections and sum the per-round costs of a trace.

    Round indices must be exactly 1..T in order.  Regret fields are left
    unset; callers fill them via :func:`compute_regret`.
    """
    trace = _as_trace(records, K)
    if trace.arms.max() >= K or trace.arms.min() < 0:
        raise MalformedTraceError(f"trace contains arm outside [0, {K})")
    counts = np.bincount(trace.arms, minlength=K)
    return TrialSummary(
        T=trace.T,
        selections=tuple(int(c) for c in counts),
        total_cost=float(trace.costs.sum()),
        seed=seed,
    )


def compute_regret(records, losses, mode: str) -> float:
    """Hindsight regret of a trace against a loss matrix.

    Returns sum_t M_t(arm_t) - min_a sum_t M_t(a) where M is ``losses``.  In
    ``template`` mode the caller passes the attacker's template matrix; the
    result is then nonnegative because the template's target column is
    pointwise minimal.  In ``clean`` mode the realized value may be negative
    for traces that beat every fixed arm.
    """
    if mode not in ("clean", "template"):
        raise ParameterError(f"unknown regret mode {mode!r}")
    trace = _as_trace(records)
    if trace.T > losses.T:
        raise EnvDomainError(
            f"trace horizon {trace.T} exceeds environment horizon {losses.T}"
        )
    if int(trace.arms.max()) >= losses.K:
        raise EnvDomainError(
            f"trace selects arm {int(trace.arms.max())} outside environment with K={losses.K}"
        )
    chosen = losses.chosen_loss_sum(trace.arms)
    best = float(losses.column_sums(trace.T).min())
    return chosen - best


def export_trace_csv(trace: "Trace | Sequence[RoundRecord]", path) -> None:
    """Write a trace as CSV: ``t,arm,clean_loss,perturbed_loss,cost`` plus
    ``pi_0..pi_{K-1}`` columns when the trace recorded policies."""
    trace = _as_trace(trace)
    header = "t,arm,clean_loss,perturbed_loss,cost"
    if trace.policies is not None:
        header += "," + ",".join(f"pi_{a}" for a in range(trace.K))
    lines = [header]
    for i in range(trace.T):
        row = (
            f"{i + 1},{int(trace.arms[i])},{float(trace.clean[i])!r},"
            f"{float(trace.perturbed[i])!r},{float(trace.costs[i])!r}"
        )
        if trace.policies is not None:
            row += "," + ",".join(repr(float(x)) for x in trace.policies[i])
        lines.append(row)
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
