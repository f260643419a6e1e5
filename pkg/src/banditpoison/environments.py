"""Non-adaptive loss-function generators.

An environment is a deterministic mapping (round t, arm a) -> loss in [0, 1],
fixed before play starts and never influenced by the player's behavior.
Constant-per-arm environments (including the two-arm tie-breaking example with
losses 1 - sqrt(T)/T and 1) are stored as a single row; only file-loaded
environments materialize a full T x K table.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .core import ArmId, DomainError, EnvDomainError, IngestionError, validate_loss

_KINDS = ("constant", "example1", "table")


@dataclass(frozen=True)
class LossMatrix:
    """Deterministic loss lookup over rounds 1..T and arms 0..K-1.

    ``row`` holds the per-arm losses for the constant kinds; ``table`` holds
    the dense array for the table kind.  Arrays are read-only.
    """

    K: int
    T: int
    kind: str
    row: np.ndarray | None = None
    table: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise DomainError(f"unknown environment kind {self.kind!r}")
        if self.K < 2:
            raise DomainError(f"arm count K={self.K} must be >= 2")
        if self.T < 1:
            raise DomainError(f"horizon T={self.T} must be >= 1")

    def loss(self, t: int, a: ArmId) -> float:
        """Loss of arm ``a`` at round ``t`` (1-based)."""
        if not 1 <= t <= self.T:
            raise EnvDomainError(f"round {t} outside 1..{self.T}")
        if not 0 <= a < self.K:
            raise EnvDomainError(f"arm {a} outside [0, {self.K})")
        if self.table is not None:
            return float(self.table[t - 1, a])
        return float(self.row[a])

    def column(self, a: ArmId, upto: int | None = None) -> np.ndarray:
        """Losses of arm ``a`` over rounds 1..upto (default: full horizon)."""
        T = self.T if upto is None else upto
        if not 1 <= T <= self.T:
            raise EnvDomainError(f"prefix horizon {T} outside 1..{self.T}")
        if not 0 <= a < self.K:
            raise EnvDomainError(f"arm {a} outside [0, {self.K})")
        if self.table is not None:
            return self.table[:T, a]
        return np.full(T, self.row[a])

    def column_sums(self, upto: int | None = None) -> np.ndarray:
        """Per-arm total loss over rounds 1..upto."""
        T = self.T if upto is None else upto
        if not 1 <= T <= self.T:
            raise EnvDomainError(f"prefix horizon {T} outside 1..{self.T}")
        if self.table is not None:
            return self.table[:T].sum(axis=0)
        return self.row * float(T)

    def losses_for(self, arms: np.ndarray) -> np.ndarray:
        """Vectorized lookup of the chosen arm's loss per round, arms[i] at t=i+1."""
        arms = np.asarray(arms)
        if len(arms) > self.T:
            raise EnvDomainError(
                f"trace length {len(arms)} exceeds horizon {self.T}"
            )
        if len(arms) and (int(arms.max()) >= self.K or int(arms.min()) < 0):
            raise EnvDomainError(f"arm index outside [0, {self.K})")
        if self.table is not None:
            return self.table[np.arange(len(arms)), arms]
        return self.row[arms]

    def chosen_loss_sum(self, arms: np.ndarray) -> float:
        """Total loss along a trace.  For constant kinds this is computed from
        selection counts so single-arm traces match ``column_sums`` exactly."""
        if self.table is not None:
            return float(self.losses_for(arms).sum())
        arms = np.asarray(arms)
        if len(arms) > self.T:
            raise EnvDomainError(f"trace length {len(arms)} exceeds horizon {self.T}")
        if len(arms) and (int(arms.max()) >= self.K or int(arms.min()) < 0):
            raise EnvDomainError(f"arm index outside [0, {self.K})")
        counts = np.bincount(arms, minlength=self.K)
        return float((counts * self.row).sum())


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.flags.writeable = False
    return a


def make_constant_env(losses, T: int) -> LossMatrix:
    """Environment whose per-arm losses never change across rounds."""
    row = [validate_loss(x) for x in losses]
    if len(row) < 2:
        raise DomainError(f"need at least 2 arms, got {len(row)}")
    if T < 1:
        raise DomainError(f"horizon T={T} must be >= 1")
    return LossMatrix(K=len(row), T=int(T), kind="constant", row=_frozen(np.array(row)))


def make_example1_env(T: int) -> LossMatrix:
    """Two arms with losses 1 - sqrt(T)/T and 1.

    Arm 0 is best in hindsight, yet a player that always selects arm 1 incurs
    only sqrt(T) regret -- the tie-breaking example motivating target-arm
    attacks on no-regret players.
    """
    if T < 1:
        raise DomainError(f"horizon T={T} must be >= 1")
    row = np.array([1.0 - np.sqrt(T) / T, 1.0])
    return LossMatrix(K=2, T=int(T), kind="example1", row=_frozen(row))


def make_table_env(table: np.ndarray, kind: str = "table") -> LossMatrix:
    """Environment backed by a dense T x K array of losses."""
    table = np.asarray(table, dtype=np.float64)
    if table.ndim != 2:
        raise DomainError(f"table must be 2-D, got shape {table.shape}")
    T, K = table.shape
    if K < 2:
        raise DomainError(f"need at least 2 arms, got {K}")
    if T < 1:
        raise DomainError("table has no rows")
    if not ((table >= 0.0) & (table <= 1.0)).all():
        bad = np.argwhere(~((table >= 0.0) & (table <= 1.0)))[0]
        raise DomainError(
            f"loss value {table[bad[0], bad[1]]!r} outside [0, 1] "
            f"at row {bad[0] + 1}, column {bad[1] + 1}"
        )
    return LossMatrix(K=K, T=T, kind=kind, table=_frozen(table))


def env_loss(env: LossMatrix, t: int, a: ArmId) -> float:
    """Loss of arm ``a`` at round ``t`` in environment ``env``."""
    return env.loss(t, a)


def load_env_csv(path) -> LossMatrix:
    """Load a table environment from a headerless CSV of T rows x K columns."""
    rows: list[list[float]] = []
    with open(path, newline="") as fh:
        for i, raw in enumerate(csv.reader(fh), start=1):
            if not raw:
                continue
            if rows and len(raw) != len(rows[0]):
                raise IngestionError(
                    f"{path}: row {i} has {len(raw)} columns, expected {len(rows[0])}"
                )
            parsed = []
            for j, cell in enumerate(raw, start=1):
                try:
                    v = float(cell)
                except ValueError:
                    raise IngestionError(
                        f"{path}: unparseable value {cell!r} at row {i}, column {j}"
                    ) from None
                if not 0.0 <= v <= 1.0:
                    raise IngestionError(
                        f"{path}: loss {v!r} outside [0, 1] at row {i}, column {j}"
                    )
                parsed.append(v)
            rows.append(parsed)
    if not rows:
        raise IngestionError(f"{path}: empty environment file")
    if len(rows[0]) < 2:
        raise IngestionError(f"{path}: need at least 2 columns, got {len(rows[0])}")
    return make_table_env(np.array(rows))


@dataclass(frozen=True)
class EnvironmentSpec:
    """Config-level description of an environment, built per horizon.

    ``constant`` needs ``losses``; ``example1`` derives its losses from T;
    ``table`` loads ``path`` once and serves prefixes of it.
    """

    kind: str
    losses: tuple[float, ...] | None = None
    path: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise DomainError(f"unknown environment kind {self.kind!r}")
        if self.kind == "constant":
            if not self.losses or len(self.losses) < 2:
                raise DomainError("constant environment needs >= 2 per-arm losses")
            for x in self.losses:
                validate_loss(x)
        if self.kind == "table" and not self.path:
            raise DomainError("table environment needs a CSV path")

    def build(self, T: int) -> LossMatrix:
        if self.kind == "constant":
            return make_constant_env(self.losses, T)
        if self.kind == "example1":
            return make_example1_env(T)
        env = load_env_csv(self.path)
        if T > env.T:
            raise EnvDomainError(
                f"requested horizon {T} exceeds table rows {env.T} in {self.path}"
            )
        return make_table_env(np.array(env.table[:T]))

    @property
    def K(self) -> int | None:
        """Arm count when known without reading files."""
        if self.kind == "constant":
            return len(self.losses)
        if self.kind == "example1":
            return 2
        return None
