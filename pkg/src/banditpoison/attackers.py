"""Template-based loss perturbation strategies.

Both attacks fix a template loss matrix before play and set the observed loss
to the template's value at (t, chosen arm).  The easy template keeps the
target arm's loss and boosts every other arm to 1; the general template
additionally caps the target arm's loss at 1 - t**(alpha + epsilon - 1) so the
target stays best-in-hindsight by a decaying margin even when its clean loss
touches 1.  The perturbations consume only (t, chosen arm, observed loss) --
never the full environment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernel import fill_general_target_column, general_cap
from .core import ArmId, DomainError, ParameterError, UsageError, validate_loss
from .environments import LossMatrix, make_table_env

STRATEGIES = ("none", "easy", "general")


def optimal_epsilon(alpha: float) -> float:
    """The schedule exponent (1 - alpha)/2 that minimizes asymptotic attack cost."""
    if not 0.5 <= alpha < 1.0:
        raise ParameterError(f"regret-rate exponent alpha={alpha!r} outside [1/2, 1)")
    return (1.0 - alpha) / 2.0


@dataclass(frozen=True)
class AttackerConfig:
    """Attack strategy plus its parameters.

    ``alpha`` is the victim's regret-rate exponent (the only knowledge the
    attacker needs); ``epsilon`` controls the general template's margin
    schedule and must satisfy 0 <= epsilon < 1 - alpha strictly.
    """

    strategy: str
    target: ArmId = 0
    alpha: float = 0.5
    epsilon: float | None = None

    def __post_init__(self) -> None:
        if self.strategy not in STRATEGIES:
            raise ParameterError(f"unknown attack strategy {self.strategy!r}")
        if self.target < 0:
            raise ParameterError(f"target arm {self.target} must be >= 0")
        if not 0.5 <= self.alpha < 1.0:
            raise ParameterError(f"alpha={self.alpha!r} outside [1/2, 1)")
        if self.strategy == "general":
            if self.epsilon is None:
                raise ParameterError("general strategy needs epsilon")
            if not 0.0 <= self.epsilon < 1.0 - self.alpha:
                raise ParameterError(
                    f"epsilon={self.epsilon!r} outside [0, 1 - alpha) "
                    f"= [0, {1.0 - self.alpha!r})"
                )

    @property
    def cap_exponent(self) -> float:
        """Exponent alpha + epsilon - 1 of the decaying margin schedule."""
        eps = 0.0 if self.epsilon is None else self.epsilon
        return self.alpha + eps - 1.0


def no_attack_perturb(t: int, a_t: ArmId, loss: float) -> float:
    """Identity baseline: the observed loss passes through untouched."""
    return validate_loss(loss)


def easy_template_perturb(cfg: AttackerConfig, t: int, a_t: ArmId, loss: float) -> float:
    """Keep the target arm's loss, boost every other arm's loss to 1."""
    loss = validate_loss(loss)
    return loss if a_t == cfg.target else 1.0


def general_template_perturb(cfg: AttackerConfig, t: int, a_t: ArmId, loss: float) -> float:
    """Cap the target arm's loss at 1 - t**(alpha+eps-1); boost others to 1.

    The schedule needs t >= 1 (its value at t = 1 is exactly 0, so the target
    loss is forced to 0 in the first round).
    """
    loss = validate_loss(loss)
    if t < 1:
        raise DomainError(f"round index {t} must be >= 1")
    if a_t != cfg.target:
        return 1.0
    cap = general_cap(float(t), cfg.cap_exponent)
    return cap if cap < loss else loss


def perturb(cfg: AttackerConfig, t: int, a_t: ArmId, loss: float) -> float:
    """Dispatch to the configured strategy's perturbation."""
    if cfg.strategy == "none":
        return no_attack_perturb(t, a_t, loss)
    if cfg.strategy == "easy":
        return easy_template_perturb(cfg, t, a_t, loss)
    return general_template_perturb(cfg, t, a_t, loss)


@dataclass
class AttackerState:
    """Running attacker with cumulative-cost accounting."""

    config: AttackerConfig
    cumulative_cost: float = 0.0

    def perturb(self, t: int, a_t: ArmId, loss: float) -> tuple[float, float]:
        """Perturb one observation; returns (perturbed loss, per-round cost)."""
        tilde = perturb(self.config, t, a_t, loss)
        cost = abs(tilde - loss)
        self.cumulative_cost += cost
        return tilde, cost


def template_loss(cfg: AttackerConfig, env: LossMatrix, t: int, a: ArmId) -> float:
    """Value the template matrix assigns to (t, a), using env for the target's loss."""
    if cfg.strategy not in ("easy", "general"):
        raise UsageError(f"strategy {cfg.strategy!r} has no template matrix")
    if not 0 <= a < env.K:
        raise DomainError(f"arm {a} outside [0, {env.K})")
    if a != cfg.target:
        # Template value of non-target arms is 1 regardless of round, but the
        # round must still be inside the environment's domain.
        env.loss(t, a)
        return 1.0
    base = env.loss(t, cfg.target)
    if cfg.strategy == "easy":
        return base
    cap = general_cap(float(t), cfg.cap_exponent)
    return cap if cap < base else base


def template_matrix(cfg: AttackerConfig, env: LossMatrix, T: int | None = None) -> LossMatrix:
    """Materialize the full template loss matrix as a table environment.

    Running a player against (env + this attacker) is equivalent to running it
    directly on the returned matrix; the equivalence is exact down to the bit
    because the target column is filled with the same compiled arithmetic the
    simulation kernel uses.
    """
    if cfg.strategy not in ("easy", "general"):
        raise UsageError(f"strategy {cfg.strategy!r} has no template matrix")
    T = env.T if T is None else T
    if cfg.target >= env.K:
        raise DomainError(f"target arm {cfg.target} outside [0, {env.K})")
    table = np.ones((T, env.K))
    target_col = np.ascontiguousarray(env.column(cfg.target, upto=T), dtype=np.float64)
    if cfg.strategy == "easy":
        table[:, cfg.target] = target_col
    else:
        out = np.empty(T)
        fill_general_target_column(out, target_col, cfg.cap_exponent)
        table[:, cfg.target] = out
    return make_table_env(table)
