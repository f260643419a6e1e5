"""Victim bandit players: exponential weights (Exp3) and a budget-robust variant.

Exp3 keeps one positive weight per arm, plays the normalized weights as its
policy, and multiplies the chosen arm's weight by exp(-eta * loss / prob) --
the importance-weighted update that keeps the loss estimator unbiased.  The
robust variant mixes a uniform exploration floor gamma into the policy, with
gamma sized from the attack budget the player assumes.

The scalar arithmetic here is deliberately written in the same operation order
as the compiled simulation kernel so that both paths produce bit-identical
traces; tests enforce this.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import ArmId, DomainError, ParameterError, validate_loss

# Weights are floored at WEIGHT_FLOOR after each update so they stay strictly
# positive (weight ratios genuinely underflow float64 under heavy attack), and
# all weights are rescaled by 1/max when the max itself decays below
# RENORM_THRESHOLD.  Neither step changes the policy by more than ~1e-15.
WEIGHT_FLOOR = 1e-300
RENORM_THRESHOLD = 1e-100


@dataclass(frozen=True)
class PolicyDistribution:
    """Probability vector over arms."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        p = np.ascontiguousarray(self.probs, dtype=np.float64)
        if (p < 0.0).any():
            raise ParameterError(f"negative policy entry in {p}")
        if abs(float(p.sum()) - 1.0) > 1e-12:
            raise ParameterError(f"policy sums to {float(p.sum())!r}, not 1")
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    @property
    def K(self) -> int:
        return len(self.probs)


@dataclass(frozen=True)
class PlayerState:
    """Exponential-weights internals.

    ``gamma`` = 0 gives plain Exp3; ``phi`` records the attack budget assumed
    by the robust variant (it only enters through gamma's value).
    """

    weights: np.ndarray
    eta: float
    gamma: float = 0.0
    phi: float = 0.0
    t: int = 1

    def __post_init__(self) -> None:
        w = np.ascontiguousarray(self.weights, dtype=np.float64)
        if len(w) < 2:
            raise ParameterError(f"need >= 2 arms, got {len(w)}")
        if not (w > 0.0).all():
            raise ParameterError("all weights must be strictly positive")
        if self.eta <= 0.0:
            raise ParameterError(f"learning rate eta={self.eta!r} must be > 0")
        if not 0.0 <= self.gamma <= 0.5:
            raise ParameterError(f"exploration gamma={self.gamma!r} outside [0, 1/2]")
        if self.phi < 0.0:
            raise ParameterError(f"assumed budget phi={self.phi!r} must be >= 0")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def K(self) -> int:
        return len(self.weights)


def exp3_init(K: int, eta: float) -> PlayerState:
    """Fresh Exp3 state: unit weights, no exploration mixing."""
    if K < 2:
        raise ParameterError(f"need >= 2 arms, got K={K}")
    if eta <= 0.0:
        raise ParameterError(f"learning rate eta={eta!r} must be > 0")
    return PlayerState(weights=np.ones(K), eta=float(eta))


def exp3_default_eta(K: int, T) -> float:
    """Learning rate sqrt(2 ln K / (T K)).

    Minimizes the Exp3 regret bound (ln K)/eta + (eta/2) T K, giving regret at
    most sqrt(2 T K ln K) -- rate exponent 1/2.
    """
    if K < 2:
        raise ParameterError(f"need >= 2 arms, got K={K}")
    if T < 1:
        raise ParameterError(f"horizon T={T} must be >= 1")
    return math.sqrt(2.0 * math.log(K) / (T * K))


def exp3_lower_bound_eta(T, alpha: float, beta: float) -> float:
    """Learning rate beta * T**(-alpha), the schedule used by the cost lower bound."""
    if not 0.5 <= alpha < 1.0:
        raise ParameterError(f"regret-rate exponent alpha={alpha!r} outside [1/2, 1)")
    if beta <= 0.0:
        raise ParameterError(f"beta={beta!r} must be > 0")
    if T < 1:
        raise ParameterError(f"horizon T={T} must be >= 1")
    return beta * T ** -alpha


def exprb_init(K: int, T: int, phi: float) -> PlayerState:
    """Robust variant assuming attack budget ``phi``.

    Uses eta = sqrt(ln K / (T K)) and uniform exploration
    gamma = min(1/2, sqrt(K ln K / T) + K phi ln T / T), sized so the induced
    regret has the O(sqrt(K log K T) + K phi log T) shape of budget-robust
    exponential-weights players.  With phi = 0 the mix decays like
    sqrt(K ln K / T) and the behavior approaches plain Exp3 as T grows.
    """
    if K < 2:
        raise ParameterError(f"need >= 2 arms, got K={K}")
    if T < 1:
        raise ParameterError(f"horizon T={T} must be >= 1")
    if phi < 0.0:
        raise ParameterError(f"assumed budget phi={phi!r} must be >= 0")
    eta = math.sqrt(math.log(K) / (T * K))
    gamma = min(0.5, math.sqrt(K * math.log(K) / T) + K * phi * math.log(T) / T)
    return PlayerState(weights=np.ones(K), eta=eta, gamma=gamma, phi=float(phi))


def _policy_probs(weights: np.ndarray, gamma: float) -> np.ndarray:
    # Same operation order as the kernel: sequential weight sum, then
    # (1-gamma) * w/s + gamma/K per arm.  With gamma=0 this is exactly w/s.
    K = len(weights)
    s = 0.0
    for i in range(K):
        s += float(weights[i])
    p = np.empty(K)
    for i in range(K):
        p[i] = (1.0 - gamma) * (float(weights[i]) / s) + gamma / K
    return p


def policy(state: PlayerState) -> PolicyDistribution:
    """Sampling distribution of the current state (post exploration mixing)."""
    return PolicyDistribution(_policy_probs(state.weights, state.gamma))


def update(state: PlayerState, chosen: ArmId, observed_loss: float) -> PlayerState:
    """One exponential-weights update after observing ``observed_loss`` on ``chosen``.

    Only the chosen arm's weight changes, multiplied by
    exp(-eta * loss / pi(chosen)) where pi is the distribution the arm was
    sampled from.  A zero loss therefore leaves the state unchanged apart from
    the round counter.
    """
    if not 0 <= chosen < state.K:
        raise DomainError(f"arm index {chosen} outside [0, {state.K})")
    observed_loss = validate_loss(observed_loss)
    p = _policy_probs(state.weights, state.gamma)
    w = state.weights.copy()
    lhat = observed_loss / p[chosen]
    w[chosen] = w[chosen] * math.exp(-state.eta * lhat)
    if w[chosen] < WEIGHT_FLOOR:
        w[chosen] = WEIGHT_FLOOR
    m = w[0]
    for i in range(1, state.K):
        if w[i] > m:
            m = w[i]
    if m < RENORM_THRESHOLD:
        for i in range(state.K):
            w[i] = w[i] / m
    return PlayerState(weights=w, eta=state.eta, gamma=state.gamma,
                       phi=state.phi, t=state.t + 1)


def _sample_index(probs: np.ndarray, u: float) -> int:
    # Inverse CDF over arms in index order; u equal to a cumulative sum picks
    # the lower-indexed arm.  Falls back to the last arm if rounding leaves
    # the running sum below u.
    K = len(probs)
    acc = 0.0
    for i in range(K):
        acc += float(probs[i])
        if u <= acc:
            return i
    return K - 1


def sample_arm(dist: PolicyDistribution, rng: np.random.Generator) -> ArmId:
    """Draw an arm by inverse-CDF sampling with one uniform from ``rng``."""
    return _sample_index(dist.probs, float(rng.random()))


@dataclass(frozen=True)
class PlayerSpec:
    """Config-level description of a player, resolved per (K, T).

    ``exp3`` takes either an explicit ``eta``, the sentinel ``"auto"`` for
    sqrt(2 ln K / (T K)), or a ``(beta, alpha)`` pair for the
    beta * T**(-alpha) schedule.  ``exprb`` takes ``phi_exponent`` so the
    assumed budget is phi = T**phi_exponent.
    """

    kind: str
    eta: float | str | None = "auto"
    beta: float | None = None
    alpha: float | None = None
    phi_exponent: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("exp3", "exprb"):
            raise ParameterError(f"unknown player kind {self.kind!r}")
        if self.kind == "exp3":
            if self.phi_exponent is not None:
                raise ParameterError("phi_exponent only applies to exprb")
            if (self.beta is None) != (self.alpha is None):
                raise ParameterError("beta and alpha must be given together")
            if self.beta is not None:
                if self.eta not in (None, "auto"):
                    raise ParameterError("give either eta or (beta, alpha), not both")
                if not 0.5 <= self.alpha < 1.0:
                    raise ParameterError(
                        f"alpha={self.alpha!r} outside [1/2, 1)"
                    )
                if self.beta <= 0.0:
                    raise ParameterError(f"beta={self.beta!r} must be > 0")
            elif isinstance(self.eta, str):
                if self.eta != "auto":
                    raise ParameterError(f"unknown eta sentinel {self.eta!r}")
            elif self.eta is None or self.eta <= 0.0:
                raise ParameterError(f"eta={self.eta!r} must be > 0")
        else:
            if self.phi_exponent is None:
                raise ParameterError("exprb needs phi_exponent (budget = T**phi_exponent)")

    def resolve(self, K: int, T: int) -> tuple[float, float, float]:
        """Concrete (eta, gamma, phi) for a run of ``K`` arms over ``T`` rounds."""
        if self.kind == "exprb":
            phi = float(T) ** self.phi_exponent
            st = exprb_init(K, T, phi)
            return st.eta, st.gamma, phi
        if self.beta is not None:
            return exp3_lower_bound_eta(T, self.alpha, self.beta), 0.0, 0.0
        if self.eta == "auto":
            return exp3_default_eta(K, T), 0.0, 0.0
        return float(self.eta), 0.0, 0.0

    def build(self, K: int, T: int) -> PlayerState:
        eta, gamma, phi = self.resolve(K, T)
        if self.kind == "exprb":
            return exprb_init(K, T, phi)
        return exp3_init(K, eta)
