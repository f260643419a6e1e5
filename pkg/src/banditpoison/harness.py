"""Experiment orchestration and numerical verification of the attack bounds.

A trial is a pure function of (environment, player spec, attacker config,
horizon, seed): the seed feeds one uniform draw per round through a fixed
inverse-CDF sampler, so repeated runs are bit-identical.  Experiments repeat
trials over seeds base_seed + i and aggregate means/stddevs per horizon; the
checkers compare those means against the selection/cost bounds with a
statistical slack of 3 * stddev / sqrt(trials).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernel
from .attackers import AttackerConfig, AttackerState, template_matrix
from .core import (
    ParameterError,
    Trace,
    TrialSummary,
    UsageError,
    compute_regret,
    summarize_trace,
)
from .environments import EnvironmentSpec, LossMatrix
from .players import PlayerSpec, _policy_probs, _sample_index

#: Metrics exposed per trial, beyond the per-arm selections_<a> counts.
METRICS = (
    "target_selections",
    "nontarget_selections",
    "target_fraction",
    "total_cost",
    "per_round_cost",
    "regret_clean",
    "regret_template",
)


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: a (environment, player, attacker) triple swept over horizons."""

    environment: EnvironmentSpec
    player: PlayerSpec
    attacker: AttackerConfig
    horizons: tuple[int, ...]
    trials: int
    base_seed: int
    record_policy: bool = False

    def __post_init__(self) -> None:
        horizons = tuple(int(T) for T in self.horizons)
        object.__setattr__(self, "horizons", horizons)
        if not horizons:
            raise ParameterError("need at least one horizon")
        if any(T < 1 for T in horizons):
            raise ParameterError(f"horizons must be >= 1, got {horizons}")
        if any(b <= a for a, b in zip(horizons, horizons[1:])):
            raise ParameterError(f"horizons must be strictly increasing, got {horizons}")
        if self.trials < 1:
            raise ParameterError(f"trials={self.trials} must be >= 1")


def _kernel_env_inputs(env: LossMatrix) -> tuple[np.ndarray, np.ndarray, bool]:
    if env.table is not None:
        return np.empty(0), env.table, True
    return env.row, np.empty((0, env.K)), False


def run_trial(
    env: LossMatrix,
    player_spec: PlayerSpec,
    attacker_cfg: AttackerConfig,
    T: int,
    seed: int,
    record_policy: bool = False,
    engine: str = "kernel",
    _template: LossMatrix | None = None,
) -> tuple[Trace, TrialSummary]:
    """Play one trial of T rounds and summarize it.

    Protocol per round: sample an arm from the player's policy, read the clean
    loss from ``env``, let the attacker perturb it, and update the player on
    the perturbed value.  ``engine="reference"`` runs the same mathematics
    through the pure-Python player/attacker operations (slow; used to
    cross-check the compiled kernel).
    """
    K = env.K
    if T > env.T:
        raise ParameterError(f"horizon {T} exceeds environment horizon {env.T}")
    if attacker_cfg.target >= K:
        raise ParameterError(
            f"attacker target {attacker_cfg.target} outside environment with K={K}"
        )
    eta, gamma, _phi = player_spec.resolve(K, T)
    us = np.random.default_rng(seed).random(T)
    strategy = _kernel.STRATEGY_CODES[attacker_cfg.strategy]

    if engine == "kernel":
        row, table, use_table = _kernel_env_inputs(env)
        arms, clean, pert, costs, policies = _kernel.play_rounds(
            K, T, eta, gamma, attacker_cfg.target, strategy,
            attacker_cfg.cap_exponent, row, table, use_table, us, record_policy,
        )
    elif engine == "reference":
        arms, clean, pert, costs, policies = _reference_rounds(
            env, attacker_cfg, K, T, eta, gamma, us, record_policy
        )
    else:
        raise ParameterError(f"unknown engine {engine!r}")

    trace = Trace(arms, clean, pert, costs, K,
                  policies=policies if record_policy else None)
    summary = summarize_trace(trace, K, seed=seed)
    regret_clean = compute_regret(trace, env, "clean")
    if attacker_cfg.strategy == "none":
        regret_template = regret_clean
    else:
        tmpl = _template if _template is not None else template_matrix(attacker_cfg, env, T)
        regret_template = compute_regret(trace, tmpl, "template")
    return trace, summary.with_regrets(regret_template, regret_clean)


def _reference_rounds(env, attacker_cfg, K, T, eta, gamma, us, record_policy):
    # Pure-Python mirror of the kernel, built from the public player/attacker
    # operations.  Consumes the identical uniform stream.
    from .players import PlayerState, update

    state = PlayerState(weights=np.ones(K), eta=eta, gamma=gamma)
    attacker = AttackerState(attacker_cfg)
    arms = np.empty(T, dtype=np.int64)
    clean = np.empty(T)
    pert = np.empty(T)
    costs = np.empty(T)
    policies = np.empty((T, K)) if record_policy else np.empty((0, K))
    for t in range(1, T + 1):
        probs = _policy_probs(state.weights, state.gamma)
        if record_policy:
            policies[t - 1] = probs
        a = _sample_index(probs, float(us[t - 1]))
        loss = env.loss(t, a)
        tilde, cost = attacker.perturb(t, a, loss)
        arms[t - 1] = a
        clean[t - 1] = loss
        pert[t - 1] = tilde
        costs[t - 1] = cost
        state = update(state, a, tilde)
    return arms, clean, pert, costs, policies


@dataclass
class AggregateSummary:
    """Per-horizon trial lists with mean/stddev accessors."""

    config: ExperimentConfig
    results: dict[int, list[TrialSummary]] = field(default_factory=dict)

    def trial_summaries(self, T: int) -> list[TrialSummary]:
        return self.results[T]

    def metric_values(self, T: int, metric: str) -> np.ndarray:
        """Per-trial values of ``metric`` at horizon ``T``, in trial order."""
        target = self.config.attacker.target
        out = []
        for s in self.results[T]:
            if metric == "target_selections":
                v = s.selections[target]
            elif metric == "nontarget_selections":
                v = s.T - s.selections[target]
            elif metric == "target_fraction":
                v = s.selections[target] / s.T
            elif metric == "total_cost":
                v = s.total_cost
            elif metric == "per_round_cost":
                v = s.total_cost / s.T
            elif metric == "regret_clean":
                v = s.regret_clean
            elif metric == "regret_template":
                v = s.regret_template
            elif metric.startswith("selections_"):
                v = s.selections[int(metric.removeprefix("selections_"))]
            else:
                raise ParameterError(f"unknown metric {metric!r}")
            out.append(float(v))
        return np.array(out)

    def mean(self, T: int, metric: str) -> float:
        return float(self.metric_values(T, metric).mean())

    def std(self, T: int, metric: str) -> float:
        """Sample standard deviation (ddof=1); zero for single-trial runs."""
        vals = self.metric_values(T, metric)
        if len(vals) < 2:
            return 0.0
        return float(vals.std(ddof=1))

    def metric_names(self) -> list[str]:
        K = len(next(iter(self.results.values()))[0].selections)
        return list(METRICS) + [f"selections_{a}" for a in range(K)]


def run_experiment(cfg: ExperimentConfig) -> AggregateSummary:
    """Run trials at every horizon; trial i uses seed = base_seed + i."""
    agg = AggregateSummary(config=cfg)
    for T in cfg.horizons:
        env = cfg.environment.build(T)
        tmpl = None
        if cfg.attacker.strategy != "none":
            tmpl = template_matrix(cfg.attacker, env, T)
        summaries = []
        for i in range(cfg.trials):
            _, summary = run_trial(
                env, cfg.player, cfg.attacker, T, cfg.base_seed + i,
                record_policy=cfg.record_policy, _template=tmpl,
            )
            summaries.append(summary)
        agg.results[T] = summaries
    return agg


# ---------------------------------------------------------------------------
# Bound checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundReport:
    """Outcome of checking one inequality against trial means.

    ``relation`` is the direction required of lhs vs rhs ("ge" or "le");
    ``satisfied`` applies the statistical slack, ``satisfied_raw`` does not.
    """

    bound: str
    lhs: float
    rhs: float
    slack: float
    satisfied: bool
    satisfied_raw: bool
    relation: str

    def as_dict(self) -> dict:
        return {
            "bound": self.bound,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "satisfied": self.satisfied,
            "satisfied_raw": self.satisfied_raw,
            "relation": self.relation,
        }


def _report(name: str, lhs: float, rhs: float, slack: float, relation: str) -> BoundReport:
    if relation == "ge":
        raw = lhs >= rhs
        ok = lhs >= rhs - slack
    elif relation == "le":
        raw = lhs <= rhs
        ok = lhs <= rhs + slack
    else:
        raise ParameterError(f"unknown relation {relation!r}")
    return BoundReport(bound=name, lhs=float(lhs), rhs=float(rhs),
                       slack=float(slack), satisfied=bool(ok),
                       satisfied_raw=bool(raw), relation=relation)


def default_bound_constant(K: int) -> float:
    """The Exp3 constant sqrt(2 K ln K) implied by the default learning rate."""
    return math.sqrt(2.0 * K * math.log(K))


def exp3_bound_constant(eta: float, T: int, K: int, alpha: float) -> float:
    """Regret-bound constant M with R_T <= M T**alpha for Exp3 at rate ``eta``.

    From (ln K)/eta + (eta/2) T K with eta = beta T**(-alpha) and alpha >= 1/2:
    M = (ln K)/beta + beta K / 2.
    """
    beta = eta * T ** alpha
    return math.log(K) / beta + beta * K / 2.0


def _slack(agg: AggregateSummary, T: int, metric: str) -> float:
    return 3.0 * agg.std(T, metric) / math.sqrt(len(agg.results[T]))


def check_thm1(agg: AggregateSummary, T: int, rho: float,
               alpha: float | None = None, M: float | None = None
               ) -> tuple[BoundReport, BoundReport]:
    """Easy-template bounds: N_T(target) >= T - M T**alpha / rho and
    C_T <= M T**alpha / rho, checked against trial means."""
    if not 0.0 < rho <= 1.0:
        raise ParameterError(f"rho={rho!r} outside (0, 1]")
    alpha = agg.config.attacker.alpha if alpha is None else alpha
    if not 0.5 <= alpha < 1.0:
        raise ParameterError(f"alpha={alpha!r} outside [1/2, 1)")
    K = len(agg.results[T][0].selections)
    M = default_bound_constant(K) if M is None else M
    if M <= 0.0:
        raise ParameterError(f"M={M!r} must be > 0")
    budget = M * T ** alpha / rho
    sel = _report("thm1_selections", agg.mean(T, "target_selections"),
                  T - budget, _slack(agg, T, "target_selections"), "ge")
    cost = _report("thm1_cost", agg.mean(T, "total_cost"),
                   budget, _slack(agg, T, "total_cost"), "le")
    return sel, cost


def check_thm2(agg: AggregateSummary, T: int,
               alpha: float | None = None, epsilon: float | None = None,
               M: float | None = None) -> tuple[BoundReport, BoundReport]:
    """General-template bounds:
    N_T(target) >= T - T**(1-a-e)/(a+e) - M T**(1-e) and
    C_T <= T**(1-a-e)/(a+e) + M T**(1-e) + T**(a+e)/(a+e)."""
    alpha = agg.config.attacker.alpha if alpha is None else alpha
    epsilon = agg.config.attacker.epsilon if epsilon is None else epsilon
    if epsilon is None or not 0.0 <= epsilon < 1.0 - alpha:
        raise ParameterError(f"epsilon={epsilon!r} outside [0, 1 - alpha)")
    if not 0.5 <= alpha < 1.0:
        raise ParameterError(f"alpha={alpha!r} outside [1/2, 1)")
    K = len(agg.results[T][0].selections)
    M = default_bound_constant(K) if M is None else M
    ae = alpha + epsilon
    lead = T ** (1.0 - ae) / ae + M * T ** (1.0 - epsilon)
    sel = _report("thm2_selections", agg.mean(T, "target_selections"),
                  T - lead, _slack(agg, T, "target_selections"), "ge")
    cost = _report("thm2_cost", agg.mean(T, "total_cost"),
                   lead + T ** ae / ae, _slack(agg, T, "total_cost"), "le")
    return sel, cost


def check_thm3(agg: AggregateSummary, T: int, rho: float,
               alpha: float | None = None, epsilon: float | None = None,
               M: float | None = None) -> tuple[BoundReport, BoundReport]:
    """General-template bounds in terms of tau = #{t : env loss of target > 1 - rho}:
    N_T(target) >= T - rho**(1/(a+e-1)) - tau - M T**a / rho, and the matching
    cost bound.  tau is found by scanning the environment's target column."""
    if not 0.0 < rho <= 1.0:
        raise ParameterError(f"rho={rho!r} outside (0, 1]")
    alpha = agg.config.attacker.alpha if alpha is None else alpha
    epsilon = agg.config.attacker.epsilon if epsilon is None else epsilon
    if epsilon is None or not 0.0 <= epsilon < 1.0 - alpha:
        raise ParameterError(f"epsilon={epsilon!r} outside [0, 1 - alpha)")
    K = len(agg.results[T][0].selections)
    M = default_bound_constant(K) if M is None else M
    env = agg.config.environment.build(T)
    tau = int((env.column(agg.config.attacker.target, upto=T) > 1.0 - rho).sum())
    lead = rho ** (1.0 / (alpha + epsilon - 1.0)) + tau + M * T ** alpha / rho
    sel = _report("thm3_selections", agg.mean(T, "target_selections"),
                  T - lead, _slack(agg, T, "target_selections"), "ge")
    cost = _report("thm3_cost", agg.mean(T, "total_cost"),
                   lead, _slack(agg, T, "total_cost"), "le")
    return sel, cost


def check_lemma1(agg: AggregateSummary, T: int,
                 pi1: np.ndarray | None = None,
                 eta: float | None = None) -> list[BoundReport]:
    """Exp3 selection lower bound per arm:
    N_T(a) >= T pi1(a) - eta T sum_t env loss of a.

    Only defined for a plain Exp3 player running without attack; the summaries
    must come from such a run.
    """
    cfg = agg.config
    if cfg.player.kind != "exp3":
        raise UsageError("selection lower bound is specific to plain Exp3")
    if cfg.attacker.strategy != "none":
        raise UsageError("selection lower bound applies to unattacked runs")
    env = cfg.environment.build(T)
    K = env.K
    if eta is None:
        eta, _gamma, _phi = cfg.player.resolve(K, T)
    pi1 = np.full(K, 1.0 / K) if pi1 is None else np.asarray(pi1, dtype=float)
    sums = env.column_sums(T)
    reports = []
    for a in range(K):
        rhs = T * float(pi1[a]) - eta * T * float(sums[a])
        metric = f"selections_{a}"
        reports.append(_report(f"lemma1_arm_{a}", agg.mean(T, metric), rhs,
                               _slack(agg, T, metric), "ge"))
    return reports


def loglog_slope(points) -> float:
    """Ordinary least-squares slope of ln y against ln x."""
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 2:
        raise ParameterError(f"need >= 2 points, got {len(pts)}")
    if any(x <= 0.0 or y <= 0.0 for x, y in pts):
        raise ParameterError("log-log fit needs strictly positive coordinates")
    lx = np.log([x for x, _ in pts])
    ly = np.log([y for _, y in pts])
    return float(np.polyfit(lx, ly, 1)[0])


def growth_slopes(agg: AggregateSummary, metrics=("nontarget_selections", "total_cost")
                  ) -> dict[str, float]:
    """Log-log slope of each metric's per-horizon mean across the sweep."""
    Ts = sorted(agg.results)
    return {
        m: loglog_slope([(T, agg.mean(T, m)) for T in Ts])
        for m in metrics
    }


def lower_bound_experiment(alpha: float, T_list, trials: int,
                           beta: float = 1.0, base_seed: int = 0,
                           ) -> tuple[AggregateSummary, float]:
    """Attack-cost lower-bound experiment.

    Runs the easy template against Exp3 with learning rate beta * T**(-alpha)
    on the two-arm task with losses (0, 0.5) and target arm 1, then fits the
    log-log slope of mean cumulative cost against the horizon.  The fitted
    exponent is the empirical cost growth rate, to be compared against alpha.
    """
    if not 0.5 <= alpha < 1.0:
        raise ParameterError(f"alpha={alpha!r} outside [1/2, 1)")
    cfg = ExperimentConfig(
        environment=EnvironmentSpec(kind="constant", losses=(0.0, 0.5)),
        player=PlayerSpec(kind="exp3", eta=None, beta=beta, alpha=alpha),
        attacker=AttackerConfig(strategy="easy", target=1, alpha=alpha),
        horizons=tuple(T_list),
        trials=trials,
        base_seed=base_seed,
    )
    agg = run_experiment(cfg)
    costs = [(T, agg.mean(T, "total_cost")) for T in cfg.horizons]
    if any(c <= 0.0 for _, c in costs):
        raise ParameterError("zero attack cost observed; the fit needs an active attack")
    return agg, loglog_slope(costs)


def equivalence_check(env: LossMatrix, attacker_cfg: AttackerConfig,
                      player_spec: PlayerSpec, T: int, seed: int) -> bool:
    """Attacked run vs direct run on the template matrix: same arm sequence?

    True iff playing against (env + attacker) selects the identical arms, round
    by round, as playing unattacked against the materialized template matrix
    under the same seed.
    """
    if attacker_cfg.strategy not in ("easy", "general"):
        raise UsageError("equivalence is defined for template attacks only")
    attacked, _ = run_trial(env, player_spec, attacker_cfg, T, seed)
    tmpl = template_matrix(attacker_cfg, env, T)
    direct, _ = run_trial(tmpl, player_spec,
                          AttackerConfig(strategy="none", target=attacker_cfg.target),
                          T, seed)
    return bool(np.array_equal(attacked.arms, direct.arms))
