"""Loss-poisoning attacks on adversarial multi-armed bandits.

Simulates template-based reward/loss poisoning against exponential-weights
bandit players and verifies the attack's selection and cost bounds
numerically: near-linear target-arm selections, sublinear attack cost, and the
cost lower bound for victim-agnostic attackers.
"""

__version__ = "0.1.0"

from .attackers import (
    AttackerConfig,
    AttackerState,
    easy_template_perturb,
    general_template_perturb,
    no_attack_perturb,
    optimal_epsilon,
    template_loss,
    template_matrix,
)
from .core import (
    ArmId,
    DomainError,
    EnvDomainError,
    IngestionError,
    MalformedTraceError,
    ParameterError,
    RoundRecord,
    Trace,
    TrialSummary,
    UsageError,
    compute_regret,
    export_trace_csv,
    summarize_trace,
    validate_loss,
)
from .environments import (
    EnvironmentSpec,
    LossMatrix,
    env_loss,
    load_env_csv,
    make_constant_env,
    make_example1_env,
    make_table_env,
)
from .harness import (
    AggregateSummary,
    BoundReport,
    ExperimentConfig,
    check_lemma1,
    check_thm1,
    check_thm2,
    check_thm3,
    default_bound_constant,
    equivalence_check,
    exp3_bound_constant,
    growth_slopes,
    loglog_slope,
    lower_bound_experiment,
    run_experiment,
    run_trial,
)
from .players import (
    PlayerSpec,
    PlayerState,
    PolicyDistribution,
    exp3_default_eta,
    exp3_init,
    exp3_lower_bound_eta,
    exprb_init,
    policy,
    sample_arm,
    update,
)

__all__ = [
    "__version__",
    "ArmId",
    "AttackerConfig",
    "AttackerState",
    "AggregateSummary",
    "BoundReport",
    "DomainError",
    "EnvDomainError",
    "EnvironmentSpec",
    "ExperimentConfig",
    "IngestionError",
    "LossMatrix",
    "MalformedTraceError",
    "ParameterError",
    "PlayerSpec",
    "PlayerState",
    "PolicyDistribution",
    "RoundRecord",
    "Trace",
    "TrialSummary",
    "UsageError",
    "check_lemma1",
    "check_thm1",
    "check_thm2",
    "check_thm3",
    "compute_regret",
    "default_bound_constant",
    "easy_template_perturb",
    "env_loss",
    "equivalence_check",
    "exp3_bound_constant",
    "exp3_default_eta",
    "exp3_init",
    "exp3_lower_bound_eta",
    "exprb_init",
    "export_trace_csv",
    "general_template_perturb",
    "growth_slopes",
    "load_env_csv",
    "loglog_slope",
    "lower_bound_experiment",
    "make_constant_env",
    "make_example1_env",
    "make_table_env",
    "no_attack_perturb",
    "optimal_epsilon",
    "policy",
    "run_experiment",
    "run_trial",
    "sample_arm",
    "summarize_trace",
    "template_loss",
    "template_matrix",
    "update",
    "validate_loss",
]
