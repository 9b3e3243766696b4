"""k-cut approximate ballot sampling toolkit for risk-limiting audits.

Select a ballot by cutting a stack k times and taking the top card,
then quantify and absorb the residual non-uniformity: model single-cut
sizes, convolve them k-fold to measure convergence to uniform, adjust
the audit's risk limit for the worst-case acceptance-probability
change, plan multi-stack samples, validate everything by simulation,
and run live audit sessions over HTTP.
"""

from .analysis import (
    ConvergenceTable,
    DivergenceReport,
    RotationDistribution,
    convergence_table,
    convolve_cyclic,
    epsilon_ratio,
    iterate_k,
    variation_distance,
)
from .audit import (
    AuditState,
    AuditStatus,
    BallotInterpretation,
    ContestDefinition,
    bravo_update,
    estimate_extension,
    sample_size_cap,
)
from .distributions import (
    CutRecordSet,
    CutSizeDistribution,
    ExponentialCubic,
    TruncatedUniform,
    discretize,
    empirical_pmf,
    eval_cubic_density,
    fit_exponential_cubic,
    fit_truncated_uniform,
    model_error,
    table1_pmf,
    uniform_pmf,
)
from .plan import BallotManifest, SamplingPlan, build_plan, efficiency_breakeven, parse_manifest
from .risk import (
    AuditParameters,
    RiskAdjustment,
    adjusted_risk_limit,
    adjustment_bound,
    adjustment_bound_vd,
    binomial_survival,
    choose_k,
    switched_ballot_quantile,
)
from .rng import GeneratorSpec
from .sim import (
    AdversarialSwitchModel,
    CouplingConfig,
    SimulationReport,
    coupling_experiment,
    kcut_draw,
    sample_cut,
    vd_convergence_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "AdversarialSwitchModel",
    "AuditParameters",
    "AuditState",
    "AuditStatus",
    "BallotInterpretation",
    "BallotManifest",
    "ContestDefinition",
    "ConvergenceTable",
    "CouplingConfig",
    "CutRecordSet",
    "CutSizeDistribution",
    "DivergenceReport",
    "ExponentialCubic",
    "GeneratorSpec",
    "RiskAdjustment",
    "RotationDistribution",
    "SamplingPlan",
    "SimulationReport",
    "TruncatedUniform",
    "adjusted_risk_limit",
    "adjustment_bound",
    "adjustment_bound_vd",
    "binomial_survival",
    "bravo_update",
    "build_plan",
    "choose_k",
    "convergence_table",
    "convolve_cyclic",
    "coupling_experiment",
    "discretize",
    "efficiency_breakeven",
    "empirical_pmf",
    "epsilon_ratio",
    "estimate_extension",
    "eval_cubic_density",
    "fit_exponential_cubic",
    "fit_truncated_uniform",
    "iterate_k",
    "kcut_draw",
    "model_error",
    "parse_manifest",
    "sample_cut",
    "sample_size_cap",
    "switched_ballot_quantile",
    "table1_pmf",
    "uniform_pmf",
    "variation_distance",
    "vd_convergence_experiment",
]
