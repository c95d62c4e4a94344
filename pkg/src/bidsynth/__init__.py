"""Strategy synthesis for online bidding, contract scheduling, and linear search.

Computes Pareto-optimal deterministic strategies under distributional
predictions via LP-family search, evaluates randomized strategies and their
consistency/robustness bounds, and runs the accompanying experiment harness.
"""

from .core import (
    BidSequence,
    DiscretePrediction,
    RobustnessReq,
    RootPair,
    ValidationError,
    bidding_cost,
    consistency,
    extension_closed_form,
    is_extendable,
    robustness_check,
    tight_extension,
    zeta_roots,
)
from .dynsched import (
    EpochResult,
    ScheduleState,
    acceleration_ratio,
    run_scenario,
    scenario_from_json,
    schedule_update,
)
from .experiments import (
    DatasetSpec,
    HeuristicKind,
    adversarial_prediction,
    default_grid,
    gen_dataset,
    heuristic_strategy,
    instance_consistencies,
    run_experiment,
)
from .linesearch import (
    QStar,
    SearchStrategy,
    SignedPrediction,
    mc_search_ratio,
    q_star,
    rho_of,
    search_cons_bound,
    search_consistency,
    search_cost,
    search_lower_bound,
    search_rob_bound,
    search_robust_check,
    search_strategy_to_json,
    signed_prediction_from_json,
    synthesize_search,
)
from .lpcore import LinearProgram, LpOutcome, NumericalFailure, lp_dump, lp_solve
from .randbid import (
    AdversaryParams,
    LowerBoundParams,
    RandParams,
    RealizedStrategy,
    RStarResult,
    adversary_expected_ratio,
    adversary_integral_check,
    adversary_sample,
    cons_bound,
    det_pareto_cons,
    lower_bound_curve,
    mc_ratio,
    optimize_rstar,
    realize,
    rob_bound,
)
from .pareto import (
    QuantizationSpec,
    SynthesisResult,
    build_lp,
    config_of,
    enumerate_configurations,
    prediction_from_json,
    quantize,
    quantize_prediction,
    result_to_json,
    step_cdf,
    synthesize,
)

__all__ = [
    "AdversaryParams",
    "BidSequence",
    "DatasetSpec",
    "DiscretePrediction",
    "EpochResult",
    "HeuristicKind",
    "LinearProgram",
    "LowerBoundParams",
    "LpOutcome",
    "NumericalFailure",
    "QStar",
    "QuantizationSpec",
    "RStarResult",
    "RandParams",
    "RealizedStrategy",
    "RobustnessReq",
    "RootPair",
    "ScheduleState",
    "SearchStrategy",
    "SignedPrediction",
    "SynthesisResult",
    "ValidationError",
    "acceleration_ratio",
    "adversarial_prediction",
    "adversary_expected_ratio",
    "adversary_integral_check",
    "adversary_sample",
    "bidding_cost",
    "build_lp",
    "config_of",
    "cons_bound",
    "consistency",
    "default_grid",
    "det_pareto_cons",
    "enumerate_configurations",
    "extension_closed_form",
    "gen_dataset",
    "heuristic_strategy",
    "instance_consistencies",
    "is_extendable",
    "lower_bound_curve",
    "lp_dump",
    "lp_solve",
    "mc_ratio",
    "mc_search_ratio",
    "optimize_rstar",
    "prediction_from_json",
    "q_star",
    "quantize",
    "quantize_prediction",
    "realize",
    "result_to_json",
    "rho_of",
    "rob_bound",
    "robustness_check",
    "run_experiment",
    "run_scenario",
    "scenario_from_json",
    "schedule_update",
    "search_cons_bound",
    "search_consistency",
    "search_cost",
    "search_lower_bound",
    "search_rob_bound",
    "search_robust_check",
    "search_strategy_to_json",
    "signed_prediction_from_json",
    "step_cdf",
    "synthesize",
    "synthesize_search",
    "tight_extension",
    "zeta_roots",
]
