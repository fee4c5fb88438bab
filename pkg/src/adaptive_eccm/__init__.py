"""Adaptive radar ECCM simulator.

A radar picks probes by solving a principal-agent problem against its current
estimate of a jammer's utility, watches the jammer's best response, and
sharpens the estimate with Afriat-style revealed-preference inequalities.
"""

__version__ = "0.1.0"

from .afriat import (
    AfriatSystem,
    MarginResult,
    build_system,
    feasibility_test,
    margin_of,
    max_margin_estimate,
    membership,
)
from .core import (
    InteractionDataset,
    JammerParams,
    RadarWeights,
    as_action,
    jammer_utility,
    project_feasible,
    radar_utility,
)
from .engine import EngagementConfig, EngagementTrace, run_engagement, summarize, trend_checks
from .jammer import BestResponseReport, best_response, best_response_oracle
from .pap import PapSolution, SolverBudget, evaluate_outer, solve_pap

__all__ = [
    "AfriatSystem",
    "BestResponseReport",
    "EngagementConfig",
    "EngagementTrace",
    "InteractionDataset",
    "JammerParams",
    "MarginResult",
    "PapSolution",
    "RadarWeights",
    "SolverBudget",
    "as_action",
    "best_response",
    "best_response_oracle",
    "build_system",
    "evaluate_outer",
    "feasibility_test",
    "jammer_utility",
    "margin_of",
    "max_margin_estimate",
    "membership",
    "project_feasible",
    "radar_utility",
    "run_engagement",
    "solve_pap",
    "summarize",
    "trend_checks",
]
