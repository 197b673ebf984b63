"""Preference disaggregation with embedded criteria selection.

Infers, from a decision maker's pairwise judgments, both the subset of
criteria actually used and a piecewise-linear additive value function over
them, and enumerates every streamlined supporting criteria set.
"""

from .model import (CriterionSpec, DomainError, InterpolationVector,
                    PerformanceTable, PreferenceStatement, ValueFunctionModel,
                    breakpoints, evaluate, evaluate_all, ingest_cost_criterion,
                    interpolation_vector)

__version__ = "0.1.0"

__all__ = [
    "CriterionSpec", "DomainError", "InterpolationVector", "PerformanceTable",
    "PreferenceStatement", "ValueFunctionModel", "breakpoints", "evaluate",
    "evaluate_all", "ingest_cost_criterion", "interpolation_vector",
    "__version__",
]
