"""Streamlined supporting criteria sets, criteria relevance, and rankings.

A criteria subset supports the judgments when some value function over
exactly that subset restores every judgment; a streamlined set is a
supporting set with no supporting proper subset.  Enumeration repeatedly
solves the consistent selection MILP with a pure set-size objective, cutting
off each optimum with a no-good row until the model goes infeasible; run at
p = 0 the optima appear in non-decreasing size, which makes every returned
set minimal and the sweep exhaustive.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from . import milp
from .disaggregation import (DEFAULT_EPSILON, InconsistencyError, SelectionModel,
                             SolveParams, _delta, build_selection_consistent,
                             check_consistency, is_supporting, solve_selection)
from .model import (DomainError, PerformanceTable, PreferenceStatement,
                    ValueFunctionModel, evaluate_all)

#: hard cap on enumeration cuts, guards pathological inputs
_MAX_CUTS_FACTOR = 10
#: brute-force subset enumeration guard
_BRUTE_FORCE_MAX_CRITERIA = 16

RANK_TIE_TOL = 1e-6


@dataclass(frozen=True)
class SupportAnalysis:
    """All streamlined supporting criteria sets plus derived statistics."""

    family: tuple[frozenset[str], ...]
    relevance: Mapping[str, int]
    core: frozenset[str]
    redundant: frozenset[str]
    gamma_used: int | Mapping[str, int]
    epsilon_used: float
    set_phi: tuple[float, ...] = ()  # per-set minimal slope deviation, if computed

    def __post_init__(self):
        for a, b in itertools.permutations(self.family, 2):
            if a < b:
                raise DomainError("support family is not an antichain")


def _derive(family: Sequence[frozenset[str]], criteria: Sequence[str]):
    relevance = {cid: sum(1 for s in family if cid in s) for cid in criteria}
    if family:
        core = frozenset.intersection(*family)
        union = frozenset.union(*family)
    else:
        core, union = frozenset(), frozenset()
    redundant = frozenset(criteria) - union
    return relevance, core, redundant


def enumerate_streamlined_supports(
        table: PerformanceTable,
        statements: Sequence[PreferenceStatement],
        gamma: int | Mapping[str, int] | None = None,
        epsilon: float = DEFAULT_EPSILON,
        compute_phi: bool = True,
        on_set: Callable[[frozenset[str]], None] | None = None,
        node_budget: int = milp.DEFAULT_NODE_BUDGET) -> SupportAnalysis:
    """Find every streamlined supporting criteria set by iterated no-good cuts.

    ``on_set`` is invoked with each set as soon as it is certified, so callers
    can stream progress.  Raises InconsistencyError when no supporting set
    exists at all.
    """
    params = SolveParams(p=0.0, epsilon=epsilon, breakpoints_override=gamma)
    base = build_selection_consistent(table, statements, params)
    criteria = base.table.criterion_ids
    family: list[frozenset[str]] = []
    phis: list[float] = []
    cuts: list[milp.Constraint] = []
    max_cuts = _MAX_CUTS_FACTOR * (2 ** len(criteria))
    while True:
        problem = milp.MilpProblem(base.problem.variables,
                                   base.problem.constraints + tuple(cuts),
                                   base.problem.objective)
        model = SelectionModel(problem, base.table, base.statements, params,
                               "consistent")
        try:
            result = solve_selection(model, node_budget=node_budget)
        except InconsistencyError:
            if not family:
                raise InconsistencyError(
                    "no supporting criteria set exists: the judgments are "
                    "partially inconsistent") from None
            break
        family.append(result.selected)
        phis.append(result.phi if compute_phi else float("nan"))
        if on_set is not None:
            on_set(result.selected)
        cuts.append(milp.Constraint(
            {_delta(cid): 1.0 for cid in sorted(result.selected)},
            "<=", float(len(result.selected) - 1), f"cut[{len(cuts)}]"))
        if len(cuts) > max_cuts:
            raise milp.ResourceLimitError("enumeration cut budget exhausted")
    relevance, core, redundant = _derive(family, criteria)
    return SupportAnalysis(tuple(family), relevance, core, redundant,
                           gamma if gamma is not None else
                           base.table.criteria[0].subintervals,
                           epsilon, tuple(phis) if compute_phi else ())


def brute_force_supports(table: PerformanceTable,
                         statements: Sequence[PreferenceStatement],
                         gamma: int | Mapping[str, int] | None = None,
                         epsilon: float = DEFAULT_EPSILON) -> frozenset[frozenset[str]]:
    """Independent oracle: test every nonempty criteria subset with the plain
    compatibility LP and keep the minimal feasible ones.  Returns the empty
    family on inconsistent judgments."""
    if len(table.criteria) > _BRUTE_FORCE_MAX_CRITERIA:
        raise DomainError(
            f"brute force limited to {_BRUTE_FORCE_MAX_CRITERIA} criteria")
    from .disaggregation import apply_gamma
    table = apply_gamma(table, gamma)
    ids = table.criterion_ids
    feasible: set[frozenset[str]] = set()
    for r in range(1, len(ids) + 1):
        for combo in itertools.combinations(ids, r):
            sub = frozenset(combo)
            if is_supporting(table, statements, sub, epsilon):
                feasible.add(sub)
    return frozenset(s for s in feasible
                     if not any(t < s for t in feasible))


@dataclass(frozen=True)
class RelevanceReport:
    relevance: Mapping[str, int]
    core: frozenset[str]
    redundant: frozenset[str]
    total_sets: int
    best_sets: tuple[frozenset[str], ...]  # maximal summed relevance


def relevance_report(analysis: SupportAnalysis) -> RelevanceReport:
    """Per-criterion selection counts plus the family members whose summed
    relevance is maximal (the sets a decision maker most plausibly used)."""
    if not analysis.family:
        raise DomainError("empty support family: nothing to report")
    sums = [sum(analysis.relevance[c] for c in s) for s in analysis.family]
    best = max(sums)
    best_sets = tuple(s for s, v in zip(analysis.family, sums) if v == best)
    return RelevanceReport(dict(analysis.relevance), analysis.core,
                           analysis.redundant, len(analysis.family), best_sets)


@dataclass(frozen=True)
class Ranking:
    """Alternatives grouped by comprehensive value, best group first; scores
    within a group differ by at most the tie tolerance."""

    groups: tuple[tuple[str, ...], ...]
    scores: Mapping[str, float]

    def position(self, aid: str) -> int:
        for k, grp in enumerate(self.groups):
            if aid in grp:
                return k
        raise DomainError(f"unknown alternative {aid!r}")

    def __str__(self):
        return " > ".join(" ~ ".join(g) for g in self.groups)


def rank(vfm: ValueFunctionModel, table: PerformanceTable,
         tie_tol: float = RANK_TIE_TOL) -> Ranking:
    if not vfm.selected_ids:
        raise DomainError("value function selects no criteria; ranking is undefined")
    scores = evaluate_all(vfm, table)
    ordered = sorted(table.alternatives, key=lambda a: (-scores[a], a))
    groups: list[list[str]] = []
    head = None
    for aid in ordered:
        if head is None or head - scores[aid] > tie_tol:
            groups.append([aid])
            head = scores[aid]
        else:
            groups[-1].append(aid)
    return Ranking(tuple(tuple(g) for g in groups), scores)
