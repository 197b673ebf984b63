"""Builders for the preference-fitting programs and extraction of fitted
value functions.

Three model families are produced here:

* the plain fitting LP: minimize total over/under-estimation error of an
  additive value function against the judgments (consistency probe);
* the selection MILP for inconsistent judgments: binary per-criterion
  selection flags, a shared slope-deviation bound, and the error terms,
  weighted C * error + p * slope_bound + selected_count;
* the selection MILP for consistent judgments: same structure with the
  judgments as hard constraints and no error terms.

The binary-times-continuous products are linearized through auxiliary
variables z[j][s] = flag[j] * delta[j][s] with the usual unit big-M rows
(value differences are explicitly bounded by 1, which normalization makes
exact, so no larger constant is ever needed).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from . import milp
from .model import (INDIFFERENT, STRICT, DomainError, PerformanceTable,
                    PreferenceStatement, ValueFunctionModel, check_statements,
                    referenced_alternatives)

#: consistency threshold on the optimal fitting error
F_STAR_TOL = 1e-6
#: strict-preference margin that reproduces the published case study
DEFAULT_EPSILON = 0.01
#: generous explicit cap for error variables; never active at an optimum
_SIGMA_UP = 1e3


class InconsistencyError(RuntimeError):
    """The judgments admit no compatible value function in the requested mode."""


@dataclass(frozen=True)
class SolveParams:
    """Knobs of the selection models.

    C trades empirical error against model complexity, p weights the
    deviation-from-linearity bound inside the complexity term, epsilon is the
    strict-preference margin.  rho (the floor on value differences) must stay
    0: the subset-monotonicity and non-degeneracy guarantees rely on it.
    """

    C: float = 1.0
    p: float = 0.0
    epsilon: float = DEFAULT_EPSILON
    rho: float = 0.0
    max_selected: int | None = None
    breakpoints_override: int | Mapping[str, int] | None = None

    def __post_init__(self):
        if self.rho != 0.0:
            raise DomainError("rho must be 0; the selection guarantees require it")
        if self.epsilon <= 0.0:
            raise DomainError("epsilon must be positive")
        if self.C < 0.0 or self.p < 0.0:
            raise DomainError("C and p must be non-negative")
        if self.max_selected is not None and self.max_selected < 1:
            raise DomainError("max_selected must be at least 1")


def _du(cid: str, s: int) -> str:
    return f"du[{cid}][{s}]"


def _z(cid: str, s: int) -> str:
    return f"z[{cid}][{s}]"


def _delta(cid: str) -> str:
    return f"delta[{cid}]"


def _sp(aid: str) -> str:
    return f"sig+[{aid}]"


def _sm(aid: str) -> str:
    return f"sig-[{aid}]"


def apply_gamma(table: PerformanceTable,
                override: int | Mapping[str, int] | None) -> PerformanceTable:
    if override is None:
        return table
    if isinstance(override, int):
        return table.with_subintervals({c.id: override for c in table.criteria})
    return table.with_subintervals(dict(override))


def _statement_coeffs(table: PerformanceTable, st: PreferenceStatement,
                      var_of) -> dict[str, float]:
    """Sparse coefficients of u(better) - u(other) over the given variables."""
    coeffs: dict[str, float] = {}
    for aid, sgn in ((st.better, 1.0), (st.other, -1.0)):
        for crit, iv in zip(table.criteria, table.interpolation(aid)):
            for s, a in enumerate(iv.coefficients, start=1):
                if a == 0.0:
                    continue
                name = var_of(crit.id, s)
                coeffs[name] = coeffs.get(name, 0.0) + sgn * a
    return {k: v for k, v in coeffs.items() if v != 0.0}


def build_uta(table: PerformanceTable, statements: Sequence[PreferenceStatement],
              epsilon: float = DEFAULT_EPSILON) -> milp.MilpProblem:
    """Fitting LP: errors are attached per reference alternative, so the
    total error measures how far the judgments are from restorable."""
    check_statements(table, statements)
    refs = referenced_alternatives(statements)
    variables = [milp.Variable(_du(c.id, s), 0.0, 1.0)
                 for c in table.criteria for s in range(1, c.subintervals + 1)]
    variables += [milp.Variable(n(a), 0.0, _SIGMA_UP)
                  for a in refs for n in (_sp, _sm)]
    constraints = [milp.Constraint(
        {_du(c.id, s): 1.0 for c in table.criteria
         for s in range(1, c.subintervals + 1)}, "=", 1.0, "normalization")]
    for k, st in enumerate(statements):
        coeffs = _statement_coeffs(table, st, _du)
        for aid, sgn in ((st.better, 1.0), (st.other, -1.0)):
            coeffs[_sp(aid)] = coeffs.get(_sp(aid), 0.0) + sgn
            coeffs[_sm(aid)] = coeffs.get(_sm(aid), 0.0) - sgn
        if st.relation == STRICT:
            constraints.append(milp.Constraint(coeffs, ">=", epsilon, f"pref[{k}]"))
        else:
            constraints.append(milp.Constraint(coeffs, "=", 0.0, f"pref[{k}]"))
    objective = milp.Objective({n(a): 1.0 for a in refs for n in (_sp, _sm)},
                               milp.MINIMIZE)
    return milp.MilpProblem(tuple(variables), tuple(constraints), objective)


@dataclass(frozen=True)
class ConsistencyResult:
    consistent: bool
    f_star: float


def check_consistency(table: PerformanceTable,
                      statements: Sequence[PreferenceStatement],
                      epsilon: float = DEFAULT_EPSILON) -> ConsistencyResult:
    """Optimal fitting error of the judgments; consistent iff it vanishes.

    A cycle of strict judgments makes the fitting LP itself infeasible (the
    per-alternative errors cannot bend a cycle); that is reported as
    inconsistent with an infinite error.
    """
    if not statements:
        return ConsistencyResult(True, 0.0)
    sol = milp.solve_lp(build_uta(table, statements, epsilon))
    if sol.status != milp.OPTIMAL:
        return ConsistencyResult(False, float("inf"))
    return ConsistencyResult(sol.objective_value <= F_STAR_TOL, sol.objective_value)


# ---------------------------------------------------------------------------
# selection models


@dataclass(frozen=True)
class SelectionModel:
    """A built selection MILP plus the context needed to read it back."""

    problem: milp.MilpProblem
    table: PerformanceTable  # subinterval overrides already applied
    statements: tuple[PreferenceStatement, ...]
    params: SolveParams
    kind: str  # "consistent" | "inconsistent"

    @property
    def gammas(self) -> tuple[int, ...]:
        return tuple(c.subintervals for c in self.table.criteria)


@dataclass(frozen=True)
class PaperCounts:
    variables: int
    binaries: int
    constraints: int


def paper_counts(model: SelectionModel) -> PaperCounts:
    """Model size in the accounting used for complexity analysis.

    The counts reconcile to the built rows as follows: each linearization
    vector z[j] counts as one variable (m in total, although m*gamma columns
    are built); each two-sided slope constraint counts once (built as two
    rows); the linearization block counts 4 rows per (j, s) although the
    rho-side lower bound collapses to a plain sign bound when rho = 0; error
    and slope-bound variables, monotonicity, normalization, and sign
    constraints are excluded.  For uniform gamma this yields (2 + gamma) * m
    variables and (5 * gamma - 1) * m + l constraints.
    """
    g = sum(model.gammas)
    m = len(model.gammas)
    l = len(model.statements)
    return PaperCounts(variables=g + 2 * m, binaries=m,
                       constraints=(g - m) + 4 * g + l)


def _selection_parts(table: PerformanceTable, params: SolveParams,
                     statements: Sequence[PreferenceStatement],
                     with_errors: bool):
    """Variables and constraint blocks shared by both selection models."""
    variables = []
    for c in table.criteria:
        variables += [milp.Variable(_du(c.id, s), 0.0, 1.0)
                      for s in range(1, c.subintervals + 1)]
    for c in table.criteria:
        variables += [milp.Variable(_z(c.id, s), 0.0, 1.0)
                      for s in range(1, c.subintervals + 1)]
    variables += [milp.Variable(_delta(c.id), 0.0, 1.0, milp.BINARY)
                  for c in table.criteria]
    variables.append(milp.Variable("phi", 0.0, 1.0))

    constraints = [milp.Constraint(
        {_z(c.id, s): 1.0 for c in table.criteria
         for s in range(1, c.subintervals + 1)}, "=", 1.0, "normalization")]
    for c in table.criteria:
        for s in range(1, c.subintervals):
            up = {_du(c.id, s + 1): 1.0, _du(c.id, s): -1.0, "phi": -1.0}
            dn = {_du(c.id, s): 1.0, _du(c.id, s + 1): -1.0, "phi": -1.0}
            constraints.append(milp.Constraint(up, "<=", 0.0, f"slope+[{c.id}][{s}]"))
            constraints.append(milp.Constraint(dn, "<=", 0.0, f"slope-[{c.id}][{s}]"))
    for c in table.criteria:
        for s in range(1, c.subintervals + 1):
            constraints.append(milp.Constraint(
                {_z(c.id, s): 1.0, _du(c.id, s): -1.0}, "<=", 0.0,
                f"lin-ub[{c.id}][{s}]"))
            constraints.append(milp.Constraint(
                {_du(c.id, s): 1.0, _z(c.id, s): -1.0, _delta(c.id): 1.0},
                "<=", 1.0, f"lin-lb[{c.id}][{s}]"))
            constraints.append(milp.Constraint(
                {_z(c.id, s): 1.0, _delta(c.id): -1.0}, "<=", 0.0,
                f"lin-flag[{c.id}][{s}]"))
    if params.max_selected is not None:
        constraints.append(milp.Constraint(
            {_delta(c.id): 1.0 for c in table.criteria}, "<=",
            float(params.max_selected), "cardinality"))

    refs = referenced_alternatives(statements)
    if with_errors:
        variables += [milp.Variable(n(a), 0.0, _SIGMA_UP)
                      for a in refs for n in (_sp, _sm)]
    for k, st in enumerate(statements):
        coeffs = _statement_coeffs(table, st, _z)
        if with_errors:
            for aid, sgn in ((st.better, 1.0), (st.other, -1.0)):
                coeffs[_sp(aid)] = coeffs.get(_sp(aid), 0.0) + sgn
                coeffs[_sm(aid)] = coeffs.get(_sm(aid), 0.0) - sgn
        sense = ">=" if st.relation == STRICT else "="
        rhs = params.epsilon if st.relation == STRICT else 0.0
        constraints.append(milp.Constraint(coeffs, sense, rhs, f"pref[{k}]"))
    return variables, constraints, refs


def build_selection_inconsistent(table: PerformanceTable,
                                 statements: Sequence[PreferenceStatement],
                                 params: SolveParams) -> SelectionModel:
    """Selection MILP trading fitting error against complexity."""
    check_statements(table, statements)
    if not statements:
        raise DomainError("no judgments: nothing constrains the selection")
    table = apply_gamma(table, params.breakpoints_override)
    variables, constraints, refs = _selection_parts(table, params, statements,
                                                    with_errors=True)
    obj = {_delta(c.id): 1.0 for c in table.criteria}
    obj["phi"] = params.p
    for a in refs:
        obj[_sp(a)] = params.C
        obj[_sm(a)] = params.C
    problem = milp.MilpProblem(tuple(variables), tuple(constraints),
                               milp.Objective(obj, milp.MINIMIZE))
    return SelectionModel(problem, table, tuple(statements), params, "inconsistent")


def build_selection_consistent(table: PerformanceTable,
                               statements: Sequence[PreferenceStatement],
                               params: SolveParams) -> SelectionModel:
    """Selection MILP with the judgments as hard constraints; infeasibility
    signals (partially) inconsistent judgments."""
    check_statements(table, statements)
    if not statements:
        raise DomainError("no judgments: nothing constrains the selection")
    table = apply_gamma(table, params.breakpoints_override)
    variables, constraints, _ = _selection_parts(table, params, statements,
                                                 with_errors=False)
    obj = {_delta(c.id): 1.0 for c in table.criteria}
    obj["phi"] = params.p
    problem = milp.MilpProblem(tuple(variables), tuple(constraints),
                               milp.Objective(obj, milp.MINIMIZE))
    return SelectionModel(problem, table, tuple(statements), params, "consistent")


# ---------------------------------------------------------------------------
# solving and extraction


@dataclass(frozen=True)
class SelectionResult:
    vfm: ValueFunctionModel
    selected: frozenset[str]
    phi: float
    empirical_error: float
    objective: float
    per_alternative_errors: Mapping[str, tuple[float, float]]
    z_values: Mapping[str, tuple[float, ...]]
    raw_deltas: Mapping[str, tuple[float, ...]]
    nodes_explored: int = 0


def _with_fixed_flags(model: SelectionModel, selected: frozenset[str],
                      objective: milp.Objective,
                      extra: Sequence[milp.Constraint] = ()) -> milp.MilpProblem:
    fixed = []
    for v in model.problem.variables:
        if v.name.startswith("delta["):
            val = 1.0 if v.name[len("delta["):-1] in selected else 0.0
            fixed.append(milp.Variable(v.name, val, val, milp.CONTINUOUS))
        else:
            fixed.append(v)
    return milp.MilpProblem(tuple(fixed),
                            model.problem.constraints + tuple(extra), objective)


def solve_selection(model: SelectionModel,
                    node_budget: int = milp.DEFAULT_NODE_BUDGET) -> SelectionResult:
    """Solve a built selection model and extract a canonical result.

    Among optima sharing the optimal criteria set, the reported value
    function is re-optimized for minimal slope deviation (and, in the
    error-bearing model, for the optimal error/slope trade-off first), so the
    output does not depend on branching order.  Value differences of
    unselected criteria are zeroed in the reported model; the raw solver
    values are kept for auditing.
    """
    sol = milp.solve_milp(model.problem, node_budget=node_budget)
    if sol.status != milp.OPTIMAL:
        if model.kind == "consistent":
            raise InconsistencyError(
                "no supporting criteria set exists: the judgments are "
                "partially inconsistent")
        raise InconsistencyError(
            "the judgments contain a cycle of strict preferences; "
            "per-alternative errors cannot repair a cycle")
    params = model.params
    selected = frozenset(
        c.id for c in model.table.criteria
        if sol.assignment[_delta(c.id)] > 0.5)
    k = len(selected)

    # canonicalize the value function for the chosen set
    refs = referenced_alternatives(model.statements)
    if model.kind == "inconsistent":
        lp_obj = {n(a): params.C for a in refs for n in (_sp, _sm)}
        lp_obj["phi"] = params.p
        stage1 = milp.solve_lp(_with_fixed_flags(model, selected,
                                                 milp.Objective(lp_obj)))
        if stage1.status != milp.OPTIMAL:
            raise milp.SolverError("canonicalization LP unexpectedly " + stage1.status)
        cap = milp.Constraint(lp_obj, "<=", stage1.objective_value + 1e-9, "lex-cap")
        final = milp.solve_lp(_with_fixed_flags(
            model, selected, milp.Objective({"phi": 1.0}), (cap,)))
    else:
        final = milp.solve_lp(_with_fixed_flags(
            model, selected, milp.Objective({"phi": 1.0})))
    if final.status != milp.OPTIMAL:
        raise milp.SolverError("canonicalization LP unexpectedly " + final.status)
    asg = final.assignment

    table = model.table
    raw = {c.id: tuple(asg[_du(c.id, s)] for s in range(1, c.subintervals + 1))
           for c in table.criteria}
    zs = {c.id: tuple(asg[_z(c.id, s)] for s in range(1, c.subintervals + 1))
          for c in table.criteria}
    phi = max(asg["phi"], 0.0)
    errors = {a: (asg.get(_sp(a), 0.0), asg.get(_sm(a), 0.0)) for a in refs}
    emp = float(sum(sum(e) for e in errors.values()))
    deltas = tuple(
        tuple(max(d, 0.0) for d in raw[c.id]) if c.id in selected
        else tuple(0.0 for _ in raw[c.id])
        for c in table.criteria)
    vfm = ValueFunctionModel(table.criterion_ids,
                             tuple(c.id in selected for c in table.criteria),
                             deltas, epsilon_used=params.epsilon)
    objective = k + params.p * phi + (params.C * emp if model.kind == "inconsistent" else 0.0)
    return SelectionResult(vfm=vfm, selected=selected, phi=float(phi),
                           empirical_error=emp, objective=float(objective),
                           per_alternative_errors=errors, z_values=zs,
                           raw_deltas=raw, nodes_explored=sol.nodes_explored)


def fixed_subset_error(table: PerformanceTable,
                       statements: Sequence[PreferenceStatement],
                       subset: frozenset[str] | set[str],
                       params: SolveParams) -> float | None:
    """Optimal fitting error restricted to one criteria subset (oracle for
    the selection MILP: minimize C*err + p*phi over the subset).  None when
    even the error-relaxed LP is infeasible (strict-preference cycle)."""
    table = apply_gamma(table, params.breakpoints_override)
    refs = referenced_alternatives(statements)
    sub = [c for c in table.criteria if c.id in subset]
    variables = [milp.Variable(_du(c.id, s), 0.0, 1.0)
                 for c in sub for s in range(1, c.subintervals + 1)]
    variables.append(milp.Variable("phi", 0.0, 1.0))
    variables += [milp.Variable(n(a), 0.0, _SIGMA_UP)
                  for a in refs for n in (_sp, _sm)]
    constraints = [milp.Constraint(
        {_du(c.id, s): 1.0 for c in sub for s in range(1, c.subintervals + 1)},
        "=", 1.0, "normalization")]
    for c in sub:
        for s in range(1, c.subintervals):
            constraints.append(milp.Constraint(
                {_du(c.id, s + 1): 1.0, _du(c.id, s): -1.0, "phi": -1.0},
                "<=", 0.0))
            constraints.append(milp.Constraint(
                {_du(c.id, s): 1.0, _du(c.id, s + 1): -1.0, "phi": -1.0},
                "<=", 0.0))
    sub_table = PerformanceTable(
        tuple(sub), table.alternatives,
        tuple(tuple(row[j] for j, c in enumerate(table.criteria) if c.id in subset)
              for row in table.scores))
    for st in statements:
        coeffs = _statement_coeffs(sub_table, st, _du)
        for aid, sgn in ((st.better, 1.0), (st.other, -1.0)):
            coeffs[_sp(aid)] = coeffs.get(_sp(aid), 0.0) + sgn
            coeffs[_sm(aid)] = coeffs.get(_sm(aid), 0.0) - sgn
        sense = ">=" if st.relation == STRICT else "="
        rhs = params.epsilon if st.relation == STRICT else 0.0
        constraints.append(milp.Constraint(coeffs, sense, rhs))
    obj = {n(a): params.C for a in refs for n in (_sp, _sm)}
    obj["phi"] = params.p
    sol = milp.solve_lp(milp.MilpProblem(tuple(variables), tuple(constraints),
                                         milp.Objective(obj)))
    if sol.status != milp.OPTIMAL:
        return None
    return sol.objective_value


def is_supporting(table: PerformanceTable,
                  statements: Sequence[PreferenceStatement],
                  subset: frozenset[str] | set[str],
                  epsilon: float = DEFAULT_EPSILON) -> bool:
    """Compatibility probe: does some value function over exactly this subset
    restore every judgment (hard, no error terms)?"""
    if not subset:
        return False
    table_sub = PerformanceTable(
        tuple(c for c in table.criteria if c.id in subset),
        table.alternatives,
        tuple(tuple(row[j] for j, c in enumerate(table.criteria) if c.id in subset)
              for row in table.scores))
    variables = [milp.Variable(_du(c.id, s), 0.0, 1.0)
                 for c in table_sub.criteria for s in range(1, c.subintervals + 1)]
    constraints = [milp.Constraint(
        {v.name: 1.0 for v in variables}, "=", 1.0, "normalization")]
    for st in statements:
        coeffs = _statement_coeffs(table_sub, st, _du)
        sense = ">=" if st.relation == STRICT else "="
        rhs = epsilon if st.relation == STRICT else 0.0
        constraints.append(milp.Constraint(coeffs, sense, rhs))
    sol = milp.solve_lp(milp.MilpProblem(tuple(variables), tuple(constraints),
                                         milp.Objective({})))
    return sol.status == milp.OPTIMAL


def fit_representative(table: PerformanceTable,
                       statements: Sequence[PreferenceStatement],
                       epsilon_as_variable: bool = True,
                       epsilon: float = DEFAULT_EPSILON) -> ValueFunctionModel:
    """Compatible value function over all criteria that maximizes the common
    value margin between strictly compared alternatives (or, with
    epsilon_as_variable=False, any compatible one at the fixed margin)."""
    check_statements(table, statements)
    if not any(st.relation == STRICT for st in statements):
        raise DomainError("no strict judgments: there is no margin to maximize")
    probe = check_consistency(table, statements, epsilon)
    if not probe.consistent:
        raise InconsistencyError(
            f"judgments are inconsistent (best fitting error {probe.f_star:g})")
    variables = [milp.Variable(_du(c.id, s), 0.0, 1.0)
                 for c in table.criteria for s in range(1, c.subintervals + 1)]
    constraints = [milp.Constraint(
        {v.name: 1.0 for v in variables}, "=", 1.0, "normalization")]
    if epsilon_as_variable:
        variables.append(milp.Variable("margin", 0.0, 1.0))
    for st in statements:
        coeffs = _statement_coeffs(table, st, _du)
        if st.relation == STRICT:
            if epsilon_as_variable:
                coeffs["margin"] = coeffs.get("margin", 0.0) - 1.0
                constraints.append(milp.Constraint(coeffs, ">=", 0.0))
            else:
                constraints.append(milp.Constraint(coeffs, ">=", epsilon))
        else:
            constraints.append(milp.Constraint(coeffs, "=", 0.0))
    objective = (milp.Objective({"margin": 1.0}, milp.MAXIMIZE)
                 if epsilon_as_variable else milp.Objective({}))
    sol = milp.solve_lp(milp.MilpProblem(tuple(variables), tuple(constraints),
                                         objective))
    if sol.status != milp.OPTIMAL:
        raise InconsistencyError("no compatible value function at the requested margin")
    deltas = tuple(tuple(max(sol.assignment[_du(c.id, s)], 0.0)
                         for s in range(1, c.subintervals + 1))
                   for c in table.criteria)
    margin = sol.assignment["margin"] if epsilon_as_variable else epsilon
    return ValueFunctionModel(table.criterion_ids,
                              tuple(True for _ in table.criteria),
                              deltas, epsilon_used=float(margin))


def extract_uta_vfm(table: PerformanceTable, solution: milp.MilpSolution,
                    epsilon: float) -> ValueFunctionModel:
    """Value function from a solved fitting LP (all criteria selected)."""
    deltas = tuple(tuple(max(solution.assignment[_du(c.id, s)], 0.0)
                         for s in range(1, c.subintervals + 1))
                   for c in table.criteria)
    return ValueFunctionModel(table.criterion_ids,
                              tuple(True for _ in table.criteria),
                              deltas, epsilon_used=epsilon)
