"""Bounded mixed-integer linear programs and the exact solver used on them.

The carrier types are solver-agnostic (plain names, sparse coefficient
mappings).  solve_milp runs best-bound branch and bound on the binary
variables over the embedded bounded-variable simplex; nothing here depends on
an external optimizer, which keeps every reported number reproducible.  A
different engine can be plugged in by implementing solve_lp's contract and
passing it to solve_milp via ``lp_solver``.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from ._simplex import (INFEASIBLE, OPTIMAL, UNBOUNDED, BoundedSimplex,
                       NumericalError)

CONTINUOUS = "continuous"
BINARY = "binary"

MINIMIZE = "minimize"
MAXIMIZE = "maximize"

#: default tolerances; every check in verify_solution honors the overrides
FEAS_TOL = 1e-7
INT_TOL = 1e-6
OBJ_TOL = 1e-6

DEFAULT_NODE_BUDGET = 1_000_000
_SNAPSHOT_CACHE = 48  # heavy warm-start tableaus kept alive at once


class SolverError(RuntimeError):
    pass


class ResourceLimitError(SolverError):
    """Node budget exhausted before the search tree was closed."""


@dataclass(frozen=True)
class Variable:
    name: str
    lower: float
    upper: float
    kind: str = CONTINUOUS

    def __post_init__(self):
        if self.kind not in (CONTINUOUS, BINARY):
            raise ValueError(f"unknown variable kind {self.kind!r}")
        if not (np.isfinite(self.lower) and np.isfinite(self.upper)):
            raise ValueError(f"variable {self.name!r} must have finite bounds")
        if self.lower > self.upper:
            raise ValueError(f"variable {self.name!r} has empty bound interval")
        if self.kind == BINARY and not (self.lower >= 0.0 and self.upper <= 1.0):
            raise ValueError(f"binary variable {self.name!r} must live in [0, 1]")


@dataclass(frozen=True)
class Constraint:
    coeffs: Mapping[str, float]
    sense: str  # "<=" | "=" | ">="
    rhs: float
    name: str = ""

    def __post_init__(self):
        if self.sense not in ("<=", "=", ">="):
            raise ValueError(f"unknown constraint sense {self.sense!r}")


@dataclass(frozen=True)
class Objective:
    coeffs: Mapping[str, float]
    sense: str = MINIMIZE

    def __post_init__(self):
        if self.sense not in (MINIMIZE, MAXIMIZE):
            raise ValueError(f"unknown objective sense {self.sense!r}")


@dataclass(frozen=True)
class MilpProblem:
    variables: tuple[Variable, ...]
    constraints: tuple[Constraint, ...]
    objective: Objective

    def __post_init__(self):
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        known = set(names)
        for con in self.constraints:
            for name in con.coeffs:
                if name not in known:
                    raise ValueError(f"constraint {con.name!r} uses unknown variable {name!r}")
        for name in self.objective.coeffs:
            if name not in known:
                raise ValueError(f"objective uses unknown variable {name!r}")

    @property
    def binary_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables if v.kind == BINARY)

    def index(self) -> dict[str, int]:
        return {v.name: j for j, v in enumerate(self.variables)}


@dataclass(frozen=True)
class MilpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    assignment: Mapping[str, float]
    objective_value: float
    nodes_explored: int = 0

    def value(self, name: str) -> float:
        return self.assignment[name]


@dataclass
class Violation:
    kind: str  # "constraint" | "bound" | "integrality"
    name: str
    amount: float

    def __str__(self):
        return f"{self.kind} {self.name}: off by {self.amount:.3e}"


@dataclass
class VerificationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self):
        if self.ok:
            return "feasible"
        return "; ".join(str(v) for v in self.violations)


# ---------------------------------------------------------------------------


def _to_arrays(problem: MilpProblem):
    idx = problem.index()
    n = len(problem.variables)
    m = len(problem.constraints)
    c = np.zeros(n)
    for name, v in problem.objective.coeffs.items():
        c[idx[name]] = v
    sign = 1.0
    if problem.objective.sense == MAXIMIZE:
        c, sign = -c, -1.0
    A = np.zeros((m, n))
    b = np.zeros(m)
    sense = []
    for i, con in enumerate(problem.constraints):
        for name, v in con.coeffs.items():
            A[i, idx[name]] = v
        b[i] = con.rhs
        sense.append(con.sense)
    lo = np.array([v.lower for v in problem.variables])
    up = np.array([v.upper for v in problem.variables])
    return c, A, sense, b, lo, up, sign


def _solution(problem: MilpProblem, engine: BoundedSimplex, sign: float,
              status: str, nodes: int) -> MilpSolution:
    if status != OPTIMAL:
        return MilpSolution(status, {}, float("nan"), nodes)
    x = engine.solution()
    assignment = {v.name: float(x[j]) for j, v in enumerate(problem.variables)}
    return MilpSolution(OPTIMAL, assignment, sign * engine.objective(), nodes)


def solve_lp(problem: MilpProblem) -> MilpSolution:
    """Solve the LP relaxation (binaries relaxed to their [0, 1] bounds)."""
    c, A, sense, b, lo, up, sign = _to_arrays(problem)
    engine = BoundedSimplex(c, A, sense, b, lo, up)
    status = engine.solve_cold()
    return _solution(problem, engine, sign, status, 0)


def solve_milp(problem: MilpProblem, node_budget: int = DEFAULT_NODE_BUDGET,
               int_tol: float = INT_TOL,
               lp_solver: Callable[["MilpProblem"], MilpSolution] | None = None,
               ) -> MilpSolution:
    """Globally optimal solution by best-bound branch and bound.

    Branches on the lowest-index most-fractional binary and explores the
    1-branch first; identical problems yield identical assignments.  Raises
    ResourceLimitError when node_budget is exhausted.

    ``lp_solver`` plugs a replacement relaxation solver behind the same
    contract (it then runs without warm starts).
    """
    binaries = [j for j, v in enumerate(problem.variables) if v.kind == BINARY]
    if not binaries:
        return solve_lp(problem)
    if lp_solver is not None:
        return _branch_and_bound_external(problem, binaries, node_budget,
                                          int_tol, lp_solver)

    c, A, sense, b, lo, up, sign = _to_arrays(problem)
    engine = BoundedSimplex(c, A, sense, b, lo, up)
    root_lo, root_up = engine.lo.copy(), engine.up.copy()  # extended bounds
    status = engine.solve_cold()
    if status != OPTIMAL:
        return _solution(problem, engine, sign, status, 1)

    bin_idx = np.array(binaries)
    # objective values are integral at integral points when only binaries
    # carry (integer) cost; then LP bounds can be rounded up
    integral_obj = (np.all(c[[j for j in range(len(c)) if j not in set(binaries)]] == 0.0)
                    and np.all(np.mod(c[bin_idx], 1.0) == 0.0))

    def lower_bound(v: float) -> float:
        return float(np.ceil(v - 1e-6)) if integral_obj else v

    incumbent = None
    inc_val = np.inf
    nodes = 0
    seq = 0
    cache: dict[int, tuple] = {}
    cache_order: list[int] = []

    def remember(key, snap):
        cache[key] = snap
        cache_order.append(key)
        if len(cache_order) > _SNAPSHOT_CACHE:
            cache.pop(cache_order.pop(0), None)

    root_light = engine.light_state()
    root_key = 0
    remember(root_key, engine.snapshot())
    root_val = engine.objective()

    # heap entries: (parent bound, sequence, parent key, parent light, changes)
    heap: list[tuple] = []
    x = engine.solution()
    frac = np.abs(x[bin_idx] - np.round(x[bin_idx]))
    if frac.max() <= int_tol:
        return _solution(problem, engine, sign, OPTIMAL, 1)
    jstar = bin_idx[int(np.argmax(frac))]
    for val in (1.0, 0.0):  # 1-branch explored first
        seq += 1
        heapq.heappush(heap, (root_val, seq, root_key, root_light,
                              ((int(jstar), val),)))
    nodes = 1

    while heap:
        bound, _, pkey, plight, changes = heapq.heappop(heap)
        if lower_bound(bound) >= inc_val - 1e-9:
            break  # best-bound order: every open node is at least this bad
        nodes += 1
        if nodes > node_budget:
            raise ResourceLimitError(f"node budget {node_budget} exhausted")
        snap = cache.get(pkey)
        if snap is not None:
            engine.restore(snap)
        else:
            engine.lo[:], engine.up[:] = root_lo, root_up
            for j, val in changes[:-1]:
                engine.set_bounds(j, val, val)
            engine.rebuild(plight)
        j, val = changes[-1]
        engine.set_bounds(j, val, val)
        try:
            status = engine.solve_warm()
        except NumericalError:
            engine.lo[:], engine.up[:] = root_lo, root_up
            for jj, vv in changes:
                engine.set_bounds(jj, vv, vv)
            status = engine.solve_cold()
        if status == INFEASIBLE:
            continue
        if status == UNBOUNDED:
            return MilpSolution(UNBOUNDED, {}, float("nan"), nodes)
        val_lp = engine.objective()
        if lower_bound(val_lp) >= inc_val - 1e-9:
            continue
        x = engine.solution()
        frac = np.abs(x[bin_idx] - np.round(x[bin_idx]))
        if frac.max() <= int_tol:
            if val_lp < inc_val - 1e-9:
                inc_val = val_lp
                incumbent = x.copy()
            continue
        jstar = bin_idx[int(np.argmax(frac))]
        key = nodes
        remember(key, engine.snapshot())
        light = engine.light_state()
        for branch_val in (1.0, 0.0):
            seq += 1
            heapq.heappush(heap, (val_lp, seq, key, light,
                                  changes + ((int(jstar), branch_val),)))

    if incumbent is None:
        return MilpSolution(INFEASIBLE, {}, float("nan"), nodes)
    assignment = {v.name: float(incumbent[j]) for j, v in enumerate(problem.variables)}
    return MilpSolution(OPTIMAL, assignment, sign * inc_val, nodes)


def _branch_and_bound_external(problem, binaries, node_budget, int_tol, lp_solver):
    """Same search over a plugged-in relaxation solver (no warm starts)."""
    sense = problem.objective.sense
    flip = -1.0 if sense == MAXIMIZE else 1.0

    def relax(bounds):
        vs = tuple(Variable(v.name, *bounds.get(j, (v.lower, v.upper)), CONTINUOUS)
                   for j, v in enumerate(problem.variables))
        return lp_solver(MilpProblem(vs, problem.constraints, problem.objective))

    incumbent, inc_val = None, np.inf
    heap = [(-np.inf, 0, {})]
    seq, nodes = 0, 0
    while heap:
        bound, _, bounds = heapq.heappop(heap)
        if bound >= inc_val - 1e-9:
            break
        nodes += 1
        if nodes > node_budget:
            raise ResourceLimitError(f"node budget {node_budget} exhausted")
        sol = relax(bounds)
        if sol.status != OPTIMAL:
            if sol.status == UNBOUNDED:
                return MilpSolution(UNBOUNDED, {}, float("nan"), nodes)
            continue
        val = flip * sol.objective_value
        if val >= inc_val - 1e-9:
            continue
        fracs = [(abs(sol.assignment[problem.variables[j].name] - round(
            sol.assignment[problem.variables[j].name])), j) for j in binaries]
        worst, jstar = max(fracs, key=lambda p: (p[0], -p[1]))
        if worst <= int_tol:
            incumbent, inc_val = dict(sol.assignment), val
            continue
        for branch_val in (1.0, 0.0):
            seq += 1
            child = dict(bounds)
            child[jstar] = (branch_val, branch_val)
            heapq.heappush(heap, (val, seq, child))
    if incumbent is None:
        return MilpSolution(INFEASIBLE, {}, float("nan"), nodes)
    return MilpSolution(OPTIMAL, incumbent, flip * inc_val, nodes)


def verify_solution(problem: MilpProblem, solution: MilpSolution,
                    feas_tol: float = FEAS_TOL,
                    int_tol: float = INT_TOL) -> VerificationReport:
    """Certify a claimed-optimal assignment: every constraint within feas_tol,
    every bound within feas_tol, every binary within int_tol of {0, 1}."""
    report = VerificationReport()
    asg = solution.assignment
    for j, var in enumerate(problem.variables):
        x = asg[var.name]
        if x < var.lower - feas_tol or x > var.upper + feas_tol:
            off = max(var.lower - x, x - var.upper)
            report.violations.append(Violation("bound", var.name, off))
        if var.kind == BINARY and abs(x - round(x)) > int_tol:
            report.violations.append(
                Violation("integrality", var.name, abs(x - round(x))))
    for i, con in enumerate(problem.constraints):
        lhs = sum(v * asg[name] for name, v in con.coeffs.items())
        name = con.name or f"row{i}"
        if con.sense == "<=" and lhs > con.rhs + feas_tol:
            report.violations.append(Violation("constraint", name, lhs - con.rhs))
        elif con.sense == ">=" and lhs < con.rhs - feas_tol:
            report.violations.append(Violation("constraint", name, con.rhs - lhs))
        elif con.sense == "=" and abs(lhs - con.rhs) > feas_tol:
            report.violations.append(Violation("constraint", name, abs(lhs - con.rhs)))
    return report


def brute_force_milp(problem: MilpProblem) -> MilpSolution:
    """Independent oracle: enumerate all binary assignments, solve each fixed
    LP, keep the best.  Only sensible for small binary counts."""
    binaries = [j for j, v in enumerate(problem.variables) if v.kind == BINARY]
    if len(binaries) > 20:
        raise ValueError("too many binaries for exhaustive enumeration")
    if not binaries:
        return solve_lp(problem)
    flip = -1.0 if problem.objective.sense == MAXIMIZE else 1.0
    best, best_val, tried = None, np.inf, 0
    for mask in range(1 << len(binaries)):
        fixed = {j: float((mask >> k) & 1) for k, j in enumerate(binaries)}
        vs = tuple(Variable(v.name, fixed.get(j, v.lower), fixed.get(j, v.upper),
                            CONTINUOUS)
                   for j, v in enumerate(problem.variables))
        sol = solve_lp(MilpProblem(vs, problem.constraints, problem.objective))
        tried += 1
        if sol.status == OPTIMAL and flip * sol.objective_value < best_val - 1e-12:
            best, best_val = sol, flip * sol.objective_value
    if best is None:
        return MilpSolution(INFEASIBLE, {}, float("nan"), tried)
    return MilpSolution(OPTIMAL, best.assignment, flip * best_val, tried)


def to_lp_text(problem: MilpProblem) -> str:
    """Debug dump in the familiar LP text format, for cross-checking against
    external solvers."""

    def term(name, v, first):
        s = f"{abs(v):.12g} {name}"
        if first:
            return s if v >= 0 else f"- {s}"
        return f"+ {s}" if v >= 0 else f"- {s}"

    def expr(coeffs):
        parts = []
        for k, (name, v) in enumerate(coeffs.items()):
            if v == 0:
                continue
            parts.append(term(name, v, not parts))
        return " ".join(parts) if parts else "0"

    lines = [problem.objective.sense, f"  obj: {expr(problem.objective.coeffs)}",
             "subject to"]
    for i, con in enumerate(problem.constraints):
        name = con.name or f"c{i}"
        lines.append(f"  {name}: {expr(con.coeffs)} {con.sense} {con.rhs:.12g}")
    lines.append("bounds")
    for v in problem.variables:
        lines.append(f"  {v.lower:.12g} <= {v.name} <= {v.upper:.12g}")
    bins = [v.name for v in problem.variables if v.kind == BINARY]
    if bins:
        lines.append("binary")
        lines.append("  " + " ".join(bins))
    lines.append("end")
    return "\n".join(lines) + "\n"
