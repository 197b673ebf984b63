"""Data ingestion, workflow dispatch, and report emission.

Tables travel as CSV (header row of criterion ids, optional ``:cost`` suffix,
first column the alternative ids); judgments as one ``a > b`` / ``a ~ b``
line each.  Reports carry full precision in JSON and 4-decimal rounding in
the markdown/csv renderings, matching how the numbers are usually quoted.
"""

from __future__ import annotations

import io
import json
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

from . import milp
from .analysis import (Ranking, SupportAnalysis, enumerate_streamlined_supports,
                       rank, relevance_report)
from .disaggregation import (DEFAULT_EPSILON, InconsistencyError, SolveParams,
                             apply_gamma, build_selection_consistent,
                             build_selection_inconsistent, build_uta,
                             check_consistency, extract_uta_vfm,
                             fit_representative, solve_selection)
from .model import (INDIFFERENT, STRICT, CriterionSpec, DomainError,
                    PerformanceTable, PreferenceStatement, ValueFunctionModel,
                    breakpoints, evaluate_all, ingest_cost_criterion)

MODES = ("consistency", "uta", "select-consistent", "select-inconsistent",
         "representative", "enumerate", "relevance", "rank")
FORMATS = ("json", "markdown", "csv")

_ROUND = 4  # display rounding of markdown/csv reports


@dataclass(frozen=True)
class ProjectConfig:
    mode: str
    gamma: int | Mapping[str, int] = 5
    p: float = 0.0
    C: float = 1.0
    epsilon: float = DEFAULT_EPSILON
    max_selected: int | None = None
    fmt: str = "json"

    def __post_init__(self):
        if self.mode not in MODES:
            raise DomainError(f"unknown mode {self.mode!r}")
        if self.fmt not in FORMATS:
            raise DomainError(f"unknown output format {self.fmt!r}")
        gammas = ([self.gamma] if isinstance(self.gamma, int)
                  else list(self.gamma.values()))
        if any(g < 1 for g in gammas):
            raise DomainError("gamma must be at least 1")
        if self.epsilon <= 0:
            raise DomainError("epsilon must be positive")

    def params(self) -> SolveParams:
        return SolveParams(C=self.C, p=self.p, epsilon=self.epsilon,
                           max_selected=self.max_selected,
                           breakpoints_override=self.gamma)


# ---------------------------------------------------------------------------
# ingestion


def _parse_header_cell(cell: str) -> tuple[str, str]:
    parts = cell.strip().split(":")
    if len(parts) == 1:
        return parts[0], "benefit"
    if len(parts) == 2 and parts[1] in ("benefit", "cost"):
        return parts[0], parts[1]
    raise DomainError(f"bad criterion header {cell!r} (want 'id' or 'id:cost')")


def load_performance_csv(source: str | Path | io.TextIOBase,
                         gamma: int | Mapping[str, int] = 5,
                         scales: Mapping[str, tuple[float, float]] | None = None,
                         default_scale: tuple[float, float] = (0.0, 1.0),
                         ) -> PerformanceTable:
    """Parse a performance CSV; cost columns are reflected at ingestion so
    everything downstream is benefit-oriented."""
    if isinstance(source, (str, Path)):
        text = Path(source).read_text()
    else:
        text = source.read()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 2:
        raise DomainError("no alternatives in table")
    header = lines[0].split(",")
    if len(header) < 2:
        raise DomainError("no criteria in table")
    crit_cells = [_parse_header_cell(c) for c in header[1:]]
    criteria = []
    for cid, direction in crit_cells:
        lo, hi = (scales or {}).get(cid, default_scale)
        g = gamma if isinstance(gamma, int) else gamma.get(cid, 5)
        criteria.append(CriterionSpec(cid, lo, hi, g, direction))
    alternatives: list[str] = []
    scores: list[list[float]] = []
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) != len(header):
            raise DomainError(
                f"row {cells[0]!r}: {len(cells) - 1} cells for "
                f"{len(header) - 1} criteria")
        aid = cells[0].strip()
        row = []
        for crit, cell in zip(criteria, cells[1:]):
            try:
                val = float(cell)
            except ValueError:
                raise DomainError(
                    f"non-numeric cell {cell.strip()!r} at ({aid}, {crit.id})"
                ) from None
            lo, hi = crit.scale_low, crit.scale_high
            if val < lo - 1e-9 or val > hi + 1e-9:
                raise DomainError(
                    f"score {val} at ({aid}, {crit.id}) outside declared "
                    f"scale [{lo}, {hi}]")
            if crit.direction == "cost":
                val = ingest_cost_criterion(crit, val)
            row.append(val)
        alternatives.append(aid)
        scores.append(row)
    return PerformanceTable.build(criteria, alternatives, scores)


def dump_performance_csv(table: PerformanceTable) -> str:
    """Inverse of load_performance_csv: cost columns are reflected back."""
    header = ["alternative"]
    for c in table.criteria:
        header.append(c.id if c.direction == "benefit" else f"{c.id}:cost")
    lines = [",".join(header)]
    for aid, row in zip(table.alternatives, table.scores):
        cells = [aid]
        for crit, val in zip(table.criteria, row):
            if crit.direction == "cost":
                val = ingest_cost_criterion(crit, val)
            cells.append(f"{val:.12g}")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def parse_statement(line: str, lineno: int = 1,
                    known_ids: set[str] | None = None) -> PreferenceStatement:
    tokens = line.split()
    if len(tokens) != 3 or tokens[1] not in (">", "~"):
        raise DomainError(
            f"line {lineno}: expected '<id> (>|~) <id>', got {line.strip()!r}")
    better, op, other = tokens
    if known_ids is not None:
        for aid in (better, other):
            if aid not in known_ids:
                raise DomainError(f"line {lineno}: unknown alternative {aid!r}")
    relation = STRICT if op == ">" else INDIFFERENT
    return PreferenceStatement(better, other, relation)


def load_preferences(source: str | Path | io.TextIOBase,
                     known_ids: set[str] | None = None,
                     ) -> tuple[PreferenceStatement, ...]:
    if isinstance(source, (str, Path)):
        text = Path(source).read_text()
    else:
        text = source.read()
    statements = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        statements.append(parse_statement(line, lineno, known_ids))
    return tuple(statements)


def dump_preferences(statements: Sequence[PreferenceStatement]) -> str:
    return "".join(f"{st}\n" for st in statements)


def fixture_path(name: str) -> Path:
    return Path(resources.files("prefsel.fixtures") / name)


def load_case_study(gamma: int | Mapping[str, int] = 5):
    """The bundled green-supplier fixtures: 10 suppliers on 10 criteria plus
    the 8 expert judgments."""
    table = load_performance_csv(fixture_path("suppliers.csv"), gamma=gamma)
    statements = load_preferences(fixture_path("judgments.txt"),
                                  set(table.alternatives))
    return table, statements


def load_golden_tables() -> dict:
    return json.loads(fixture_path("golden_tables.json").read_text())


# ---------------------------------------------------------------------------
# reports


@dataclass
class Report:
    mode: str
    params: dict[str, Any]
    consistent: bool | None = None
    f_star: float | None = None
    selected: list[str] | None = None
    sum_delta: int | None = None
    phi: float | None = None
    objective: float | None = None
    empirical_error: float | None = None
    margin: float | None = None
    per_alternative_errors: dict[str, list[float]] | None = None
    value_function: list[dict[str, Any]] | None = None
    scores: dict[str, float] | None = None
    ranking: list[list[str]] | None = None
    support_family: list[dict[str, Any]] | None = None
    relevance: dict[str, int] | None = None
    core: list[str] | None = None
    redundant: list[str] | None = None
    best_sets: list[list[str]] | None = None
    nodes_explored: int | None = None

    def to_json(self) -> str:
        body = {k: v for k, v in asdict(self).items() if v is not None}
        return json.dumps(body, sort_keys=True, indent=2) + "\n"

    def to_markdown(self) -> str:
        out = [f"# {self.mode} report", ""]
        rows = [("consistent", self.consistent), ("F*", self.f_star),
                ("selected", ", ".join(self.selected or []) or None),
                ("sum delta", self.sum_delta), ("phi", self.phi),
                ("objective", self.objective),
                ("empirical error", self.empirical_error),
                ("margin", self.margin)]
        shown = [(k, v) for k, v in rows if v is not None]
        if shown:
            out += ["| quantity | value |", "| --- | --- |"]
            out += [f"| {k} | {_fmt(v)} |" for k, v in shown]
            out.append("")
        if self.scores is not None:
            out += ["## scores", "", "| alternative | value |", "| --- | --- |"]
            out += [f"| {a} | {_fmt(v)} |" for a, v in self.scores.items()]
            out.append("")
        if self.ranking is not None:
            out += ["## ranking", "",
                    " > ".join(" ~ ".join(g) for g in self.ranking), ""]
        if self.value_function is not None:
            out += ["## marginal value functions", ""]
            for vf in self.value_function:
                if not vf["selected"]:
                    continue
                pts = ", ".join(f"({_fmt(x)}, {_fmt(y)})"
                                for x, y in zip(vf["breakpoints"], vf["values"]))
                out.append(f"- {vf['id']} (weight {_fmt(vf['weight'])}): {pts}")
            out.append("")
        if self.support_family is not None:
            out += ["## streamlined supporting criteria sets", "",
                    "| set | size | phi |", "| --- | --- | --- |"]
            for entry in self.support_family:
                phi = _fmt(entry["phi"]) if entry.get("phi") is not None else ""
                out.append(f"| {{{', '.join(entry['criteria'])}}} | "
                           f"{len(entry['criteria'])} | {phi} |")
            out.append("")
        if self.relevance is not None:
            out += ["## relevance", "", "| criterion | R |", "| --- | --- |"]
            out += [f"| {c} | {r} |" for c, r in self.relevance.items()]
            out += ["",
                    f"core: {{{', '.join(self.core or [])}}}  "
                    f"redundant: {{{', '.join(self.redundant or [])}}}", ""]
            if self.best_sets:
                sets = "; ".join("{" + ", ".join(s) + "}" for s in self.best_sets)
                out.append(f"maximal summed relevance: {sets}")
                out.append("")
        return "\n".join(out)

    def to_csv(self) -> str:
        out = ["key,value"]
        body = {k: v for k, v in asdict(self).items() if v is not None}
        for k, v in body.items():
            if k == "scores":
                out += [f"score.{a},{_fmt(x)}" for a, x in v.items()]
            elif k == "relevance":
                out += [f"relevance.{c},{r}" for c, r in v.items()]
            elif k == "ranking":
                out.append("ranking," + " > ".join(" ~ ".join(g) for g in v))
            elif k == "support_family":
                out += [f"support.{i}," + " ".join(e["criteria"])
                        for i, e in enumerate(v)]
            elif k == "selected":
                out.append("selected," + " ".join(v))
            elif isinstance(v, (int, float, str, bool)):
                out.append(f"{k},{_fmt(v)}")
        return "\n".join(out) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "markdown":
            return self.to_markdown()
        if fmt == "csv":
            return self.to_csv()
        raise DomainError(f"unknown output format {fmt!r}")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return f"{v:.{_ROUND}f}"
    return str(v)


def _vf_payload(vfm: ValueFunctionModel, table: PerformanceTable) -> list[dict]:
    payload = []
    for crit in table.criteria:
        payload.append({
            "id": crit.id,
            "selected": bool(vfm.selected[table.criterion_ids.index(crit.id)]),
            "weight": vfm.weight(crit.id),
            "breakpoints": [float(x) for x in breakpoints(crit)],
            "values": [float(y) for y in vfm.marginal_values(crit)],
        })
    return payload


def _score_block(report: Report, vfm: ValueFunctionModel,
                 table: PerformanceTable) -> None:
    report.scores = evaluate_all(vfm, table)
    ranking = rank(vfm, table)
    report.ranking = [list(g) for g in ranking.groups]
    report.value_function = _vf_payload(vfm, table)


def run(config: ProjectConfig, table: PerformanceTable,
        statements: Sequence[PreferenceStatement],
        node_budget: int | None = None,
        on_set: Callable[[frozenset[str]], None] | None = None) -> Report:
    """Dispatch one workflow over loaded inputs and assemble its report."""
    budget = node_budget if node_budget is not None else milp.DEFAULT_NODE_BUDGET
    table = apply_gamma(table, config.gamma)
    report = Report(mode=config.mode, params={
        "gamma": config.gamma if not isinstance(config.gamma, Mapping)
        else dict(config.gamma),
        "p": config.p, "C": config.C, "epsilon": config.epsilon,
        "max_selected": config.max_selected})

    if config.mode == "consistency":
        probe = check_consistency(table, statements, config.epsilon)
        report.consistent = probe.consistent
        report.f_star = probe.f_star
        return report

    if config.mode == "uta":
        if not statements:
            raise DomainError("uta mode needs at least one judgment")
        sol = milp.solve_lp(build_uta(table, statements, config.epsilon))
        if sol.status != milp.OPTIMAL:
            raise InconsistencyError(
                "fitting LP infeasible: strict judgments form a cycle")
        report.f_star = sol.objective_value
        report.consistent = sol.objective_value <= 1e-6
        vfm = extract_uta_vfm(table, sol, config.epsilon)
        _score_block(report, vfm, table)
        return report

    if config.mode in ("select-consistent", "select-inconsistent"):
        params = config.params()
        if config.mode == "select-consistent":
            model = build_selection_consistent(table, statements, params)
        else:
            model = build_selection_inconsistent(table, statements, params)
        result = solve_selection(model, node_budget=budget)
        report.selected = sorted(result.selected)
        report.sum_delta = len(result.selected)
        report.phi = result.phi
        report.objective = result.objective
        report.nodes_explored = result.nodes_explored
        if config.mode == "select-inconsistent":
            report.empirical_error = result.empirical_error
            report.per_alternative_errors = {
                a: list(e) for a, e in result.per_alternative_errors.items()}
        _score_block(report, result.vfm, model.table)
        return report

    if config.mode == "representative":
        vfm = fit_representative(table, statements, epsilon=config.epsilon)
        report.margin = vfm.epsilon_used
        report.consistent = True
        _score_block(report, vfm, table)
        return report

    if config.mode in ("enumerate", "relevance"):
        analysis = enumerate_streamlined_supports(
            table, statements, gamma=None, epsilon=config.epsilon,
            on_set=on_set, node_budget=budget)
        phis = analysis.set_phi or [None] * len(analysis.family)
        report.support_family = [
            {"criteria": sorted(s), "phi": (float(p) if p is not None else None)}
            for s, p in zip(analysis.family, phis)]
        report.relevance = {c.id: analysis.relevance[c.id] for c in table.criteria}
        report.core = sorted(analysis.core)
        report.redundant = sorted(analysis.redundant)
        if config.mode == "relevance":
            rep = relevance_report(analysis)
            report.best_sets = [sorted(s) for s in rep.best_sets]
        return report

    if config.mode == "rank":
        vfm = fit_representative(table, statements, epsilon=config.epsilon)
        report.margin = vfm.epsilon_used
        _score_block(report, vfm, table)
        return report

    raise DomainError(f"unknown mode {config.mode!r}")
