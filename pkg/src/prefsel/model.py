"""Domain types: criteria, performance tables, judgments, and piecewise-linear
marginal value functions expressed through interpolation coefficient vectors.

All types are immutable after construction; every operation here is a pure
function, so instances can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

#: absolute tolerance used when comparing scores against scale boundaries,
#: absorbs text-format rounding of hand-edited inputs
SCALE_TOL = 1e-9


class DomainError(ValueError):
    """Invalid domain data (bad scale, score outside it, unknown id, ...)."""


@dataclass(frozen=True)
class CriterionSpec:
    """One evaluation criterion with its cardinal scale and grid resolution.

    ``subintervals`` is the number of equal-width pieces the scale is divided
    into; the marginal value function is linear on each piece.
    """

    id: str
    scale_low: float
    scale_high: float
    subintervals: int
    direction: str = "benefit"  # "benefit" | "cost"
    name: str = ""

    def __post_init__(self):
        if not self.id:
            raise DomainError("criterion id must be non-empty")
        if not self.scale_low < self.scale_high:
            raise DomainError(
                f"criterion {self.id!r}: scale_low must be strictly below "
                f"scale_high (got [{self.scale_low}, {self.scale_high}]); a "
                f"degenerate scale would make the marginal function identically "
                f"zero and poison normalization"
            )
        if self.subintervals < 1:
            raise DomainError(f"criterion {self.id!r}: subintervals must be >= 1")
        if self.direction not in ("benefit", "cost"):
            raise DomainError(f"criterion {self.id!r}: unknown direction {self.direction!r}")

    def with_subintervals(self, gamma: int) -> "CriterionSpec":
        return CriterionSpec(self.id, self.scale_low, self.scale_high, gamma,
                             self.direction, self.name)


def breakpoints(criterion: CriterionSpec) -> np.ndarray:
    """Characteristic points of the criterion: ``subintervals + 1`` evenly
    spaced values from scale_low to scale_high inclusive."""
    return np.linspace(criterion.scale_low, criterion.scale_high,
                       criterion.subintervals + 1)


def ingest_cost_criterion(criterion: CriterionSpec, score: float) -> float:
    """Reflect a cost-type score so that downstream math is benefit-oriented.

    The reflection ``low + high - score`` keeps the value inside the scale and
    reverses the direction of preference.
    """
    return criterion.scale_low + criterion.scale_high - score


def _check_in_scale(criterion: CriterionSpec, score: float) -> float:
    lo, hi = criterion.scale_low, criterion.scale_high
    if score < lo - SCALE_TOL or score > hi + SCALE_TOL:
        raise DomainError(
            f"score {score} outside scale [{lo}, {hi}] of criterion {criterion.id!r}"
        )
    return min(max(score, lo), hi)


@dataclass(frozen=True)
class InterpolationVector:
    """Coefficient vector turning a score into an inner product with the
    per-subinterval value differences: a prefix of ones, at most one
    fractional entry, then zeros."""

    coefficients: tuple[float, ...]

    def __post_init__(self):
        coeffs = self.coefficients
        seen_fraction = False
        for c in coeffs:
            if not 0.0 <= c <= 1.0:
                raise DomainError(f"interpolation coefficient {c} outside [0, 1]")
            if seen_fraction and c > 0.0:
                raise DomainError("interpolation coefficients must be ones, then "
                                  "at most one fraction, then zeros")
            if c < 1.0:
                seen_fraction = True

    def inner(self, deltas: Sequence[float]) -> float:
        if len(deltas) != len(self.coefficients):
            raise DomainError("delta vector length does not match coefficients")
        return float(np.dot(self.coefficients, deltas))


def interpolation_vector(criterion: CriterionSpec, score: float) -> InterpolationVector:
    """Coefficients of the score against the criterion's characteristic points.

    Entry p (1-based) is 1 when the score clears the p-th characteristic
    point, the within-piece fraction on the piece containing the score, and 0
    beyond it.  The inner product with the value-difference vector equals the
    piecewise-linear marginal value.
    """
    score = _check_in_scale(criterion, score)
    bp = breakpoints(criterion)
    coeffs = []
    for p in range(1, criterion.subintervals + 1):
        if score > bp[p]:
            coeffs.append(1.0)
        elif score >= bp[p - 1]:
            coeffs.append((score - bp[p - 1]) / (bp[p] - bp[p - 1]))
        else:
            coeffs.append(0.0)
    return InterpolationVector(tuple(coeffs))


@dataclass(frozen=True)
class PerformanceTable:
    """Alternatives x criteria score matrix.  Scores of cost criteria are
    expected to be reflected before construction (see ingest_cost_criterion);
    the table itself is direction-agnostic."""

    criteria: tuple[CriterionSpec, ...]
    alternatives: tuple[str, ...]
    scores: tuple[tuple[float, ...], ...]  # scores[i][j] = value of alt i on crit j

    def __post_init__(self):
        crit_ids = [c.id for c in self.criteria]
        if len(set(crit_ids)) != len(crit_ids):
            raise DomainError("duplicate criterion ids")
        if len(set(self.alternatives)) != len(self.alternatives):
            raise DomainError("duplicate alternative ids")
        if len(self.scores) != len(self.alternatives):
            raise DomainError("score matrix row count does not match alternatives")
        for aid, row in zip(self.alternatives, self.scores):
            if len(row) != len(self.criteria):
                raise DomainError(f"alternative {aid!r}: wrong number of scores")
            for crit, s in zip(self.criteria, row):
                _check_in_scale(crit, s)

    @classmethod
    def build(cls, criteria: Iterable[CriterionSpec], alternatives: Iterable[str],
              scores: Iterable[Iterable[float]]) -> "PerformanceTable":
        return cls(tuple(criteria), tuple(alternatives),
                   tuple(tuple(float(s) for s in row) for row in scores))

    @property
    def criterion_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.criteria)

    def criterion(self, cid: str) -> CriterionSpec:
        for c in self.criteria:
            if c.id == cid:
                return c
        raise DomainError(f"unknown criterion {cid!r}")

    def row(self, alternative: str) -> tuple[float, ...]:
        try:
            i = self.alternatives.index(alternative)
        except ValueError:
            raise DomainError(f"unknown alternative {alternative!r}") from None
        return self.scores[i]

    def score(self, alternative: str, cid: str) -> float:
        j = self.criterion_ids.index(cid)
        return self.row(alternative)[j]

    def with_subintervals(self, gammas: Mapping[str, int]) -> "PerformanceTable":
        """Copy of the table with per-criterion subinterval counts replaced."""
        crits = tuple(c.with_subintervals(gammas.get(c.id, c.subintervals))
                      for c in self.criteria)
        return PerformanceTable(crits, self.alternatives, self.scores)

    def interpolation(self, alternative: str) -> tuple[InterpolationVector, ...]:
        row = self.row(alternative)
        return tuple(interpolation_vector(c, s) for c, s in zip(self.criteria, row))


STRICT = "strict"
INDIFFERENT = "indifferent"


@dataclass(frozen=True)
class PreferenceStatement:
    """One holistic pairwise judgment: ``better`` is strictly preferred to
    (or indifferent with) ``other``."""

    better: str
    other: str
    relation: str  # STRICT | INDIFFERENT

    def __post_init__(self):
        if self.relation not in (STRICT, INDIFFERENT):
            raise DomainError(f"unknown relation {self.relation!r}")
        if self.relation == STRICT and self.better == self.other:
            raise DomainError(f"strict preference of {self.better!r} over itself")

    def __str__(self):
        op = ">" if self.relation == STRICT else "~"
        return f"{self.better} {op} {self.other}"


def referenced_alternatives(statements: Sequence[PreferenceStatement]) -> tuple[str, ...]:
    """Ids appearing in statements, in first-appearance order."""
    seen: dict[str, None] = {}
    for st in statements:
        seen.setdefault(st.better)
        seen.setdefault(st.other)
    return tuple(seen)


def check_statements(table: PerformanceTable, statements: Sequence[PreferenceStatement]) -> None:
    known = set(table.alternatives)
    for st in statements:
        for aid in (st.better, st.other):
            if aid not in known:
                raise DomainError(f"statement {st} references unknown alternative {aid!r}")


@dataclass(frozen=True)
class ValueFunctionModel:
    """Additive piecewise-linear value function with per-criterion selection
    flags.  ``deltas[j][s]`` is the value gained over subinterval s+1 of
    criterion j; unselected criteria contribute nothing.

    Construction only enforces non-negative deltas; models produced by the
    solvers additionally satisfy normalization and non-degeneracy, checked via
    :meth:`is_normalized` in the pipeline and the tests.
    """

    criteria: tuple[str, ...]
    selected: tuple[bool, ...]
    deltas: tuple[tuple[float, ...], ...]
    epsilon_used: float = 0.0

    def __post_init__(self):
        if not (len(self.criteria) == len(self.selected) == len(self.deltas)):
            raise DomainError("criteria/selected/deltas lengths differ")
        for cid, ds in zip(self.criteria, self.deltas):
            for d in ds:
                if d < -SCALE_TOL:
                    raise DomainError(f"negative value difference {d} on {cid!r}")

    @property
    def selected_ids(self) -> tuple[str, ...]:
        return tuple(c for c, sel in zip(self.criteria, self.selected) if sel)

    def weight(self, cid: str) -> float:
        j = self.criteria.index(cid)
        if not self.selected[j]:
            return 0.0
        return float(sum(self.deltas[j]))

    def total_weight(self) -> float:
        return float(sum(self.weight(c) for c in self.criteria))

    def is_normalized(self, tol: float = 1e-6) -> bool:
        return abs(self.total_weight() - 1.0) <= tol

    def is_degenerate(self, tol: float = 1e-9) -> bool:
        return any(self.weight(c) <= tol for c in self.selected_ids)

    def marginal_values(self, criterion: CriterionSpec) -> np.ndarray:
        """Cumulative values at the criterion's characteristic points,
        starting at 0 (chart-ready alongside breakpoints())."""
        j = self.criteria.index(criterion.id)
        ds = np.asarray(self.deltas[j], dtype=float)
        if not self.selected[j]:
            ds = np.zeros_like(ds)
        return np.concatenate(([0.0], np.cumsum(ds)))


def evaluate(vfm: ValueFunctionModel, table: PerformanceTable, alternative: str) -> float:
    """Comprehensive value of one alternative: sum over selected criteria of
    the inner product between value differences and interpolation coefficients."""
    if vfm.criteria != table.criterion_ids:
        raise DomainError("value function criteria do not match the table")
    total = 0.0
    for j, crit in enumerate(table.criteria):
        if not vfm.selected[j]:
            continue
        if len(vfm.deltas[j]) != crit.subintervals:
            raise DomainError(
                f"criterion {crit.id!r}: {len(vfm.deltas[j])} value differences "
                f"for {crit.subintervals} subintervals"
            )
        iv = interpolation_vector(crit, table.score(alternative, crit.id))
        total += iv.inner(vfm.deltas[j])
    return total


def evaluate_all(vfm: ValueFunctionModel, table: PerformanceTable) -> dict[str, float]:
    return {a: evaluate(vfm, table, a) for a in table.alternatives}
