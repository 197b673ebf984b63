"""Random-instance generators shared by the property suites.

Consistent instances plant a hidden normalized value function and only emit
judgments whose planted value gap clears a margin well above the solving
epsilon, so compatibility is guaranteed by construction.  The acyclic
generator orders alternatives and only compares downward, which keeps the
error-bearing model feasible even when judgments conflict with the table.
"""

import numpy as np

from prefsel.model import (CriterionSpec, INDIFFERENT, PerformanceTable,
                           PreferenceStatement, STRICT, ValueFunctionModel,
                           evaluate)


def random_table(rng, m, n, gamma):
    crits = [CriterionSpec(f"g{j + 1}", 0.0, 1.0, gamma) for j in range(m)]
    scores = rng.uniform(0, 1, size=(n, m)).round(4)
    return PerformanceTable.build(crits, [f"a{i + 1}" for i in range(n)],
                                  scores.tolist())


def plant_vfm(rng, table, k=None):
    m = len(table.criteria)
    k = k if k is not None else int(rng.integers(1, m + 1))
    chosen = rng.choice(m, size=k, replace=False)
    deltas = []
    for j, c in enumerate(table.criteria):
        if j in chosen:
            d = rng.uniform(0.05, 1.0, size=c.subintervals)
        else:
            d = np.zeros(c.subintervals)
        deltas.append(d)
    total = sum(d.sum() for d in deltas)
    deltas = tuple(tuple(d / total) for d in deltas)
    return ValueFunctionModel(table.criterion_ids,
                              tuple(j in chosen for j in range(m)), deltas)


def consistent_statements(rng, table, vfm, count, margin=0.05,
                          with_indifference=False):
    """Judgments a planted value function certifies with a wide margin."""
    values = {a: evaluate(vfm, table, a) for a in table.alternatives}
    alts = list(table.alternatives)
    statements, guard = [], 0
    while len(statements) < count and guard < 500:
        guard += 1
        a, b = rng.choice(alts, size=2, replace=False)
        if values[a] - values[b] >= margin:
            st = PreferenceStatement(a, b, STRICT)
            if st not in statements:
                statements.append(st)
    if with_indifference and len(alts) >= 2:
        # exact tie by construction: duplicate one row under a fresh id
        src = alts[0]
        twin = "a_twin"
        table = PerformanceTable.build(
            table.criteria, list(table.alternatives) + [twin],
            [list(r) for r in table.scores] + [list(table.row(src))])
        statements.append(PreferenceStatement(src, twin, INDIFFERENT))
    return table, tuple(statements)


def acyclic_statements(rng, table, count):
    """Random strict judgments oriented along a fixed order (never cyclic,
    often incompatible with the table)."""
    alts = list(table.alternatives)
    pairs = set()
    guard = 0
    while len(pairs) < count and guard < 500:
        guard += 1
        i, j = sorted(rng.choice(len(alts), size=2, replace=False))
        pairs.add((alts[i], alts[j]))
    return tuple(PreferenceStatement(a, b, STRICT) for a, b in sorted(pairs))
