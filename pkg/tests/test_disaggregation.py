import itertools

import numpy as np
import pytest

from prefsel import milp
from prefsel.disaggregation import (ConsistencyResult, InconsistencyError,
                                    SolveParams, build_selection_consistent,
                                    build_selection_inconsistent, build_uta,
                                    check_consistency, fit_representative,
                                    fixed_subset_error, is_supporting,
                                    paper_counts, solve_selection)
from prefsel.model import (CriterionSpec, DomainError, PerformanceTable,
                           PreferenceStatement, STRICT, INDIFFERENT, evaluate,
                           evaluate_all)

from _instances import acyclic_statements, consistent_statements, plant_vfm, random_table


def small_table():
    crits = [CriterionSpec("c1", 0.0, 1.0, 2), CriterionSpec("c2", 0.0, 1.0, 2)]
    return PerformanceTable.build(crits, ["a", "b"], [[0.9, 0.1], [0.2, 0.6]])


class TestBuildUta:
    def test_case_study_is_consistent(self, case_study):
        table, statements = case_study
        sol = milp.solve_lp(build_uta(table, statements))
        assert sol.status == "optimal"
        assert sol.objective_value == pytest.approx(0.0, abs=1e-6)

    def test_variables_are_value_differences_plus_errors(self, case_study):
        table, statements = case_study
        prob = build_uta(table, statements)
        names = [v.name for v in prob.variables]
        assert sum(n.startswith("du[") for n in names) == 50
        # a2 is never judged, so 9 of 10 alternatives carry error pairs
        assert sum(n.startswith("sig") for n in names) == 18

    def test_two_way_cycle_is_infeasible(self):
        # per-alternative errors cannot bend u'(a) >= u'(b)+eps together with
        # u'(b) >= u'(a)+eps: adding them gives 0 >= 2*eps
        table = small_table()
        statements = [PreferenceStatement("a", "b", STRICT),
                      PreferenceStatement("b", "a", STRICT)]
        sol = milp.solve_lp(build_uta(table, statements))
        assert sol.status == "infeasible"

    def test_statement_over_unknown_alternative(self):
        with pytest.raises(DomainError):
            build_uta(small_table(), [PreferenceStatement("a", "zz", STRICT)])

    def test_empty_statements_build_a_zero_error_lp(self):
        sol = milp.solve_lp(build_uta(small_table(), []))
        assert sol.status == "optimal"
        assert sol.objective_value == pytest.approx(0.0, abs=1e-12)


class TestCheckConsistency:
    def test_case_study(self, case_study):
        table, statements = case_study
        assert check_consistency(table, statements) == ConsistencyResult(True, 0.0)

    def test_reversal_breaks_consistency(self, case_study):
        table, statements = case_study
        extended = list(statements) + [PreferenceStatement("a3", "a4", STRICT)]
        probe = check_consistency(table, extended)
        assert not probe.consistent

    def test_dominance_statement_is_consistent(self):
        crits = [CriterionSpec("c1", 0.0, 1.0, 3), CriterionSpec("c2", 0.0, 1.0, 3)]
        table = PerformanceTable.build(crits, ["top", "low"],
                                       [[0.9, 0.8], [0.3, 0.1]])
        probe = check_consistency(table, [PreferenceStatement("top", "low", STRICT)])
        assert probe.consistent
        assert probe.f_star == pytest.approx(0.0, abs=1e-9)

    def test_empty_statements_trivially_consistent(self):
        assert check_consistency(small_table(), []) == ConsistencyResult(True, 0.0)

    def test_anti_dominance_has_positive_error(self):
        crits = [CriterionSpec("c1", 0.0, 1.0, 3), CriterionSpec("c2", 0.0, 1.0, 3)]
        table = PerformanceTable.build(crits, ["top", "low"],
                                       [[0.9, 0.8], [0.3, 0.1]])
        probe = check_consistency(table, [PreferenceStatement("low", "top", STRICT)])
        assert not probe.consistent
        assert probe.f_star > 1e-4


class TestModelSize:
    def test_paper_counts_for_case_study(self, case_study):
        table, statements = case_study
        model = build_selection_consistent(table, statements, SolveParams(p=10.0))
        counts = paper_counts(model)
        assert counts.variables == 70
        assert counts.binaries == 10
        assert counts.constraints == 248

    def test_paper_counts_follow_gamma_override(self, case_study):
        table, statements = case_study
        model = build_selection_consistent(
            table, statements, SolveParams(breakpoints_override=4))
        counts = paper_counts(model)
        assert counts.variables == (2 + 4) * 10
        assert counts.constraints == (5 * 4 - 1) * 10 + 8

    def test_built_rows_reconcile_with_counts(self, case_study):
        # two rows per counted slope constraint, three per counted
        # linearization quadruple (the rho side is a sign bound), one per
        # judgment, plus the normalization row the accounting excludes
        table, statements = case_study
        model = build_selection_inconsistent(table, statements, SolveParams())
        built = len(model.problem.constraints)
        assert built == 1 + 2 * 40 + 3 * 50 + 8


class TestSelectionModels:
    def test_huge_C_forces_zero_error(self, case_study):
        table, statements = case_study
        res = solve_selection(build_selection_inconsistent(
            table, statements, SolveParams(C=1e6, p=10.0)))
        assert res.empirical_error == pytest.approx(0.0, abs=1e-9)
        consistent = solve_selection(build_selection_consistent(
            table, statements, SolveParams(p=10.0)))
        assert res.selected == consistent.selected

    def test_zero_C_selects_single_criterion(self, case_study):
        table, statements = case_study
        res = solve_selection(build_selection_inconsistent(
            table, statements, SolveParams(C=0.0, p=0.0)))
        assert len(res.selected) == 1
        # oracle: normalization alone is satisfiable over any one criterion
        for cid in table.criterion_ids:
            assert fixed_subset_error(table, statements, {cid},
                                      SolveParams(C=0.0, p=0.0)) is not None

    def test_max_selected_cap_binds(self, case_study):
        table, statements = case_study
        res = solve_selection(build_selection_consistent(
            table, statements, SolveParams(p=300.0, max_selected=3)))
        assert len(res.selected) <= 3

    def test_strict_cycle_raises(self, case_study):
        table, statements = case_study
        bad = list(statements) + [PreferenceStatement("a3", "a4", STRICT)]
        with pytest.raises(InconsistencyError):
            solve_selection(build_selection_inconsistent(table, bad, SolveParams()))

    def test_empty_statements_rejected(self, case_study):
        table, _ = case_study
        with pytest.raises(DomainError):
            build_selection_consistent(table, [], SolveParams())

    def test_inconsistent_input_makes_consistent_model_infeasible(self):
        crits = [CriterionSpec("c1", 0.0, 1.0, 2), CriterionSpec("c2", 0.0, 1.0, 2)]
        table = PerformanceTable.build(crits, ["top", "low"],
                                       [[0.9, 0.8], [0.3, 0.1]])
        bad = [PreferenceStatement("low", "top", STRICT)]
        with pytest.raises(InconsistencyError):
            solve_selection(build_selection_consistent(table, bad, SolveParams()))


@pytest.fixture(scope="module")
def result(case_study):
    table, statements = case_study
    return solve_selection(build_selection_consistent(
        table, statements, SolveParams(p=10.0)))


class TestSelectionResultContract:
    def test_normalization(self, result):
        assert result.vfm.total_weight() == pytest.approx(1.0, abs=1e-6)

    def test_non_degenerate(self, result):
        for cid in result.selected:
            assert result.vfm.weight(cid) >= 1e-6

    def test_linearization_identity(self, result):
        for cid, zs in result.z_values.items():
            flag = 1.0 if cid in result.selected else 0.0
            for z, du in zip(zs, result.raw_deltas[cid]):
                assert z == pytest.approx(flag * du, abs=1e-7)

    def test_slope_deviation_bounded_by_phi(self, result):
        for ds in result.raw_deltas.values():
            for a, b in itertools.pairwise(ds):
                assert abs(b - a) <= result.phi + 1e-7

    def test_objective_decomposition(self, result):
        assert result.objective - 10.0 * result.phi == pytest.approx(
            len(result.selected), abs=1e-9)

    def test_compatibility(self, case_study, result):
        table, statements = case_study
        scores = evaluate_all(result.vfm, table)
        eps = result.vfm.epsilon_used
        for st in statements:
            assert scores[st.better] >= scores[st.other] + eps - 1e-7

    def test_unselected_deltas_zeroed(self, result):
        for j, cid in enumerate(result.vfm.criteria):
            if cid not in result.selected:
                assert all(d == 0.0 for d in result.vfm.deltas[j])


class TestEquivalenceWithSubsetOracle:
    def test_model16_equals_best_subset_lp(self):
        # optimum of the linearized selection model == min over nonempty
        # criteria subsets of the fixed-subset LP value plus the subset size
        rng = np.random.default_rng(123)
        for _ in range(6):
            m = int(rng.integers(2, 5))
            table = random_table(rng, m=m, n=5, gamma=3)
            statements = acyclic_statements(rng, table, count=4)
            if not statements:
                continue
            params = SolveParams(C=float(rng.uniform(0.5, 30)),
                                 p=float(rng.uniform(0, 5)))
            res = solve_selection(build_selection_inconsistent(
                table, statements, params))
            best = min(
                fixed_subset_error(table, statements, set(sub), params) + len(sub)
                for r in range(1, m + 1)
                for sub in itertools.combinations(table.criterion_ids, r))
            assert res.objective == pytest.approx(best, abs=1e-6)

    def test_remark_size_k_error_optimality(self):
        # at p=0 the selected k-subset attains the least fitting error among
        # all k-subsets
        rng = np.random.default_rng(42)
        for _ in range(4):
            m = int(rng.integers(3, 6))
            table = random_table(rng, m=m, n=6, gamma=3)
            statements = acyclic_statements(rng, table, count=5)
            if not statements:
                continue
            params = SolveParams(C=4.0, p=0.0)
            res = solve_selection(build_selection_inconsistent(
                table, statements, params))
            k = len(res.selected)
            err_params = SolveParams(C=1.0, p=0.0)
            best_err = min(
                fixed_subset_error(table, statements, set(sub), err_params)
                for sub in itertools.combinations(table.criterion_ids, k))
            assert best_err >= res.empirical_error - 1e-6


class TestFitRepresentative:
    def test_case_study_margin(self, case_study, golden):
        table, statements = case_study
        vfm = fit_representative(table, statements)
        scores = evaluate_all(vfm, table)
        gaps = [scores[st.better] - scores[st.other] for st in statements]
        assert min(gaps) == pytest.approx(vfm.epsilon_used, abs=1e-9)
        assert vfm.is_normalized()

    def test_two_alternative_single_criterion_closed_form(self):
        crit = CriterionSpec("c", 0.0, 1.0, 1)
        table = PerformanceTable.build([crit], ["a", "b"], [[0.8], [0.3]])
        vfm = fit_representative(table, [PreferenceStatement("a", "b", STRICT)])
        # the full value gap is the normalized score gap
        assert vfm.epsilon_used == pytest.approx(0.5, abs=1e-9)
        assert evaluate(vfm, table, "a") - evaluate(vfm, table, "b") == \
            pytest.approx(0.5, abs=1e-9)

    def test_rejects_inconsistent(self):
        crits = [CriterionSpec("c1", 0.0, 1.0, 2)]
        table = PerformanceTable.build(crits, ["hi", "lo"], [[0.9], [0.1]])
        with pytest.raises(InconsistencyError):
            fit_representative(table, [PreferenceStatement("lo", "hi", STRICT)])

    def test_rejects_without_strict_statements(self):
        table = small_table()
        with pytest.raises(DomainError):
            fit_representative(table, [PreferenceStatement("a", "b", INDIFFERENT)])

    def test_fixed_margin_mode(self, case_study):
        table, statements = case_study
        vfm = fit_representative(table, statements, epsilon_as_variable=False)
        scores = evaluate_all(vfm, table)
        for st in statements:
            assert scores[st.better] >= scores[st.other] + 0.01 - 1e-9


class TestPlantedRecovery:
    def test_selection_is_supporting_on_planted_instances(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            table = random_table(rng, m=5, n=7, gamma=3)
            vfm = plant_vfm(rng, table, k=2)
            table2, statements = consistent_statements(rng, table, vfm, count=5)
            if len(statements) < 3:
                continue
            res = solve_selection(build_selection_consistent(
                table2, statements, SolveParams(p=0.0)))
            assert is_supporting(table2, statements, res.selected)
            assert len(res.selected) <= 2  # planted support has size 2
