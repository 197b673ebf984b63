import io
import json

import pytest

from prefsel.cli import main
from prefsel.io_cli import (ProjectConfig, Report, dump_performance_csv,
                            dump_preferences, fixture_path, load_case_study,
                            load_performance_csv, load_preferences, run)
from prefsel.model import DomainError, STRICT


class TestLoadPerformanceCsv:
    def test_bundled_fixture(self):
        table = load_performance_csv(fixture_path("suppliers.csv"))
        assert len(table.alternatives) == 10
        assert len(table.criteria) == 10
        assert table.score("a1", "g1") == pytest.approx(0.93)
        assert table.score("a6", "g8") == pytest.approx(1.0)

    def test_empty_file(self):
        with pytest.raises(DomainError, match="no alternatives"):
            load_performance_csv(io.StringIO("x,g1\n"))

    def test_non_numeric_cell_names_position(self):
        csv = "s,g1,g2,g3\na1,0.1,0.2,0.3\na2,0.4,0.5,0.6\na2x,0.7,abc,0.9\n"
        with pytest.raises(DomainError, match=r"'abc' at \(a2x, g2\)"):
            load_performance_csv(io.StringIO(csv))

    def test_out_of_scale_cell(self):
        with pytest.raises(DomainError, match="outside declared scale"):
            load_performance_csv(io.StringIO("s,g1\na1,1.4\n"))

    def test_duplicate_alternative(self):
        with pytest.raises(DomainError, match="duplicate"):
            load_performance_csv(io.StringIO("s,g1\na1,0.5\na1,0.6\n"))

    def test_cost_column_reflected(self):
        table = load_performance_csv(io.StringIO("s,g1,g2:cost\na1,0.4,0.3\n"))
        assert table.score("a1", "g2") == pytest.approx(0.7)
        assert table.criterion("g2").direction == "cost"

    def test_custom_scale(self):
        table = load_performance_csv(io.StringIO("s,g1\na1,5\n"),
                                     default_scale=(2.0, 6.0))
        assert table.criterion("g1").scale_low == 2.0

    def test_round_trip(self):
        src = "s,g1,g2:cost\na1,0.4,0.3\na2,0.9,0.75\n"
        table = load_performance_csv(io.StringIO(src))
        again = load_performance_csv(io.StringIO(dump_performance_csv(table)))
        assert again == table


class TestLoadPreferences:
    def test_grammar(self):
        sts = load_preferences(io.StringIO("a5 > a1\na2 ~ a3\n"))
        assert sts[0].better == "a5" and sts[0].relation == STRICT
        assert str(sts[1]) == "a2 ~ a3"

    def test_bundled_fixture(self):
        sts = load_preferences(fixture_path("judgments.txt"))
        assert len(sts) == 8
        assert str(sts[0]) == "a5 > a1"
        assert str(sts[-1]) == "a4 > a7"

    def test_bad_operator_reports_line(self):
        with pytest.raises(DomainError, match="line 1"):
            load_preferences(io.StringIO("a5 >= a1\n"))

    def test_unknown_id_rejected_with_line(self):
        with pytest.raises(DomainError, match="line 2.*'zz'"):
            load_preferences(io.StringIO("a1 > a2\nzz > a1\n"), {"a1", "a2"})

    def test_round_trip(self):
        text = "a5 > a1\na2 ~ a3\n"
        sts = load_preferences(io.StringIO(text))
        assert dump_preferences(sts) == text


class TestRun:
    def test_consistency_mode(self, case_study):
        table, statements = case_study
        report = run(ProjectConfig(mode="consistency"), table, statements)
        assert report.consistent is True
        assert report.f_star == pytest.approx(0.0, abs=1e-6)

    def test_select_consistent_reproduces_published_row(self, case_study):
        table, statements = case_study
        report = run(ProjectConfig(mode="select-consistent", p=10.0),
                     table, statements)
        assert report.selected == ["g2", "g9"]
        assert report.sum_delta == 2
        assert report.phi == pytest.approx(0.071, abs=5e-4)

    def test_relevance_mode_matches_published_table(self, case_study, golden):
        table, statements = case_study
        report = run(ProjectConfig(mode="relevance"), table, statements)
        assert report.relevance == golden["supports"]["5"]["relevance"]
        assert report.core == [] and report.redundant == []
        assert len(report.support_family) == 17

    def test_uta_mode(self, case_study):
        table, statements = case_study
        report = run(ProjectConfig(mode="uta"), table, statements)
        assert report.consistent and report.scores is not None

    def test_representative_and_rank_modes(self, case_study):
        table, statements = case_study
        rep = run(ProjectConfig(mode="representative"), table, statements)
        assert rep.margin == pytest.approx(0.1422, abs=1e-4)
        rk = run(ProjectConfig(mode="rank"), table, statements)
        assert rk.ranking[0] == ["a2"]

    def test_select_inconsistent_reports_errors(self, case_study):
        table, statements = case_study
        report = run(ProjectConfig(mode="select-inconsistent", C=1e6, p=10.0),
                     table, statements)
        assert report.empirical_error == pytest.approx(0.0, abs=1e-9)
        assert set(report.per_alternative_errors) == {
            st for s in statements for st in (s.better, s.other)}

    def test_json_full_precision_markdown_rounded(self, case_study):
        table, statements = case_study
        report = run(ProjectConfig(mode="select-consistent", p=10.0),
                     table, statements)
        body = json.loads(report.to_json())
        assert abs(body["phi"] - 0.0705764) < 1e-6  # unrounded in json
        md = report.to_markdown()
        assert "| phi | 0.0706 |" in md
        csv = report.to_csv()
        assert "phi,0.0706" in csv

    def test_value_function_payload_is_chartable(self, case_study):
        table, statements = case_study
        report = run(ProjectConfig(mode="select-consistent", p=10.0),
                     table, statements)
        g2 = next(vf for vf in report.value_function if vf["id"] == "g2")
        assert g2["selected"] is True
        assert len(g2["breakpoints"]) == 6 == len(g2["values"])
        assert g2["values"][0] == 0.0
        assert g2["values"][-1] == pytest.approx(g2["weight"], abs=1e-9)

    def test_bad_mode_rejected(self):
        with pytest.raises(DomainError):
            ProjectConfig(mode="nope")


class TestCli:
    def test_consistency_exit_zero(self, tmp_path, capsys):
        rc = main(["consistency",
                   "--table", str(fixture_path("suppliers.csv")),
                   "--prefs", str(fixture_path("judgments.txt"))])
        assert rc == 0
        body = json.loads(capsys.readouterr().out)
        assert body["consistent"] is True

    def test_select_consistent_to_file(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        rc = main(["select-consistent",
                   "--table", str(fixture_path("suppliers.csv")),
                   "--prefs", str(fixture_path("judgments.txt")),
                   "--p", "10", "--out", str(out)])
        assert rc == 0
        assert json.loads(out.read_text())["selected"] == ["g2", "g9"]

    def test_missing_table_is_input_error(self, capsys):
        rc = main(["consistency", "--table", "/nonexistent.csv",
                   "--prefs", str(fixture_path("judgments.txt"))])
        assert rc == 1

    def test_bad_statement_is_input_error(self, tmp_path, capsys):
        prefs = tmp_path / "p.txt"
        prefs.write_text("a5 >= a1\n")
        rc = main(["consistency",
                   "--table", str(fixture_path("suppliers.csv")),
                   "--prefs", str(prefs)])
        assert rc == 1

    def test_inconsistent_judgments_exit_two(self, tmp_path, capsys):
        prefs = tmp_path / "p.txt"
        prefs.write_text(fixture_path("judgments.txt").read_text() + "a3 > a4\n")
        rc = main(["select-consistent",
                   "--table", str(fixture_path("suppliers.csv")),
                   "--prefs", str(prefs)])
        assert rc == 2

    def test_node_budget_env_exit_three(self, monkeypatch, capsys):
        monkeypatch.setenv("PREFSEL_NODE_BUDGET", "1")
        rc = main(["select-consistent",
                   "--table", str(fixture_path("suppliers.csv")),
                   "--prefs", str(fixture_path("judgments.txt")),
                   "--p", "10"])
        assert rc == 3

    def test_markdown_format(self, capsys):
        rc = main(["rank",
                   "--table", str(fixture_path("suppliers.csv")),
                   "--prefs", str(fixture_path("judgments.txt")),
                   "--format", "markdown"])
        assert rc == 0
        assert "## ranking" in capsys.readouterr().out
