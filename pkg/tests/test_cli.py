"""End-to-end tests of the command-line front end.

Every subcommand is driven through main() with real arguments; reports
are parsed back and checked against direct library calls.  Repeat runs
with the same configuration must produce byte-identical output.
"""

import filecmp
import json

import pytest

from zaremba.census import CensusConfig, enumerate_denominators, proportion
from zaremba.cf import Alphabet
from zaremba.cli import main
from zaremba.congruence import VectorSet, rq_direct


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run_cli(capsys, *argv)
    assert code == 0, err
    return json.loads(out), err


class TestCensusCommand:
    def test_json_report(self, capsys):
        report, err = run_json(
            capsys, "census", "--alphabet", "1,2", "--n", "100")
        oracle = enumerate_denominators(
            CensusConfig(alphabet=Alphabet((1, 2)), n_limit=100))
        result = report["result"]
        assert result["member_count"] == oracle.member_count()
        assert result["word_count"] == oracle.word_count
        assert result["proportion"] == pytest.approx(proportion(oracle))
        assert report["config"]["alphabet"] == [1, 2]
        assert report["config"]["n_limit"] == 100
        assert report["tool"] == "zaremba"
        assert "version" in report
        assert "census {1,2}" in err

    def test_csv_histogram(self, capsys):
        code, out, err = run_cli(
            capsys, "census", "--alphabet", "1", "--n", "10",
            "--format", "csv", "--window", "1,10")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "value,count"
        rows = {int(a): int(b) for a, b in
                (line.split(",") for line in lines[1:])}
        assert rows == {1: 1, 2: 1, 3: 1, 5: 1, 8: 1}

    def test_even_only_flag(self, capsys):
        report, _ = run_json(
            capsys, "census", "--alphabet", "1", "--n", "10", "--even-only")
        assert report["result"]["even_lengths_only"] is True
        assert report["result"]["member_count"] == 2  # 2 and 5

    def test_fit_mode(self, capsys):
        report, err = run_json(
            capsys, "census", "--alphabet", "1,2", "--n", "100",
            "--fit", "100,200,400")
        result = report["result"]
        assert result["fit_limits"] == [100, 200, 400]
        assert len(result["mean_multiplicities"]) == 3
        assert "slope" in result
        assert "exponent" in err

    def test_fit_csv(self, capsys):
        code, out, _ = run_cli(
            capsys, "census", "--alphabet", "1,2", "--n", "100",
            "--fit", "100,200", "--format", "csv")
        assert code == 0
        assert out.splitlines()[0] == "n_limit,mean_multiplicity,proportion"
        assert len(out.strip().splitlines()) == 3


class TestDimensionCommand:
    def test_single_depth(self, capsys):
        report, _ = run_json(
            capsys, "dimension", "--alphabet", "1,2", "--n", "8")
        result = report["result"]
        assert result["n"] == 8
        assert 0.4 < result["s_lower"] < result["s_upper"] < 0.65
        assert result["midpoint"] == pytest.approx(
            0.5 * (result["s_lower"] + result["s_upper"]))

    def test_single_digit_clamps(self, capsys):
        report, _ = run_json(
            capsys, "dimension", "--alphabet", "1", "--n", "4")
        assert report["result"]["clamped"] is True

    def test_schedule_csv(self, capsys):
        code, out, err = run_cli(
            capsys, "dimension", "--alphabet", "1,2", "--width", "0.2",
            "--n-max", "8", "--format", "csv")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "n,s_lower,s_upper,width"
        depths = [int(line.split(",")[0]) for line in lines[1:]]
        assert depths == sorted(depths)
        assert "dimension {1,2}" in err


class TestAdmissibleCommand:
    def test_explicit_values(self, capsys):
        report, _ = run_json(
            capsys, "admissible", "--alphabet", "1,2", "--d", "1,2,3",
            "--q-max", "20")
        verdicts = report["result"]["verdicts"]
        assert [v["value"] for v in verdicts] == [1, 2, 3]
        for v in verdicts:
            assert v["admissible"] == (v["obstruction_q"] is None)
        assert report["result"]["residue_profile_prefix"][0]["q"] == 2

    def test_range_csv(self, capsys):
        code, out, _ = run_cli(
            capsys, "admissible", "--alphabet", "2", "--d-range", "1,10",
            "--q-max", "12", "--format", "csv")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "value,admissible,obstruction_q"
        assert len(lines) == 11


class TestSigmaCommand:
    def test_roundtrip_through_saved_census(self, capsys, tmp_path):
        census_file = str(tmp_path / "c.zcen")
        code, _, _ = run_cli(
            capsys, "census", "--alphabet", "1,2", "--n", "500",
            "--save", census_file)
        assert code == 0
        report, err = run_json(
            capsys, "sigma", "--census", census_file, "--z-size", "5",
            "--q1", "2", "--seed", "3")
        result = report["result"]
        assert result["z_size"] == 5
        assert 0.0 < result["sigma"] <= result["triangle_bound"] * (1 + 1e-12)
        assert sum(c["count"] for c in result["cells"]) == 5
        total = sum(c["sigma_part"] for c in result["cells"])
        assert total == pytest.approx(result["sigma"], rel=1e-9)
        assert "sigma over 5" in err

    def test_cell_csv(self, capsys, tmp_path):
        census_file = str(tmp_path / "c.zcen")
        run_cli(capsys, "census", "--alphabet", "1,2", "--n", "200",
                "--save", census_file)
        code, out, _ = run_cli(
            capsys, "sigma", "--census", census_file, "--z-size", "4",
            "--format", "csv")
        assert code == 0
        assert out.splitlines()[0] == "alpha,beta,count,sigma_part"

    def test_corrupt_census_file(self, capsys, tmp_path):
        bad = tmp_path / "bad.zcen"
        bad.write_bytes(b"not a census")
        code, _, err = run_cli(capsys, "sigma", "--census", str(bad))
        assert code == 1
        assert "error:" in err

    def test_missing_census_file(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys, "sigma", "--census", str(tmp_path / "absent.zcen"))
        assert code == 1
        assert "error:" in err


class TestEnsembleCommand:
    def test_fixed_lengths(self, capsys):
        report, err = run_json(
            capsys, "ensemble", "--alphabet", "1,2", "--lengths", "2,2")
        result = report["result"]
        assert result["independent"] is True
        assert result["product_size"] == 16
        assert "independent" in err

    def test_prefix_cut(self, capsys):
        report, _ = run_json(
            capsys, "ensemble", "--alphabet", "1,2", "--m1", "5", "--n", "1000")
        cut = report["result"]["prefix_cut"]
        assert cut["growth_bound_ok"] is True
        assert cut["min_continuant"] >= 5
        assert report["result"]["factors"][0]["size"] == cut["size"]

    def test_delta_hat_adds_cardinality(self, capsys):
        report, _ = run_json(
            capsys, "ensemble", "--alphabet", "1,2,3,4", "--lengths", "3",
            "--delta-hat", "0.78")
        rows = report["result"]["cardinality"]
        assert rows[0]["reference"] == pytest.approx(1.56)

    def test_needs_lengths_or_m1(self, capsys):
        code, _, err = run_cli(capsys, "ensemble", "--alphabet", "1,2")
        assert code == 1
        assert "error:" in err

    def test_factor_csv(self, capsys):
        code, out, _ = run_cli(
            capsys, "ensemble", "--alphabet", "1,2", "--lengths", "2",
            "--format", "csv")
        assert code == 0
        header, row = out.strip().splitlines()
        assert header == ("index,size,min_continuant,max_continuant,"
                          "odd_length_count,inside_window")
        assert row.split(",")[1] == "4"


class TestRqCommand:
    def test_seeded_verdict(self, capsys):
        report, err = run_json(capsys, "rq", "--seed", "7", "--size", "10",
                               "--q", "12")
        result = report["result"]
        assert result["equal"] is True
        assert result["rq_direct"] == result["rq_charsum"]
        xi = VectorSet([tuple(p) for p in result["pairs"]])
        assert rq_direct(xi, 12) == result["rq_direct"]
        assert "direct == charsum" in err

    def test_csv_row(self, capsys):
        code, out, _ = run_cli(capsys, "rq", "--size", "5", "--q", "7",
                               "--format", "csv")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "q,rq_direct,rq_charsum,equal"
        assert lines[1].split(",")[0] == "7"
        assert lines[1].split(",")[3] == "1"


class TestDeterminism:
    def test_census_reports_byte_identical(self, capsys, tmp_path):
        a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
        for path in (a, b):
            code, _, _ = run_cli(
                capsys, "census", "--alphabet", "1,2,3", "--n", "300",
                "--threads", "4", "--output", path)
            assert code == 0
        assert filecmp.cmp(a, b, shallow=False)

    def test_rq_same_seed_same_bytes(self, capsys):
        _, out1, _ = run_cli(capsys, "rq", "--seed", "11")
        _, out2, _ = run_cli(capsys, "rq", "--seed", "11")
        assert out1 == out2

    def test_rq_seed_changes_pairs(self, capsys):
        r1, _ = run_json(capsys, "rq", "--seed", "1", "--size", "8")
        r2, _ = run_json(capsys, "rq", "--seed", "2", "--size", "8")
        assert r1["result"]["pairs"] != r2["result"]["pairs"]

    def test_dimension_csv_byte_identical(self, capsys):
        args = ("dimension", "--alphabet", "1,2", "--width", "0.1",
                "--n-max", "8", "--format", "csv")
        _, out1, _ = run_cli(capsys, *args)
        _, out2, _ = run_cli(capsys, *args)
        assert out1 == out2


class TestExitCodes:
    def test_domain_error_is_one(self, capsys):
        code, _, err = run_cli(capsys, "census", "--alphabet", "1,2", "--n", "0")
        assert code == 1
        assert "error:" in err

    def test_resource_limit_is_two(self, capsys):
        code, _, err = run_cli(
            capsys, "census", "--alphabet", "1,2", "--n", "2000000000000000000")
        assert code == 2
        assert "resource limit:" in err

    def test_ensemble_cap_is_two(self, capsys):
        code, _, err = run_cli(
            capsys, "ensemble", "--alphabet", "1,2,3,4", "--lengths", "12")
        assert code == 2

    def test_bad_alphabet_is_one(self, capsys):
        code, _, err = run_cli(capsys, "census", "--alphabet", "0,2", "--n", "10")
        assert code == 1

    def test_bad_window_is_one(self, capsys):
        code, _, _ = run_cli(
            capsys, "census", "--alphabet", "1,2", "--n", "10",
            "--window", "1,2,3")
        assert code == 1

    def test_missing_subcommand_exits_via_parser(self, capsys):
        with pytest.raises(SystemExit):
            main([])

    def test_unwritable_output_is_one(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys, "rq", "--output", str(tmp_path / "no" / "dir" / "x.json"))
        assert code == 1
        assert "cannot write report" in err


class TestOutputRouting:
    def test_output_file_gets_report_stdout_gets_summary(self, capsys, tmp_path):
        path = str(tmp_path / "r.json")
        code, out, err = run_cli(
            capsys, "census", "--alphabet", "1", "--n", "10",
            "--output", path)
        assert code == 0
        assert "census {1}" in out  # summary moves to stdout
        assert "report written to" in err
        with open(path) as fh:
            json.load(fh)

    def test_env_thread_override(self, capsys, monkeypatch):
        monkeypatch.setenv("ZAREMBA_THREADS", "3")
        report, _ = run_json(capsys, "census", "--alphabet", "1,2", "--n", "50")
        assert report["config"]["threads"] == 3

    def test_env_output_override(self, capsys, tmp_path, monkeypatch):
        path = str(tmp_path / "env.json")
        monkeypatch.setenv("ZAREMBA_OUTPUT", path)
        code, out, _ = run_cli(capsys, "rq", "--size", "4")
        assert code == 0
        with open(path) as fh:
            report = json.load(fh)
        assert report["config"]["command"] == "rq"

    def test_explicit_flag_beats_env(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("ZAREMBA_THREADS", "5")
        report, _ = run_json(
            capsys, "census", "--alphabet", "1,2", "--n", "50",
            "--threads", "2")
        assert report["config"]["threads"] == 2
