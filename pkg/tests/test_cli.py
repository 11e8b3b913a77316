import json

import pytest

from kuznetsov.analysis import kloosterman
from kuznetsov.app import cli


def records(capsys):
    return [json.loads(line) for line in capsys.readouterr().out.splitlines()]


class TestEval:
    def test_kloosterman(self, capsys):
        assert cli.main(["eval", "kloosterman", "--m", "1", "--n", "1", "--ell", "3", "--format", "records"]) == cli.EXIT_OK
        (record,) = records(capsys)
        assert record["check"] == "kloosterman"
        assert record["inputs"] == {"m": 1, "n": 1, "ell": 3}
        assert record["value"] == pytest.approx(-1.0)
        assert record["pass"] is True

    def test_discrete_kernel_vanishes_on_negative_axis(self, capsys):
        assert cli.main(["eval", "bessel-kernel", "--discrete-k", "6", "--u", "-2", "--format", "records"]) == cli.EXIT_OK
        (record,) = records(capsys)
        assert record["value"] == 0.0

    def test_config_file_and_flag_override(self, tmp_path, capsys):
        path = tmp_path / "run.cfg"
        path.write_text("m = 1\nn = 1\nell = 3\nformat = records\n")
        assert cli.main(["eval", "kloosterman", "--config", str(path), "--ell", "2"]) == cli.EXIT_OK
        (record,) = records(capsys)
        assert record["inputs"]["ell"] == 2
        assert record["value"] == pytest.approx(1.0)

    def test_output_file(self, tmp_path, capsys):
        path = tmp_path / "out.jsonl"
        argv = ["eval", "kloosterman", "--m", "2", "--n", "3", "--ell", "5", "--format", "records", "--output", str(path)]
        assert cli.main(argv) == cli.EXIT_OK
        assert capsys.readouterr().out == ""
        assert json.loads(path.read_text())["check"] == "kloosterman"

    def test_missing_parameter(self, capsys):
        assert cli.main(["eval", "kloosterman", "--m", "1"]) == cli.EXIT_USAGE
        assert capsys.readouterr().out == ""

    def test_domain_error_is_usage_error(self):
        assert cli.main(["eval", "kloosterman", "--m", "1", "--n", "1", "--ell", "0"]) == cli.EXIT_USAGE

    def test_bad_literal(self):
        assert cli.main(["eval", "gamma-p", "--p", "0", "--s", "half", "--nu", "0.3i"]) == cli.EXIT_USAGE

    def test_overflowing_integer(self):
        assert cli.main(["eval", "kloosterman", "--m", "1e400", "--n", "1", "--ell", "3"]) == cli.EXIT_USAGE

    def test_unknown_target(self):
        with pytest.raises(SystemExit) as info:
            cli.main(["eval", "zeta"])
        assert info.value.code == cli.EXIT_USAGE


class TestVerify:
    def test_group_suite(self, capsys):
        assert cli.main(["verify", "group", "--format", "records"]) == cli.EXIT_OK
        checks = [r["check"] for r in records(capsys)]
        assert checks == ["iwasawa_roundtrip", "bruhat_roundtrip", "action_cocycle"]

    def test_records_are_deterministic(self, capsys):
        cli.main(["verify", "group", "--format", "records", "--seed", "5"])
        first = capsys.readouterr().out
        cli.main(["verify", "group", "--format", "records", "--seed", "5"])
        assert capsys.readouterr().out == first

    def test_every_suite_is_registered(self):
        parser = cli.build_parser()
        for name in cli.SUITES:
            assert parser.parse_args(["verify", name]).target == name


class TestTrace:
    def test_needs_dataset(self):
        assert cli.main(["trace"]) == cli.EXIT_USAGE

    def test_missing_dataset(self, tmp_path):
        assert cli.main(["trace", "--dataset", str(tmp_path / "absent.csv")]) == cli.EXIT_DATA

    def test_invalid_dataset(self, tmp_path):
        path = tmp_path / "maass.csv"
        path.write_text("kappa,epsilon,norm_sq_rho1\n2.0,1,1.0\n")
        assert cli.main(["trace", "--dataset", str(path)]) == cli.EXIT_DATA

    def test_report_records_total_budget(self):
        report = kloosterman.SumFormulaReport(
            direction="kloosterman",
            m=1,
            n=1,
            delta=1,
            spectral_side=1.0 + 0j,
            geometric_side=1.005 + 0j,
            contributions=(kloosterman.FormContribution("9.5337", 9.5337j, 0.5, 0.2),),
            continuous_term=0.1 + 0j,
            delta_term=0j,
            truncation={"num_forms": 1, "ell_max": 40, "nu_cutoff": 20.0},
            budgets={"spectral_truncation": 1e-3, "quadrature": 2e-4, "kloosterman_tail": 0.0},
            discrete_series_included=True,
        )
        out = {r.check: r for r in cli.report_records(report)}
        assert out["budget:total"].value == pytest.approx(1.2e-3)
        assert out["contribution"].value == pytest.approx(0.1)
        assert out["sum_formula"].residual == pytest.approx(0.005 / 1.005)
        assert out["sum_formula"].passed
        assert "delta_term" not in out

    @pytest.mark.slow
    def test_opposite_signs(self, csv_dataset, capsys):
        argv = ["trace", "--dataset", str(csv_dataset), "--m", "1", "--n=-1", "--format", "records"]
        assert cli.main(argv) in (cli.EXIT_OK, cli.EXIT_FAILED)
        out = records(capsys)
        assert sum(r["check"] == "contribution" for r in out) == 10
        (summary,) = [r for r in out if r["check"] == "sum_formula"]
        assert summary["inputs"]["delta"] == -1
        assert summary["inputs"]["discrete_series_included"] is False
        assert summary["inputs"]["direction"] == "kloosterman"
        assert {r["check"] for r in out} >= {"continuous_term", "geometric_side", "spectral_side", "budget:quadrature"}
