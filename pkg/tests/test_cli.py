"""CLI tests: subcommand behavior and exit-code mapping."""

import json

import pytest

from liedeg import acceptance, cli


def _cfg_text(**overrides) -> str:
    data = {
        "name": "anzai-torus",
        "cocycle": {"name": "torus-monomial", "params": {"k": [[1]]}},
        "reps": [[0], [1]],
        "n_degree": 300,
        "n_corr": 8,
        "nodes": 8,
        "seed": 3,
    }
    data.update(overrides)
    return json.dumps(data)


class TestScenarioCommand:
    def test_runs_preset(self, tmp_path, capsys):
        rc = cli.main(["scenario", "anzai-torus", "--out",
                       str(tmp_path / "run"), "--seed", "5"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "report:" in out and "ergodicity:" in out
        assert (tmp_path / "run" / "report.json").exists()

    def test_config_file_and_overrides(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(_cfg_text())
        rc = cli.main(["scenario", "anzai-torus", "--config", str(cfg),
                       "--out", str(tmp_path / "run")])
        assert rc == 0
        report = json.loads((tmp_path / "run" / "report.json").read_text())
        assert report["config"]["n_corr"] == 8
        capsys.readouterr()

    def test_config_name_mismatch_is_config_error(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(_cfg_text())
        rc = cli.main(["scenario", "u2-product", "--config", str(cfg),
                       "--out", str(tmp_path / "run")])
        assert rc == 2
        assert "config error" in capsys.readouterr().err

    def test_missing_outdir_is_config_error(self, capsys):
        rc = cli.main(["scenario", "anzai-torus"])
        assert rc == 2
        assert "output directory" in capsys.readouterr().err

    def test_custom_without_config_is_config_error(self, tmp_path, capsys):
        rc = cli.main(["scenario", "custom", "--out", str(tmp_path)])
        assert rc == 2
        capsys.readouterr()

    def test_unknown_name_rejected_by_parser(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["scenario", "nope"])
        assert exc.value.code == 2

    def test_degenerate_degree_is_numeric_guard_exit(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(_cfg_text(
            name="custom",
            cocycle={"name": "cohomologous-su2-pair",
                     "params": {"k": 0, "c0": 0.0}},
            reps=[[1]]))
        rc = cli.main(["scenario", "custom", "--config", str(cfg),
                       "--out", str(tmp_path / "run")])
        assert rc == 3
        assert "numeric guard" in capsys.readouterr().err


class TestDegreeCommand:
    def test_json_to_stdout(self, capsys):
        rc = cli.main(["degree", "--cocycle", "torus-monomial",
                       "--params", '{"k": [[2]]}', "--n", "500",
                       "--points", "3"])
        assert rc == 0
        data = json.loads(capsys.readouterr().out)
        assert data["group"] == "T^1"
        assert data["constant"] is True

    def test_json_to_file(self, tmp_path, capsys):
        out = tmp_path / "deg.json"
        rc = cli.main(["degree", "--cocycle", "su2-diagonal",
                       "--params", '{"k": 1}', "--n", "500",
                       "--points", "2", "--out", str(out)])
        assert rc == 0
        assert json.loads(out.read_text())["group"] == "SU2"
        capsys.readouterr()

    def test_bad_params_json(self, capsys):
        rc = cli.main(["degree", "--cocycle", "torus-monomial",
                       "--params", "{bad"])
        assert rc == 2
        assert "config error" in capsys.readouterr().err

    def test_unknown_cocycle(self, capsys):
        rc = cli.main(["degree", "--cocycle", "nope"])
        assert rc == 2
        capsys.readouterr()

    def test_alpha_length_mismatch(self, capsys):
        rc = cli.main(["degree", "--cocycle", "torus-monomial",
                       "--params", '{"k": [[1]]}', "--alpha", "0.1,0.2"])
        assert rc == 2
        capsys.readouterr()

    def test_unwritable_output_is_io_error(self, tmp_path, capsys):
        rc = cli.main(["degree", "--cocycle", "torus-monomial",
                       "--params", '{"k": [[1]]}', "--n", "300",
                       "--points", "2",
                       "--out", str(tmp_path / "absent" / "deg.json")])
        assert rc == 4
        assert "i/o error" in capsys.readouterr().err


class TestCorrCommand:
    def test_csv_and_svg_outputs(self, tmp_path, capsys):
        csv = tmp_path / "series.csv"
        svg = tmp_path / "series.svg"
        rc = cli.main(["corr", "--cocycle", "torus-monomial",
                       "--params", '{"k": [[1]]}', "--rep", "1",
                       "--n-max", "6", "--nodes", "8",
                       "--out", str(csv), "--svg", str(svg)])
        assert rc == 0
        assert csv.read_text().startswith("N,re,im,abs,err_estimate")
        assert svg.read_text().startswith("<svg")
        capsys.readouterr()

    def test_stdout_csv(self, capsys):
        rc = cli.main(["corr", "--cocycle", "torus-monomial",
                       "--params", '{"k": [[1]]}', "--rep", "1",
                       "--n-max", "4", "--nodes", "8"])
        assert rc == 0
        out = capsys.readouterr().out
        assert out.splitlines()[0] == "N,re,im,abs,err_estimate"
        assert len(out.splitlines()) == 6

    def test_bad_slot(self, capsys):
        rc = cli.main(["corr", "--cocycle", "torus-monomial",
                       "--params", '{"k": [[1]]}', "--rep", "1",
                       "--slot", "5"])
        assert rc == 2
        capsys.readouterr()

    def test_bad_label(self, capsys):
        rc = cli.main(["corr", "--cocycle", "su2-diagonal",
                       "--params", '{"k": 1}', "--rep", "x"])
        assert rc == 2
        capsys.readouterr()


class TestRepCheckCommand:
    def test_su2_check(self, capsys):
        rc = cli.main(["rep-check", "--group", "su2", "--label", "2",
                       "--samples", "40", "--nodes", "16"])
        assert rc == 0
        data = json.loads(capsys.readouterr().out)
        assert data["homomorphism_deviation"] < 1e-10
        assert data["unitarity_deviation"] < 1e-10
        assert data["orthogonality_deviation"] < 1e-8

    def test_torus_check(self, capsys):
        rc = cli.main(["rep-check", "--group", "torus", "--label", "1,-2",
                       "--samples", "30"])
        assert rc == 0
        data = json.loads(capsys.readouterr().out)
        assert data["dim"] == 1

    def test_unknown_group(self, capsys):
        rc = cli.main(["rep-check", "--group", "nope", "--label", "1"])
        assert rc == 2
        capsys.readouterr()


class TestSelfTestAndHelp:
    def test_no_command_prints_help(self, capsys):
        rc = cli.main([])
        assert rc == 2
        assert "usage" in capsys.readouterr().out.lower()

    def test_self_test_exit_codes(self, monkeypatch, capsys):
        ok = acceptance.CriterionResult(1, "stub", True, "fine", 0.0)
        bad = acceptance.CriterionResult(2, "stub", False, "broken", 0.0)
        monkeypatch.setattr(acceptance, "run_all", lambda verbose: [ok])
        assert cli.main(["--self-test"]) == 0
        monkeypatch.setattr(acceptance, "run_all", lambda verbose: [ok, bad])
        assert cli.main(["--self-test"]) == 1
        capsys.readouterr()

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["--version"])
        assert exc.value.code == 0
        assert "liedeg" in capsys.readouterr().out
