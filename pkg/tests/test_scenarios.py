"""Tests for scenario configs, the pipeline runner and report artifacts."""

import json
from pathlib import Path

import numpy as np
import pytest

import liedeg.dynamics as D
import liedeg.groups as G
import liedeg.reps as R
from liedeg.errors import ConfigError
from liedeg.scenarios import (COCYCLE_BUILDERS, SCENARIO_NAMES,
                              TIMINGS_FILENAME, ScenarioConfig,
                              _jsonify, _rep_from_label, _slug,
                              build_cocycle, default_config, scenario_run)

FLOW = D.default_flow(1)


def _run_dir_files(outdir: Path) -> list[str]:
    return sorted(p.name for p in outdir.iterdir()
                  if p.name != TIMINGS_FILENAME)


def _small_anzai(outdir, seed=7) -> ScenarioConfig:
    cfg = default_config("anzai-torus", seed=seed, outdir=str(outdir))
    cfg.reps = [[0], [1], [2]]
    cfg.n_degree = 400
    cfg.n_corr = 12
    cfg.nodes = 16
    return cfg


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

class TestScenarioConfig:
    def test_defaults_exist_for_every_named_scenario(self):
        for name in SCENARIO_NAMES:
            if name == "custom":
                with pytest.raises(ConfigError):
                    default_config(name)
            else:
                cfg = default_config(name)
                assert cfg.name == name
                assert cfg.cocycle["name"] in COCYCLE_BUILDERS

    def test_unknown_scenario_rejected(self):
        with pytest.raises(ConfigError, match="unknown scenario"):
            default_config("nope")
        with pytest.raises(ConfigError, match="unknown scenario"):
            ScenarioConfig.from_dict({"name": "nope"})

    def test_validation_catches_bad_fields(self):
        base = dict(name="anzai-torus",
                    cocycle={"name": "torus-monomial", "params": {"k": [[1]]}},
                    reps=[[1]])
        for bad in [dict(d=0), dict(alpha=[0.1, 0.2]), dict(reps=[]),
                    dict(n_degree=1), dict(n_corr=3), dict(nodes=2),
                    dict(seed=-1), dict(cocycle={"name": "nope"})]:
            data = dict(base)
            data.update(bad)
            with pytest.raises(ConfigError):
                ScenarioConfig.from_dict(data)

    def test_unknown_keys_rejected(self):
        with pytest.raises(ConfigError, match="unknown config keys"):
            ScenarioConfig.from_dict({"name": "anzai-torus", "turbo": True})

    def test_echo_omits_outdir(self):
        cfg = default_config("anzai-torus", outdir="/tmp/somewhere")
        echo = cfg.to_dict()
        assert "outdir" not in echo
        assert echo["seed"] == cfg.seed

    def test_from_json_roundtrip(self, tmp_path):
        cfg = default_config("so3-maximal-torus", seed=3)
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg.to_dict()))
        loaded = ScenarioConfig.from_json(path)
        assert loaded.to_dict() == cfg.to_dict()

    def test_from_json_bad_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            ScenarioConfig.from_json(tmp_path / "absent.json")
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(ConfigError, match="not valid JSON"):
            ScenarioConfig.from_json(bad)
        arr = tmp_path / "arr.json"
        arr.write_text("[1, 2]")
        with pytest.raises(ConfigError, match="JSON object"):
            ScenarioConfig.from_json(arr)


class TestCocycleRegistry:
    def test_every_builder_instantiates(self):
        specs = {
            "torus-monomial": {"k": [[1]]},
            "su2-diagonal": {"k": 1},
            "su2-twisted-diagonal": {"k": 1},
            "su2-two-angle": {"m1": 1, "m2": 2},
            "so3-x3-rotation": {"k": 1},
            "u2-product": {"k_torus": [1], "k_rot": [0]},
            "u2-scalar-su2": {"k_scalar": [2],
                              "inner": {"name": "su2-diagonal",
                                        "params": {"k": 1}}},
            "cohomologous-su2-pair": {"k": 1},
        }
        assert set(specs) == set(COCYCLE_BUILDERS)
        for name, params in specs.items():
            c, extras = build_cocycle(FLOW, {"name": name, "params": params})
            assert c.group.tag in (G.TORUS, G.SU2, G.SO3, G.U2)
            if name == "cohomologous-su2-pair":
                assert set(extras) == {"delta", "zeta"}

    def test_missing_parameter_is_config_error(self):
        with pytest.raises(ConfigError, match="missing parameter"):
            build_cocycle(FLOW, {"name": "su2-diagonal", "params": {}})

    def test_unknown_cocycle_is_config_error(self):
        with pytest.raises(ConfigError, match="unknown cocycle"):
            build_cocycle(FLOW, {"name": "nope"})


class TestRepLabels:
    def test_labels_build_per_group(self):
        assert _rep_from_label(G.GroupSpec(G.TORUS, 2), [1, -1], 2).dim == 1
        assert _rep_from_label(G.SU2_GROUP, [3], 1).dim == 4
        assert _rep_from_label(G.SO3_GROUP, [2], 1).dim == 5
        assert _rep_from_label(G.U2_GROUP, [2, 1], 1).dim == 3

    def test_bad_labels_rejected(self):
        with pytest.raises(ConfigError):
            _rep_from_label(G.GroupSpec(G.TORUS, 2), [1], 2)
        with pytest.raises(ConfigError):
            _rep_from_label(G.SU2_GROUP, [1, 2], 1)
        with pytest.raises(ConfigError):
            _rep_from_label(G.U2_GROUP, [1], 1)
        with pytest.raises(ConfigError):
            _rep_from_label(G.SU2_GROUP, [-1], 1)

    def test_slugs_are_distinct_and_filename_safe(self):
        reps = [R.torus_rep([1]), R.torus_rep([-1]), R.torus_rep([0]),
                R.su2_rep(2), R.so3_rep(2), R.u2_rep(2, 1), R.u2_rep(2, -1)]
        slugs = [_slug(rep) for rep in reps]
        assert len(set(slugs)) == len(slugs)
        for slug in slugs:
            assert all(ch.isalnum() or ch in "-_" for ch in slug)


class TestJsonify:
    def test_numpy_payloads_coerced(self):
        data = {
            "a": np.float64(1.5),
            "b": np.int32(4),
            "c": np.array([1.0, 2.0]),
            "d": complex(1, -2),
            "e": np.bool_(True),
            "f": float("inf"),
        }
        out = _jsonify(data)
        assert out == {"a": 1.5, "b": 4, "c": [1.0, 2.0],
                       "d": {"re": 1.0, "im": -2.0}, "e": True, "f": "inf"}
        json.dumps(out, allow_nan=False)


# ---------------------------------------------------------------------------
# pipeline runs
# ---------------------------------------------------------------------------

class TestScenarioRun:
    def test_outdir_required(self):
        cfg = default_config("anzai-torus")
        with pytest.raises(ConfigError, match="outdir"):
            scenario_run(cfg)

    def test_anzai_small_run_structure(self, tmp_path):
        rr = scenario_run(_small_anzai(tmp_path / "run"))
        rep = rr.report
        assert rep["scenario"] == "anzai-torus"
        assert rep["group"] == "T^1"
        assert "outdir" not in rep["config"]
        assert rr.report_path.exists()
        assert (rr.outdir / TIMINGS_FILENAME).exists()
        # every referenced file exists
        for entry in rep["spectral"]:
            assert (rr.outdir / entry["series_csv"]).exists()
            assert (rr.outdir / entry["series_svg"]).exists()
        assert (rr.outdir / rep["timings_path"]).exists()
        # weight-zero fiber keeps its mass; others decay
        by_label = {e["label"]: e for e in rep["spectral"]}
        assert by_label["torus q=[0]"]["mixing"]["verdict"] == "NO-CLAIM"
        assert by_label["torus q=[0]"]["wiener_tail"] > 0.99
        assert by_label["torus q=[1]"]["mixing"]["verdict"] == "SUPPORTED"
        assert by_label["torus q=[1]"]["ac"]["verdict"] == "AC-PREDICTED"
        assert by_label["torus q=[1]"]["wiener_tail"] < 1e-20
        caveat_text = " ".join(rep["caveats"])
        assert "input assumption" in caveat_text

    def test_report_json_parses_from_disk(self, tmp_path):
        rr = scenario_run(_small_anzai(tmp_path / "run"))
        parsed = json.loads(rr.report_path.read_text())
        assert parsed["versions"]["package"]
        assert parsed["degree"]["M_star"]

    def test_alpha_override_changes_flow(self, tmp_path):
        cfg = _small_anzai(tmp_path / "run")
        cfg.alpha = [0.25]
        rr = scenario_run(cfg)
        assert rr.report["flow"] == {"alpha": [0.25], "source": "config"}
        # degree closed form tracks the override: M* = 2 pi i alpha
        m_star = rr.report["degree"]["M_star"][0]
        assert abs(m_star[1] - 2.0 * np.pi * 0.25) < 1e-12

    def test_byte_identical_reruns(self, tmp_path):
        run_a = scenario_run(_small_anzai(tmp_path / "a")).outdir
        run_b = scenario_run(_small_anzai(tmp_path / "b")).outdir
        names = _run_dir_files(run_a)
        assert names == _run_dir_files(run_b)
        for name in names:
            assert (run_a / name).read_bytes() == (run_b / name).read_bytes()

    def test_seed_changes_report(self, tmp_path):
        run_a = scenario_run(_small_anzai(tmp_path / "a", seed=1)).outdir
        run_b = scenario_run(_small_anzai(tmp_path / "b", seed=2)).outdir
        assert ((run_a / "report.json").read_bytes()
                != (run_b / "report.json").read_bytes())

    def test_thread_count_does_not_change_bytes(self, tmp_path, monkeypatch):
        run_a = scenario_run(_small_anzai(tmp_path / "a")).outdir
        monkeypatch.setenv("LIEDEG_THREADS", "3")
        run_b = scenario_run(_small_anzai(tmp_path / "b")).outdir
        for name in _run_dir_files(run_a):
            assert (run_a / name).read_bytes() == (run_b / name).read_bytes()

    def test_su2_straighten_trimmed(self, tmp_path):
        cfg = default_config("su2-straighten", outdir=str(tmp_path / "run"))
        cfg.reps = [[1], [2]]
        cfg.n_degree = 2000
        cfg.n_corr = 10
        rr = scenario_run(cfg)
        rep = rr.report
        assert rep["degree"]["verdict"] == "NOT_UNIQUELY_ERGODIC(b)"
        rho = rep["degree"]["diagnostics"]["straighten_rho_estimate"]
        assert abs(rho - 2.0 * np.pi * FLOW.alpha[0]) < 5e-3
        by_label = {e["label"]: e for e in rep["spectral"]}
        l1 = by_label["su2 l=1"]
        assert l1["mixing"]["verdict"] == "SUPPORTED"
        assert all("-conjugated" in p["probe"] for p in l1["mixing"]["probes"])
        assert by_label["su2 l=2"]["mixing"]["kernel_indices"] == [1]

    def test_u2_product_kernel_contrast(self, tmp_path):
        cfg = default_config("u2-product", outdir=str(tmp_path / "run"))
        cfg.reps = [[2, 2], [2, 1]]
        cfg.n_degree = 1000
        cfg.n_corr = 8
        rr = scenario_run(cfg)
        by_label = {e["label"]: e for e in rr.report["spectral"]}
        full = by_label["u2 (l,m)=(2,1)"]["mixing"]
        empty = by_label["u2 (l,m)=(2,2)"]["mixing"]
        assert full["kernel_indices"] == [0, 1, 2]
        assert full["verdict"] == "NO-CLAIM"
        assert empty["kernel_indices"] == []
        assert empty["verdict"] == "SUPPORTED"
        s_phi = rr.report["degree"]["diagnostics"]["s_phi"]
        assert abs(s_phi - np.pi * FLOW.alpha[0]) < 1e-6
