import json

import pytest

from gaugecavity.cli import main, run_check, run_sweep, validate_config
from gaugecavity.errors import ConfigError

MINIMAL = {
    "seed": 3,
    "model": {"kind": "two_level_ensemble", "count": 6, "gap": 1.0,
              "dipole_moment": [0.0, 1.0, 0.0], "volume": 1.0},
    "gauge": {"preset": "dipole"},
    "modes": [{"nu": 1.0}],
    "sweep": {"parameter": "dipole_scale", "start": 0.05, "stop": 0.6, "steps": 12},
    "output": {},
}


def write_config(tmp_path, cfg):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return str(path)


class TestValidateConfig:
    def test_minimal_valid(self):
        cfg = validate_config(json.dumps(MINIMAL))
        assert cfg.model["count"] == 6
        assert cfg.sweep["steps"] == 12

    def test_alpha_out_of_range_named(self):
        bad = dict(MINIMAL, gauge={"preset": "alpha_lwl", "alpha": 1.5})
        with pytest.raises(ConfigError) as err:
            validate_config(json.dumps(bad))
        assert any("alpha" in v for v in err.value.violations)

    def test_zero_steps_named(self):
        bad = dict(MINIMAL, sweep={"parameter": "dipole_scale", "start": 0,
                                   "stop": 1, "steps": 0})
        with pytest.raises(ConfigError) as err:
            validate_config(json.dumps(bad))
        assert any("sweep.steps" in v for v in err.value.violations)

    def test_all_violations_collected(self):
        bad = dict(MINIMAL,
                   gauge={"preset": "alpha_lwl", "alpha": 2.0},
                   sweep={"parameter": "dipole_scale", "start": 0, "stop": 1,
                          "steps": 0},
                   seed="nope")
        with pytest.raises(ConfigError) as err:
            validate_config(json.dumps(bad))
        text = " | ".join(err.value.violations)
        assert "alpha" in text and "sweep.steps" in text and "seed" in text

    def test_parse_error(self):
        with pytest.raises(ConfigError):
            validate_config("{not json")

    def test_unknown_model_kind(self):
        bad = dict(MINIMAL, model={"kind": "mystery"})
        with pytest.raises(ConfigError) as err:
            validate_config(json.dumps(bad))
        assert any("model.kind" in v for v in err.value.violations)


class TestRunSweep:
    def test_outputs_written(self, tmp_path):
        cfg = validate_config(json.dumps(MINIMAL))
        out = tmp_path / "out"
        assert run_sweep(cfg, str(out)) == 0
        csv = (out / "criterion.csv").read_text().splitlines()
        assert csv[0] == ("schema_version,point_index,param_name,param_value,"
                          "gauge,alpha,q_index,tau,lhs,rhs,electric_part,"
                          "magnetic_part,margin,condensed,beta_re,beta_im")
        # 12 points x 1 gauge x 1 mode x 2 branches
        assert len(csv) == 1 + 12 * 2
        summary = json.loads((out / "summary.json").read_text())
        assert set(summary) >= {"resolved_config", "thresholds",
                                "invariant_results", "timings"}

    def test_threshold_detection(self, tmp_path):
        cfg_dict = dict(MINIMAL)
        cfg_dict["sweep"] = {"parameter": "dipole_scale", "start": 0.01,
                             "stop": 0.6, "steps": 60}
        cfg = validate_config(json.dumps(cfg_dict))
        out = tmp_path / "out"
        run_sweep(cfg, str(out))
        summary = json.loads((out / "summary.json").read_text())
        plus = [t for t in summary["thresholds"]
                if t["tau"] == "+" and t["gauge"] == "dipole"][0]
        analytic = (1.0 / (2 * 6)) ** 0.5
        assert plus["condensed_anywhere"]
        assert abs(plus["crossing"] - analytic) <= 0.02

    def test_byte_identical_reruns(self, tmp_path):
        cfg = validate_config(json.dumps(MINIMAL))
        run_sweep(cfg, str(tmp_path / "a"))
        run_sweep(cfg, str(tmp_path / "b"))
        assert (tmp_path / "a" / "criterion.csv").read_bytes() == \
            (tmp_path / "b" / "criterion.csv").read_bytes()

    def test_threads_match_serial(self, tmp_path):
        cfg = validate_config(json.dumps(MINIMAL))
        run_sweep(cfg, str(tmp_path / "serial"), threads=1)
        run_sweep(cfg, str(tmp_path / "par"), threads=4)
        assert (tmp_path / "serial" / "criterion.csv").read_bytes() == \
            (tmp_path / "par" / "criterion.csv").read_bytes()

    def test_oracle_rows(self, tmp_path):
        cfg_dict = dict(MINIMAL)
        cfg_dict["oracle"] = {"enabled": True, "fock_cutoff": 16, "points": 3}
        cfg = validate_config(json.dumps(cfg_dict))
        out = tmp_path / "out"
        run_sweep(cfg, str(out))
        rows = (out / "oracle.csv").read_text().splitlines()
        assert rows[0].startswith("schema_version")
        assert len(rows) == 1 + 3

    def test_alpha_sweep_margin_curve(self, tmp_path):
        cfg_dict = dict(MINIMAL)
        cfg_dict["model"] = dict(MINIMAL["model"], dipole_moment=[0.0, 0.45, 0.0])
        cfg_dict["gauge"] = {"preset": "alpha_lwl", "alpha": 0.0}
        cfg_dict["sweep"] = {"parameter": "alpha", "start": 0.0, "stop": 1.0,
                             "steps": 11}
        cfg = validate_config(json.dumps(cfg_dict))
        out = tmp_path / "out"
        run_sweep(cfg, str(out))
        rows = [r.split(",") for r in
                (out / "criterion.csv").read_text().splitlines()[1:]]
        margins = [float(r[12]) for r in rows if r[7] == "+"]
        assert margins[0] < 0 < margins[-1]  # Coulomb endpoint up to dipole


class TestMain:
    def test_config_error_exit_two(self, tmp_path, capsys):
        bad = dict(MINIMAL, sweep={"parameter": "dipole_scale", "start": 0,
                                   "stop": 1, "steps": 0})
        path = write_config(tmp_path, bad)
        assert main(["sweep", "--config", path, "--out", str(tmp_path / "o")]) == 2
        assert "sweep.steps" in capsys.readouterr().err

    def test_missing_config_exit_two(self, tmp_path):
        assert main(["sweep", "--config", str(tmp_path / "nope.json"),
                     "--out", str(tmp_path / "o")]) == 2

    def test_sweep_success_exit_zero(self, tmp_path):
        path = write_config(tmp_path, MINIMAL)
        assert main(["sweep", "--config", path, "--out", str(tmp_path / "o")]) == 0

    def test_check_exit_zero(self, tmp_path, capsys):
        path = write_config(tmp_path, MINIMAL)
        assert main(["check", "--config", path]) == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "FAIL" not in out


def test_run_check_structure():
    cfg = validate_config(json.dumps(MINIMAL))
    results = run_check(cfg)
    assert results["all_passed"]
    assert results["bogoliubov_lambda_vs_numeric"]["passed"]
    assert results["bogoliubov_symplectic"]["passed"]
