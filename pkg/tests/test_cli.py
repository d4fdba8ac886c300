import json
import re
import subprocess
import sys

import pytest

from levyinvest.cli import main

FAST_CONFIG = {
    "model": {"family": "brownian_drift", "mu": 0.0, "sigma": 1.4142135623730951},
    "profit": {"kind": "cobb_douglas", "alpha": 0.5, "beta": 0.5},
    "r": 2.0,
    "seed": 11,
    "mc": {"n_paths": 3000, "step": 0.02, "t_max": 2.0},
    "grid": {"u_min": -1.0, "u_max": 1.0, "n": 9},
    "state": {"x": 0.0, "y": 0.05},
    "scales": [0.5, 1.0, 2.0],
}


@pytest.fixture
def config_path(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(FAST_CONFIG), encoding="utf-8")
    return str(path)


def read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


class TestSubcommands:
    def test_boundary_artifacts(self, config_path, tmp_path):
        out = str(tmp_path / "art")
        assert main(["boundary", "--config", config_path, "--out", out]) == 0
        csv_text = read(out + "/boundary.csv")
        assert csv_text.startswith("# config_sha256: ")
        assert "# seed: 11" in csv_text
        header = csv_text.splitlines()[2]
        assert header == "u,b,provenance,se_if_mc"
        assert len(csv_text.splitlines()) == 3 + 9
        doc = json.loads(read(out + "/boundary.json"))
        assert doc["seed"] == 11 and len(doc["u"]) == 9
        assert doc["provenance"] == "generic_solver"

    def test_csv_round_trips_doubles(self, config_path, tmp_path):
        out = str(tmp_path / "art")
        main(["boundary", "--config", config_path, "--out", out])
        doc = json.loads(read(out + "/boundary.json"))
        rows = read(out + "/boundary.csv").splitlines()[3:]
        for row, b_json in zip(rows, doc["b"]):
            cell = row.split(",")[1]
            assert "," not in cell and float(cell) == b_json
            assert re.fullmatch(r"-?[0-9.]+(e[+-]?[0-9]+)?", cell)

    def test_verify_artifact(self, config_path, tmp_path):
        out = str(tmp_path / "art")
        assert main(["verify", "--config", config_path, "--out", out]) == 0
        doc = json.loads(read(out + "/verify.json"))
        assert doc["closed_form_agreement"]["available"]
        assert doc["closed_form_agreement"]["max_rel_err"] < 1e-8
        for point in doc["integral_equation"]:
            assert {"u0", "y", "residual", "se", "ratio"} <= set(point)

    def test_wh_check_artifact(self, config_path, tmp_path):
        out = str(tmp_path / "art")
        assert main(["wh-check", "--config", config_path, "--out", out]) == 0
        doc = json.loads(read(out + "/wh_check.json"))
        assert doc["exact"]["roots"] == pytest.approx([-2 ** 0.5, 2 ** 0.5])
        assert doc["mc"]["inf_moment_at_1"]["se"] > 0
        assert "residual" in doc["identity"] and "se" in doc["identity"]

    def test_simulate_and_compare(self, config_path, tmp_path):
        out = str(tmp_path / "art")
        assert main(["simulate", "--config", config_path, "--out", out]) == 0
        sim = json.loads(read(out + "/simulate.json"))
        assert sim["j_se"] > 0 and sim["tail_bound"] < 1
        assert main(["compare", "--config", config_path, "--out", out]) == 0
        rows = read(out + "/compare.csv").splitlines()
        assert rows[2].split(",")[0] == "scale"
        assert len(rows) == 3 + 3
        cmp_doc = json.loads(read(out + "/compare.json"))
        base = [r for r in cmp_doc["rows"] if r["scale"] == 1.0][0]
        assert sim["j_value"] == base["j_value"]  # same seed, same paths

    def test_check_assumptions_artifact(self, config_path, tmp_path):
        out = str(tmp_path / "art")
        assert main(["check-assumptions", "--config", config_path, "--out", out]) == 0
        doc = json.loads(read(out + "/assumptions.json"))
        assert doc["passed"] is True


class TestDeterminism:
    def test_rerun_byte_identical(self, config_path, tmp_path):
        a, b = str(tmp_path / "a"), str(tmp_path / "b")
        for out in (a, b):
            main(["simulate", "--config", config_path, "--out", out])
        assert read(a + "/simulate.json") == read(b + "/simulate.json")

    def test_worker_count_byte_identical(self, config_path, tmp_path):
        a, b = str(tmp_path / "a"), str(tmp_path / "b")
        main(["compare", "--config", config_path, "--out", a, "--workers", "1"])
        main(["compare", "--config", config_path, "--out", b, "--workers", "4"])
        assert read(a + "/compare.csv") == read(b + "/compare.csv")
        assert read(a + "/compare.json") == read(b + "/compare.json")

    def test_seed_override_changes_results(self, config_path, tmp_path):
        a, b = str(tmp_path / "a"), str(tmp_path / "b")
        main(["simulate", "--config", config_path, "--out", a])
        main(["simulate", "--config", config_path, "--out", b, "--seed", "99"])
        da = json.loads(read(a + "/simulate.json"))
        db = json.loads(read(b + "/simulate.json"))
        assert da["j_value"] != db["j_value"]
        assert db["seed"] == 99


class TestErrorHandling:
    def test_invalid_config_exits_one_with_json(self, tmp_path, capsys):
        bad = dict(FAST_CONFIG, r=-1)
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(bad), encoding="utf-8")
        rc = main(["boundary", "--config", str(path)])
        assert rc == 1
        err = json.loads(capsys.readouterr().out)
        assert err["error"]["type"] == "ValidationError"
        assert err["error"]["key"] == "r"

    def test_missing_file_exits_one(self, capsys):
        rc = main(["boundary", "--config", "/nonexistent/cfg.json"])
        assert rc == 1
        assert json.loads(capsys.readouterr().out)["error"]["type"] == "ParseError"

    def test_module_error_reported(self, tmp_path, capsys):
        # CES with r below the marginal-profit floor: boundary cannot bracket
        doc = dict(FAST_CONFIG,
                   profit={"kind": "ces", "alpha": 0.5, "gamma": 0.5}, r=0.2)
        path = tmp_path / "low_rate.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        rc = main(["boundary", "--config", str(path), "--out", str(tmp_path / "o")])
        assert rc == 1
        err = json.loads(capsys.readouterr().out)
        assert err["error"]["type"] in ("BracketFailure", "DomainError")

    def test_unknown_subcommand_exits_two(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate", "--config", "x"])
        assert exc.value.code == 2

    def test_console_entry_point(self, config_path, tmp_path):
        cp = subprocess.run(
            [sys.executable, "-m", "levyinvest.cli", "boundary",
             "--config", config_path, "--out", str(tmp_path / "cli")],
            capture_output=True, text=True)
        assert cp.returncode == 0
