import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from substatic import cli
from substatic.catalogue import model_to_record, save_catalogue
from substatic import SCHW3, ADS0

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def negative_record():
    # f^2 = 1 - s^-4, i.e. eta(t) = -t^2 with eta'' < 0
    s = np.linspace(1.0, 4.0, 301)
    return {"name": "NEG_TAB", "n": 3, "c_cross": 1, "c_pot": 1, "kind": "tabulated", "s_max": 4.0,
            "samples": [[float(a), float(np.sqrt(max(0.0, 1 - a**-4)))] for a in s]}


def write(path, doc):
    path.write_text(json.dumps(doc))
    return path


def test_run_single_scenario(tmp_path):
    code = cli.main(["run", str(CONFIGS / "schw3_hk.json"), "--out", str(tmp_path)])
    assert code == 0
    summary = json.loads((tmp_path / "schw3_hk.summary.json").read_text())
    assert summary["passed"] and abs(summary["result"]["deficit"]) < 1e-9
    assert (tmp_path / "schw3_hk.graph.csv").exists()


def test_run_scenario_file(tmp_path):
    assert cli.main(["--out", str(tmp_path), "run", str(CONFIGS / "scenarios.json")]) == 0
    for name in ("schw3_flow.trace.csv", "schw3_torsion.torsion.csv", "ads0_substatic.profile.csv",
                 "dss_classification.eta.csv"):
        assert (tmp_path / name).exists()


def test_failing_scenario_exit_1(tmp_path):
    cfg = write(tmp_path / "neg.json", {"name": "neg", "model": negative_record(), "task": "substatic_check"})
    assert cli.main(["run", str(cfg), "--out", str(tmp_path / "o")]) == 1
    assert not json.loads((tmp_path / "o" / "neg.summary.json").read_text())["passed"]


@pytest.mark.parametrize("doc", [
    {"model": "SCHW3"},
    {"model": "SCHW3", "task": "dance"},
    {"model": "SCHW3", "task": "hk_deficit", "s_hat": -1},
    {"model": "SCHW3", "task": "hk_deficit", "extra": 1},
    {"model": "NOPE", "task": "hk_deficit", "s_hat": 2},
    {"model": "SCHW3", "task": "hk_deficit", "s_hat": 0.5},
    {"model": "SCHW3", "task": "torsion"},
])
def test_bad_input_exit_2(tmp_path, doc):
    cfg = write(tmp_path / "bad.json", doc)
    assert cli.main(["run", str(cfg), "--out", str(tmp_path / "o")]) == 2


def test_unreadable_and_flags(tmp_path):
    assert cli.main(["run", str(tmp_path / "missing.json")]) == 2
    (tmp_path / "broken.json").write_text("{not json")
    assert cli.main(["run", str(tmp_path / "broken.json")]) == 2
    assert cli.main(["frobnicate"]) == 2
    assert cli.main(["run", str(CONFIGS / "schw3_hk.json"), "--workers", "0"]) == 2


def test_validation_message_names_field(tmp_path, caplog):
    cfg = write(tmp_path / "bad.json", {"model": "SCHW3", "task": "hk_deficit", "s_hat": "two"})
    cli.main(["run", str(cfg), "--out", str(tmp_path)])
    assert "s_hat" in caplog.text


def test_suite_default_catalogue(tmp_path):
    assert cli.main(["suite", str(CONFIGS / "default_catalogue.json"), "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "suite.summary.json").read_text())
    assert summary["failed"] == 0 and summary["passed"] > 0
    assert (tmp_path / "suite.results.csv").read_text().startswith("model,check,status,value,note")


def test_suite_with_non_substatic_model(tmp_path):
    path = tmp_path / "cat.json"
    path.write_text(json.dumps({"models": [model_to_record(SCHW3), negative_record()]}))
    assert cli.main(["suite", str(path), "--out", str(tmp_path / "o")]) == 1
    summary = json.loads((tmp_path / "o" / "suite.summary.json").read_text())
    assert summary["failures"] == ["NEG_TAB:substatic"]
    assert summary["skipped"] >= 6


def test_empty_catalogue_exit_2(tmp_path):
    path = write(tmp_path / "empty.json", {"models": []})
    assert cli.main(["suite", str(path), "--out", str(tmp_path)]) == 2
    path = write(tmp_path / "bad.json", {"models": [{"name": "x"}]})
    assert cli.main(["suite", str(path), "--out", str(tmp_path)]) == 2


def test_outputs_deterministic_and_parallel(tmp_path):
    cat = tmp_path / "cat.json"
    save_catalogue([SCHW3, ADS0], cat)
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["suite", str(cat), "--out", str(a), "--seed", "7"]) == 0
    assert cli.main(["suite", str(cat), "--out", str(b), "--seed", "7", "--workers", "2"]) == 0
    assert (a / "suite.results.csv").read_bytes() == (b / "suite.results.csv").read_bytes()
    c = tmp_path / "c"
    cli.main(["run", str(CONFIGS / "scenarios.json"), "--out", str(c)])
    d = tmp_path / "d"
    cli.main(["run", str(CONFIGS / "scenarios.json"), "--out", str(d), "--workers", "3"])
    for f in sorted(c.glob("*.csv")):
        assert f.read_bytes() == (d / f.name).read_bytes(), f.name


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "substatic", "run", str(CONFIGS / "schw3_hk.json"),
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0
