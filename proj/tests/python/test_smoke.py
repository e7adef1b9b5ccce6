"""Smoke tests for the qclab_py module and the qclab CLI."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

import qclab_py


VACUUM = json.dumps({"kind": "vacuum"})
COHERENT = json.dumps({"kind": "coherent", "alphas": [[0.5, 0.0], [0.0, 0.32]]})

ORIGIN = ([0.0, 0.0, 0.0], 0.0)
POINTS4 = [ORIGIN, ([0.7, 1.9, 2.3], 0.15), ([3.1, 0.4, 5.2], -0.4), ([4.9, 2.6, 1.1], 0.55)]


@pytest.fixture(scope="module")
def lab():
    return qclab_py.Lab(
        box_length=2.0 * np.pi,
        modes=[([0, 0, 1], 1), ([1, 1, 0], 1)],
        cutoffs=[6, 6],
    )


def test_vacuum_correlators_vanish(lab):
    dense = lab.correlator_dense(VACUUM, "E-E-E+E+", POINTS4)
    assert dense.shape == (3, 3, 3, 3)
    assert np.abs(dense).max() == 0.0


def test_symbolic_matches_dense(lab):
    dense = lab.correlator_dense(COHERENT, "E-E+E+E+", POINTS4)
    sym = lab.correlator_eval(COHERENT, "E-E+E+E+", POINTS4)
    scale = max(np.abs(dense).max(), 1e-300)
    assert np.abs(sym - dense).max() < 1e-12 * scale


def test_densities_are_physical(lab):
    fixed = POINTS4[1:]
    d = lab.densities(COHERENT, "derivation_13", fixed, ORIGIN, [np.pi, np.pi, np.pi])
    assert d["W"] >= 0.0
    w = np.array(d["Wstress"])
    assert np.abs(w - w.T).max() < 1e-12 * max(np.abs(w).max(), 1e-300)
    assert np.abs(np.array(d["T"]) + np.array(d["Tm"])).max() < 1e-12 * max(
        np.abs(np.array(d["T"])).max(), 1e-300
    )


def test_angular_split_closes(lab):
    fixed = POINTS4[1:]
    a = lab.angular(COHERENT, "derivation_13", fixed, [np.pi, np.pi, np.pi])
    closure = (
        np.array(a["total"])
        - np.array(a["orbital"])
        - np.array(a["spin"])
        - np.array(a["boundary"])
    )
    assert np.abs(closure).max() < 1e-12 * max(a["scale"], 1e-300)


def test_scenario_run_and_determinism():
    scenarios = qclab_py.bundled_scenarios()
    assert set(scenarios) == {
        "paper_derivation13",
        "paper_printed22",
        "units_c2",
        "angular_circular",
        "oracle_crosscheck",
    }
    text = scenarios["angular_circular"]
    first = qclab_py.run_scenario_json(text)
    second = qclab_py.run_scenario_json(text)
    assert first == second
    report = json.loads(first)
    assert report["overall"] == "pass"
    assert report["environment"]["version"] == qclab_py.__version__


def test_identity_catalog():
    names = dict(qclab_py.list_identities())
    assert "eq7" in names
    assert "eq23" in names


CLI = os.environ.get("QCLAB_CLI")


@pytest.mark.skipif(CLI is None, reason="QCLAB_CLI not set")
def test_cli_list_and_errors(tmp_path):
    out = subprocess.run([CLI, "list-identities"], capture_output=True, text=True)
    assert out.returncode == 0
    assert "eq7" in out.stdout

    missing = subprocess.run(
        [CLI, "run", str(tmp_path / "nonexistent.json")], capture_output=True, text=True
    )
    assert missing.returncode == 2

    bad = tmp_path / "bad.json"
    bad.write_text('{"name": "x"}')
    invalid = subprocess.run([CLI, "run", str(bad)], capture_output=True, text=True)
    assert invalid.returncode == 2


@pytest.mark.skipif(CLI is None, reason="QCLAB_CLI not set")
def test_cli_failing_check_exits_one(tmp_path):
    # the printed momentum sign breaks the momentum continuity: exit code 1
    # (two distinct wavevectors, otherwise the densities are uniform)
    scenario = {
        "name": "failing",
        "mode_set": {"modes": [{"n": [0, 0, 1], "pol": 1}, {"n": [1, 1, 0], "pol": 1}]},
        "cutoffs": [6, 6],
        "states": [{"name": "coh", "kind": "coherent",
                    "alphas": [[0.4, 0.0], [0.0, 0.3]]}],
        "fixed_points": [
            {"r": [0.7, 1.9, 2.3], "t": 0.15},
            {"r": [3.1, 0.4, 5.2], "t": -0.4},
            {"r": [4.9, 2.6, 1.1], "t": 0.55},
        ],
        "sample_points": {"seed": 3, "count": 5},
        "identities": ["eq27"],
        "momentum_sign": "printed",
    }
    path = tmp_path / "failing.json"
    path.write_text(json.dumps(scenario))
    run = subprocess.run(
        [CLI, "run", str(path), "--out", str(tmp_path / "reports")],
        capture_output=True,
        text=True,
    )
    assert run.returncode == 1
    assert "FAIL" in run.stdout


@pytest.mark.skipif(CLI is None, reason="QCLAB_CLI not set")
def test_cli_run_scenario(tmp_path):
    scenario = {
        "name": "smoke",
        "mode_set": {"modes": [{"n": [0, 0, 1], "pol": 1}]},
        "cutoffs": [4],
        "states": [{"name": "vacuum", "kind": "vacuum"},
                   {"name": "coh", "kind": "coherent", "alphas": [[0.4, 0.0]]}],
        "fixed_points": [
            {"r": [0.7, 1.9, 2.3], "t": 0.15},
            {"r": [3.1, 0.4, 5.2], "t": -0.4},
            {"r": [4.9, 2.6, 1.1], "t": 0.55},
        ],
        "sample_points": {"seed": 7, "count": 5},
        "identities": ["eq7", "eq11", "eq23", "potential", "oracle_dense"],
    }
    path = tmp_path / "smoke.json"
    path.write_text(json.dumps(scenario))
    out_dir = tmp_path / "reports"
    run = subprocess.run(
        [CLI, "run", str(path), "--out", str(out_dir), "--format", "both"],
        capture_output=True,
        text=True,
    )
    assert run.returncode == 0, run.stdout + run.stderr
    report = json.loads((out_dir / "smoke.json").read_text())
    assert report["overall"] == "pass"
    csv_text = (out_dir / "smoke.csv").read_text()
    assert csv_text.startswith("scenario,identity,convention,state,point_index,")
