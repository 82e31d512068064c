"""Smoke tests for the python bindings against the bundled example files."""

import json
import os
import subprocess

import pytest

import elts

DATA = os.environ.get("ELTS_DATA_DIR", "data")


def data(rel):
    return os.path.join(DATA, rel)


@pytest.fixture(scope="module")
def two_bases():
    return elts.load(data("systems/two_bases.json"))


def test_load_and_repr(two_bases):
    assert two_bases.states == ["x1", "x2", "x3", "x4"]
    assert two_bases.markov_chain
    assert two_bases.grade == ["q1"]
    assert "4 states" in repr(two_bases)


def test_kernel_and_am(two_bases):
    kernel = elts.kernel_check(two_bases, two_bases, "x1", "x2")
    assert kernel["related"] is True
    am = elts.am_check(two_bases, two_bases, "x1", "x2")
    assert am["related"] is False
    assert am["refutation_certified"] is True


def test_instantiate_golden(two_bases):
    inst = elts.instantiate(two_bases, "proj0")
    doc = elts.to_dict(inst)
    weights = {t["from"]: t["dist"]["weights"] for t in doc["transitions"]}
    assert weights["x1"] == {"x3": {"rational": "1"}}
    assert weights["x2"] == {"x3": {"rational": "1/2"}, "x4": {"rational": "1/2"}}


def test_desiderata1(two_bases):
    report = elts.desiderata1(two_bases, two_bases, "x1", "x2", n_random=3, seed=4)
    assert report["agree"] and not report["defect"]


def test_parallel_and_grade_clash(two_bases):
    a = elts.load(data("systems/handshake_a.json"))
    b = elts.load(data("systems/handshake_b.json"))
    composed = elts.parallel(a, b)
    assert "s0|t0" in composed.states
    with pytest.raises(ValueError):
        elts.parallel(two_bases, two_bases)  # shared qubit: no-cloning


def test_partial_eval_equals_instantiate(two_bases):
    full = elts.partial_eval(two_bases, "proj+")
    inst = elts.instantiate(two_bases, "proj+")
    assert elts.to_dict(full) == elts.to_dict(inst)


def test_born_exact():
    assert elts.born("proj0", "proj+") == "1/2"
    assert elts.born("proj0", "proj0") == "1"


def test_distinguishing_density():
    effects = json.load(open(data("effects/projectors_01pm.json")))
    out = elts.distinguishing_density(effects, seed=8)
    assert out["min_gap"] > 1e-8


def test_validate_reports_violations(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({
        "algebra": {"kind": "quantum", "registry": {"q1": 2}},
        "grade": ["q1"],
        "states": ["s"],
        "transitions": [
            {"from": "s", "label": "tau", "dist": {"weights": {"ghost": "proj0"}}}
        ],
    }))
    violations = elts.validate(str(bad))
    assert violations
    with pytest.raises(ValueError):
        elts.load(str(bad))


def test_run_laws_quick():
    results = elts.run_laws("quantum", seed=1, samples=10)
    assert results and all(r["pass"] for r in results)


def test_roundtrip(two_bases):
    text = elts.dumps(two_bases)
    again = elts.loads(text)
    assert elts.dumps(again) == text


def test_cli_available():
    cli = os.environ.get("ELTS_CLI")
    if not cli:
        pytest.skip("ELTS_CLI not set")
    proc = subprocess.run(
        [cli, "check", "kernel", data("systems/two_bases.json"), "x1",
         data("systems/two_bases.json"), "x2", "--format", "json"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["related"] is True
