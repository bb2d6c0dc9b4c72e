import csv
import json
import math
import os
import subprocess
from pathlib import Path

import jsonschema
import pytest

BIN = os.environ.get("SRUSK_BIN", "build/tools/srusk")
MODELS = Path(os.environ.get("SRUSK_MODELS", "models"))
SCHEMAS = Path(os.environ.get("SRUSK_SCHEMAS", "schemas"))


def run(*args, cwd, env=None):
    full_env = dict(os.environ)
    full_env.pop("SRUSK_SEED", None)
    full_env.update(env or {})
    return subprocess.run([BIN, *map(str, args)], cwd=cwd, capture_output=True, text=True, env=full_env, timeout=120)


def validate(path, schema):
    with open(SCHEMAS / f"{schema}.schema.json") as f:
        jsonschema.validate(json.loads(Path(path).read_text()), json.load(f), cls=jsonschema.Draft202012Validator)


def test_analyze_oscillator(tmp_path):
    r = run("analyze", MODELS / "oscillator.lag", "--json", "a.json", cwd=tmp_path)
    assert r.returncode == 0, r.stderr
    assert r.stdout.splitlines()[0] == "Regular; chain stabilized at level 2; Z unique on graph_L"
    validate(tmp_path / "a.json", "analysis")


def test_analyze_singular(tmp_path):
    r = run("analyze", MODELS / "singular2.lag", "--json", "s.json", cwd=tmp_path)
    assert r.returncode == 0, r.stderr
    assert r.stdout.splitlines()[0] == "Singular rank 1; chain levels 4; 0 free parameters"
    validate(tmp_path / "s.json", "analysis")
    d = run("analyze", MODELS / "degenerate.lag", cwd=tmp_path)
    assert d.stdout.splitlines()[0] == "Singular rank 0; chain levels 2; 1 free parameter"


def test_analyze_model_error(tmp_path):
    (tmp_path / "broken.lag").write_text("dim 1;\nL = p1*qd1;\n")
    r = run("analyze", "broken.lag", cwd=tmp_path)
    assert r.returncode == 2
    assert "broken.lag:2:5: momentum coordinate not allowed in L" in r.stderr
    assert run("analyze", "missing.lag", cwd=tmp_path).returncode == 2


def test_analyze_variable_rank(tmp_path):
    r = run("analyze", MODELS / "cubic.lag", "--json", "c.json", cwd=tmp_path)
    assert r.returncode == 3
    validate(tmp_path / "c.json", "analysis")


def test_simulate_oscillator_period(tmp_path):
    r = run("simulate", MODELS / "oscillator.lag", "--ic", "0,1,0", "--h", "1e-3", "--T", "6.2832", "--out", "osc", cwd=tmp_path)
    assert r.returncode == 0, r.stderr
    rows = list(csv.reader(open(tmp_path / "osc.csv")))
    assert rows[0] == ["t", "q1", "tau", "p1", "qd1", "drift"]
    assert abs(float(rows[-1][1]) - 1.0) <= 1e-6
    assert abs(float(rows[-1][0]) - 6.2832) <= 1e-12
    validate(tmp_path / "osc.json", "trajectory")
    cfg = json.loads((tmp_path / "osc.json").read_text())["config"]
    assert cfg["seed"] == 42 and cfg["h"] == 1e-3 and cfg["T"] == 6.2832


def test_simulate_singular_frozen_velocity(tmp_path):
    r = run("simulate", MODELS / "singular2.lag", "--bind", "u1=0", "--out", "s2", cwd=tmp_path)
    assert r.returncode == 0, r.stderr
    rows = list(csv.reader(open(tmp_path / "s2.csv")))
    col = rows[0].index("qd1")
    assert all(float(row[col]) == 0.0 for row in rows[1:])
    validate(tmp_path / "s2.json", "trajectory")


def test_simulate_bindings_echoed(tmp_path):
    r = run("simulate", MODELS / "degenerate.lag", "--bind", "u1=0.5", "--T", "1", "--out", "d", cwd=tmp_path)
    assert r.returncode == 0, r.stderr
    data = json.loads((tmp_path / "d.json").read_text())
    assert data["config"]["bindings"] == {"u1": 0.5}
    assert math.isclose(data["samples"][-1][1], 0.25, abs_tol=1e-12)
    r = run("simulate", MODELS / "degenerate.lag", "--T", "1", "--out", "d0", cwd=tmp_path)
    assert "u1 defaulted to 0" in r.stderr
    assert json.loads((tmp_path / "d0.json").read_text())["config"]["defaulted_bindings"] == ["u1"]


def test_simulate_bad_initial_conditions(tmp_path):
    r = run("simulate", MODELS / "singular2.lag", "--ic", "0,0,0,0.5,0", cwd=tmp_path)
    assert r.returncode == 4
    assert "constraint qd1 = 0 violated (residual 0.5)" in r.stderr
    (tmp_path / "noic.lag").write_text("dim 1;\nL = 1/2*qd1^2;\n")
    assert run("simulate", "noic.lag", cwd=tmp_path).returncode == 4
    assert run("simulate", MODELS / "oscillator.lag", "--ic", "0,1", cwd=tmp_path).returncode == 4


@pytest.mark.parametrize("model", ["free_particle", "oscillator", "td_oscillator", "singular2", "degenerate", "two_dof"])
def test_verify_corpus(tmp_path, model):
    r = run("verify", MODELS / f"{model}.lag", "--report", "r.json", cwd=tmp_path)
    assert r.returncode == 0, r.stdout + r.stderr
    validate(tmp_path / "r.json", "verify")


def test_verify_sign_flipped_omega(tmp_path):
    r = run("verify", MODELS / "oscillator.lag", "--flip-omega-sign", cwd=tmp_path)
    assert r.returncode == 5
    assert "oscillator.verify.json" in r.stderr
    report = json.loads((tmp_path / "oscillator.verify.json").read_text())
    assert not report["passed"]
    validate(tmp_path / "oscillator.verify.json", "verify")


def test_seed_determinism(tmp_path):
    a = run("verify", MODELS / "singular2.lag", "--seed", "7", "--report", "a.json", cwd=tmp_path)
    b = run("verify", MODELS / "singular2.lag", "--report", "b.json", cwd=tmp_path, env={"SRUSK_SEED": "7"})
    c = run("verify", MODELS / "singular2.lag", "--report", "c.json", cwd=tmp_path)
    assert a.returncode == b.returncode == c.returncode == 0
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert json.loads((tmp_path / "a.json").read_text())["seed"] == 7
    assert json.loads((tmp_path / "c.json").read_text())["seed"] == 42
