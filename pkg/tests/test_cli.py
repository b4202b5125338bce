import json
import os
import subprocess
import sys

import pytest

CLI = [sys.executable, "-m", "floerloops.cli"]


def run_cli(*args, env_extra=None, timeout=300):
    env = dict(os.environ)
    env.update(env_extra or {})
    return subprocess.run(
        CLI + list(args), capture_output=True, text=True, env=env, timeout=timeout
    )


def write_config(tmp_path, **overrides):
    doc = {
        "kind": "geometry_config",
        "schema_version": 1,
        "c": "1",
        "fibers": ["0"],
        "winding_bound": 2,
        "max_d": 4,
        "twist": "none",
    }
    doc.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture(scope="module")
def small_report(tmp_path_factory):
    out = tmp_path_factory.mktemp("rep") / "report.json"
    proc = run_cli("check-all", "--winding", "2", "--out", str(out))
    return proc, out


def test_check_all_passes(small_report):
    proc, out = small_report
    assert proc.returncode == 0, proc.stderr
    doc = json.loads(out.read_text())
    names = [r["name"] for r in doc["reports"]]
    assert names == ["path-model", "ainfty", "tw-dg", "fundamental-chains", "functor"]
    assert all(r["status"] == "pass" for r in doc["reports"])
    assert all(r["witness"] is None for r in doc["reports"])


def test_reports_byte_identical(small_report, tmp_path):
    _, out = small_report
    out2 = tmp_path / "report2.json"
    proc = run_cli("check-all", "--winding", "2", "--out", str(out2))
    assert proc.returncode == 0
    assert out.read_bytes() == out2.read_bytes()


def test_check_all_defaults_pass(tmp_path):
    # defaults: c=1, one fibre, winding 3, max_d 4
    out = tmp_path / "default.json"
    proc = run_cli("check-all", "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    doc = json.loads(out.read_text())
    assert doc["config"]["winding_bound"] == 3
    assert doc["config"]["max_d"] == 4
    assert all(r["status"] == "pass" for r in doc["reports"])


def test_demo_defaults_full_winding():
    proc = run_cli("demo-s1")
    assert proc.returncode == 0, proc.stderr
    assert "ring isomorphism: yes" in proc.stdout
    for k in range(-3, 4):
        assert f"x_{k} -> " in proc.stdout


def test_max_d_out_of_range_exits_2():
    proc = run_cli("check-all", "--max-d", "5")
    assert proc.returncode == 2
    assert "config error" in proc.stderr


def test_winding_zero_exits_2():
    proc = run_cli("check-all", "--winding", "0")
    assert proc.returncode == 2


def test_empty_fibers_exits_2(tmp_path):
    cfg = write_config(tmp_path, fibers=[])
    proc = run_cli("export", "--config", cfg)
    assert proc.returncode == 2


@pytest.mark.parametrize(
    "mutation,failing",
    [
        ("mu2-sign", "ainfty"),
        ("f1-zero", "functor"),
        ("pontryagin-compose", "path-model"),
        ("flat-sign", "fundamental-chains"),
        ("twisted-mc", "tw-dg"),
    ],
)
def test_mutations_fail_with_witness(tmp_path, mutation, failing):
    out = tmp_path / "report.json"
    proc = run_cli("check-all", "--winding", "1", "--mutate", mutation,
                   "--out", str(out))
    assert proc.returncode == 1
    doc = json.loads(out.read_text())
    failures = {r["name"]: r for r in doc["reports"] if r["status"] == "fail"}
    assert failing in failures
    assert failures[failing]["witness"] is not None


def test_unknown_mutation_exits_2():
    proc = run_cli("check-all", "--mutate", "bogus")
    assert proc.returncode == 2


def test_demo_s1_winding_1():
    proc = run_cli("demo-s1", "--winding", "1")
    assert proc.returncode == 0, proc.stderr
    assert "ring isomorphism: yes" in proc.stdout
    # 3x3 product table at winding bound 1, shown against loop concatenation
    rows = [l for l in proc.stdout.splitlines() if l.startswith("  x_") and "->" not in l]
    assert len(rows) == 3
    for row in rows:
        floer, loops = row.split("|")
        assert len(floer.split()) == 4 and len(loops.split()) == 3
    assert "x_-1 -> +t^-1" in proc.stdout or "x_-1 -> -t^-1" in proc.stdout


def test_demo_constant_twist_same_verdict():
    proc = run_cli("demo-s1", "--winding", "1", "--twist", "constant")
    assert proc.returncode == 0
    assert "ring isomorphism: yes" in proc.stdout


def test_export_import_round_trip(tmp_path):
    bundle = tmp_path / "bundle.json"
    proc = run_cli("export", "--winding", "2", "--out", str(bundle))
    assert proc.returncode == 0, proc.stderr
    rep_fresh = tmp_path / "fresh.json"
    rep_imported = tmp_path / "imported.json"
    assert run_cli("check-all", "--winding", "2", "--out", str(rep_fresh)).returncode == 0
    assert run_cli("check-all", "--config", str(bundle), "--out", str(rep_imported)).returncode == 0
    assert rep_fresh.read_bytes() == rep_imported.read_bytes()


def test_export_monotone_in_winding(tmp_path):
    b2 = tmp_path / "b2.json"
    b3 = tmp_path / "b3.json"
    assert run_cli("export", "--winding", "2", "--out", str(b2)).returncode == 0
    assert run_cli("export", "--winding", "3", "--out", str(b3)).returncode == 0
    doc2 = json.loads(b2.read_text())
    doc3 = json.loads(b3.read_text())

    def mu_map(doc):
        return {
            (json.dumps(row["inputs"])): json.dumps(row["output"])
            for row in doc["category"]["mu"]
        }

    small, large = mu_map(doc2), mu_map(doc3)
    assert set(small).issubset(set(large))
    assert all(large[k] == v for k, v in small.items())


def test_export_deterministic(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert run_cli("export", "--winding", "1", "--out", str(a)).returncode == 0
    assert run_cli("export", "--winding", "1", "--out", str(b)).returncode == 0
    assert a.read_bytes() == b.read_bytes()


def test_seed_env_echoed(tmp_path):
    out = tmp_path / "r.json"
    proc = run_cli("check-all", "--winding", "1", "--out", str(out),
                   env_extra={"FLOERLOOPS_SEED": "42"})
    assert proc.returncode == 0
    assert "FLOERLOOPS_SEED=42" in proc.stderr
    assert json.loads(out.read_text())["seed"] == "42"


def test_import_model_valid(tmp_path):
    from floerloops.pontryagin import leibniz_witness_model, path_model_to_json

    path = tmp_path / "model.json"
    path.write_text(json.dumps(path_model_to_json(leibniz_witness_model())))
    proc = run_cli("import-model", "--model", str(path))
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["reports"][0]["status"] == "pass"


def test_import_model_invalid_algebra(tmp_path):
    from floerloops.pontryagin import leibniz_witness_model, path_model_to_json

    doc = path_model_to_json(leibniz_witness_model())
    for row in doc["composition"]:
        if (row["first"], row["second"]) == ("ab", "u"):
            row["result"] = {"ab": -1}  # breaks right-unitality
    path = tmp_path / "model.json"
    path.write_text(json.dumps(doc))
    proc = run_cli("import-model", "--model", str(path))
    assert proc.returncode == 1
    assert json.loads(proc.stdout)["reports"][0]["status"] == "fail"


def test_import_model_garbage_exits_2(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    proc = run_cli("import-model", "--model", str(path))
    assert proc.returncode == 2
    proc = run_cli("import-model")
    assert proc.returncode == 2


def test_timings_flag_breaks_byte_identity_only_in_timing(tmp_path):
    out = tmp_path / "t.json"
    proc = run_cli("check-all", "--winding", "1", "--timings", "--out", str(out))
    assert proc.returncode == 0
    doc = json.loads(out.read_text())
    assert all(isinstance(r["timing_ms"], float) for r in doc["reports"])
