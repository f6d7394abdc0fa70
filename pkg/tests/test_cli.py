import csv
import io
import json
from contextlib import redirect_stdout

import pytest

from cliffcauchy import cli
from cliffcauchy.scenarios import (
    RUNNERS, ScenarioError, bundled_scenario, bundled_scenarios, load_scenario, run_check,
    run_scenario, scenario_report, validate_scenario,
)

SMALL = {
    "name": "small",
    "dim": 4,
    "q": 12,
    "checks": [
        {"check": "structures", "dim": 2},
        {"check": "cif_euclidean", "fixture": {"kind": "shifted-euclidean-kernel", "a": [3.0, 0, 0, 0]},
         "tolerances": {"residual": 1e-6}},
        {"check": "cif_euclidean", "fixture": {"kind": "position", "framework": "none"}, "precheck": False,
         "expect": "fail", "label": "position vector"},
    ],
}


def run(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli.main(argv)
    return code, buf.getvalue()


@pytest.fixture
def small_path(tmp_path):
    path = tmp_path / "small.json"
    path.write_text(json.dumps(SMALL))
    return path


def test_list_bundled():
    code, out = run(["list"])
    assert code == 0
    names = out.split()
    assert names == bundled_scenarios()
    assert {"algebra_core.json", "hermitian_n2.json", "quaternionic_p1.json", "osp_p1.json"} <= set(names)


@pytest.mark.parametrize("name", ["algebra_core.json", "hermitian_n2.json", "quaternionic_p1.json", "osp_p1.json"])
def test_bundled_scenarios_validate(name):
    scn = bundled_scenario(name)
    assert all(e["check"] in RUNNERS for e in scn["checks"])
    assert any(e.get("expect") == "fail" for e in scn["checks"])


def test_selftest():
    code, out = run(["selftest"])
    assert code == 0
    assert out.count("PASS") == 4 and "FAIL" not in out


def test_verify_small_scenario(small_path, tmp_path):
    report = tmp_path / "report.json"
    code, out = run(["verify", str(small_path), "--out", str(report)])
    assert code == 0
    assert "(negative control)" in out
    obj = json.loads(report.read_text())
    assert obj["pass"] is True
    assert obj["scenario"] == "small" and len(obj["reports"]) == 3
    assert all("runtime_ms" in c for c in obj["reports"])


def test_verify_is_deterministic(small_path, tmp_path):
    texts = []
    for k in range(2):
        path = tmp_path / f"r{k}.json"
        assert run(["verify", str(small_path), "--no-runtime", "--out", str(path)])[0] == 0
        texts.append(path.read_bytes())
    assert texts[0] == texts[1]
    assert b"runtime_ms" not in texts[0]


def test_verify_failing_check_exits_one(tmp_path):
    scn = dict(SMALL, checks=[dict(SMALL["checks"][2], expect="pass")])
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(scn))
    code, out = run(["verify", str(path)])
    assert code == 1 and out.startswith("FAIL")


def test_parallel_matches_serial():
    serial = scenario_report(SMALL, run_scenario(SMALL, jobs=1), include_runtime=False)
    parallel = scenario_report(SMALL, run_scenario(SMALL, jobs=2), include_runtime=False)
    assert serial == parallel


@pytest.mark.parametrize("argv", [
    ["verify", "no_such_scenario"],
    ["verify", "algebra_core", "--jobs", "0"],
    ["bogus"],
    [],
])
def test_usage_errors_exit_two(argv, capsys):
    assert cli.main(argv) == 2


def test_unreadable_scenario(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert cli.main(["verify", str(path)]) == 2


@pytest.mark.parametrize("scn", [
    {"checks": []},
    {"name": "x", "checks": [{"check": "cif_euclidean", "expect": "maybe"}]},
    {"name": "x", "dim": 3, "checks": []},
    {"name": "x", "checks": [{"check": "cif_euclidean", "fixture": {"kind": "mystery"}}]},
    {"name": "x", "checks": [{"check": "no_such_check"}]},
])
def test_schema_rejects(scn):
    with pytest.raises(ScenarioError):
        validate_scenario(scn)


def test_load_scenario_roundtrip(small_path):
    assert load_scenario(small_path) == SMALL


def test_bad_log_level(small_path, monkeypatch):
    monkeypatch.setenv("CLIFFCAUCHY_LOG", "loud")
    assert cli.main(["verify", str(small_path)]) == 2


def test_sweep_csv(small_path, tmp_path):
    out = tmp_path / "sweep.csv"
    scn = dict(SMALL, checks=SMALL["checks"][1:2])
    small_path.write_text(json.dumps(scn))
    code, _ = run(["sweep", str(small_path), "--orders", "4,8,12", "--out", str(out)])
    rows = list(csv.DictReader(out.open()))
    assert [int(r["q"]) for r in rows] == [4, 8, 12]
    # the coarsest order misses the tolerance, so the sweep as a whole fails
    assert int(rows[0]["pass"]) == 0 and int(rows[-1]["pass"]) == 1
    assert code == 1
    vals = [float(r["value"]) for r in rows]
    assert vals[0] > vals[1] > vals[2]


def test_sweep_bad_orders(small_path):
    assert cli.main(["sweep", str(small_path), "--orders", "4,x"]) == 2


def test_run_check_report_fields():
    rep = run_check(SMALL, 1)
    assert rep.check == "cif_euclidean" and rep.q == 12
    assert rep.passed and rep.probes
