"""Acceptance criteria.  Each test prints one ``criterion N: PASS|FAIL`` line and asserts
the stated tolerance directly on the residuals (not only on the report verdict)."""
import json
import subprocess
import sys
import time

import numpy as np
import pytest

import conftest
from cliffcauchy.scenarios import bundled_scenario, run_check, run_scenario, scenario_report
from cliffcauchy.structures import structure_residuals

pytestmark = pytest.mark.slow

SCENARIOS = ("algebra_core.json", "hermitian_n2.json", "quaternionic_p1.json", "osp_p1.json")


@pytest.fixture(scope="module")
def runs():
    """Every bundled scenario, run once: ``name -> (scenario, reports)``."""
    out = {}
    for name in SCENARIOS:
        scn = bundled_scenario(name)
        out[name] = (scn, run_scenario(scn))
    return out


def pick(runs, name, check, expect="pass"):
    scn, reps = runs[name]
    got = [r for r in reps if r.check.split(":")[0] == check and r.expect == expect]
    assert got, f"no {check} reports in {name}"
    return got


def worst(reports, keys=None):
    vals = [v for r in reports for k, v in r.residuals.items() if keys is None or k in keys]
    return max(vals)


def runtime_s(reports):
    return sum(r.runtime_ms for r in reports) / 1000.0


def verdict(n, title, checks):
    """``checks``: list of ``(description, ok)``."""
    ok = all(c for _, c in checks)
    detail = "; ".join(d for d, _ in checks)
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} {title} [{detail}]"
    print(line)
    conftest.ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_criterion_01_algebra_exactness():
    t0 = time.perf_counter()
    res = {m: structure_residuals(m) for m in (2, 4, 8)}
    dt = time.perf_counter() - t0
    w = max(v for r in res.values() for v in r.values())
    verdict(1, "algebra relations", [(f"max residual {w:.1e} <= 1e-12", w <= 1e-12),
                                     (f"runtime {dt:.2f}s < 1s", dt < 1.0)])


def test_criterion_02_measure_backends(runs):
    reps = pick(runs, "algebra_core.json", "measure_backends")
    kinds = {k for r in reps for k in r.residuals}
    w = worst(reps)
    dt = runtime_s(reps)
    verdict(2, "dual-backend measures", [
        (f"{len(kinds)} densities", {"dSigma_X", "dSigma_XI", "dSigma_XJ", "dSigma_XK", "dSigma_z", "dSigma_zdag",
                                     "dSigma_zJ", "dSigma_zdagJ", "MB_form_1", "MB_form_2"} <= kinds),
        (f"max gap {w:.1e} <= 1e-10", w <= 1e-10),
        (f"runtime {dt:.2f}s < 10s", dt < 10.0),
    ])


def test_criterion_03_factorizations(runs):
    reps = pick(runs, "algebra_core.json", "operator_identities")
    names = {k for r in reps for k in r.residuals}
    w = worst(reps)
    dt = runtime_s(reps)
    verdict(3, "operator factorizations", [
        ("laplace_dirac, herm_matrix, quat_matrix, quat_block",
         {"laplace_dirac", "herm_matrix", "quat_matrix", "quat_block"} <= names),
        (f"max residual {w:.1e} <= 1e-10", w <= 1e-10),
        (f"runtime {dt:.2f}s < 30s", dt < 30.0),
    ])


def test_criterion_04_kernel_pde(runs):
    reps = pick(runs, "algebra_core.json", "kernel_pde") + pick(runs, "algebra_core.json", "matrix_fundamental")
    names = {k for r in reps for k in r.residuals}
    w = worst(reps)
    dt = runtime_s(reps)
    needed = {"K_from_E_z", "K_from_E_zdag", "EulerE_on_E_z", "EulerE_on_E_zdag", "EulerE_on_E_zJ",
              "EulerE_on_E_zdagJ"}
    verdict(4, "kernel PDE suite", [
        (f"{len(names)} identities incl. K and Euler closed forms", needed <= names),
        (f"max residual {w:.1e} <= 1e-7", w <= 1e-7),
        (f"runtime {dt:.2f}s < 60s", dt < 60.0),
    ])


def test_criterion_05_lemma(runs):
    reps = pick(runs, "hermitian_n2.json", "lemma")
    inner = [r for r in reps if r.q == 24]
    outer = [r for r in reps if r.q != 24]
    wi, wo = worst(inner), worst(outer)
    dt = runtime_s(reps)
    verdict(5, "lemma normalizations", [
        (f"interior q=24 {wi:.1e} <= 1e-8", bool(inner) and wi <= 1e-8),
        (f"boundary Pv {wo:.1e} <= 1e-2", bool(outer) and wo <= 1e-2),
        (f"runtime {dt:.1f}s < 120s", dt < 120.0),
    ])


def test_criterion_06_euclidean_cif(runs):
    scn, _ = runs["hermitian_n2.json"]
    idx = [i for i, e in enumerate(scn["checks"]) if e["check"] == "cif_euclidean" and e.get("expect") != "fail"]
    entry = scn["checks"][idx[0]]
    a = np.asarray(entry["fixture"]["a"])
    inner = run_check(scn, idx[0])
    outer = run_check(scn, idx[1])
    sweep = [run_check(dict(scn, checks=[dict(entry, q=q)]), 0).residuals["reproduce"] for q in (8, 16, 24, 32)]
    ri, ro = inner.residuals["reproduce"], outer.residuals["reproduce"]
    verdict(6, "euclidean CIF", [
        (f"|a| = {np.linalg.norm(a):.3f}R", abs(np.linalg.norm(a) - 2.0) < 1e-12),
        (f"{len(inner.probes)} interior probes", len(inner.probes) == 13),
        (f"interior q=24 {ri:.1e} <= 1e-6", ri <= 1e-6),
        (f"exterior {ro:.1e} <= 1e-6", ro <= 1e-6),
        ("sweep " + ", ".join(f"{v:.1e}" for v in sweep) + " decreasing",
         all(x > y for x, y in zip(sweep, sweep[1:]))),
    ])


def test_criterion_07_hermitian(runs):
    reps = pick(runs, "hermitian_n2.json", "cif_hermitian")
    labels = {r.details.get("label") for r in reps}
    cch = worst(reps, {"CCH", "matrix"})
    ids = worst(reps, {"CCHnv", "strong_E_vdag", "strong_Edag_v"})
    mvs = worst(reps, {"matrix_vs_scalar"})
    verdict(7, "hermitian suite", [
        ("F in 1, z1, z1z2, z1^2", {"F = 1", "F = z1", "F = z1z2", "F = z1^2"} <= labels),
        (f"CCH {cch:.1e} <= 1e-6", cch <= 1e-6),
        (f"CCHnv and strong {ids:.1e} <= 1e-8", ids <= 1e-8),
        (f"matrix vs scalar {mvs:.1e} <= 1e-10", mvs <= 1e-10),
    ])


def test_criterion_08_martinelli_bochner(runs):
    mb = pick(runs, "hermitian_n2.json", "martinelli_bochner")
    sw = pick(runs, "hermitian_n2.json", "swap")
    wm, ws = worst(mb), worst(sw)
    verdict(8, "Martinelli-Bochner", [
        (f"{len(mb)} fixtures", len(mb) == 4),
        (f"MB vs F and vs hermitian {wm:.1e} <= 1e-6", wm <= 1e-6),
        (f"swap identities {ws:.1e} <= 1e-8", ws <= 1e-8),
    ])


def test_criterion_09_hilbert_plemelj(runs):
    hil = pick(runs, "hermitian_n2.json", "hilbert")
    ple = pick(runs, "hermitian_n2.json", "plemelj")
    unit = [r for r in hil if r.tolerances.get("hilbert") == 1e-2]
    other = [r for r in hil if r not in unit]
    w1 = worst(unit, {"hilbert"})
    wn = worst(other, {"hilbert"})
    wp = worst(ple)
    verdict(9, "Hilbert and Plemelj", [
        (f"H[1] {w1:.1e} <= 1e-2", bool(unit) and w1 <= 1e-2),
        (f"H[h] for Hardy data {wn:.1e} <= 2e-2", bool(other) and wn <= 2e-2),
        (f"boundary limits {wp:.1e} <= 2e-2", wp <= 2e-2),
    ])


def test_criterion_10_quaternionic(runs):
    reps = pick(runs, "quaternionic_p1.json", "cif_quaternionic")
    rep = worst(reps, {"rep1", "rep2", "upper", "lower"})
    ids = worst(reps, {"id1", "id2", "strong_E_vdag", "strong_Edag_v", "strong_EJ_vdagJ", "strong_EdagJ_vJ"})
    const = worst(reps, {"constants"})
    verdict(10, "quaternionic suite", [
        (f"{len(reps)} fixtures", len(reps) >= 3),
        (f"reproducing {rep:.1e} <= 1e-6", rep <= 1e-6),
        (f"identities {ids:.1e} <= 1e-8", ids <= 1e-8),
        (f"(-2i)^2p vs (-4)^p gap {const}", const == 0.0),
    ])


def test_criterion_11_osp(runs):
    reps = pick(runs, "osp_p1.json", "cif_osp")
    rep = worst(reps, {"osprep1", "osprep2"})
    ids = worst(reps, {"ospid1", "ospid2", "ospid3", "ospid4"})
    pre = max(v for r in reps for v in r.details["precheck"].values())
    verdict(11, "osp(4|2) suite", [
        (f"osprep {rep:.1e} <= 1e-6", rep <= 1e-6),
        (f"ospid {ids:.1e} <= 1e-7", ids <= 1e-7),
        (f"precheck {pre:.1e} <= 1e-8", pre <= 1e-8),
    ])


def test_criterion_12_negative_controls(runs):
    rows = []
    for name in SCENARIOS:
        _, reps = runs[name]
        for r in reps:
            if r.expect == "fail":
                ratio = max(r.residuals[k] / r.tolerances[k] for k in r.tolerances if r.tolerances[k] > 0)
                rows.append((f"{r.check} {r.details.get('label', '')}".strip(), ratio))
    low = min(rows, key=lambda t: t[1])
    verdict(12, "negative controls", [
        (f"{len(rows)} controls", len(rows) >= 12),
        (f"smallest residual/tolerance {low[1]:.1e} ({low[0]}) > 100", low[1] > 100),
    ])


def test_criterion_13_determinism(runs, tmp_path):
    name = "osp_p1.json"
    paths = [tmp_path / f"run{k}.json" for k in range(2)]
    for p in paths:
        subprocess.run([sys.executable, "-m", "cliffcauchy.cli", "verify", name, "--no-runtime", "--out", str(p)],
                       check=True, capture_output=True)
    a, b = (p.read_text() for p in paths)
    scn, reps = runs[name]
    inproc = json.dumps(scenario_report(scn, reps, include_runtime=False), indent=1, sort_keys=True) + "\n"
    verdict(13, "determinism", [
        ("two CLI runs identical", a == b),
        ("CLI matches in-process run", a == inproc),
    ])
