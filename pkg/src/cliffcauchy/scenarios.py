"""Scenario files: JSON lists of checks turned into :class:`VerificationReport` objects.

A scenario looks like::

    {"name": "hermitian_n2", "dim": 4, "radius": 1.0, "q": 16,
     "checks": [{"check": "cif_hermitian", "fixture": {...}}, ...]}

Every check entry may override ``q``, ``tolerances`` and ``expect`` (``"fail"`` marks a
negative control).  Reports are deterministic apart from ``runtime_ms``.
"""
from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import boundary, cif_engine as ce
from .boundary import SurfaceDomain
from .fields import check_operator_identity, random_polynomial, IDENTITIES
from .kernels import (
    FOURFOLD_CHECKS, PDE_CHECKS, kernel_operator_residual, kernel_pde_check,
    matrix_fundamental_check, random_pairs,
)
from .structures import structure_residuals

log = logging.getLogger("cliffcauchy")

SCHEMA_FILE = "scenario.schema.json"


class ScenarioError(ValueError):
    pass


def load_schema() -> dict:
    return json.loads(resources.files("cliffcauchy.data").joinpath(SCHEMA_FILE).read_text())


def validate_scenario(obj: dict) -> None:
    """JSON-schema validation plus a check that every entry names a known runner."""
    try:
        jsonschema.validate(obj, load_schema())
    except jsonschema.ValidationError as exc:
        raise ScenarioError(f"scenario does not match schema: {exc.message}") from exc
    for entry in obj.get("checks", []):
        if entry.get("check") not in RUNNERS:
            raise ScenarioError(f"unknown check {entry.get('check')!r}")


def load_scenario(path) -> dict:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
    validate_scenario(obj)
    return obj


def bundled_scenarios() -> list[str]:
    folder = resources.files("cliffcauchy.data").joinpath("scenarios")
    return sorted(p.name for p in folder.iterdir() if p.name.endswith(".json"))


def bundled_scenario(name: str) -> dict:
    text = resources.files("cliffcauchy.data").joinpath("scenarios", name).read_text()
    obj = json.loads(text)
    validate_scenario(obj)
    return obj


# -- helpers -----------------------------------------------------------------

def _domain(scn: dict, entry: dict) -> SurfaceDomain:
    m = int(entry.get("dim", scn.get("dim", 4)))
    center = entry.get("center", scn.get("center", [0.0] * m))
    return SurfaceDomain(tuple(center), float(entry.get("radius", scn.get("radius", 1.0))))


def _probes(dom: SurfaceDomain, spec) -> np.ndarray:
    if spec is None or isinstance(spec, str):
        return ce.probe_lattice(dom, spec or "interior")
    return np.atleast_2d(np.asarray(spec, dtype=float))


def _boundary_point(dom: SurfaceDomain, spec) -> np.ndarray:
    """Explicit point, or a direction scaled onto the sphere."""
    if spec is None:
        d = np.ones(dom.dim)
    else:
        d = np.asarray(spec, dtype=float)
    return dom.c + dom.radius * d / np.linalg.norm(d)


def _fixture(entry: dict, dom: SurfaceDomain):
    spec = dict(entry.get("fixture", {"kind": "unit"}))
    spec.setdefault("dim", dom.dim)
    return ce.test_function(spec).field


def _max_update(acc: dict, new: dict) -> None:
    for k, v in new.items():
        acc[k] = max(acc.get(k, 0.0), float(v))


def _report(entry: dict, check: str, framework: str, residuals: dict, q: int,
            default_tol: dict, probes=(), details=None) -> ce.VerificationReport:
    tol = dict(default_tol)
    tol.update(entry.get("tolerances", {}))
    tol = {k: v for k, v in tol.items() if k in residuals}
    rep = ce.VerificationReport(
        check=check, framework=framework, residuals=residuals, q=q, tolerances=tol,
        probes=[list(map(float, p)) for p in probes], expect=entry.get("expect", "pass"),
        details=details or {},
    )
    return rep.evaluate()


# -- runners -----------------------------------------------------------------

def run_structures(scn, entry):
    m = int(entry.get("dim", scn.get("dim", 4)))
    res = structure_residuals(m)
    return _report(entry, "structures", "algebra", res, 0, {k: 1e-12 for k in res})


def run_measure_backends(scn, entry):
    dom = _domain(scn, entry)
    rng = np.random.default_rng(int(entry.get("seed", 0)))
    nodes = boundary.random_nodes(dom, int(entry.get("count", 200)), rng)
    kinds = [k for k in boundary.MEASURE_KINDS
             if k not in ("dS", "MB_form") and not (k in boundary.FOURFOLD_MEASURES and dom.dim % 4)]
    old = boundary.MUTATE_QUATERNIONIC_CONSTANT
    boundary.MUTATE_QUATERNIONIC_CONSTANT = bool(entry.get("mutate_constant", False))
    try:
        res = {k: boundary.backend_discrepancy(k, nodes) for k in kinds}
        for j in range(1, dom.dim // 2 + 1):
            res[f"MB_form_{j}"] = boundary.backend_discrepancy("MB_form", nodes, j)
    finally:
        boundary.MUTATE_QUATERNIONIC_CONSTANT = old
    return _report(entry, "measure_backends", "boundary", res, 0, {k: 1e-10 for k in res})


def run_operator_identities(scn, entry):
    m = int(entry.get("dim", scn.get("dim", 4)))
    rng = np.random.default_rng(int(entry.get("seed", 0)))
    trials = [random_polynomial(m, int(entry.get("degree", 3)), rng) for _ in range(int(entry.get("trials", 20)))]
    probes = rng.uniform(-1, 1, size=(int(entry.get("probes", 5)), m))
    names = entry.get("identities") or [i for i in IDENTITIES if m % 4 == 0 or not i.startswith("quat")]
    scales = entry.get("scales", {})
    res = {i: check_operator_identity(i, trials, probes, scale=scales.get(i)) for i in names}
    return _report(entry, "operator_identities", "fields", res, 0, {k: 1e-10 for k in res})


def run_kernel_pde(scn, entry):
    m = int(entry.get("dim", scn.get("dim", 4)))
    rng = np.random.default_rng(int(entry.get("seed", 0)))
    pairs = random_pairs(m, int(entry.get("probes", 50)), rng)
    res = {}
    if "operator" in entry:
        res[f"{entry['operator']}_on_{entry['kernel']}"] = kernel_operator_residual(entry["operator"], entry["kernel"], pairs)
    else:
        names = entry.get("identities") or [c for c in PDE_CHECKS if m % 4 == 0 or c not in FOURFOLD_CHECKS]
        for c in names:
            res[c] = kernel_pde_check(c, pairs)
    return _report(entry, "kernel_pde", "kernels", res, 0, {k: 1e-7 for k in res})


def run_matrix_fundamental(scn, entry):
    m = int(entry.get("dim", scn.get("dim", 4)))
    rng = np.random.default_rng(int(entry.get("seed", 0)))
    probes = [y - x for y, x in random_pairs(m, int(entry.get("probes", 50)), rng)]
    out = matrix_fundamental_check(entry.get("variant", "herm2x2"), probes)
    res = {"off_origin": out["offorigin_max"]}
    return _report(entry, "matrix_fundamental", "kernels", res, 0, {"off_origin": 1e-7})


def run_lemma(scn, entry):
    dom = _domain(scn, entry)
    q = int(entry.get("q", scn.get("q", 24)))
    res: dict = {}
    if entry.get("where", "interior") == "boundary":
        pts = [_boundary_point(dom, d) for d in entry.get("points", [None])]
        for p in pts:
            _max_update(res, ce.lemma_integrals(dom, p, q, boundary=True)["residuals"])
        tol = {"i": ce.TOL_PV, "ii": ce.TOL_PV, "iii": ce.TOL_PV}
    else:
        pts = _probes(dom, entry.get("probes"))
        for p in pts:
            _max_update(res, ce.lemma_integrals(dom, p, q, assume_interior=bool(entry.get("assume_interior")))["residuals"])
        tol = {"i": ce.TOL_SMOOTH, "ii": ce.TOL_SMOOTH, "iii": ce.TOL_SMOOTH}
    return _report(entry, "lemma", "hermitian", res, q, tol, pts)


def run_cif_euclidean(scn, entry):
    dom = _domain(scn, entry)
    q = int(entry.get("q", scn.get("q", 24)))
    f = _fixture(entry, dom)
    pts = _probes(dom, entry.get("probes"))
    res = {"reproduce": 0.0}
    for x in pts:
        r = ce.cif_euclidean(f, dom, x, q, precheck=entry.get("precheck", True))
        res["reproduce"] = max(res["reproduce"], r["residual"])
    return _report(entry, "cif_euclidean", "euclidean", res, q, {"reproduce": ce.TOL_KERNEL}, pts)


HERM_TOL = {"CCH": ce.TOL_KERNEL, "CCHnv": ce.TOL_SMOOTH, "strong_E_vdag": ce.TOL_SMOOTH,
            "strong_Edag_v": ce.TOL_SMOOTH, "matrix": ce.TOL_KERNEL, "matrix_vs_scalar": 1e-10}


def run_cif_hermitian(scn, entry):
    dom = _domain(scn, entry)
    q = int(entry.get("q", scn.get("q", 24)))
    f = _fixture(entry, dom)
    pts = _probes(dom, entry.get("probes"))
    pre = entry.get("precheck", True)
    res: dict = {}
    for x in pts:
        r = ce.cif_hermitian(f, dom, x, q, precheck=pre)
        _max_update(res, r["residuals"])
        if entry.get("matrix"):
            zero = ce.PolynomialField(dom.dim)
            mr = ce.cif_hermitian(ce.CirculantPair(f, zero), dom, x, q, precheck=pre)
            _max_update(res, mr["residuals"])
            mixed = r["parts"]["E_vdag"] + r["parts"]["Edag_v"]
            off = mr["matrix"][0, 1] / ce.herm_constant(dom.dim)
            gap = max(ce._maxabs(mr["matrix"][0, 0] - r["value"]), ce._maxabs(off - mixed))
            _max_update(res, {"matrix_vs_scalar": gap})
    return _report(entry, "cif_hermitian", "hermitian", res, q, HERM_TOL, pts)


QUAT_TOL = {"rep1": ce.TOL_KERNEL, "rep2": ce.TOL_KERNEL, "id1": ce.TOL_SMOOTH, "id2": ce.TOL_SMOOTH,
            "strong_E_vdag": ce.TOL_SMOOTH, "strong_Edag_v": ce.TOL_SMOOTH,
            "strong_EJ_vdagJ": ce.TOL_SMOOTH, "strong_EdagJ_vJ": ce.TOL_SMOOTH,
            "upper": ce.TOL_KERNEL, "lower": ce.TOL_KERNEL, "constants": 0.0}


def run_cif_quaternionic(scn, entry):
    dom = _domain(scn, entry)
    q = int(entry.get("q", scn.get("q", 24)))
    f = _fixture(entry, dom)
    pts = _probes(dom, entry.get("probes"))
    pre = entry.get("precheck", True)
    res: dict = {"constants": abs((-2j) ** (dom.dim // 2) - (-4.0) ** (dom.dim // 4))}
    for x in pts:
        _max_update(res, ce.cif_quaternionic(f, dom, x, q, precheck=pre)["residuals"])
        if entry.get("matrix"):
            zero = ce.PolynomialField(dom.dim)
            blk = ce.QuatBlockQuad(f, zero, f, zero)
            _max_update(res, ce.cif_quaternionic(blk, dom, x, q, precheck=False)["residuals"])
    return _report(entry, "cif_quaternionic", "quaternionic", res, q, QUAT_TOL, pts)


OSP_TOL = {"osprep1": ce.TOL_KERNEL, "osprep2": ce.TOL_KERNEL, "ospid1": ce.TOL_EULER,
           "ospid2": ce.TOL_EULER, "ospid3": ce.TOL_EULER, "ospid4": ce.TOL_EULER}


def run_cif_osp(scn, entry):
    dom = _domain(scn, entry)
    q = int(entry.get("q", scn.get("q", 24)))
    f = _fixture(entry, dom)
    pts = _probes(dom, entry.get("probes"))
    pre = entry.get("precheck", True)
    res: dict = {}
    details = {}
    for x in pts:
        r = ce.cif_osp(f, dom, x, q, precheck=pre)
        _max_update(res, r["residuals"])
        if r["precheck"]:
            details["precheck"] = {k: float(v) for k, v in r["precheck"].items()}
    return _report(entry, "cif_osp", "osp42", res, q, OSP_TOL, pts, details)


def run_cauchy_transform(scn, entry):
    """``mode``: ``reproduce`` (transform of a monogenic restriction vs the field inside and
    zero outside), ``g2_zero`` (auxiliary hermitian integral) or ``decay``."""
    dom = _domain(scn, entry)
    q = int(entry.get("q", scn.get("q", 24)))
    f = _fixture(entry, dom)
    mode = entry.get("mode", "reproduce")
    fw = entry.get("framework", "euclidean")
    res: dict = {}
    pts = np.vstack([ce.probe_lattice(dom, "interior"), ce.probe_lattice(dom, "exterior")])
    if mode == "decay":
        prof = ce.decay_profile(f, dom, np.ones(dom.dim), q)
        res["decay_slope_excess"] = max(0.0, prof["slope"] - (1 - dom.dim) - 0.05)
        return _report(entry, "cauchy_transform", fw, res, q, {"decay_slope_excess": 0.0},
                       details={"slope": prof["slope"], "values": prof["values"]})
    for x in pts:
        out = ce.cauchy_transform(f, dom, x, q, fw)
        inside = dom.signed_distance(x)[0] < 0
        if mode == "reproduce":
            want = f(x) if inside else 0.0
            key = "interior" if inside else "exterior"
            _max_update(res, {key: ce._maxabs(out["g"] - want)})
        elif inside:
            _max_update(res, {"g2": ce._maxabs(out["g2"])})
    tol = {"interior": ce.TOL_KERNEL, "exterior": ce.TOL_KERNEL, "g2": ce.TOL_SMOOTH}
    return _report(entry, "cauchy_transform", fw, res, q, tol, pts)


COND_TOL = {"firstcondition": ce.TOL_SMOOTH, "hardycondition": ce.TOL_SMOOTH,
            "K_condition": ce.TOL_KERNEL, "osp_E_conditions": ce.TOL_EULER}


def run_condition(scn, entry):
    dom = _domain(scn, entry)
    q = int(entry.get("q", scn.get("q", 24)))
    f = _fixture(entry, dom)
    which = entry["which"]
    out = ce.check_condition(f, dom, which, q)
    return _report(entry, f"condition:{which}", "hermitian", out, q,
                   {k: COND_TOL[which] for k in out})


def run_hilbert(scn, entry):
    dom = _domain(scn, entry)
    q = int(entry.get("q", scn.get("q", 16)))
    f = _fixture(entry, dom)
    xi = _boundary_point(dom, entry.get("point"))
    hil = ce.hilbert_transform(f, dom, xi, q, reduced=bool(entry.get("reduced", False)))
    res = {"hilbert": ce._maxabs(hil["value"] - f(xi))}
    if "reduced_gap" in hil:
        res["reduced_gap"] = hil["reduced_gap"]
    tol = float(entry.get("tol", ce.TOL_PV_LOOSE))
    return _report(entry, "hilbert", "hermitian", res, q, {k: tol for k in res}, [xi],
                   {"extrapolation": hil["diagnostics"]})


def run_plemelj(scn, entry):
    dom = _domain(scn, entry)
    q = int(entry.get("q", scn.get("q", 16)))
    f = _fixture(entry, dom)
    xi = _boundary_point(dom, entry.get("point"))
    out = ce.plemelj_check(f, dom, xi, q, swap_sides=bool(entry.get("swap_sides", False)))
    res = {k: out[k] for k in ("interior", "exterior", "jump")}
    tol = float(entry.get("tol", ce.TOL_PV_LOOSE))
    return _report(entry, "plemelj", "euclidean", res, q, {k: tol for k in res}, [xi])


def _complex_point(spec) -> np.ndarray:
    return np.array([complex(a, b) for a, b in spec])


def run_martinelli_bochner(scn, entry):
    dom = _domain(scn, entry)
    q = int(entry.get("q", scn.get("q", 24)))
    F = ce.complex_polynomial(dom.dim, entry["F"])
    res: dict = {}
    pts = []
    for zspec in entry.get("points", [[[0.2, 0.0], [0.0, 0.1]]]):
        z = _complex_point(zspec)
        pts.append(ce._complex_to_real(z))
        out = ce.martinelli_bochner(F, dom, z, q, precheck=entry.get("precheck", True))
        _max_update(res, out["residuals"])
    return _report(entry, "martinelli_bochner", "hermitian", res, q,
                   {"mb_vs_F": ce.TOL_KERNEL, "mb_vs_hermitian": ce.TOL_KERNEL}, pts)


def run_swap(scn, entry):
    dom = _domain(scn, entry)
    q = int(entry.get("q", scn.get("q", 24)))
    F = ce.complex_polynomial(dom.dim, entry["F"])
    res: dict = {}
    pts = []
    for zspec in entry.get("points", [[[0.2, 0.0], [0.0, 0.1]]]):
        z = _complex_point(zspec)
        pts.append(ce._complex_to_real(z))
        for key, v in ce.swap_identities(F, dom, z, q, at_boundary=entry.get("at_boundary", True)).items():
            _max_update(res, {f"swap_{key}": v["residual"]})
    return _report(entry, "swap", "hermitian", res, q, {k: ce.TOL_SMOOTH for k in res}, pts)


RUNNERS = {
    "structures": run_structures,
    "measure_backends": run_measure_backends,
    "operator_identities": run_operator_identities,
    "kernel_pde": run_kernel_pde,
    "matrix_fundamental": run_matrix_fundamental,
    "lemma": run_lemma,
    "cif_euclidean": run_cif_euclidean,
    "cif_hermitian": run_cif_hermitian,
    "cif_quaternionic": run_cif_quaternionic,
    "cif_osp": run_cif_osp,
    "cauchy_transform": run_cauchy_transform,
    "condition": run_condition,
    "hilbert": run_hilbert,
    "plemelj": run_plemelj,
    "martinelli_bochner": run_martinelli_bochner,
    "swap": run_swap,
}


def run_check(scn: dict, index: int) -> ce.VerificationReport:
    entry = scn["checks"][index]
    log.info("running %s #%d", entry["check"], index)
    rep = ce.timed(lambda: RUNNERS[entry["check"]](scn, entry))
    if "label" in entry:
        rep.details["label"] = entry["label"]
    log.debug("%s residuals %s", entry["check"], rep.residuals)
    return rep


def _run_indexed(args):
    scn, i = args
    return run_check(scn, i)


def run_scenario(scn: dict, jobs: int = 1) -> list[ce.VerificationReport]:
    """All checks, in file order; ``jobs > 1`` spreads them over processes."""
    idx = range(len(scn.get("checks", [])))
    if jobs > 1 and len(idx) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_indexed, [(scn, i) for i in idx]))
    return [run_check(scn, i) for i in idx]


def scenario_report(scn: dict, reports, include_runtime: bool = True) -> dict:
    return {
        "scenario": scn.get("name", ""),
        "pass": all(r.passed for r in reports),
        "reports": [r.to_json_obj(include_runtime) for r in reports],
    }
