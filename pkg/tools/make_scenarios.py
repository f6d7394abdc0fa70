"""Regenerate the bundled scenario files under src/cliffcauchy/data/scenarios."""
import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "cliffcauchy" / "data" / "scenarios"

TOP_F = {"1": [{"z": [0, 0]}], "z1": [{"z": [1, 0]}], "z1z2": [{"z": [1, 1]}], "z1^2": [{"z": [2, 0]}]}
NOT_HOLO = {"kind": "polynomial-times-spinor", "V": [{"zc": [1, 0]}], "spinor": "top"}
Z_SPEC = [[[0.2, 0.0], [0.0, 0.1]], [[-0.1, 0.15], [0.25, -0.05]]]
XI = [1.0, 1.0, 1.0, -1.0]
# kernel pole at distance 2R, off the probe directions
A2R = [2 ** 0.5, 2 ** 0.5, 0.0, 0.0]


def top(F):
    return {"kind": "holomorphic-top", "F": F}


core = {
    "name": "algebra_core",
    "description": "Algebra relations, measure backends, operator factorizations and kernel identities.",
    "dim": 4,
    "checks": [
        {"check": "structures", "dim": 2},
        {"check": "structures", "dim": 4},
        {"check": "structures", "dim": 8},
        {"check": "measure_backends", "count": 200, "seed": 11},
        {"check": "measure_backends", "count": 200, "seed": 11, "mutate_constant": True, "expect": "fail",
         "label": "misprinted fourfold constant"},
        {"check": "operator_identities", "trials": 20, "degree": 3, "seed": 5},
        {"check": "operator_identities", "trials": 5, "degree": 3, "seed": 5, "identities": ["herm_matrix"],
         "scales": {"herm_matrix": 2.0}, "expect": "fail", "label": "wrong matrix prefactor"},
        {"check": "kernel_pde", "probes": 50, "seed": 3},
        {"check": "kernel_pde", "probes": 10, "seed": 3, "operator": "Dz", "kernel": "E_z", "expect": "fail",
         "label": "operator applied to the wrong kernel"},
        {"check": "matrix_fundamental", "variant": "herm2x2", "probes": 50, "seed": 4},
        {"check": "matrix_fundamental", "variant": "quatBlock", "probes": 50, "seed": 4},
        {"check": "matrix_fundamental", "variant": "quat4x4", "probes": 50, "seed": 4},
    ],
}

herm = {
    "name": "hermitian_n2",
    "description": "Euclidean and hermitian Cauchy formulas, transforms and boundary limits for m = 4.",
    "dim": 4,
    "q": 24,
    "checks": [
        {"check": "lemma", "where": "interior"},
        {"check": "lemma", "where": "interior", "probes": "exterior", "assume_interior": True, "expect": "fail",
         "label": "interior normalization at exterior points"},
        {"check": "lemma", "where": "boundary", "q": 16, "points": [XI, [1, 0, 0, 0]]},
        {"check": "cif_euclidean", "fixture": {"kind": "shifted-euclidean-kernel", "a": A2R}},
        {"check": "cif_euclidean", "fixture": {"kind": "shifted-euclidean-kernel", "a": A2R},
         "probes": "exterior", "label": "exterior vanishing"},
        {"check": "cif_euclidean", "fixture": {"kind": "position", "framework": "none"}, "precheck": False,
         "expect": "fail", "label": "non-monogenic position vector"},
    ] + [
        {"check": "cif_hermitian", "fixture": top(F), "matrix": True, "label": f"F = {k}"} for k, F in TOP_F.items()
    ] + [
        {"check": "cif_hermitian", "fixture": NOT_HOLO, "precheck": False, "expect": "fail",
         "label": "F = conj(z1) is not holomorphic"},
    ] + [
        {"check": "martinelli_bochner", "F": F, "points": Z_SPEC, "label": f"F = {k}"} for k, F in TOP_F.items()
    ] + [
        {"check": "martinelli_bochner", "F": [{"zc": [1, 0]}], "points": Z_SPEC, "precheck": False,
         "expect": "fail", "label": "F = conj(z1)"},
        {"check": "swap", "F": [{"z": [1, 0]}], "points": Z_SPEC},
        {"check": "swap", "F": [{"z": [1, 1]}], "points": Z_SPEC, "at_boundary": False,
         "label": "constant factor F(z)"},
        {"check": "swap", "F": [{"zc": [1, 0]}], "points": Z_SPEC, "expect": "fail", "label": "F = conj(z1)"},
        {"check": "cauchy_transform", "fixture": {"kind": "shifted-euclidean-kernel", "a": A2R}},
        {"check": "cauchy_transform", "fixture": top(TOP_F["z1z2"]), "framework": "hermitian", "mode": "g2_zero"},
        {"check": "cauchy_transform", "fixture": {"kind": "position", "framework": "none"}, "mode": "decay", "q": 16},
        {"check": "condition", "which": "firstcondition", "fixture": {"kind": "unit"}},
        {"check": "condition", "which": "hardycondition", "fixture": top(TOP_F["z1z2"])},
        {"check": "condition", "which": "K_condition", "fixture": top(TOP_F["z1z2"])},
        {"check": "condition", "which": "firstcondition", "fixture": NOT_HOLO, "expect": "fail"},
        {"check": "condition", "which": "K_condition", "fixture": NOT_HOLO, "expect": "fail"},
        {"check": "hilbert", "fixture": {"kind": "unit"}, "point": XI, "tol": 1e-2, "reduced": True, "q": 16},
        {"check": "hilbert", "fixture": top([{"z": [1, 1]}, {"z": [1, 0]}]), "point": XI, "reduced": True, "q": 16},
        {"check": "hilbert", "fixture": {"kind": "position", "framework": "none"}, "radius": 3.0,
         "point": [1, 0, 0, 0], "q": 16, "expect": "fail", "label": "exterior boundary data"},
        {"check": "plemelj", "fixture": {"kind": "unit"}, "point": XI, "tol": 1e-2, "q": 16},
        {"check": "plemelj", "fixture": top([{"z": [1, 1]}, {"z": [1, 0]}]), "point": XI, "q": 16},
        {"check": "plemelj", "fixture": {"kind": "position", "framework": "none"}, "radius": 3.0,
         "point": [1, 0, 0, 0], "q": 16, "swap_sides": True, "expect": "fail", "label": "swapped jump sides"},
    ],
}

S11 = {"kind": "constant-in-part", "r": 1, "s": 1}
OSP_FIX = [{"kind": "osp-candidate", "V": [{"z": [1, 0]}], "cell": [1, 1, 0]},
           {"kind": "osp-candidate", "V": [{"z": [2, 0]}], "cell": [1, 1, 0]}]

quat = {
    "name": "quaternionic_p1",
    "description": "Quaternionic Cauchy formulas for m = 4.",
    "dim": 4,
    "q": 24,
    "checks": [
        {"check": "cif_quaternionic", "fixture": S11, "matrix": True},
    ] + [{"check": "cif_quaternionic", "fixture": dict(f, framework="quaternionic")} for f in OSP_FIX] + [
        {"check": "cif_quaternionic", "fixture": {"kind": "polynomial-times-spinor", "V": [{"z": [1, 0]}],
                                                  "spinor": {"fdag": []}},
         "precheck": False, "expect": "fail", "label": "z1 I"},
        {"check": "cif_quaternionic", "fixture": {"kind": "polynomial-times-spinor", "V": [{"zc": [1, 0]}],
                                                  "spinor": {"fdag": []}},
         "precheck": False, "expect": "fail", "label": "conj(z1) I"},
    ],
}

osp = {
    "name": "osp_p1",
    "description": "osp(4|2) representation formulas and identities for m = 4.",
    "dim": 4,
    "q": 24,
    "checks": [
        {"check": "cif_osp", "fixture": S11},
    ] + [{"check": "cif_osp", "fixture": f} for f in OSP_FIX] + [
        {"check": "condition", "which": "osp_E_conditions", "fixture": OSP_FIX[0]},
        {"check": "cif_osp", "fixture": {"kind": "polynomial-times-spinor",
                                         "V": [{"z": [1, 0], "zc": [1, 0]}, {"z": [0, 1], "zc": [0, 1]}],
                                         "spinor": {"fdag": [1]}},
         "precheck": False, "expect": "fail", "label": "|z|^2 f1+ I"},
        {"check": "cif_osp", "fixture": {"kind": "polynomial-times-spinor", "V": [{"zc": [0, 1]}],
                                         "spinor": {"fdag": [1]}},
         "precheck": False, "expect": "fail", "label": "conj(z2) f1+ I (outside Ker E)"},
    ],
}

OUT.mkdir(parents=True, exist_ok=True)
for scn in (core, herm, quat, osp):
    (OUT / f"{scn['name']}.json").write_text(json.dumps(scn, indent=1) + "\n")
    print("wrote", scn["name"])
