"""Closed-form Cauchy kernels and their pointwise differential identities.

Kernels are evaluated at ``Y - X`` for a source point ``Y`` (on the boundary,
hermitian variable ``v``) and a target ``X`` (hermitian variable ``z``).  With
``w = Y - X`` and ``rho = |w|``:

* ``E_X = (1/a_m) conj(w) / rho^m`` and ``E_M`` the same with ``M[w]``;
* ``E_z = (2/a_m) z(w) / rho^m``, ``E_zdag = (2/a_m) z_dag(w) / rho^m`` and the
  ``J`` images for fourfold dimensions;
* ``K_herm = (2/a_m) rho^(-m-2) (beta w_z w_zdag + (beta - n) w_zdag w_z)``;
* the four ``E``-kernels obtained by letting the Euler-like operator act in ``z``;
* the Martinelli-Bochner scalar factors.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial, pi

import numpy as np

from .algebra import algebra
from .boundary import NodeSet, eval_measure, unit_sphere_area
from .fields import CliffordField, FDConfig, apply_operator
from .structures import build_structures, pi_minus, pi_plus, witt_coordinates, witt_frame

KERNEL_IDS = (
    "E_X", "E_I", "E_J", "E_K", "E_z", "E_zdag", "E_zJ", "E_zdagJ", "K_herm",
    "EulerE_on_E_z", "EulerE_on_E_zdag", "EulerE_on_E_zJ", "EulerE_on_E_zdagJ", "MB_U",
)
FOURFOLD_KERNELS = {"E_J", "E_K", "E_zJ", "E_zdagJ", "EulerE_on_E_z", "EulerE_on_E_zdag",
                    "EulerE_on_E_zJ", "EulerE_on_E_zdagJ"}
SINGULAR_CUTOFF = 1e-6


class KernelError(ValueError):
    pass


@dataclass(frozen=True)
class KernelEval:
    value: np.ndarray
    singular_distance: np.ndarray


def _check(kid: str, m: int) -> None:
    if kid not in KERNEL_IDS:
        raise KernelError(f"unknown kernel {kid!r}")
    if kid != "E_X" and m % 2:
        raise KernelError(f"{kid} needs even dimension")
    if kid in FOURFOLD_KERNELS and m % 4:
        raise KernelError(f"{kid} needs m = 4p, got {m}")


def hermitian_vectors(w: np.ndarray) -> dict[str, np.ndarray]:
    """Complex coordinate rows of ``z``, ``z_dag`` (and ``J`` images) for real rows ``w``."""
    m = w.shape[-1]
    mats = build_structures(m, quaternionic=m % 4 == 0)
    out = {"z": pi_minus(w, mats["I"]), "zdag": pi_plus(w, mats["I"])}
    if "J" in mats:
        out["zJ"] = out["z"] @ mats["J"]
        out["zdagJ"] = out["zdag"] @ mats["J"]
    return out


def symplectic_pairing(z: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``sum_j z_{2j-1} v_{2j} - z_{2j} v_{2j-1}`` on complex coordinates."""
    return np.sum(z[..., 0::2] * v[..., 1::2] - z[..., 1::2] * v[..., 0::2], axis=-1)


def kernel_values(kid: str, Y, X) -> np.ndarray:
    """Kernel at ``Y - X``; ``(N, 2**m)`` multivectors or ``(N, n)`` for ``MB_U``.

    ``Y`` and ``X`` broadcast against each other as ``(N, m)`` rows.
    """
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    X = np.atleast_2d(np.asarray(X, dtype=float))
    m = Y.shape[-1]
    _check(kid, m)
    w = Y - X
    rho = np.linalg.norm(w, axis=-1)
    if np.any(rho < SINGULAR_CUTOFF):
        raise KernelError(f"{kid} evaluated within {SINGULAR_CUTOFF} of its singularity")
    a = unit_sphere_area(m)
    alg = algebra(m)
    inv = (1.0 / rho ** m)[:, None]
    if kid == "E_X":
        return alg.vector(-w) * inv / a
    if kid in ("E_I", "E_J", "E_K"):
        mat = build_structures(m, quaternionic=m % 4 == 0)[kid[-1]]
        return alg.vector(-(w @ mat)) * inv / a
    if kid == "MB_U":
        n = m // 2
        d = np.conj(witt_coordinates(w))
        signs = (-1.0) ** np.arange(n)
        return factorial(n - 1) / (2j * pi) ** n * signs * d / (rho ** m)[:, None]
    hv = hermitian_vectors(w)
    if kid in ("E_z", "E_zdag", "E_zJ", "E_zdagJ"):
        return (2.0 / a) * alg.vector(hv[kid[2:]]) * inv
    n = m // 2
    if kid == "K_herm":
        beta = witt_frame(n).beta
        wz, wd = alg.vector(hv["z"]), alg.vector(hv["zdag"])
        first = alg.gp(beta, alg.gp(wz, wd))
        second = alg.gp(beta, alg.gp(wd, wz)) - n * alg.gp(wd, wz)
        return (2.0 / a) * (first + second) / (rho ** (m + 2))[:, None]
    # Euler-like operator acting in the target variable z on E(v - z)
    p = m // 4
    zc = witt_coordinates(X)
    vc = witt_coordinates(Y)
    pair = symplectic_pairing(zc, vc)[:, None]
    base = kid[len("EulerE_on_E_"):]
    out = (4.0 * p / a) * alg.vector(hv[base]) * pair / (rho ** (m + 2))[:, None]
    tz = hermitian_vectors(np.broadcast_to(X, w.shape))
    if base == "zdag":
        out = out + (2.0 / a) * alg.vector(tz["zJ"]) * inv
    elif base == "zdagJ":
        out = out - (2.0 / a) * alg.vector(tz["z"]) * inv
    return out


def eval_kernel(kid: str, Y, X) -> KernelEval:
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return KernelEval(kernel_values(kid, Y, X), np.linalg.norm(Y - X, axis=-1))


def kernel_field(kid: str, source, *, in_target: bool = True) -> CliffordField:
    """The kernel as a field in the target ``X`` (fixed source ``Y``), or in ``Y`` for fixed ``X``."""
    source = np.asarray(source, dtype=float)
    m = len(source)
    if in_target:
        fn = lambda x: kernel_values(kid, source, x)
    else:
        fn = lambda y: kernel_values(kid, y, source)
    return CliffordField(m, fn, singularities=[source], cutoff=SINGULAR_CUTOFF, name=kid)


def euclidean_kernel_field(a) -> CliffordField:
    """``X -> E(X - a)``, monogenic away from ``a``."""
    a = np.asarray(a, dtype=float)
    m = len(a)
    return CliffordField(m, lambda x: kernel_values("E_X", x, a), singularities=[a],
                         cutoff=SINGULAR_CUTOFF, name="E(. - a)")


# -- pointwise identities ------------------------------------------------------

PDE_CHECKS = (
    "dirac_E_X", "dz_E_zdag", "dzdag_E_z", "herm_sum",
    "dzJ_E_zdagJ", "dzdagJ_E_zJ", "quat_J_sum",
    "K_from_E_z", "K_from_E_zdag", "K_monogenic_z", "K_monogenic_v",
    "EulerE_on_E_z", "EulerE_on_E_zdag", "EulerE_on_E_zJ", "EulerE_on_E_zdagJ",
)
FOURFOLD_CHECKS = {"dzJ_E_zdagJ", "dzdagJ_E_zJ", "quat_J_sum", "EulerE_on_E_z", "EulerE_on_E_zdag",
                   "EulerE_on_E_zJ", "EulerE_on_E_zdagJ"}


def _op_on_kernel(op: str, kid: str, w: np.ndarray, cfg: FDConfig) -> np.ndarray:
    """``op`` applied to ``X -> kernel(X)`` (the kernel at argument ``X``), at ``w``."""
    m = len(w)
    field = CliffordField(m, lambda x: kernel_values(kid, x, np.zeros(m)),
                          singularities=[np.zeros(m)], cutoff=SINGULAR_CUTOFF)
    return apply_operator(op, field, w, cfg)


def _op_in_target(op: str, kid: str, y: np.ndarray, x: np.ndarray, cfg: FDConfig) -> np.ndarray:
    return apply_operator(op, kernel_field(kid, y), x, cfg)


def pde_residual(check: str, y: np.ndarray, x: np.ndarray, cfg: FDConfig = FDConfig()) -> float:
    """Residual of one pointwise identity for source ``y`` and target ``x``."""
    m = len(y)
    if check not in PDE_CHECKS:
        raise KernelError(f"unknown kernel identity {check!r}")
    if check in FOURFOLD_CHECKS and m % 4:
        raise KernelError(f"{check} needs m = 4p")
    w = y - x
    if np.linalg.norm(w) < max(SINGULAR_CUTOFF, 10 * cfg.h * max(1.0, np.linalg.norm(w))):
        raise KernelError("probe too close to the kernel singularity")
    op = lambda o, k: _op_on_kernel(o, k, w, cfg)
    if check == "dirac_E_X":
        r = op("Dirac", "E_X")
    elif check == "dz_E_zdag":
        r = op("Dz", "E_zdag")
    elif check == "dzdag_E_z":
        r = op("DzDag", "E_z")
    elif check == "herm_sum":
        r = op("Dz", "E_z") + op("DzDag", "E_zdag")
    elif check == "dzJ_E_zdagJ":
        r = op("DzJ", "E_zdagJ")
    elif check == "dzdagJ_E_zJ":
        r = op("DzDagJ", "E_zJ")
    elif check == "quat_J_sum":
        r = op("DzJ", "E_zJ") + op("DzDagJ", "E_zdagJ")
    elif check == "K_from_E_z":
        r = kernel_values("K_herm", y, x)[0] + _op_in_target("Dz", "E_z", y, x, cfg)
    elif check == "K_from_E_zdag":
        r = kernel_values("K_herm", y, x)[0] - _op_in_target("DzDag", "E_zdag", y, x, cfg)
    elif check == "K_monogenic_z":
        f = kernel_field("K_herm", y, in_target=True)
        r = np.concatenate([apply_operator("Dz", f, x, cfg), apply_operator("DzDag", f, x, cfg)])
    elif check == "K_monogenic_v":
        f = kernel_field("K_herm", x, in_target=False)
        r = np.concatenate([apply_operator("Dz", f, y, cfg), apply_operator("DzDag", f, y, cfg)])
    else:
        base = check[len("EulerE_on_"):]
        r = kernel_values(check, y, x)[0] - _op_in_target("EulerE", base, y, x, cfg)
    return float(np.max(np.abs(r)))


def kernel_operator_residual(op: str, kid: str, pairs, cfg: FDConfig = FDConfig()) -> float:
    """Max ``|op K(Y - X)|`` over pairs for an arbitrary operator/kernel combination."""
    return max(float(np.max(np.abs(_op_on_kernel(op, kid, np.asarray(y, float) - np.asarray(x, float), cfg))))
               for y, x in pairs)


def kernel_pde_check(check: str, pairs, cfg: FDConfig = FDConfig()) -> float:
    """Max residual over ``(source, target)`` pairs."""
    return max(pde_residual(check, np.asarray(y, float), np.asarray(x, float), cfg) for y, x in pairs)


def random_pairs(m: int, count: int, rng: np.random.Generator, min_sep: float = 0.3) -> list:
    """Source/target pairs with ``min_sep <= |Y - X|`` and ``|Y|, |X| <= 1.5``."""
    out = []
    while len(out) < count:
        y, x = rng.uniform(-1, 1, size=(2, m))
        if np.linalg.norm(y - x) >= min_sep:
            out.append((y, x))
    return out


MATRIX_VARIANTS = ("herm2x2", "quat4x4", "quatBlock")


def _matrix_layout(variant: str):
    from .fields import BLOCK_MATRIX, HERMITIAN_MATRIX, QUATERNIONIC_MATRIX

    if variant == "herm2x2":
        ops = HERMITIAN_MATRIX
        ker = (("E_z", "E_zdag"), ("E_zdag", "E_z"))
        return ops, ker, False
    if variant == "quat4x4":
        ker = (("E_z", "E_zdag", "E_zJ", "E_zdagJ"),
               ("E_zdagJ", "E_z", "E_zdag", "E_zJ"),
               ("E_zJ", "E_zdagJ", "E_z", "E_zdag"),
               ("E_zdag", "E_zJ", "E_zdagJ", "E_z"))
        return QUATERNIONIC_MATRIX, ker, True
    if variant == "quatBlock":
        ker = (("E_z", "E_zdag", None, None), ("E_zdag", "E_z", None, None),
               (None, None, "E_zJ", "E_zdagJ"), (None, None, "E_zdagJ", "E_zJ"))
        return BLOCK_MATRIX, ker, False
    raise KernelError(f"unknown matrix variant {variant!r}")


def matrix_product_entries(variant: str, w, cfg: FDConfig = FDConfig()) -> np.ndarray:
    """Off-origin entries ``(size, size, 2**m)`` of ``D E`` (``D E^T`` for ``quat4x4``)."""
    ops, ker, transpose = _matrix_layout(variant)
    w = np.asarray(w, dtype=float)
    alg = algebra(len(w))
    size = len(ops)
    out = np.zeros((size, size, alg.size), dtype=complex)
    for i in range(size):
        for j in range(size):
            for k in range(size):
                kk = ker[j][k] if transpose else ker[k][j]
                if ops[i][k] and kk:
                    out[i, j] += _op_on_kernel(ops[i][k], kk, w, cfg)
    return out


def matrix_fundamental_check(variant: str, probes, cfg: FDConfig = FDConfig(),
                             normalization_q: int | None = None) -> dict:
    """Pointwise vanishing of the matrix product away from the origin and, optionally,
    the boundary normalization of the diagonal (interior lemma, first item)."""
    probes = np.atleast_2d(np.asarray(probes, dtype=float))
    m = probes.shape[1]
    if variant != "herm2x2" and m % 4:
        raise KernelError(f"{variant} needs m = 4p")
    entries = np.stack([matrix_product_entries(variant, w, cfg) for w in probes])
    size = entries.shape[1]
    diag = np.abs(entries[:, range(size), range(size)]).max()
    report = {
        "variant": variant,
        "offorigin_max": float(np.abs(entries).max()),
        "diagonal_max": float(diag),
        "entry_max": np.abs(entries).max(axis=(0, 3)).tolist(),
    }
    if normalization_q:
        from .cif_engine import lemma_integrals
        from .boundary import SurfaceDomain

        res = lemma_integrals(SurfaceDomain.unit(m), np.zeros(m), normalization_q)
        report["normalization_residual"] = res["residuals"]["i"]
    return report


def mb_kernel_density(xi, z, nodes: NodeSet) -> np.ndarray:
    """Scalar density ``u`` with ``int F U = sum F(xi) u w`` at the given nodes.

    ``xi``/``z`` are complex ``n``-tuples (``xi`` per node, shape ``(N, n)``).
    """
    xi = np.atleast_2d(np.asarray(xi, dtype=complex))
    z = np.asarray(z, dtype=complex)
    n = xi.shape[-1]
    real = lambda c: np.stack([c.real, c.imag], axis=-1).reshape(c.shape[:-1] + (2 * n,))
    factors = kernel_values("MB_U", real(xi), real(z[None]))
    forms = np.stack([eval_measure("MB_form", nodes, j=j) for j in range(1, n + 1)], axis=-1)
    return mb_orientation_sign(n) * np.sum(factors * forms, axis=-1)


def mb_orientation_sign(n: int) -> int:
    """``(-1)^(n(n-1)/2)``: moves the conjugate differentials of ``[dxi_j]`` back into the
    pairs ``dxi^c_k ^ dxi_k`` of the outward orientation of ``C^n``."""
    return -1 if (n * (n - 1) // 2) % 2 else 1
