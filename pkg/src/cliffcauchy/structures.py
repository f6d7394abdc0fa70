"""Complex and hypercomplex structures, Witt frame, spinor space and cells.

Vectors are rows and a structure matrix ``M`` acts by right multiplication,
``M[v] = v @ M``.  On grade-1 multivectors the action is extended complex
linearly to the vector coefficients.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from .algebra import Multivector, algebra

KERNEL_SVD_THRESHOLD = 1e-10


class StructureError(ValueError):
    pass


def _check_even(m: int) -> None:
    if m < 2 or m % 2:
        raise StructureError(f"dimension must be even and >= 2, got {m}")


def _check_fourfold(m: int) -> None:
    if m < 4 or m % 4:
        raise StructureError(f"quaternionic structures need m = 4p, got {m}")


def complex_structure(m: int) -> np.ndarray:
    """``diag([[0, 1], [-1, 0]], ...)``."""
    _check_even(m)
    return np.kron(np.eye(m // 2), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def quaternionic_j(m: int) -> np.ndarray:
    _check_fourfold(m)
    block = np.array(
        [[0.0, 0.0, 1.0, 0.0],
         [0.0, 0.0, 0.0, -1.0],
         [-1.0, 0.0, 0.0, 0.0],
         [0.0, 1.0, 0.0, 0.0]]
    )
    return np.kron(np.eye(m // 4), block)


def build_structures(m: int, quaternionic: bool | None = None) -> dict[str, np.ndarray]:
    """Return ``{"I": ...}`` and, when ``m`` is a multiple of 4, ``"J"`` and ``"K"``.

    ``K`` is the matrix product ``I @ J``; with row vectors this is the
    composition "first I, then J".
    """
    _check_even(m)
    out = {"I": complex_structure(m)}
    if quaternionic is None:
        quaternionic = m % 4 == 0
    if quaternionic:
        _check_fourfold(m)
        out["J"] = quaternionic_j(m)
        out["K"] = out["I"] @ out["J"]
    return out


def act(matrix: np.ndarray, coords) -> np.ndarray:
    """Row action ``coords @ matrix`` on arrays of shape ``(..., m)``."""
    return np.asarray(coords) @ matrix


def act_on_vector(matrix: np.ndarray, vec) -> np.ndarray:
    """Apply a structure matrix to the grade-1 part of dense multivectors."""
    m = matrix.shape[0]
    alg = algebra(m)
    return alg.vector(alg.vector_part(vec) @ matrix)


def pi_minus(coords, matrix: np.ndarray) -> np.ndarray:
    """``-1/2 (1 - i M)[v]`` on coordinate rows (complex result)."""
    coords = np.asarray(coords, dtype=complex)
    return -0.5 * (coords - 1j * (coords @ matrix))


def pi_plus(coords, matrix: np.ndarray) -> np.ndarray:
    coords = np.asarray(coords, dtype=complex)
    return 0.5 * (coords + 1j * (coords @ matrix))


@dataclass(frozen=True)
class WittFrame:
    n: int
    f: tuple  # dense multivectors f_1..f_n
    fdag: tuple
    idem: np.ndarray
    beta: np.ndarray

    @property
    def m(self) -> int:
        return 2 * self.n


@dataclass(frozen=True)
class SpinorPart:
    r: int
    basis: np.ndarray  # (2**m, dim) columns
    labels: tuple = ()

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True)
class SymplecticCell:
    r: int
    s: int
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


@lru_cache(maxsize=None)
def witt_frame(n: int) -> WittFrame:
    if n < 1:
        raise StructureError("n must be >= 1")
    m = 2 * n
    alg = algebra(m)
    imat = complex_structure(m)
    f, fdag = [], []
    for k in range(1, n + 1):
        e = np.zeros(m)
        e[2 * k - 2] = 1.0
        f.append(alg.vector(pi_minus(e, imat)))
        fdag.append(alg.vector(pi_plus(e, imat)))
    idem = alg.scalar(1.0)
    for k in range(n):
        idem = alg.gp(idem, alg.gp(f[k], fdag[k]))
    beta = sum(alg.gp(fdag[k], f[k]) for k in range(n))
    return WittFrame(n, tuple(f), tuple(fdag), idem, beta)


def witt_coordinates(coords) -> np.ndarray:
    """Complex coordinates ``z_k = x_k + i y_k`` from ``(..., 2n)`` real rows."""
    coords = np.asarray(coords)
    return coords[..., 0::2] + 1j * coords[..., 1::2]


def hermitian_split(x) -> tuple[np.ndarray, np.ndarray]:
    """Dense ``(z, z_dagger)`` with ``z = pi^-[X]`` and ``z_dagger = pi^+[X]``."""
    x = np.asarray(x, dtype=float)
    m = x.shape[-1]
    _check_even(m)
    alg = algebra(m)
    imat = complex_structure(m)
    return alg.vector(pi_minus(x, imat)), alg.vector(pi_plus(x, imat))


def hermitian_split_coordinates(x) -> tuple[np.ndarray, np.ndarray]:
    """Same as :func:`hermitian_split` through ``sum z_k f_k`` and ``sum z_k^c f_k^+``."""
    x = np.asarray(x, dtype=float)
    m = x.shape[-1]
    _check_even(m)
    fr = witt_frame(m // 2)
    zc = witt_coordinates(x)
    z = sum(zc[..., k, None] * fr.f[k] for k in range(m // 2))
    zd = sum(np.conj(zc[..., k, None]) * fr.fdag[k] for k in range(m // 2))
    return z, zd


def quaternionic_split(x, backend: str = "matrix"):
    """Dense ``(z, z_dag, z_J, z_dag_J)``.

    ``backend="matrix"`` applies ``J`` to the vector coefficients of ``z`` and
    ``z_dag``; ``backend="witt"`` uses the coordinate expansion
    ``z_J = sum_j z_{2j} f^+_{2j-1} - z_{2j-1} f^+_{2j}``.
    """
    x = np.asarray(x, dtype=float)
    m = x.shape[-1]
    _check_fourfold(m)
    z, zd = hermitian_split(x)
    if backend == "matrix":
        jmat = quaternionic_j(m)
        return z, zd, act_on_vector(jmat, z), act_on_vector(jmat, zd)
    if backend != "witt":
        raise ValueError(f"unknown backend {backend!r}")
    fr = witt_frame(m // 2)
    zc = witt_coordinates(x)
    zj = 0
    zdj = 0
    for j in range(m // 4):
        a, b = 2 * j, 2 * j + 1  # zero-based indices of 2j-1, 2j
        zj = zj + zc[..., b, None] * fr.fdag[a] - zc[..., a, None] * fr.fdag[b]
        zdj = zdj + np.conj(zc[..., b, None]) * fr.f[a] - np.conj(zc[..., a, None]) * fr.f[b]
    return z, zd, zj, zdj


# -- multiplication operators -------------------------------------------------

@lru_cache(maxsize=None)
def p_operator(m: int) -> np.ndarray:
    """``P = f_2 f_1 + f_4 f_3 + ...``."""
    _check_fourfold(m)
    alg = algebra(m)
    fr = witt_frame(m // 2)
    return sum(alg.gp(fr.f[2 * j + 1], fr.f[2 * j]) for j in range(m // 4))


@lru_cache(maxsize=None)
def q_operator(m: int) -> np.ndarray:
    """``Q = f^+_1 f^+_2 + f^+_3 f^+_4 + ...``."""
    _check_fourfold(m)
    alg = algebra(m)
    fr = witt_frame(m // 2)
    return sum(alg.gp(fr.fdag[2 * j], fr.fdag[2 * j + 1]) for j in range(m // 4))


def apply_P(v) -> np.ndarray:
    v = np.asarray(v)
    m = v.shape[-1].bit_length() - 1
    return algebra(m).gp(p_operator(m), v)


def apply_Q(v) -> np.ndarray:
    v = np.asarray(v)
    m = v.shape[-1].bit_length() - 1
    return algebra(m).gp(q_operator(m), v)


# -- spinor space ------------------------------------------------------------

@lru_cache(maxsize=None)
def spinor_parts(n: int) -> tuple[SpinorPart, ...]:
    """Bases ``f^+_A I`` of the homogeneous parts, ``|A| = r``."""
    alg = algebra(2 * n)
    fr = witt_frame(n)
    parts = []
    for r in range(n + 1):
        cols, labels = [], []
        for subset in combinations(range(n), r):
            v = fr.idem
            for k in reversed(subset):
                v = alg.gp(fr.fdag[k], v)
            cols.append(v)
            labels.append(tuple(k + 1 for k in subset))
        parts.append(SpinorPart(r, np.column_stack(cols), tuple(labels)))
    return tuple(parts)


def _coefficients(basis: np.ndarray, vecs: np.ndarray) -> tuple[np.ndarray, float]:
    coef, *_ = np.linalg.lstsq(basis, vecs, rcond=None)
    resid = float(np.max(np.abs(basis @ coef - vecs))) if vecs.size else 0.0
    return coef, resid


def _kernel(matrix: np.ndarray, threshold: float = KERNEL_SVD_THRESHOLD) -> np.ndarray:
    ncols = matrix.shape[1]
    if matrix.shape[0] == 0:
        return np.eye(ncols, dtype=complex)
    _, s, vh = np.linalg.svd(matrix)
    rank = int(np.sum(s > threshold))
    return vh[rank:].conj().T


def _rank(basis: np.ndarray, threshold: float = KERNEL_SVD_THRESHOLD) -> int:
    if basis.size == 0:
        return 0
    return int(np.sum(np.linalg.svd(basis, compute_uv=False) > threshold))


def p_restricted(n: int, r: int) -> np.ndarray:
    """Matrix of ``P`` from the basis of S^r to the basis of S^(r-2)."""
    parts = spinor_parts(n)
    src = parts[r].basis
    images = apply_P(src.T).T
    if r < 2:
        if np.max(np.abs(images)) > 1e-12:
            raise StructureError("P does not annihilate S^0/S^1 (algebra bug)")
        return np.zeros((0, src.shape[1]), dtype=complex)
    coef, resid = _coefficients(parts[r - 2].basis, images)
    if resid > 1e-12:
        raise StructureError(f"P(S^{r}) leaves S^{r - 2}: residual {resid:.3e}")
    return coef


@lru_cache(maxsize=None)
def cell_decomposition(p: int) -> tuple[SymplecticCell, ...]:
    """Cells ``S^{s+2k}_s = Q^k Ker P|S^s`` for ``s = 0..p``, ``k = 0..p-s``."""
    if p < 1:
        raise StructureError("p must be >= 1")
    n = 2 * p
    parts = spinor_parts(n)
    cells = []
    for s in range(p + 1):
        ker = _kernel(p_restricted(n, s))
        basis = parts[s].basis @ ker
        for k in range(p - s + 1):
            if k:
                basis = apply_Q(basis.T).T
            cells.append(SymplecticCell(s + 2 * k, s, basis))
    for r in range(n + 1):
        stack = [c.basis for c in cells if c.r == r]
        full = np.column_stack(stack) if stack else np.zeros((1 << 2 * n, 0))
        if _rank(full) != comb(n, r) or full.shape[1] != comb(n, r):
            raise StructureError(f"cells do not span S^{r}: rank {_rank(full)} vs {comb(n, r)}")
    return tuple(sorted(cells, key=lambda c: (c.r, -c.s)))


def kernel_of_p(p: int) -> list[tuple[int, int]]:
    """Cells ``(r, s)`` whose span lies in Ker P on the full spinor space."""
    n = 2 * p
    out = []
    for c in cell_decomposition(p):
        img = apply_P(c.basis.T)
        if np.max(np.abs(img), initial=0.0) <= 1e-10:
            out.append((c.r, c.s))
    return out


@dataclass
class Decomposition:
    components: dict
    residual: float


def decompose(v, family) -> Decomposition:
    """Split spinor-valued ``v`` (``(..., 2**m)``) over a complete family of parts or cells."""
    v = np.asarray(v, dtype=complex)
    bases = [part.basis for part in family]
    full = np.column_stack(bases)
    flat = v.reshape(-1, v.shape[-1]).T
    coef, resid = _coefficients(full, flat)
    comps = {}
    start = 0
    for part in family:
        stop = start + part.dim
        key = (part.r, part.s) if isinstance(part, SymplecticCell) else part.r
        comps[key] = (part.basis @ coef[start:stop]).T.reshape(v.shape)
        start = stop
    return Decomposition(comps, resid)


def project_to_part(v, part, family=None, tol: float = 1e-10) -> np.ndarray:
    """Component of spinor-valued ``v`` in ``part``; raises if ``v`` leaves spinor space."""
    v = np.asarray(v, dtype=complex)
    m = v.shape[-1].bit_length() - 1
    if family is None:
        family = cell_decomposition(m // 4) if isinstance(part, SymplecticCell) else spinor_parts(m // 2)
    dec = decompose(v, family)
    scale = max(1.0, float(np.max(np.abs(v), initial=0.0)))
    if dec.residual > tol * scale:
        raise StructureError(f"value not in spinor space (residual {dec.residual:.3e})")
    key = (part.r, part.s) if isinstance(part, SymplecticCell) else part.r
    return dec.components[key]


def membership_residual(v, part) -> float:
    """Distance of ``v`` from ``span(part.basis)`` (max-abs of the lstsq residual)."""
    v = np.asarray(v, dtype=complex)
    flat = v.reshape(-1, v.shape[-1]).T
    _, resid = _coefficients(part.basis, flat)
    return resid


@dataclass
class StructureSet:
    m: int
    matrices: dict
    frame: WittFrame
    parts: tuple
    cells: tuple = field(default_factory=tuple)

    def to_json_obj(self) -> dict:
        def mv(a):
            return Multivector.from_dense(self.m, np.round(a, 15)).to_json_obj()

        return {
            "m": self.m,
            "matrices": {k: v.tolist() for k, v in self.matrices.items()},
            "witt": {
                "f": [mv(a) for a in self.frame.f],
                "fdag": [mv(a) for a in self.frame.fdag],
                "idem": mv(self.frame.idem),
                "beta": mv(self.frame.beta),
            },
            "parts": [{"r": p.r, "basis": [mv(c) for c in p.basis.T]} for p in self.parts],
            "cells": [{"r": c.r, "s": c.s, "basis": [mv(b) for b in c.basis.T]} for c in self.cells],
        }

    def dump(self) -> str:
        return json.dumps(self.to_json_obj(), indent=1)


def structure_set(m: int) -> StructureSet:
    _check_even(m)
    cells = cell_decomposition(m // 4) if m % 4 == 0 else ()
    return StructureSet(m, build_structures(m), witt_frame(m // 2), spinor_parts(m // 2), cells)


def structure_residuals(m: int) -> dict[str, float]:
    """Max residuals of the defining relations: Witt anticommutators, the structure
    matrices (``I^2 = J^2 = K^2 = -E``, ``IJ = -JI``, ``K = IJ``) and ``I^2 = I``."""
    _check_even(m)
    alg = algebra(m)
    n = m // 2
    fr = witt_frame(n)
    one = alg.scalar(1.0)
    anti = lambda a, b: alg.gp(a, b) + alg.gp(b, a)
    witt = 0.0
    for j in range(n):
        for k in range(n):
            delta = one if j == k else 0.0
            witt = max(witt,
                       float(np.max(np.abs(anti(fr.f[j], fr.f[k])))),
                       float(np.max(np.abs(anti(fr.fdag[j], fr.fdag[k])))),
                       float(np.max(np.abs(anti(fr.f[j], fr.fdag[k]) - delta))))
    out = {"witt": witt, "idempotent": float(np.max(np.abs(alg.gp(fr.idem, fr.idem) - fr.idem)))}
    mats = build_structures(m)
    eye = np.eye(m)
    out["I_squared"] = float(np.max(np.abs(mats["I"] @ mats["I"] + eye)))
    if m % 4 == 0:
        I, J, K = mats["I"], mats["J"], mats["K"]
        out["J_squared"] = float(np.max(np.abs(J @ J + eye)))
        out["K_squared"] = float(np.max(np.abs(K @ K + eye)))
        out["IJ_anticommute"] = float(np.max(np.abs(I @ J + J @ I)))
        out["K_is_IJ"] = float(np.max(np.abs(K - I @ J)))
    return out
