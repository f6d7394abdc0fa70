"""Complex Clifford algebra with negative-definite signature.

Two representations live side by side:

* :class:`Multivector` -- an immutable sparse map ``blade mask -> complex``.
  Blades are bitmasks over the generators ``e_1 .. e_m`` (bit ``a-1`` for
  ``e_a``), which keeps the product sign an O(1) parity count.
* dense batches -- numpy arrays of shape ``(..., 2**m)`` indexed by blade
  mask, handled by :class:`Algebra`.  All quadrature code works on these.

Generators square to ``-1`` and anticommute.
"""
from __future__ import annotations

import json
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

MAX_DIM = 16
MAX_DENSE_DIM = 8


def _popcount(x: int) -> int:
    return bin(x).count("1")


def blade_product_sign(a: int, b: int) -> int:
    """Sign of ``e_A e_B`` relative to ``e_{A xor B}`` with ``e_i**2 = -1``."""
    swaps = 0
    t = a >> 1
    while t:
        swaps += _popcount(t & b)
        t >>= 1
    swaps += _popcount(a & b)
    return -1 if swaps & 1 else 1


def blade_to_indices(mask: int) -> list[int]:
    return [i + 1 for i in range(mask.bit_length()) if mask >> i & 1]


def indices_to_blade(indices: Iterable[int]) -> int:
    """Canonical mask of an ascending generator list (1-based)."""
    idx = list(indices)
    if idx != sorted(set(idx)):
        raise ValueError(f"blade generators must be strictly ascending: {idx}")
    mask = 0
    for i in idx:
        if i < 1:
            raise ValueError(f"generator index must be >= 1, got {i}")
        mask |= 1 << (i - 1)
    return mask


def grade_of(mask: int) -> int:
    return _popcount(mask)


def conjugation_sign(grade: int) -> int:
    return -1 if (grade * (grade + 1) // 2) % 2 else 1


class DimensionError(ValueError):
    pass


class Multivector:
    """Immutable element of the complex Clifford algebra of dimension ``dim``."""

    __slots__ = ("_dim", "_coeffs")

    def __init__(self, dim: int, coeffs: Mapping[int, complex] | None = None):
        if not (isinstance(dim, (int, np.integer)) and 1 <= dim <= MAX_DIM):
            raise DimensionError(f"dimension must be in 1..{MAX_DIM}, got {dim}")
        top = 1 << dim
        clean = {}
        for mask, c in (coeffs or {}).items():
            mask = int(mask)
            if not 0 <= mask < top:
                raise ValueError(f"blade mask {mask} outside algebra of dim {dim}")
            c = complex(c)
            if not (np.isfinite(c.real) and np.isfinite(c.imag)):
                raise ValueError("multivector coefficients must be finite")
            if c != 0:
                clean[mask] = clean.get(mask, 0) + c
        object.__setattr__(self, "_dim", int(dim))
        object.__setattr__(self, "_coeffs", {k: v for k, v in clean.items() if v != 0})

    def __setattr__(self, name, value):
        raise AttributeError("Multivector is immutable")

    # -- construction -------------------------------------------------
    @classmethod
    def scalar(cls, dim: int, value: complex = 1.0) -> "Multivector":
        return cls(dim, {0: value})

    @classmethod
    def basis(cls, dim: int, *indices: int) -> "Multivector":
        """``e_{i1} e_{i2} ...`` for ascending 1-based indices."""
        return cls(dim, {indices_to_blade(indices): 1.0})

    @classmethod
    def from_dense(cls, dim: int, arr) -> "Multivector":
        arr = np.asarray(arr)
        if arr.shape != (1 << dim,):
            raise DimensionError(f"dense array must have shape ({1 << dim},)")
        return cls(dim, {int(k): arr[k] for k in np.flatnonzero(arr)})

    # -- accessors ----------------------------------------------------
    @property
    def dim(self) -> int:
        return self._dim

    @property
    def coeffs(self) -> dict[int, complex]:
        return dict(self._coeffs)

    def __getitem__(self, mask: int) -> complex:
        return self._coeffs.get(int(mask), 0j)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(1 << self._dim, dtype=complex)
        for k, v in self._coeffs.items():
            out[k] = v
        return out

    def grades(self) -> set[int]:
        return {grade_of(k) for k in self._coeffs}

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(v) ** 2 for v in self._coeffs.values())))

    # -- algebra ------------------------------------------------------
    def _check(self, other: "Multivector"):
        if not isinstance(other, Multivector):
            return NotImplemented
        if other._dim != self._dim:
            raise DimensionError(f"dimension mismatch: {self._dim} vs {other._dim}")
        return None

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = Multivector.scalar(self._dim, other)
        if self._check(other) is NotImplemented:
            return NotImplemented
        out = dict(self._coeffs)
        for k, v in other._coeffs.items():
            out[k] = out.get(k, 0) + v
        return Multivector(self._dim, out)

    __radd__ = __add__

    def __neg__(self):
        return Multivector(self._dim, {k: -v for k, v in self._coeffs.items()})

    def __sub__(self, other):
        if isinstance(other, (int, float, complex)):
            other = Multivector.scalar(self._dim, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return Multivector(self._dim, {k: v * other for k, v in self._coeffs.items()})
        return mv_product(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self * other
        return NotImplemented

    __matmul__ = __mul__

    def __truediv__(self, other):
        return self * (1.0 / other)

    def conjugate(self) -> "Multivector":
        return mv_conjugate(self)

    def grade(self, k: int) -> "Multivector":
        return grade_project(self, k)

    def isclose(self, other: "Multivector", tol: float = 1e-12) -> bool:
        return (self - other).norm() <= tol

    def __eq__(self, other):
        if not isinstance(other, Multivector):
            return NotImplemented
        return self._dim == other._dim and self._coeffs == other._coeffs

    def __hash__(self):
        return hash((self._dim, frozenset(self._coeffs.items())))

    def __repr__(self):
        if not self._coeffs:
            return f"Multivector({self._dim}, 0)"
        parts = []
        for k in sorted(self._coeffs, key=lambda m: (grade_of(m), m)):
            name = "e" + "".join(map(str, blade_to_indices(k))) if k else "1"
            parts.append(f"({self._coeffs[k]:.6g})*{name}")
        return f"Multivector({self._dim}, " + " + ".join(parts) + ")"

    # -- serialization ------------------------------------------------
    def to_json_obj(self) -> dict:
        terms = []
        for k in sorted(self._coeffs, key=lambda m: (grade_of(m), blade_to_indices(m))):
            c = self._coeffs[k]
            terms.append({"blade": blade_to_indices(k), "re": c.real, "im": c.imag})
        return {"dim": self._dim, "terms": terms}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "Multivector":
        dim = int(obj["dim"])
        coeffs: dict[int, complex] = {}
        for t in obj["terms"]:
            mask = indices_to_blade(t["blade"])
            if max(t["blade"], default=0) > dim:
                raise ValueError(f"blade {t['blade']} outside dimension {dim}")
            coeffs[mask] = coeffs.get(mask, 0) + complex(t.get("re", 0.0), t.get("im", 0.0))
        return cls(dim, coeffs)

    @classmethod
    def from_json(cls, text: str) -> "Multivector":
        return cls.from_json_obj(json.loads(text))


@lru_cache(maxsize=None)
def _sign_cached(a: int, b: int) -> int:
    return blade_product_sign(a, b)


def mv_product(a: Multivector, b: Multivector) -> Multivector:
    """Geometric product ``a b``."""
    if not isinstance(a, Multivector) or not isinstance(b, Multivector):
        raise TypeError("mv_product expects two Multivectors")
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")
    out: dict[int, complex] = {}
    for ka, va in a._coeffs.items():
        for kb, vb in b._coeffs.items():
            k = ka ^ kb
            out[k] = out.get(k, 0) + _sign_cached(ka, kb) * va * vb
    return Multivector(a.dim, out)


def mv_conjugate(a: Multivector) -> Multivector:
    """Clifford conjugation (complex-linear): ``e_a -> -e_a``, order reversed."""
    return Multivector(a.dim, {k: conjugation_sign(grade_of(k)) * v for k, v in a._coeffs.items()})


def grade_project(a: Multivector, k: int) -> Multivector:
    if not 0 <= k <= a.dim:
        raise ValueError(f"grade {k} out of range 0..{a.dim}")
    return Multivector(a.dim, {m: v for m, v in a._coeffs.items() if grade_of(m) == k})


def vector_embed(x) -> Multivector:
    """Clifford vector ``sum_a x_a e_a`` (complex components allowed)."""
    x = np.asarray(x)
    if x.ndim != 1:
        raise ValueError("vector_embed expects a 1-d coordinate array")
    return Multivector(len(x), {1 << a: x[a] for a in range(len(x))})


class Algebra:
    """Dense, batched operations for dimension ``m <= 8``.

    Arrays have the blade axis last. The product is evaluated as
    ``out[..., k] = sum_i a[..., i] * sign(i, i^k) * b[..., i^k]``, skipping
    blades ``i`` on which ``a`` vanishes identically.
    """

    def __init__(self, m: int):
        if not 1 <= m <= MAX_DENSE_DIM:
            raise DimensionError(f"dense algebra supports 1 <= m <= {MAX_DENSE_DIM}, got {m}")
        self.m = m
        self.size = 1 << m
        idx = np.arange(self.size)
        self.perm = idx[:, None] ^ idx[None, :]
        sign = np.empty((self.size, self.size), dtype=float)
        for i in range(self.size):
            for j in range(self.size):
                sign[i, j] = _sign_cached(i, j)
        self.sign = sign
        self.perm_sign = np.take_along_axis(sign, self.perm, axis=1)
        self.grade = np.array([grade_of(k) for k in range(self.size)])
        self.conj_sign = np.array([conjugation_sign(g) for g in self.grade], dtype=float)
        self.vector_index = np.array([1 << a for a in range(m)])

    def zeros(self, shape: tuple = ()) -> np.ndarray:
        return np.zeros(tuple(shape) + (self.size,), dtype=complex)

    def scalar(self, value=1.0) -> np.ndarray:
        out = np.zeros(self.size, dtype=complex)
        out[0] = value
        return out

    def basis_vector(self, a: int) -> np.ndarray:
        """Dense ``e_a`` (1-based)."""
        out = np.zeros(self.size, dtype=complex)
        out[1 << (a - 1)] = 1.0
        return out

    def vector(self, coords) -> np.ndarray:
        """Embed coordinate arrays ``(..., m)`` as grade-1 elements ``(..., 2**m)``."""
        coords = np.asarray(coords)
        out = np.zeros(coords.shape[:-1] + (self.size,), dtype=complex)
        out[..., self.vector_index] = coords
        return out

    def vector_part(self, a) -> np.ndarray:
        return np.asarray(a)[..., self.vector_index]

    def gp(self, a, b) -> np.ndarray:
        """Batched geometric product with numpy broadcasting over leading axes."""
        a = np.asarray(a, dtype=complex)
        b = np.asarray(b, dtype=complex)
        shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1])
        out = np.zeros(shape + (self.size,), dtype=complex)
        active = np.flatnonzero(np.any(a.reshape(-1, self.size) != 0, axis=0))
        for i in active:
            out += a[..., i, None] * (self.perm_sign[i] * b[..., self.perm[i]])
        return out

    def gp_sum(self, a, b, weights=None) -> np.ndarray:
        """``sum_n w_n a_n b_n`` over the leading axis of ``(N, 2**m)`` batches.

        Uses ``out[k] = sum_i sign(i, i^k) (a^T b)[i, i^k]`` so the node sum is one
        matrix product.
        """
        a = np.asarray(a, dtype=complex)
        b = np.asarray(b, dtype=complex)
        if weights is not None:
            b = b * np.asarray(weights)[:, None]
        gram = a.T @ b
        return np.sum(self.perm_sign * np.take_along_axis(gram, self.perm, axis=1), axis=0)

    def gp_many(self, *factors) -> np.ndarray:
        out = factors[0]
        for f in factors[1:]:
            out = self.gp(out, f)
        return out

    def conj(self, a) -> np.ndarray:
        return np.asarray(a) * self.conj_sign

    def grade_project(self, a, k: int) -> np.ndarray:
        if not 0 <= k <= self.m:
            raise ValueError(f"grade {k} out of range 0..{self.m}")
        return np.where(self.grade == k, a, 0)

    def to_mv(self, a) -> Multivector:
        return Multivector.from_dense(self.m, np.asarray(a))

    def from_mv(self, mv: Multivector) -> np.ndarray:
        if mv.dim != self.m:
            raise DimensionError(f"dimension mismatch: {mv.dim} vs {self.m}")
        return mv.to_dense()


@lru_cache(maxsize=None)
def algebra(m: int) -> Algebra:
    """Shared dense algebra instance for dimension ``m``."""
    return Algebra(m)


def max_abs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0
