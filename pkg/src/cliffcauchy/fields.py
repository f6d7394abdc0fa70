"""Clifford-valued fields and the first-order operators acting on them.

Polynomial fields are differentiated exactly; every other field goes
through central finite differences, optionally Richardson-extrapolated.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .algebra import Multivector, algebra
from .structures import build_structures, p_operator, q_operator, StructureError

OPERATOR_KINDS = (
    "Dirac", "Dirac_I", "Dirac_J", "Dirac_K",
    "Dz", "DzDag", "DzJ", "DzDagJ",
    "EulerE", "Laplacian", "MultP", "MultQ",
)
FOURFOLD_KINDS = {"Dirac_J", "Dirac_K", "DzJ", "DzDagJ", "EulerE", "MultP", "MultQ"}
DAGGER = {"Dz": "DzDag", "DzDag": "Dz", "DzJ": "DzDagJ", "DzDagJ": "DzJ"}

FRAMEWORK_OPERATORS = {
    "euclidean": ("Dirac",),
    "hermitian": ("Dz", "DzDag"),
    "quaternionic": ("Dz", "DzDag", "DzJ", "DzDagJ"),
    "osp42": ("Dz", "DzDag", "DzJ", "DzDagJ", "MultP", "EulerE"),
}


class FieldError(ValueError):
    pass


@dataclass(frozen=True)
class FDConfig:
    h: float = 1e-5
    richardson: bool = True
    # pure second differences lose digits as 1/h**2, so they step further out
    h_second: float = 1e-3

    def __post_init__(self):
        if not (self.h > 0 and self.h_second > 0):
            raise ValueError("finite-difference step must be positive")


def _as_points(x, m: int) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[-1] != m:
        raise FieldError(f"points must have {m} coordinates, got {x.shape[-1]}")
    return x, single


class CliffordField:
    """Point-to-multivector map evaluated on batches ``(N, m) -> (N, 2**m)``.

    ``singularities`` are points where the closed form blows up; evaluation
    is refused within ``cutoff`` of any of them and finite differences refuse
    to step within ``10 h``.
    """

    exact = False

    def __init__(self, dim: int, fn: Callable[[np.ndarray], np.ndarray], *,
                 validity: Callable[[np.ndarray], np.ndarray] | None = None,
                 singularities: Sequence = (), cutoff: float = 1e-6, name: str = ""):
        self.dim = dim
        self._fn = fn
        self._validity = validity
        self.singularities = np.asarray(singularities, dtype=float).reshape(-1, dim)
        self.cutoff = cutoff
        self.name = name

    def singular_distance(self, x) -> np.ndarray:
        x, _ = _as_points(x, self.dim)
        if not len(self.singularities):
            return np.full(len(x), np.inf)
        d = np.linalg.norm(x[:, None, :] - self.singularities[None], axis=-1)
        return d.min(axis=1)

    def valid(self, x, margin: float = 0.0) -> np.ndarray:
        x, _ = _as_points(x, self.dim)
        ok = self.singular_distance(x) >= max(self.cutoff, margin)
        if self._validity is not None:
            ok &= np.asarray(self._validity(x), dtype=bool)
        return ok

    def __call__(self, x) -> np.ndarray:
        x, single = _as_points(x, self.dim)
        if not np.all(self.valid(x)):
            raise FieldError(f"{self.name or 'field'} evaluated outside its validity region")
        out = np.asarray(self._fn(x), dtype=complex)
        return out[0] if single else out

    def left_mul(self, const) -> "CliffordField":
        alg = algebra(self.dim)
        return CliffordField(self.dim, lambda x: alg.gp(const, self._fn(x)), validity=self._validity,
                             singularities=self.singularities, cutoff=self.cutoff, name=self.name)


class PolynomialField(CliffordField):
    """Finite sum of monomials ``x^exps`` with multivector coefficients."""

    exact = True

    def __init__(self, dim: int, terms: dict | None = None, name: str = ""):
        self.dim = dim
        self.size = 1 << dim
        self.terms: dict[tuple, np.ndarray] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != dim or min(exps, default=0) < 0:
                raise FieldError(f"bad exponent tuple {exps}")
            c = np.asarray(c, dtype=complex)
            if c.shape != (self.size,):
                raise FieldError("polynomial coefficient has wrong shape")
            self.terms[exps] = self.terms.get(exps, 0) + c
        self.terms = {k: v for k, v in self.terms.items() if np.any(v != 0)}
        self.singularities = np.zeros((0, dim))
        self.cutoff = 0.0
        self._validity = None
        self.name = name

    @classmethod
    def constant(cls, dim: int, value) -> "PolynomialField":
        return cls(dim, {(0,) * dim: np.asarray(value, dtype=complex)})

    @classmethod
    def coordinate(cls, dim: int, a: int) -> "PolynomialField":
        """Real coordinate ``X_a`` (1-based) as a scalar polynomial."""
        if not 1 <= a <= dim:
            raise FieldError(f"coordinate index {a} outside 1..{dim}")
        exps = [0] * dim
        exps[a - 1] = 1
        return cls(dim, {tuple(exps): algebra(dim).scalar(1.0)})

    @classmethod
    def z(cls, dim: int, k: int) -> "PolynomialField":
        """``z_k = x_k + i y_k`` (1-based)."""
        return cls.coordinate(dim, 2 * k - 1) + cls.coordinate(dim, 2 * k) * 1j

    @classmethod
    def zbar(cls, dim: int, k: int) -> "PolynomialField":
        return cls.coordinate(dim, 2 * k - 1) - cls.coordinate(dim, 2 * k) * 1j

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def _fn(self, x):
        out = np.zeros((len(x), self.size), dtype=complex)
        for exps, c in self.terms.items():
            mono = np.prod(x ** np.asarray(exps), axis=1)
            out += mono[:, None] * c
        return out

    def __call__(self, x):
        x, single = _as_points(x, self.dim)
        out = self._fn(x)
        return out[0] if single else out

    def derivative(self, a: int) -> "PolynomialField":
        """Exact ``d/dX_a`` (0-based axis)."""
        out = {}
        for exps, c in self.terms.items():
            if exps[a]:
                e = list(exps)
                e[a] -= 1
                out[tuple(e)] = out.get(tuple(e), 0) + exps[a] * c
        return PolynomialField(self.dim, out)

    def __add__(self, other):
        if not isinstance(other, PolynomialField):
            return NotImplemented
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return PolynomialField(self.dim, out)

    def __neg__(self):
        return PolynomialField(self.dim, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        """Pointwise geometric product; plain numbers scale."""
        if isinstance(other, (int, float, complex, np.number)):
            return PolynomialField(self.dim, {k: v * other for k, v in self.terms.items()})
        if isinstance(other, PolynomialField):
            alg = algebra(self.dim)
            out = {}
            for ka, va in self.terms.items():
                for kb, vb in other.terms.items():
                    k = tuple(i + j for i, j in zip(ka, kb))
                    out[k] = out.get(k, 0) + alg.gp(va, vb)
            return PolynomialField(self.dim, out)
        const = np.asarray(other, dtype=complex)
        if const.shape == (self.size,):
            alg = algebra(self.dim)
            return PolynomialField(self.dim, {k: alg.gp(v, const) for k, v in self.terms.items()})
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self * other
        const = np.asarray(other, dtype=complex)
        if const.shape == (self.size,):
            return self.left_mul(const)
        return NotImplemented

    def left_mul(self, const) -> "PolynomialField":
        alg = algebra(self.dim)
        return PolynomialField(self.dim, {k: alg.gp(const, v) for k, v in self.terms.items()})

    def max_coefficient(self) -> float:
        return max((float(np.max(np.abs(v))) for v in self.terms.values()), default=0.0)

    def to_json_obj(self) -> dict:
        return {
            "dim": self.dim,
            "terms": [
                {"exps": list(k), "coeff": Multivector.from_dense(self.dim, v).to_json_obj()}
                for k, v in sorted(self.terms.items())
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj) -> "PolynomialField":
        dim = int(obj["dim"])
        terms = {}
        for t in obj["terms"]:
            c = Multivector.from_json_obj(t["coeff"])
            if c.dim != dim:
                raise FieldError("coefficient dimension does not match polynomial")
            terms[tuple(t["exps"])] = terms.get(tuple(t["exps"]), 0) + c.to_dense()
        return cls(dim, terms)

    @classmethod
    def from_json(cls, text: str) -> "PolynomialField":
        return cls.from_json_obj(json.loads(text))


def random_polynomial(dim: int, degree: int, rng: np.random.Generator,
                      nterms: int = 6, spinor: np.ndarray | None = None) -> PolynomialField:
    """Random multivector-valued polynomial; with ``spinor`` the values are ``c * spinor``."""
    alg = algebra(dim)
    terms = {}
    for _ in range(nterms):
        d = int(rng.integers(0, degree + 1))
        exps = [0] * dim
        for a in rng.integers(0, dim, size=d):
            exps[a] += 1
        if spinor is None:
            c = rng.normal(size=alg.size) + 1j * rng.normal(size=alg.size)
        else:
            c = complex(rng.normal(), rng.normal()) * np.asarray(spinor, dtype=complex)
        terms[tuple(exps)] = terms.get(tuple(exps), 0) + c
    return PolynomialField(dim, terms)


# -- operator coefficients ------------------------------------------------------

def _check_kind(kind: str, m: int) -> None:
    if kind not in OPERATOR_KINDS:
        raise FieldError(f"unknown operator {kind!r}")
    if m % 2:
        raise FieldError(f"operators need even dimension, got {m}")
    if kind in FOURFOLD_KINDS and m % 4:
        raise FieldError(f"operator {kind} needs m = 4p, got {m}")


def first_order_coefficients(kind: str, m: int) -> np.ndarray:
    """Clifford constants ``C_a`` with ``op f = sum_a C_a (d_a f)``; shape ``(m, 2**m)``.

    ``d_M = M[d]`` has ``C_a = M[e_a]``, the a-th row of ``M`` read as a vector.
    """
    _check_kind(kind, m)
    alg = algebra(m)
    mats = build_structures(m, quaternionic=m % 4 == 0)
    eye = np.eye(m)
    rows = {"Dirac": eye, "Dirac_I": mats["I"]}
    if "J" in mats:
        rows["Dirac_J"] = mats["J"]
        rows["Dirac_K"] = mats["K"]
    if kind in rows:
        return alg.vector(rows[kind].astype(complex))
    i_, j_, k_ = mats["I"], mats.get("J"), mats.get("K")
    if kind == "Dz":
        return alg.vector(0.25 * (eye + 1j * i_))
    if kind == "DzDag":
        return alg.vector(-0.25 * (eye - 1j * i_))
    if kind == "DzJ":
        return alg.vector(0.25 * (j_ + 1j * k_))
    if kind == "DzDagJ":
        return alg.vector(-0.25 * (j_ - 1j * k_))
    raise FieldError(f"{kind} is not a constant-coefficient first-order operator")


def coordinate_form_coefficients(kind: str, m: int) -> np.ndarray:
    """Same constants assembled from Witt-coordinate expansions such as
    ``d_z = sum_k d_{z_k} f^+_k`` with ``d_{z_k} = (d_x - i d_y) / 2``."""
    from .structures import witt_frame

    _check_kind(kind, m)
    n = m // 2
    fr = witt_frame(n)
    alg = algebra(m)
    out = np.zeros((m, alg.size), dtype=complex)

    def add_dz(k, const, conj):
        # d_{z_k} = (d_x - i d_y)/2 ; d_{z_k^c} = (d_x + i d_y)/2
        s = 1j if conj else -1j
        out[2 * k] += 0.5 * const
        out[2 * k + 1] += 0.5 * s * const

    if kind == "Dz":
        for k in range(n):
            add_dz(k, fr.fdag[k], False)
    elif kind == "DzDag":
        for k in range(n):
            add_dz(k, fr.f[k], True)
    elif kind == "DzJ":
        for j in range(m // 4):
            add_dz(2 * j + 1, fr.f[2 * j], False)
            add_dz(2 * j, -fr.f[2 * j + 1], False)
    elif kind == "DzDagJ":
        for j in range(m // 4):
            add_dz(2 * j + 1, fr.fdag[2 * j], True)
            add_dz(2 * j, -fr.fdag[2 * j + 1], True)
    else:
        raise FieldError(f"no Witt-coordinate form for {kind}")
    return out


def euler_coefficients(m: int) -> list[PolynomialField]:
    """Scalar polynomial coefficients ``c_a`` of ``E = sum_a c_a d_a``.

    ``E = sum_k z_{2k-1} d_{z^c_{2k}} - z_{2k} d_{z^c_{2k-1}}``.
    """
    _check_kind("EulerE", m)
    zero = PolynomialField(m)
    coeffs = [zero for _ in range(m)]
    for k in range(1, m // 4 + 1):
        za = PolynomialField.z(m, 2 * k - 1)
        zb = PolynomialField.z(m, 2 * k)
        # d_{z^c_l} = (d_{x_l} + i d_{y_l})/2 ; x_l is axis 2l-2
        xl, yl = 2 * (2 * k) - 2, 2 * (2 * k) - 1
        coeffs[xl] = coeffs[xl] + za * 0.5
        coeffs[yl] = coeffs[yl] + za * 0.5j
        xl, yl = 2 * (2 * k - 1) - 2, 2 * (2 * k - 1) - 1
        coeffs[xl] = coeffs[xl] - zb * 0.5
        coeffs[yl] = coeffs[yl] - zb * 0.5j
    return coeffs


def _left_const(kind: str, m: int) -> np.ndarray:
    return p_operator(m) if kind == "MultP" else q_operator(m)


def apply_exact(kind: str, f: PolynomialField) -> PolynomialField:
    """Exact operator application on a polynomial field."""
    m = f.dim
    _check_kind(kind, m)
    if kind in ("MultP", "MultQ"):
        return f.left_mul(_left_const(kind, m))
    if kind == "Laplacian":
        out = PolynomialField(m)
        for a in range(m):
            out = out + f.derivative(a).derivative(a)
        return out
    if kind == "EulerE":
        out = PolynomialField(m)
        for a, c in enumerate(euler_coefficients(m)):
            if c.terms:
                out = out + c * f.derivative(a)
        return out
    coeffs = first_order_coefficients(kind, m)
    out = PolynomialField(m)
    for a in range(m):
        out = out + f.derivative(a).left_mul(coeffs[a])
    return out


def _fd_partials(f: CliffordField, x: np.ndarray, h: np.ndarray, second: bool = False) -> np.ndarray:
    """Central differences ``(N, m, 2**m)`` of first (or pure second) derivatives."""
    m = f.dim
    out = []
    f0 = f(x) if second else None
    for a in range(m):
        step = np.zeros((len(x), m))
        step[:, a] = h
        fp, fm = f(x + step), f(x - step)
        if second:
            out.append((fp - 2 * f0 + fm) / (h[:, None] ** 2))
        else:
            out.append((fp - fm) / (2 * h[:, None]))
    return np.stack(out, axis=1)


def fd_partials(f: CliffordField, x, cfg: FDConfig = FDConfig(), second: bool = False) -> np.ndarray:
    x, _ = _as_points(x, f.dim)
    h = (cfg.h_second if second else cfg.h) * np.maximum(1.0, np.linalg.norm(x, axis=1))
    if not np.all(f.valid(x, margin=10 * h.max())):
        raise FieldError("finite-difference stencil too close to a singularity or outside validity")
    d1 = _fd_partials(f, x, h, second)
    if not cfg.richardson:
        return d1
    d2 = _fd_partials(f, x, h / 2, second)
    return (4 * d2 - d1) / 3


def apply_operator(kind: str, f: CliffordField, x, cfg: FDConfig = FDConfig()) -> np.ndarray:
    """Operator value at point(s) ``x``: exact on polynomials, finite differences otherwise."""
    m = f.dim
    _check_kind(kind, m)
    pts, single = _as_points(x, m)
    if isinstance(f, PolynomialField):
        out = apply_exact(kind, f)(pts)
        return out[0] if single else out
    if not np.all(f.valid(pts)):
        raise FieldError("operator evaluated outside the field's validity region")
    alg = algebra(m)
    if kind in ("MultP", "MultQ"):
        out = alg.gp(_left_const(kind, m), f(pts))
    elif kind == "Laplacian":
        out = fd_partials(f, pts, cfg, second=True).sum(axis=1)
    else:
        d = fd_partials(f, pts, cfg)
        if kind == "EulerE":
            c = np.stack([cf(pts)[:, 0] for cf in euler_coefficients(m)], axis=1)
            out = np.einsum("na,nak->nk", c, d)
        else:
            coeffs = first_order_coefficients(kind, m)
            out = sum(alg.gp(coeffs[a], d[:, a]) for a in range(m))
    return out[0] if single else out


# -- operator identities -------------------------------------------------------

def _matrix_apply(matrix: Sequence[Sequence[str | None]], f: PolynomialField) -> list[list[PolynomialField]]:
    """Apply a matrix of operators to ``f * Identity``; entries ``None`` are zero."""
    zero = PolynomialField(f.dim)
    rows = len(matrix)
    return [[apply_exact(matrix[i][j], f) if matrix[i][j] else zero for j in range(rows)]
            for i in range(rows)]


def dagger_matrix(matrix):
    size = len(matrix)
    return [[DAGGER[matrix[j][i]] if matrix[j][i] else None for j in range(size)] for i in range(size)]


HERMITIAN_MATRIX = (("Dz", "DzDag"), ("DzDag", "Dz"))
QUATERNIONIC_MATRIX = (
    ("Dz", "DzDag", "DzJ", "DzDagJ"),
    ("DzDagJ", "Dz", "DzDag", "DzJ"),
    ("DzJ", "DzDagJ", "Dz", "DzDag"),
    ("DzDag", "DzJ", "DzDagJ", "Dz"),
)
BLOCK_MATRIX = (
    ("Dz", "DzDag", None, None),
    ("DzDag", "Dz", None, None),
    (None, None, "DzJ", "DzDagJ"),
    (None, None, "DzDagJ", "DzJ"),
)


def matrix_product_on(left, right, f: PolynomialField) -> list[list[PolynomialField]]:
    """Entries of ``(left right)(f * Identity)``."""
    size = len(left)
    inner = _matrix_apply(right, f)
    zero = PolynomialField(f.dim)
    out = []
    for i in range(size):
        row = []
        for j in range(size):
            acc = zero
            for k in range(size):
                if left[i][k]:
                    acc = acc + apply_exact(left[i][k], inner[k][j])
            row.append(acc)
        out.append(row)
    return out


IDENTITIES = ("dirac_split", "laplace_dirac", "herm_matrix", "quat_matrix", "quat_block")


def check_operator_identity(identity: str, trials: Iterable[PolynomialField], probes,
                            scale: float | None = None) -> float:
    """Max residual ``|LHS - RHS|`` over trials, probes and matrix entries.

    ``dirac_split``: ``d f = 2 (d_z - d_z^+) f``;  ``laplace_dirac``: ``Lap f = -d^2 f``;
    ``herm_matrix``: ``4 D D^+ = Lap``;  ``quat_matrix``: ``2 D D^+ = Lap`` (4x4);
    ``quat_block``: ``4 D_(z,zJ) D_(z,zJ)^+ = Lap``.  ``scale`` replaces the matrix
    prefactor (negative controls).
    """
    if identity not in IDENTITIES:
        raise FieldError(f"unknown identity {identity!r}")
    worst = 0.0
    for f in trials:
        if not isinstance(f, PolynomialField):
            raise FieldError("operator identities require polynomial trial fields")
        pts = np.atleast_2d(np.asarray(probes, dtype=float))
        if identity == "dirac_split":
            lhs = apply_exact("Dirac", f)
            rhs = (apply_exact("Dz", f) - apply_exact("DzDag", f)) * 2.0
            worst = max(worst, float(np.max(np.abs(lhs(pts) - rhs(pts)))))
            continue
        if identity == "laplace_dirac":
            lhs = apply_exact("Laplacian", f)
            rhs = -apply_exact("Dirac", apply_exact("Dirac", f))
            worst = max(worst, float(np.max(np.abs(lhs(pts) - rhs(pts)))))
            continue
        left, default = {
            "herm_matrix": (HERMITIAN_MATRIX, 4.0),
            "quat_matrix": (QUATERNIONIC_MATRIX, 2.0),
            "quat_block": (BLOCK_MATRIX, 4.0),
        }[identity]
        if scale is not None:
            scale = float(scale)
        else:
            scale = default
        prod = matrix_product_on(left, dagger_matrix(left), f)
        lap = apply_exact("Laplacian", f)(pts)
        for i, row in enumerate(prod):
            for j, entry in enumerate(row):
                target = lap if i == j else 0.0
                worst = max(worst, float(np.max(np.abs(scale * entry(pts) - target))))
    return worst


def classify_monogenicity(f: CliffordField, framework: str, probes,
                          cfg: FDConfig = FDConfig()) -> dict[str, float]:
    """Per-operator max residual over the probe points."""
    if framework not in FRAMEWORK_OPERATORS:
        raise FieldError(f"unknown framework {framework!r}")
    m = f.dim
    if framework in ("quaternionic", "osp42") and m % 4:
        raise FieldError(f"framework {framework} needs m = 4p, got {m}")
    if framework == "hermitian" and m % 2:
        raise FieldError("hermitian framework needs even dimension")
    pts = np.atleast_2d(np.asarray(probes, dtype=float))
    out = {}
    for kind in FRAMEWORK_OPERATORS[framework]:
        vals = apply_operator(kind, f, pts, cfg)
        out[kind] = float(np.max(np.abs(vals)))
    return out


def is_monogenic(residuals: dict[str, float], tol: float) -> bool:
    return all(v <= tol for v in residuals.values())


@dataclass
class ConvergenceRow:
    h: float
    central: float
    richardson: float


def fd_convergence_report(f: CliffordField, x, kind: str,
                          steps: Sequence[float] = (1e-3, 1e-4, 1e-5),
                          reference: Callable | None = None) -> dict:
    """Residual of ``kind`` applied to ``f`` at ``x`` versus the step size.

    ``reference`` gives the exact operator value (default: zero, i.e. ``f`` is
    expected to be annihilated).  Observed orders use the first two steps.
    """
    x = np.asarray(x, dtype=float)
    exact = np.zeros(1 << f.dim, dtype=complex) if reference is None else np.asarray(reference(x))
    rows = []
    for h in steps:
        if isinstance(f, PolynomialField):
            c = r = float(np.max(np.abs(apply_operator(kind, f, x) - exact)))
        else:
            c = float(np.max(np.abs(apply_operator(kind, f, x, FDConfig(h, False, h)) - exact)))
            r = float(np.max(np.abs(apply_operator(kind, f, x, FDConfig(h, True, h)) - exact)))
        rows.append(ConvergenceRow(h, c, r))

    def order(attr):
        a, b = getattr(rows[0], attr), getattr(rows[1], attr)
        if a == 0 or b == 0:
            return float("nan")
        return float(np.log(a / b) / np.log(rows[0].h / rows[1].h))

    return {"rows": rows, "order_central": order("central"), "order_richardson": order("richardson")}
