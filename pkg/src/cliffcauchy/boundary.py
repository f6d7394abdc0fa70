"""Spheres, product quadrature and the boundary differential forms.

Every Clifford-valued form is available from two independent backends:

* ``"normal"`` builds it from the outward unit normal and the structure
  matrices, using the closed projection constants;
* ``"pullback"`` evaluates the wedge products of complex coordinate
  differentials on the tangent frame of each node as determinants.

Agreement of the two backends pins every normalization constant.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache
from math import gamma, pi
from typing import Callable, Sequence

import numpy as np

from .algebra import algebra
from .structures import build_structures, witt_frame

MEASURE_KINDS = (
    "dS", "dSigma_X", "dSigma_XI", "dSigma_XJ", "dSigma_XK",
    "dSigma_z", "dSigma_zdag", "dSigma_zJ", "dSigma_zdagJ", "MB_form",
)
FOURFOLD_MEASURES = {"dSigma_XJ", "dSigma_XK", "dSigma_zJ", "dSigma_zdagJ"}
BACKENDS = ("normal", "pullback")

# Mutation hook for the self-test: when set, the normal backend uses the
# misprinted constant 2**(p-1) instead of 2**(2p-1) for the dagger form on
# fourfold dimensions, which the dual-backend check must catch.
MUTATE_QUATERNIONIC_CONSTANT = False

AREA_TOLERANCE = 1e-9


class BoundaryError(ValueError):
    pass


@dataclass(frozen=True)
class SurfaceDomain:
    """Sphere of radius ``radius`` around ``center``, normal pointing outward."""

    center: tuple
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise BoundaryError("radius must be positive")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    @classmethod
    def unit(cls, m: int) -> "SurfaceDomain":
        return cls((0.0,) * m, 1.0)

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def c(self) -> np.ndarray:
        return np.asarray(self.center)

    def signed_distance(self, x) -> np.ndarray:
        """Positive outside, negative inside."""
        return np.linalg.norm(np.atleast_2d(x) - self.c, axis=-1) - self.radius

    def area(self) -> float:
        return unit_sphere_area(self.dim) * self.radius ** (self.dim - 1)


@dataclass(frozen=True)
class QuadratureNode:
    point: np.ndarray
    normal: np.ndarray
    tangents: np.ndarray  # (m-1, m), columns of the parameter Jacobian
    weight: float  # area weight
    param_weight: float  # weight in parameter space


@dataclass
class NodeSet:
    """Batch of quadrature nodes; ``weight = param_weight * jacobian``."""

    points: np.ndarray
    normals: np.ndarray
    tangents: np.ndarray
    weights: np.ndarray
    param_weights: np.ndarray

    def __len__(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def jacobian(self) -> np.ndarray:
        return self.weights / self.param_weights

    def __getitem__(self, i) -> QuadratureNode:
        return QuadratureNode(self.points[i], self.normals[i], self.tangents[i],
                              float(self.weights[i]), float(self.param_weights[i]))

    def subset(self, mask) -> "NodeSet":
        return NodeSet(self.points[mask], self.normals[mask], self.tangents[mask],
                       self.weights[mask], self.param_weights[mask])

    def dump_csv(self, path) -> None:
        """Columns ``Y1..Ym, nu1..num, w``."""
        m = self.dim
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([f"Y{a}" for a in range(1, m + 1)] + [f"nu{a}" for a in range(1, m + 1)] + ["w"])
            for y, nu, wt in zip(self.points, self.normals, self.weights):
                w.writerow([repr(float(v)) for v in y] + [repr(float(v)) for v in nu] + [repr(float(wt))])


# -- one-dimensional rules -----------------------------------------------------

def gauss_legendre(q: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(q)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def panel_rule(q: int, breaks: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre with ``q`` points on each panel."""
    xs, ws = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        if not b > a:
            raise BoundaryError("panel breakpoints must increase")
        x, w = gauss_legendre(q, a, b)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def graded_breaks(theta_min: float, theta_max: float = pi, ratio: float = 2.0) -> list[float]:
    """Geometric panels ``[0 or theta_min, ..., theta_max]`` refined toward the start."""
    if theta_min <= 0:
        raise BoundaryError("grading needs a positive first breakpoint")
    out = [theta_min]
    while out[-1] * ratio < theta_max:
        out.append(out[-1] * ratio)
    out.append(theta_max)
    return out


def unit_sphere_area_closed(m: int) -> float:
    return 2 * pi ** (m / 2) / gamma(m / 2)


def quadrature_area(m: int, q: int = 24) -> float:
    """Area of ``S^{m-1}`` from the same separable rule that builds the nodes."""
    total = 2 * pi
    for k in range(1, m - 1):
        x, w = gauss_legendre(q, 0.0, pi)
        total *= float(np.sum(w * np.sin(x) ** k))
    return total


@lru_cache(maxsize=None)
def unit_sphere_area(m: int) -> float:
    """Closed-form area of ``S^{m-1}``, cross-checked once against quadrature."""
    if m < 2:
        raise BoundaryError("sphere area needs m >= 2")
    closed = unit_sphere_area_closed(m)
    quad = quadrature_area(m, 32)
    if abs(quad - closed) > AREA_TOLERANCE * closed:
        raise RuntimeError(f"sphere area mismatch for m={m}: {quad} vs {closed}")
    return closed


# -- nodes ---------------------------------------------------------------------

def rotation_to(u) -> np.ndarray:
    """Proper rotation ``Q`` with ``Q @ e1 = u``."""
    u = np.asarray(u, dtype=float)
    u = u / np.linalg.norm(u)
    m = len(u)
    e1 = np.zeros(m)
    e1[0] = 1.0
    v = e1 - u
    if np.linalg.norm(v) < 1e-14:
        return np.eye(m)
    v /= np.linalg.norm(v)
    h = np.eye(m) - 2 * np.outer(v, v)
    # a Householder map has determinant -1; flip one column orthogonal to e1
    h[:, 1] *= -1
    return h


def _hyperspherical(angles: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Unit-sphere points ``(N, m)`` and angle derivatives ``(N, m-1, m)``.

    ``s_k = sin a_1 ... sin a_{k-1} cos a_k`` for ``k < m`` and
    ``s_m = sin a_1 ... sin a_{m-1}``.
    """
    mm1 = len(angles)
    m = mm1 + 1
    sin = [np.sin(a) for a in angles]
    cos = [np.cos(a) for a in angles]

    def coords(sin, cos, dcos_index=None):
        cols = []
        prefix = np.ones_like(sin[0])
        for k in range(m):
            if k < mm1:
                last = cos[k]
                if dcos_index == k:
                    last = -np.sin(angles[k])
                cols.append(prefix * last)
                prefix = prefix * sin[k]
            else:
                cols.append(prefix)
        return np.stack(cols, axis=-1)

    pts = coords(sin, cos)
    tangents = []
    for j in range(mm1):
        # differentiate factor j: sin -> cos inside prefixes, cos -> -sin at k = j
        s2 = list(sin)
        s2[j] = cos[j]
        d = coords(s2, cos, dcos_index=j)
        d[..., :j] = 0.0
        tangents.append(d)
    return pts, np.stack(tangents, axis=-2)


def build_quadrature(dom: SurfaceDomain, q: int, *, pole=None,
                     theta_breaks: Sequence[float] | None = None) -> NodeSet:
    """Hyperspherical product rule: ``q`` Gauss-Legendre points per polar angle,
    ``2q`` trapezoid points in the azimuth.

    ``pole`` rotates the polar axis onto the given direction; ``theta_breaks``
    replaces the first polar rule by composite panels (used to exclude or to
    resolve a neighbourhood of the pole).
    """
    m = dom.dim
    if m < 2:
        raise BoundaryError(f"unsupported dimension {m}")
    if q < 4:
        raise BoundaryError("quadrature order must be >= 4")
    rules = []
    for k in range(m - 2):
        if k == 0 and theta_breaks is not None:
            rules.append(panel_rule(q, theta_breaks))
        else:
            rules.append(gauss_legendre(q, 0.0, pi))
    nphi = 2 * q
    rules.append((2 * pi * np.arange(nphi) / nphi, np.full(nphi, 2 * pi / nphi)))
    grids = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    wgrids = np.meshgrid(*[r[1] for r in rules], indexing="ij")
    angles = [g.ravel() for g in grids]
    pw = np.prod([g.ravel() for g in wgrids], axis=0)
    unit, dunit = _hyperspherical(angles)
    jac = np.ones_like(pw)
    for k in range(m - 2):
        jac = jac * np.sin(angles[k]) ** (m - 2 - k)
    R = dom.radius
    rot = np.eye(m) if pole is None else rotation_to(pole)
    normals = unit @ rot.T
    points = dom.c + R * normals
    tangents = R * (dunit @ rot.T)
    return NodeSet(points, normals, tangents, pw * jac * R ** (m - 1), pw)


def cap_excluded_nodes(dom: SurfaceDomain, q: int, xi, eps: float) -> NodeSet:
    """Nodes on the sphere minus the cap ``|Y - xi| <= eps`` (chordal distance)."""
    u = (np.asarray(xi, dtype=float) - dom.c) / dom.radius
    if not 0 < eps < 2 * dom.radius:
        raise BoundaryError("cap radius must lie in (0, 2R)")
    theta_eps = 2 * np.arcsin(eps / (2 * dom.radius))
    return build_quadrature(dom, q, pole=u, theta_breaks=graded_breaks(theta_eps))


def near_point_nodes(dom: SurfaceDomain, q: int, xi, theta_min: float) -> NodeSet:
    """Nodes graded toward the boundary point ``xi``; resolves near-singular integrands."""
    u = (np.asarray(xi, dtype=float) - dom.c) / dom.radius
    return build_quadrature(dom, q, pole=u, theta_breaks=[0.0] + graded_breaks(theta_min))


def orientation_signs(nodes: NodeSet) -> np.ndarray:
    """``sign det[nu, t_1, ..., t_{m-1}]`` per node."""
    mats = np.concatenate([nodes.normals[:, None, :], nodes.tangents], axis=1)
    return np.sign(np.linalg.det(mats))


def orientation_selftest(m: int, q: int = 4) -> None:
    nodes = build_quadrature(SurfaceDomain.unit(m), q)
    if not np.all(orientation_signs(nodes) > 0):
        raise RuntimeError(f"tangent frame orientation is not outward for m={m}")


# -- forms ---------------------------------------------------------------------

def complex_differentials(tangents: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``dz_k(t_i)`` and ``dz_k^c(t_i)``; each of shape ``(N, n, m-1)``."""
    tx = tangents[..., 0::2]
    ty = tangents[..., 1::2]
    dz = np.swapaxes(tx + 1j * ty, -1, -2)
    dzc = np.swapaxes(tx - 1j * ty, -1, -2)
    return dz, dzc


def _wedge(rows: list[np.ndarray]) -> np.ndarray:
    """Value of ``a_1 ^ ... ^ a_{m-1}`` on the frame: ``det[a_i(t_j)]``."""
    return np.linalg.det(np.stack(rows, axis=-2))


def hat_dz(nodes: NodeSet, j: int, conj: bool = False) -> np.ndarray:
    """Pullback density (per unit area) of ``hat dz_j`` or ``hat dz_j^c`` (1-based ``j``).

    ``hat dz_j`` is ``dz_1 ^ dz_1^c ^ ... ^ dz_n ^ dz_n^c`` with ``dz_j`` deleted
    (``conj=False``) or with ``dz_j^c`` deleted (``conj=True``).
    """
    dz, dzc = complex_differentials(nodes.tangents)
    n = dz.shape[1]
    rows = []
    for k in range(n):
        if k == j - 1:
            rows.append(dz[:, k] if conj else dzc[:, k])
        else:
            rows.extend([dz[:, k], dzc[:, k]])
    return _wedge(rows) / nodes.jacobian


def hat_dX(nodes: NodeSet, a: int) -> np.ndarray:
    """Pullback density of ``dX_1 ^ ... (omit dX_a) ... ^ dX_m``."""
    t = nodes.tangents
    rows = [t[..., :, b] for b in range(nodes.dim) if b != a - 1]
    return _wedge(rows) / nodes.jacobian


def mb_bracket(nodes: NodeSet, j: int) -> np.ndarray:
    """Pullback density of ``[dxi_j] = dxi^c_1 ^ ..(omit j).. ^ dxi^c_n ^ dxi_1 ^ ... ^ dxi_n``."""
    dz, dzc = complex_differentials(nodes.tangents)
    n = dz.shape[1]
    rows = [dzc[:, k] for k in range(n) if k != j - 1] + [dz[:, k] for k in range(n)]
    return _wedge(rows) / nodes.jacobian


def permutation_sign(perm: Sequence[int]) -> int:
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            k = perm[i]
            perm[i], perm[k] = perm[k], perm[i]
            sign = -sign
    return sign


def mb_reorder_sign(n: int, j: int) -> int:
    """Sign with ``[dxi_j] = sign * hat dz_j^c`` (both as ordered wedge products)."""
    # label dz_k -> 2k, dz_k^c -> 2k + 1 (0-based k)
    hat = []
    for k in range(n):
        hat.extend([2 * k] if k == j - 1 else [2 * k, 2 * k + 1])
    bracket = [2 * k + 1 for k in range(n) if k != j - 1] + [2 * k for k in range(n)]
    return permutation_sign([hat.index(b) for b in bracket])


def projection_constant(n: int) -> complex:
    """``(-i)^n 2^(n-1)``."""
    return (-1j) ** n * 2.0 ** (n - 1)


def _check_kind(kind: str, m: int) -> None:
    if kind not in MEASURE_KINDS:
        raise BoundaryError(f"unknown measure kind {kind!r}")
    if m % 2 and kind not in ("dS", "dSigma_X"):
        raise BoundaryError(f"{kind} needs even dimension")
    if kind in FOURFOLD_MEASURES and m % 4:
        raise BoundaryError(f"{kind} needs m = 4p, got {m}")


def _normal_backend(kind: str, nodes: NodeSet, j: int | None) -> np.ndarray:
    m = nodes.dim
    alg = algebra(m)
    nu = nodes.normals
    if kind == "dSigma_X":
        return alg.vector(nu)
    mats = build_structures(m, quaternionic=m % 4 == 0)
    if kind in ("dSigma_XI", "dSigma_XJ", "dSigma_XK"):
        return alg.vector(nu @ mats[kind[-1]])
    n = m // 2
    c = projection_constant(n)
    nu_i = nu @ mats["I"]
    if kind == "MB_form":
        # [dxi_j] is a reordering of hat dz_j^c = -c (nu_x + i nu_y) dS
        a = 2 * j - 2
        return -mb_reorder_sign(n, j) * c * (nu[:, a] + 1j * nu[:, a + 1])
    cd = c
    if kind in ("dSigma_zdag", "dSigma_zdagJ") and MUTATE_QUATERNIONIC_CONSTANT and m % 4 == 0:
        cd = (-1j) ** n * 2.0 ** (m // 4 - 1)
    if kind in ("dSigma_z", "dSigma_zJ"):
        vec = 0.5 * c * (nu + 1j * nu_i)
    else:
        vec = -0.5 * cd * (nu - 1j * nu_i)
    if kind in ("dSigma_zJ", "dSigma_zdagJ"):
        vec = vec @ mats["J"]
    return alg.vector(vec)


def _pullback_backend(kind: str, nodes: NodeSet, j: int | None) -> np.ndarray:
    m = nodes.dim
    alg = algebra(m)
    if kind == "MB_form":
        return mb_bracket(nodes, j)
    if kind.startswith("dSigma_X"):
        base = sum(((-1) ** a) * hat_dX(nodes, a + 1)[:, None] * alg.basis_vector(a + 1)
                   for a in range(m))
        if kind == "dSigma_X":
            return base
        mats = build_structures(m, quaternionic=m % 4 == 0)
        return alg.vector(alg.vector_part(base) @ mats[kind[-1]])
    n = m // 2
    fr = witt_frame(n)
    out = alg.zeros((len(nodes),))
    if kind == "dSigma_z":
        for k in range(n):
            out += hat_dz(nodes, k + 1)[:, None] * fr.fdag[k]
    elif kind == "dSigma_zdag":
        for k in range(n):
            out -= hat_dz(nodes, k + 1, conj=True)[:, None] * fr.f[k]
    elif kind == "dSigma_zJ":
        for i in range(n // 2):
            out += hat_dz(nodes, 2 * i + 2)[:, None] * fr.f[2 * i]
            out -= hat_dz(nodes, 2 * i + 1)[:, None] * fr.f[2 * i + 1]
    elif kind == "dSigma_zdagJ":
        for i in range(n // 2):
            out -= hat_dz(nodes, 2 * i + 2, conj=True)[:, None] * fr.fdag[2 * i]
            out += hat_dz(nodes, 2 * i + 1, conj=True)[:, None] * fr.fdag[2 * i + 1]
    return out


def eval_measure(kind: str, nodes: NodeSet, backend: str = "normal", j: int | None = None) -> np.ndarray:
    """Density per unit area weight: ``(N, 2**m)`` multivectors, or ``(N,)`` scalars
    for ``dS`` and ``MB_form`` (which needs the index ``j``)."""
    m = nodes.dim
    _check_kind(kind, m)
    if backend not in BACKENDS:
        raise BoundaryError(f"unknown backend {backend!r}")
    if kind == "MB_form" and not (j is not None and 1 <= j <= m // 2):
        raise BoundaryError("MB_form needs an index 1 <= j <= n")
    if kind == "dS":
        return np.ones(len(nodes))
    if backend == "normal":
        return _normal_backend(kind, nodes, j)
    return _pullback_backend(kind, nodes, j)


def backend_discrepancy(kind: str, nodes: NodeSet, j: int | None = None) -> float:
    a = eval_measure(kind, nodes, "normal", j)
    b = eval_measure(kind, nodes, "pullback", j)
    return float(np.max(np.abs(a - b)))


def random_nodes(dom: SurfaceDomain, count: int, rng: np.random.Generator) -> NodeSet:
    """Nodes of the product parameterization at uniformly random angles."""
    m = dom.dim
    angles = [rng.uniform(0.05, pi - 0.05, size=count) for _ in range(m - 2)]
    angles.append(rng.uniform(0, 2 * pi, size=count))
    unit, dunit = _hyperspherical(angles)
    jac = np.ones(count)
    for k in range(m - 2):
        jac = jac * np.sin(angles[k]) ** (m - 2 - k)
    R = dom.radius
    return NodeSet(dom.c + R * unit, unit, R * dunit, jac * R ** (m - 1), np.ones(count))


def integrate_nodes(nodes: NodeSet, left, density, right) -> np.ndarray:
    """``sum_nodes left * density * right * w`` with the product order preserved.

    ``left``/``right`` are ``(N, 2**m)`` arrays or ``None``; a scalar density
    ``(N,)`` multiplies componentwise.
    """
    m = nodes.dim
    alg = algebra(m)
    acc = density if density.ndim == 2 else alg.scalar(1.0) * density[:, None]
    if right is not None:
        acc = alg.gp(acc, right)
    if left is not None:
        return alg.gp_sum(left, acc, nodes.weights)
    return np.sum(acc * nodes.weights[:, None], axis=0)


def integrate(left: Callable | None, kind: str, right: Callable | None,
              dom: SurfaceDomain, q: int, nodes: NodeSet | None = None,
              j: int | None = None) -> np.ndarray:
    """``int left(Y) d(kind)_Y right(Y)`` over the sphere."""
    nodes = build_quadrature(dom, q) if nodes is None else nodes
    density = eval_measure(kind, nodes, j=j)
    lv = None if left is None else left(nodes.points)
    rv = None if right is None else right(nodes.points)
    return integrate_nodes(nodes, lv, density, rv)
