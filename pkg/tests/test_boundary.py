import csv
from math import gamma, pi

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cliffcauchy import boundary as bd
from cliffcauchy.algebra import algebra

from conftest import random_mv


def kinds_for(m):
    out = ["dS", "dSigma_X"]
    if m % 2 == 0:
        out += ["dSigma_XI", "dSigma_z", "dSigma_zdag"]
    if m % 4 == 0:
        out += ["dSigma_XJ", "dSigma_XK", "dSigma_zJ", "dSigma_zdagJ"]
    return out


def ball_volume(m, R):
    return pi ** (m / 2) / gamma(m / 2 + 1) * R ** m


@pytest.mark.parametrize("m", [2, 3, 4, 5, 6, 8])
def test_sphere_area_matches_closed_form(m):
    closed = bd.unit_sphere_area_closed(m)
    assert abs(bd.unit_sphere_area(m) - closed) <= 1e-12 * closed
    assert abs(bd.quadrature_area(m, 16) - closed) <= 1e-9 * closed


def test_area_needs_m_at_least_two():
    with pytest.raises(bd.BoundaryError):
        bd.unit_sphere_area(1)


@pytest.mark.parametrize("m,R", [(2, 1.0), (4, 2.5), (6, 0.7)])
def test_weights_sum_to_area(m, R):
    dom = bd.SurfaceDomain((0.3,) * m, R)
    nodes = bd.build_quadrature(dom, 8)
    assert np.isclose(nodes.weights.sum(), bd.quadrature_area(m, 8) * R ** (m - 1), rtol=1e-13)
    assert np.isclose(nodes.weights.sum(), dom.area(), rtol=1e-5)


@pytest.mark.parametrize("m", [2, 3, 4, 6])
def test_nodes_lie_on_sphere_with_unit_normals(m):
    dom = bd.SurfaceDomain(tuple(np.linspace(-1, 1, m)), 1.7)
    nodes = bd.build_quadrature(dom, 6)
    assert np.allclose(np.linalg.norm(nodes.points - dom.c, axis=1), 1.7)
    assert np.allclose(nodes.normals, (nodes.points - dom.c) / 1.7)
    assert np.allclose(np.einsum("nij,nj->ni", nodes.tangents, nodes.normals), 0, atol=1e-12)


@pytest.mark.parametrize("m", [2, 3, 4, 6])
def test_orientation_is_outward(m):
    bd.orientation_selftest(m)
    nodes = bd.build_quadrature(bd.SurfaceDomain.unit(m), 5, pole=np.ones(m))
    assert np.all(bd.orientation_signs(nodes) > 0)


def test_domain_validation():
    with pytest.raises(bd.BoundaryError):
        bd.SurfaceDomain((0.0, 0.0), 0.0)
    with pytest.raises(bd.BoundaryError):
        bd.build_quadrature(bd.SurfaceDomain.unit(4), 3)
    dom = bd.SurfaceDomain((1.0, 0.0), 2.0)
    assert np.allclose(dom.signed_distance([[1.0, 0.0], [4.0, 0.0]]), [-2.0, 1.0])


@pytest.mark.parametrize("m", [2, 4, 6])
def test_backends_agree_at_random_nodes(m, rng):
    dom = bd.SurfaceDomain(tuple(rng.normal(size=m)), 1.3)
    nodes = bd.random_nodes(dom, 200, rng)
    for kind in kinds_for(m):
        assert bd.backend_discrepancy(kind, nodes) <= 1e-10, kind
    for j in range(1, m // 2 + 1):
        assert bd.backend_discrepancy("MB_form", nodes, j=j) <= 1e-10


def test_mutated_constant_is_detected(rng):
    nodes = bd.random_nodes(bd.SurfaceDomain.unit(8), 50, rng)
    bd.MUTATE_QUATERNIONIC_CONSTANT = True
    try:
        gap = bd.backend_discrepancy("dSigma_zdag", nodes)
    finally:
        bd.MUTATE_QUATERNIONIC_CONSTANT = False
    assert gap > 1e-2
    assert bd.backend_discrepancy("dSigma_zdag", nodes) <= 1e-10


@pytest.mark.parametrize("kind,m", [("dSigma_z", 3), ("dSigma_XJ", 6), ("bogus", 4)])
def test_invalid_kind_dimension(kind, m):
    nodes = bd.random_nodes(bd.SurfaceDomain.unit(m), 3, np.random.default_rng(0))
    with pytest.raises(bd.BoundaryError):
        bd.eval_measure(kind, nodes)


def test_invalid_backend_and_mb_index():
    nodes = bd.random_nodes(bd.SurfaceDomain.unit(4), 3, np.random.default_rng(0))
    with pytest.raises(bd.BoundaryError):
        bd.eval_measure("dSigma_X", nodes, backend="other")
    with pytest.raises(bd.BoundaryError):
        bd.eval_measure("MB_form", nodes, j=3)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_stokes_for_position_vector(m):
    # int dSigma_X (Y - c) = -m vol(B) since nu^2 = -1
    dom = bd.SurfaceDomain((0.2,) * m, 1.5)
    alg = algebra(m)
    val = bd.integrate(None, "dSigma_X", lambda Y: alg.vector(Y - dom.c), dom, 16)
    expect = alg.scalar(-m * ball_volume(m, 1.5))
    assert np.max(np.abs(val - expect)) <= 1e-9 * m * ball_volume(m, 1.5)


@pytest.mark.parametrize("m", [2, 4, 6])
@pytest.mark.parametrize("kind", ["dSigma_X", "dSigma_z", "dSigma_zdag"])
def test_constant_integrand_integrates_to_zero(m, kind):
    dom = bd.SurfaceDomain.unit(m)
    val = bd.integrate(None, kind, None, dom, 6)
    assert np.max(np.abs(val)) <= 1e-12


def test_integrate_nodes_respects_order(rng):
    m = 4
    alg = algebra(m)
    nodes = bd.random_nodes(bd.SurfaceDomain.unit(m), 7, rng)
    left = random_mv(rng, m, (7,))
    right = random_mv(rng, m, (7,))
    dens = bd.eval_measure("dSigma_z", nodes)
    got = bd.integrate_nodes(nodes, left, dens, right)
    ref = sum(w * alg.gp(alg.gp(l, d), r) for w, l, d, r in zip(nodes.weights, left, dens, right))
    assert np.allclose(got, ref, atol=1e-12)
    swapped = bd.integrate_nodes(nodes, right, dens, left)
    assert not np.allclose(got, swapped)


def test_scalar_density_broadcasts(rng):
    m = 2
    nodes = bd.random_nodes(bd.SurfaceDomain.unit(m), 5, rng)
    right = random_mv(rng, m, (5,))
    got = bd.integrate_nodes(nodes, None, np.ones(5), right)
    assert np.allclose(got, (right * nodes.weights[:, None]).sum(axis=0))


@pytest.mark.parametrize("eps", [0.4, 0.1])
def test_cap_excluded_nodes_avoid_cap(eps):
    dom = bd.SurfaceDomain.unit(4)
    xi = np.array([0.0, 1.0, 0.0, 0.0])
    nodes = bd.cap_excluded_nodes(dom, 6, xi, eps)
    assert np.min(np.linalg.norm(nodes.points - xi, axis=1)) >= eps - 1e-12
    theta = 2 * np.arcsin(eps / 2)
    # cap area of S^3: area(S^2) * int_0^theta sin^2
    cap = 4 * pi * (theta / 2 - np.sin(2 * theta) / 4)
    assert np.isclose(nodes.weights.sum(), dom.area() - cap, rtol=1e-9)


def test_cap_radius_validation():
    with pytest.raises(bd.BoundaryError):
        bd.cap_excluded_nodes(bd.SurfaceDomain.unit(2), 6, [1.0, 0.0], 2.5)


def test_near_point_nodes_cover_sphere():
    dom = bd.SurfaceDomain.unit(4)
    nodes = bd.near_point_nodes(dom, 6, [0.0, 0.0, 1.0, 0.0], 1e-3)
    assert np.isclose(nodes.weights.sum(), dom.area(), rtol=1e-10)
    assert np.min(np.linalg.norm(nodes.points - [0.0, 0.0, 1.0, 0.0], axis=1)) < 1e-2


def test_panel_rule_and_grading():
    x, w = bd.panel_rule(5, [0.0, 0.5, 2.0])
    assert np.isclose(np.sum(w * x ** 3), 2.0 ** 4 / 4)
    br = bd.graded_breaks(0.01)
    assert br[0] == 0.01 and br[-1] == pi
    assert np.all(np.diff(br) > 0)
    with pytest.raises(bd.BoundaryError):
        bd.graded_breaks(0.0)
    with pytest.raises(bd.BoundaryError):
        bd.panel_rule(3, [0.0, 0.0])


@given(st.lists(st.integers(0, 5), min_size=6, max_size=6, unique=True))
def test_permutation_sign_is_a_homomorphism(perm):
    ident = list(range(6))
    assert bd.permutation_sign(ident) == 1
    inv = [perm.index(i) for i in range(6)]
    assert bd.permutation_sign(perm) * bd.permutation_sign(inv) == 1
    swapped = list(perm)
    swapped[0], swapped[1] = swapped[1], swapped[0]
    assert bd.permutation_sign(swapped) == -bd.permutation_sign(perm)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_projection_constant(n):
    assert bd.projection_constant(n) == pytest.approx((-1j) ** n * 2 ** (n - 1))


def test_csv_dump_roundtrip(tmp_path):
    nodes = bd.build_quadrature(bd.SurfaceDomain.unit(3), 4)
    path = tmp_path / "nodes.csv"
    nodes.dump_csv(path)
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["Y1", "Y2", "Y3", "nu1", "nu2", "nu3", "w"]
    data = np.array(rows[1:], dtype=float)
    assert data.shape == (len(nodes), 7)
    assert np.array_equal(data[:, :3], nodes.points)
    assert np.array_equal(data[:, -1], nodes.weights)


def test_nodeset_indexing_and_subset():
    nodes = bd.build_quadrature(bd.SurfaceDomain.unit(2), 4)
    node = nodes[3]
    assert np.array_equal(node.point, nodes.points[3])
    sub = nodes.subset(np.arange(len(nodes)) < 3)
    assert len(sub) == 3 and sub.dim == 2
    assert np.allclose(nodes.jacobian * nodes.param_weights, nodes.weights)
