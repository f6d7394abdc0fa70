import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cliffcauchy.algebra import algebra
from cliffcauchy.fields import (
    FRAMEWORK_OPERATORS, IDENTITIES, CliffordField, FDConfig, FieldError, PolynomialField,
    apply_exact, apply_operator, check_operator_identity, classify_monogenicity,
    coordinate_form_coefficients, fd_convergence_report, first_order_coefficients,
    random_polynomial,
)
from cliffcauchy.kernels import euclidean_kernel_field
from cliffcauchy.structures import witt_frame


@pytest.mark.parametrize("kind", ["Dz", "DzDag", "DzJ", "DzDagJ"])
def test_operator_constants_match_coordinate_forms(kind):
    assert np.allclose(first_order_coefficients(kind, 4), coordinate_form_coefficients(kind, 4), atol=1e-15)


@pytest.mark.parametrize("kind", ["Dirac", "Dz", "DzDag", "DzJ", "DzDagJ", "EulerE", "Laplacian"])
def test_fd_matches_exact_on_polynomials(kind, rng):
    f = random_polynomial(4, 3, rng)
    wrapped = CliffordField(4, f)
    x = rng.uniform(-0.7, 0.7, size=(3, 4))
    # second differences carry roundoff ~ eps |f| / h_second**2
    tol = 5e-8 if kind == "Laplacian" else 1e-9
    assert np.max(np.abs(apply_operator(kind, wrapped, x) - apply_exact(kind, f)(x))) < tol


@pytest.mark.parametrize("identity", IDENTITIES)
def test_operator_factorizations(identity, rng):
    trials = [random_polynomial(4, 3, rng) for _ in range(4)]
    assert check_operator_identity(identity, trials, rng.uniform(-1, 1, (3, 4))) <= 1e-10


def test_wrong_prefactor_detected(rng):
    trials = [random_polynomial(4, 3, rng) for _ in range(3)]
    assert check_operator_identity("herm_matrix", trials, rng.uniform(-1, 1, (3, 4)), scale=2.0) > 1e-2


def test_polynomial_algebra():
    m = 4
    z1 = PolynomialField.z(m, 1)
    x = np.array([[0.3, -0.2, 0.5, 0.1]])
    assert np.allclose((z1 * z1)(x)[:, 0], (0.3 - 0.2j) ** 2)
    zbar = PolynomialField.zbar(m, 1)
    assert np.allclose((z1 * zbar)(x)[:, 0], 0.3**2 + 0.2**2)
    assert np.allclose((z1 - z1)(x), 0)


@given(st.integers(0, 2**31 - 1))
def test_derivative_is_linear_and_exact(seed):
    rng = np.random.default_rng(seed)
    f = random_polynomial(4, 3, rng)
    g = random_polynomial(4, 2, rng)
    x = rng.uniform(-1, 1, (2, 4))
    for a in range(4):
        assert np.allclose((f + g).derivative(a)(x), f.derivative(a)(x) + g.derivative(a)(x))


def test_polynomial_json_roundtrip(rng):
    f = random_polynomial(4, 3, rng)
    g = PolynomialField.from_json(f.to_json())
    x = rng.uniform(-1, 1, (4, 4))
    assert np.allclose(f(x), g(x))


def test_coordinate_index_checked():
    with pytest.raises(FieldError):
        PolynomialField.coordinate(4, 0)


def _top(F):
    alg = algebra(4)
    fr = witt_frame(2)
    return F * alg.gp(fr.fdag[0], alg.gp(fr.fdag[1], fr.idem))


@pytest.mark.parametrize("F,ok", [
    (PolynomialField.z(4, 1), True),
    (PolynomialField.z(4, 1) * PolynomialField.z(4, 2), True),
    (PolynomialField.zbar(4, 1), False),
])
def test_hermitian_classification_of_top_part(F, ok):
    res = classify_monogenicity(_top(F), "hermitian", np.random.default_rng(0).uniform(-1, 1, (5, 4)))
    assert (max(res.values()) < 1e-12) == ok


def test_osp_classification_flags_euler_only():
    alg = algebra(4)
    fr = witt_frame(2)
    spin = alg.gp(fr.fdag[0], fr.idem)
    V = PolynomialField.zbar(4, 2) * spin
    res = classify_monogenicity(V, "osp42", np.random.default_rng(1).uniform(-1, 1, (5, 4)))
    assert set(res) == set(FRAMEWORK_OPERATORS["osp42"])
    assert res["EulerE"] > 1e-3
    assert max(v for k, v in res.items() if k != "EulerE") < 1e-12


def test_euclidean_kernel_is_monogenic_away_from_source():
    f = euclidean_kernel_field(np.array([3.0, 0, 0, 0]))
    res = classify_monogenicity(f, "euclidean", np.random.default_rng(2).uniform(-0.5, 0.5, (5, 4)))
    assert res["Dirac"] < 1e-8


def test_stencil_refuses_singularity():
    f = euclidean_kernel_field(np.zeros(4))
    with pytest.raises(FieldError):
        apply_operator("Dirac", f, np.full(4, 1e-6))


def test_fourfold_operator_rejected_in_dimension_six():
    with pytest.raises(FieldError):
        apply_exact("DzJ", PolynomialField(6))


def test_fd_convergence_orders():
    f = euclidean_kernel_field(np.array([2.0, 0.5, 0, 0]))
    rep = fd_convergence_report(f, np.array([0.1, 0.2, -0.1, 0.3]), "Dirac", steps=(1e-2, 5e-3))
    assert rep["order_central"] == pytest.approx(2.0, abs=0.2)
    assert rep["order_richardson"] > 3.5


def test_fd_config_validation():
    with pytest.raises(ValueError):
        FDConfig(h=0.0)
