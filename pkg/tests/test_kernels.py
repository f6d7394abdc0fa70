import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cliffcauchy.fields import CliffordField, apply_operator
from cliffcauchy.kernels import (
    FOURFOLD_CHECKS, MATRIX_VARIANTS, PDE_CHECKS, KernelError, eval_kernel, kernel_operator_residual,
    kernel_pde_check, kernel_values, matrix_fundamental_check, mb_orientation_sign, random_pairs,
)

FIRST_DEGREE = ["E_X", "E_I", "E_J", "E_K", "E_z", "E_zdag", "E_zJ", "E_zdagJ"]
away = arrays(np.float64, (4,), elements=st.floats(-2, 2)).filter(lambda w: np.linalg.norm(w) > 0.1)


@pytest.mark.parametrize("kid", FIRST_DEGREE + ["K_herm"])
@given(w=away, lam=st.floats(0.2, 5.0))
def test_homogeneity(kid, w, lam):
    deg = -4 if kid == "K_herm" else -3
    a = kernel_values(kid, w, np.zeros(4))
    b = kernel_values(kid, lam * w, np.zeros(4))
    assert np.max(np.abs(b - lam**deg * a)) <= 1e-12 * np.max(np.abs(b))


@pytest.mark.parametrize("kid", FIRST_DEGREE)
@given(w=away)
def test_odd_symmetry(kid, w):
    assert np.allclose(kernel_values(kid, -w, np.zeros(4)), -kernel_values(kid, w, np.zeros(4)))


@given(w=away)
def test_hermitian_kernels_against_euclidean_pair(w):
    # closed forms: E_z = E_X - i E_I and E_zdag = -E_X - i E_I
    o = np.zeros(4)
    ex, ei = kernel_values("E_X", w, o), kernel_values("E_I", w, o)
    assert np.allclose(kernel_values("E_z", w, o), ex - 1j * ei, atol=1e-13)
    assert np.allclose(kernel_values("E_zdag", w, o), -ex - 1j * ei, atol=1e-13)
    ej, ek = kernel_values("E_J", w, o), kernel_values("E_K", w, o)
    assert np.allclose(kernel_values("E_zJ", w, o), ej - 1j * ek, atol=1e-13)
    assert np.allclose(kernel_values("E_zdagJ", w, o), -ej - 1j * ek, atol=1e-13)


@pytest.mark.parametrize("check", PDE_CHECKS)
def test_pointwise_identities_m4(check, rng):
    pairs = random_pairs(4, 8, rng)
    assert kernel_pde_check(check, pairs) <= 1e-7


@pytest.mark.parametrize("check", [c for c in PDE_CHECKS if c not in FOURFOLD_CHECKS])
def test_pointwise_identities_m6(check, rng):
    pairs = random_pairs(6, 3, rng)
    assert kernel_pde_check(check, pairs) <= 1e-7


def test_fourfold_identity_rejected_for_m6(rng):
    with pytest.raises(KernelError):
        kernel_pde_check("quat_J_sum", random_pairs(6, 1, rng))


def test_wrong_operator_kernel_pair_does_not_vanish(rng):
    assert kernel_operator_residual("Dz", "E_z", random_pairs(4, 4, rng)) > 1e-3


@pytest.mark.parametrize("variant", MATRIX_VARIANTS)
def test_matrix_products_vanish_off_origin(variant, rng):
    probes = [y - x for y, x in random_pairs(4, 6, rng)]
    assert matrix_fundamental_check(variant, probes)["offorigin_max"] <= 1e-7


def test_singularity_guard():
    with pytest.raises(KernelError):
        kernel_values("E_X", np.zeros(4), np.zeros(4))
    ev = eval_kernel("E_X", np.ones(4), np.zeros(4))
    assert ev.singular_distance[0] == pytest.approx(2.0)


def test_mb_factor_is_harmonic_in_z():
    xi = np.array([0.9, 0.1, -0.3, 0.4])
    for j in range(2):
        f = CliffordField(4, lambda z, j=j: np.pad(kernel_values("MB_U", xi, z)[:, j:j + 1], ((0, 0), (0, 15))),
                          singularities=[xi])
        lap = apply_operator("Laplacian", f, np.array([0.1, -0.2, 0.05, 0.0]))
        assert abs(lap[0]) < 1e-6


@pytest.mark.parametrize("n,sign", [(1, 1), (2, -1), (3, -1), (4, 1), (5, 1)])
def test_mb_orientation_sign(n, sign):
    assert mb_orientation_sign(n) == sign
