import numpy as np
import pytest

from tau2 import rk_matrices as rk
from tau2.tensorkit import embed, rel_residual

ETA = 2j * np.pi / 3


@pytest.fixture(scope="module")
def bp():
    return rk.gen_boundary_params(11)


def R(u):
    return rk.r_matrix(u, ETA)


def test_r_regularity_and_fusion_point():
    P = rk.permutation_operator((1, 0)).data
    assert rel_residual(R(0.0), np.sinh(ETA) * P) < 1e-15
    assert rel_residual(R(-ETA), -2 * np.sinh(ETA) * rk.projector_antisym2().data) < 1e-15


def test_unitarity():
    u = 0.4 + 0.1j
    prod = R(u).data @ R(-u).data
    expected = -np.sinh(u + ETA) * np.sinh(u - ETA) * np.eye(4)
    assert rel_residual(prod, expected) < 1e-14


def test_projectors():
    for m in (2, 3):
        P = rk.projector_sym(m).data
        assert rel_residual(P @ P, P) < 1e-15
        assert round(np.trace(P).real) == m + 1
    B = rk.adapted_basis(3)
    assert rel_residual(B.T @ B, np.eye(4)) < 1e-15


def test_reflection_equation(bp):
    u, v = 0.21 + 0.33j, -0.17 + 0.52j
    d = (2, 2)
    K1, K2 = embed(rk.k_minus(u, bp), [0], d), embed(rk.k_minus(v, bp), [1], d)
    assert rel_residual(R(u - v) @ K1 @ R(u + v) @ K2, K2 @ R(u + v) @ K1 @ R(u - v)) < 1e-13


def test_k_quasi_periodicity(bp):
    u = 0.3 + 0.2j
    sz = rk.SIGMA_Z
    assert rel_residual(rk.k_minus(u + 1j * np.pi, bp), -sz @ rk.k_minus(u, bp).data @ sz) < 1e-14


@pytest.mark.parametrize("sign", "+-")
def test_quantum_determinant_trace(bp, sign):
    u = 0.13 - 0.27j
    a, b = rk.det_q_K_trace(sign, u, bp, ETA), rk.det_q_K(sign, u, bp, ETA)
    assert abs(a - b) < 1e-12 * abs(b)


@pytest.mark.parametrize("sign", "+-")
def test_fused_k_top_block_closed_forms(bp, sign):
    u = 0.17 + 0.29j
    W = rk.fused_k_top_weighted(sign, u, bp, ETA)
    C = rk.fused_k_closed_p3(sign, u, bp, ETA)
    assert rel_residual(W, [[C["K11"], C["K12"]], [C["K21"], C["K22"]]]) < 1e-12


@pytest.mark.parametrize("sign", "+-")
def test_tabulated_forms_are_unit_weight_fusion(bp, sign):
    u = 0.17 + 0.29j
    W1 = rk.fused_k_top_weighted(sign, u, bp, ETA, diag_weight=1.0)
    A = rk.tabulated_fused_k(sign, u, bp)
    assert rel_residual(W1, [[A["K11"], A["K12"]], [A["K21"], A["K22"]]]) < 1e-12


def test_tabulated_forms_differ_from_model_k(bp):
    u = 0.17 + 0.29j
    W = rk.fused_k_top_weighted("-", u, bp, ETA)
    A = rk.tabulated_fused_k("-", u, bp)
    assert abs(W[0, 1] - A["K12"]) < 1e-12 * abs(A["K12"])
    assert abs(W[0, 0] - A["K11"]) > 1e-3 * abs(A["K11"])


def test_fused_k_diagonal_frozen():
    # values taken from the direct fusion product (3-fold K and R product, projected)
    bp = rk.BoundaryParams(0.3 + 0.1j, -0.2 + 0.4j, 0.5 - 0.3j, 0.1 + 0.2j, 0.4 - 0.1j, -0.3 + 0.2j)
    u = 0.1 + 0.2j
    A = rk.tabulated_fused_k("-", u, bp)
    C = rk.fused_k_closed_p3("-", u, bp, ETA)
    assert abs(A["K11"] - (-0.052223629219237136 + 0.038251501590004545j)) < 1e-13
    assert abs(A["K22"] - (0.40323399193158405 + 0.06182776658866458j)) < 1e-13
    assert abs(C["K11"] - (-0.18306997824649854 - 0.12555652771319256j)) < 1e-13
    assert abs(C["K22"] - (0.8321023397878144 - 0.10389581635730069j)) < 1e-13
    assert abs(A["K12"] - 0.25 * np.exp(3 * (0.5 - 0.3j)) * np.sinh(0.6 + 1.2j)) < 1e-14


def test_fused_k_plus_norm_pole():
    # f^(1)(u) vanishes where ρ(2u) = 0, i.e. u = ±η/2
    with pytest.raises(rk.FusionPoleError):
        rk.fused_k_plus_norm(1, ETA / 2, ETA)


def test_fused_block_triangular(bp):
    K = rk.fused_k_minus(1.5, 0.2 + 0.1j, bp, ETA).data
    B = rk.adapted_basis(3)
    M = B.T @ K @ B
    assert np.abs(M[:2, 2:]).max() < 1e-13 * np.abs(M).max()
    assert np.abs(M[2:, :2]).max() > 1e-3 * np.abs(M).max()


def test_mu_norm_p3():
    u = 0.21 - 0.1j
    assert abs(rk.mu_norm(u, 3, ETA) - 0.25 * np.sinh(6 * u)) < 1e-13
