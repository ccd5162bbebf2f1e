import numpy as np
import pytest

from tau2 import ModelConfig
from tau2 import scalar_functions as sf
from tau2 import transfer as tr
from tau2.tensorkit import rel_residual, scalar_part

U, V = 0.31 + 0.17j, -0.12 + 0.43j


@pytest.mark.parametrize("N", [1, 2, 3])
def test_commutativity(N):
    cfg = ModelConfig.random(3, 3, N)
    t, tv = tr.transfer_matrix(cfg, U).data, tr.transfer_matrix(cfg, V).data
    assert rel_residual(t @ tv, tv @ t) < 1e-12


def test_crossing_and_periodicity(cfg2):
    t = tr.transfer_matrix(cfg2, U)
    assert rel_residual(tr.transfer_matrix(cfg2, -U - cfg2.eta), t) < 1e-12
    assert rel_residual(tr.transfer_matrix(cfg2, U + 1j * np.pi), t) < 1e-12


def test_special_values_frozen(cfg1):
    # closed-form products; cross-checked against the matrix t(0), t(iπ/2)
    t0, t1 = tr.special_values(cfg1)
    assert abs(t0 - (1.0250711073454961 + 1.93539540145118j)) < 1e-12
    assert abs(t1 - (-1.1007504331702365 - 0.13873134659825914j)) < 1e-12
    assert rel_residual(tr.transfer_matrix(cfg1, 0.0), t0 * np.eye(3)) < 1e-12


def test_trace_frozen(cfg1):
    assert abs(np.trace(tr.transfer_matrix(cfg1, 0.1 + 0.2j).data) - (6.950430328653758 + 1.122444727640635j)) < 1e-11


def test_asymptotics(cfg2):
    coeffs, held = tr.transfer_laurent_fit(cfg2)
    tp, tm = tr.transfer_asymptotics(cfg2)
    assert held < 1e-10
    c, dev = scalar_part(coeffs[-1])
    assert dev < 1e-10 and abs(c - tp) < 1e-10 * abs(tp)
    assert abs(scalar_part(coeffs[0])[0] - tm) < 1e-10 * abs(tm)


@pytest.mark.parametrize("hat", [False, True])
def test_yang_baxter(cfg2, hat):
    assert tr.yang_baxter_residual(cfg2, U, V, hat=hat) < 1e-13


def test_fused_yang_baxter(cfg1):
    assert tr.fused_yang_baxter_residual(cfg1, U, V) < 1e-13


def test_quantum_determinants(cfg2):
    assert abs(tr.det_q_T_trace(cfg2, U) - tr.det_q_T(cfg2, U)) < 1e-12 * abs(tr.det_q_T(cfg2, U))
    assert abs(tr.det_q_T_hat_trace(cfg2, U) - tr.det_q_T_hat(cfg2, U)) < 1e-12 * abs(tr.det_q_T_hat(cfg2, U))
    assert abs(tr.delta_from_determinants(cfg2, U) - sf.delta(U, cfg2)) < 1e-12 * abs(sf.delta(U, cfg2))


def test_low_fused_transfer(cfg1):
    assert np.all(tr.fused_transfer(-0.5, cfg1, U).data == 0)
    assert rel_residual(tr.fused_transfer(0, cfg1, U), np.eye(3)) == 0
    with pytest.raises(ValueError):
        tr.fused_transfer(0.25, cfg1, U)


@pytest.mark.parametrize("j", [1, 1.5])
def test_fusion_hierarchy(cfg2, j):
    assert tr.check_fusion_hierarchy(cfg2, j, U) < 1e-11


def test_truncation(cfg1, cfg2):
    for cfg in (cfg1, cfg2):
        assert tr.check_truncation(cfg, U) < 1e-11
        assert abs(tr.truncation_ratio(cfg, V) - 1) < 1e-11
