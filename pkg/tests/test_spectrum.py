import numpy as np
import pytest

from tau2 import spectrum as sp
from tau2 import transfer as tr


def test_curve_count_and_shape(cfg1, curves1):
    assert len(curves1) == 3
    for c in curves1:
        assert len(c.curve.coeffs) == 2 * cfg1.N + 5
        assert c.fit_residual < 1e-10 and c.excess < 1e-10


def test_eigenvalues_frozen(curves1):
    got = sorted((complex(c(np.array([0.1 + 0.2j]))[0]) for c in curves1), key=lambda z: z.real)
    ref = [0.814197978560377 - 1.074340450382429j, 1.686475549339243 + 2.4428110238939627j,
           4.449756800754162 - 0.24602584587090087j]
    assert np.max(np.abs(np.array(got) - ref)) < 1e-10


def test_curves_sum_to_trace(cfg2, curves2):
    u = -0.2 + 0.7j
    total = sum(complex(c(np.array([u]))[0]) for c in curves2)
    trace = np.trace(tr.transfer_matrix(cfg2, u).data)
    assert abs(total - trace) < 1e-11 * abs(trace)


def test_functional_checks(cfg2, curves2):
    for c in curves2:
        assert max(sp.eigen_functional_checks(c, cfg2).values()) < 1e-10


@pytest.mark.parametrize("j", [1, 1.5])
def test_fused_determinant_matches_fused_transfer(cfg1, curves1, j):
    diag = sp.diagonalizer(cfg1, 0.13 + 0.41j, 0)
    u = 0.22 - 0.35j
    vals, leak = diag.diagonal(tr.fused_transfer(j, cfg1, u).data)
    ref = np.array([sp.fused_eigenvalue(c, j, cfg1, u) for c in curves1])
    assert leak < 1e-10
    assert np.max(np.abs(vals - ref)) < 1e-10 * np.max(np.abs(ref))


def test_fused_curve_numerator(cfg1, curves1):
    fc = sp.fused_eigencurve(curves1[0], 1, cfg1)
    assert fc.fit_residual < 1e-10
    u = 0.05 + 0.9j
    assert abs(fc(u) - sp.fused_eigenvalue(curves1[0], 1, cfg1, u)) < 1e-9 * abs(fc(u))
    assert sp.fused_eigencurve(curves1[0], 0.5, cfg1) is curves1[0]


def test_truncation_relation(cfg2, curves2):
    for c in curves2:
        assert sp.truncation_relation_residual(c, cfg2, 0.17 - 0.4j) < 1e-10
