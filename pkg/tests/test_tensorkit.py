import numpy as np
import pytest

from tau2.tensorkit import (LaurentCurve, LaurentShapeError, OperatorMatrix, eig, embed, identity,
                            interpolate_laurent, kron, laurent_fit, partial_trace, permute_factors,
                            poly_from_roots, poly_roots, rel_residual, sample_points, scalar_part)


def test_operator_rejects_non_square():
    with pytest.raises(ValueError):
        OperatorMatrix(np.zeros((2, 3)))


def test_space_tag_mismatch():
    with pytest.raises(ValueError):
        OperatorMatrix(np.eye(4), (3, 2))
    a, b = identity((2, 2)), identity((4,))
    with pytest.raises(ValueError):
        a @ b


def test_kron_and_partial_trace(rng):
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    ab = kron(a, b)
    assert ab.dims == (2, 3)
    assert rel_residual(partial_trace(ab, [0]), np.trace(a) * b) < 1e-14
    assert rel_residual(partial_trace(ab, [1]), np.trace(b) * a) < 1e-14


def test_permute_and_embed(rng):
    a = rng.normal(size=(2, 2)) + 0j
    b = rng.normal(size=(3, 3)) + 0j
    ba = permute_factors(kron(a, b), [1, 0])
    assert rel_residual(ba, np.kron(b, a)) < 1e-15
    e = embed(a, [2], (3, 2, 2))
    assert rel_residual(e, np.kron(np.eye(6), a)) < 1e-15


def test_scalar_part():
    c, dev = scalar_part(3.5j * np.eye(4))
    assert c == 3.5j and dev == 0.0
    assert scalar_part(np.diag([1, 2]))[1] > 0.1


def test_eig_backward_error(rng):
    a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    res = eig(a)
    assert res.backward_error(a) < 1e-13
    assert not res.ill_conditioned


def test_laurent_roundtrip(rng):
    curve = LaurentCurve(2, -2, np.array([1 + 1j, 0.5, -2, 0.3j, 4]))
    us = sample_points(12, 2, rng)
    fitted, res = laurent_fit(list(zip(us, curve(us))), 2, -2, 2, holdout=3)
    assert res < 1e-12 and fitted.isclose(curve)


def test_laurent_fit_rejects_wrong_shape(rng):
    us = sample_points(12, 2, rng)
    with pytest.raises(LaurentShapeError):
        laurent_fit(list(zip(us, np.exp(6 * us))), 2, -2, 2, holdout=3)


def test_interpolate_matches_known_coefficients():
    coeffs = np.array([2.0, -1j, 0.5, 3.0])
    curve = LaurentCurve(3, -1, coeffs)
    got = interpolate_laurent(lambda u: curve(np.array([u]))[0], 3, -1, 2)
    assert np.max(np.abs(got - coeffs)) < 1e-13


def test_poly_roots_roundtrip():
    roots = np.array([1.0, -0.5 + 2j, 3j])
    c = poly_from_roots(roots, lead=0.25)
    got = np.sort_complex(poly_roots(c))
    assert np.max(np.abs(got - np.sort_complex(roots))) < 1e-12
    with pytest.raises(ValueError):
        poly_roots([1.0, 0.0])
