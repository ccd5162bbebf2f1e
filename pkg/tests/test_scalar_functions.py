import numpy as np
import pytest

from tau2 import ModelConfig
from tau2 import scalar_functions as sf
from tau2 import transfer as tr
from tau2.tensorkit import rel_residual

U = 0.1 + 0.2j


@pytest.mark.parametrize("N", [1, 2])
def test_explicit_averages(N):
    cfg = ModelConfig.random(9, 3, N)
    A, Ah = sf.average_monodromy(U, cfg), sf.average_monodromy_hat(U, cfg)
    E, Eh = sf.explicit_averages(U, cfg)
    assert rel_residual(A, E) < 1e-13 and rel_residual(Ah, Eh) < 1e-13


def test_explicit_averages_limited_to_two_sites():
    with pytest.raises(ValueError):
        sf.explicit_averages(U, ModelConfig.random(1, 3, 3))


def test_pfold_product_is_scalar(cfg2):
    Q, eta = cfg2.dim, cfg2.eta
    P = np.eye(Q, dtype=complex)
    for m in (1, 2, 3):
        P = P @ tr.monodromy(cfg2, U - m * eta).data.reshape(2, Q, 2, Q)[0, :, 1, :]
    assert rel_residual(P, sf.average_monodromy(U, cfg2)[0, 1] * np.eye(Q)) < 1e-12


def test_average_periodicity(cfg2):
    assert rel_residual(sf.average_monodromy(U + cfg2.eta, cfg2), sf.average_monodromy(U, cfg2)) < 1e-13


def test_delta_frozen(cfg1):
    assert abs(sf.delta(U, cfg1) - (-1.6464635959495846 + 1.0086758073632718j)) < 1e-12


def test_crossing_of_a_and_d(cfg1):
    assert abs(sf.d_func(U, cfg1) - sf.a_func(-U - cfg1.eta, cfg1)) < 1e-13 * abs(sf.d_func(U, cfg1))


def test_a_pole(cfg1):
    with pytest.raises(sf.PoleError):
        sf.a_func((1j * np.pi - cfg1.eta) / 2, cfg1)


def test_F_shape_and_crossing(cfg2, F2):
    curve, diag = sf.F_coeffs(cfg2, return_diagnostics=True)
    assert diag["leakage"] < 1e-10 and diag["fit_residual"] < 1e-10
    assert curve.step == 6 and curve.min_deg == -4
    u = 0.05 - 0.3j
    assert abs(sf.F_func(-u - cfg2.eta, cfg2) - sf.F_func(u, cfg2)) < 1e-11 * abs(sf.F_func(u, cfg2))


def test_F_coefficients_frozen(F1):
    # N = 1: F_{-3} = -F_{-1} = F_1 = ..., and F_0 = -2 F_{±2}
    ref = np.array([0.03795460398933162 + 0.07391448008855586j, 2.0846403611373283 + 1.5401497320427036j,
                    -0.03795460398932594 - 0.07391448008853613j, -4.169280722274676 - 3.0802994640853454j,
                    -0.03795460398933392 - 0.07391448008850807j, 2.08464036113734 + 1.5401497320426996j,
                    0.03795460398933363 + 0.07391448008855704j])
    assert np.max(np.abs(F1.coeffs - ref)) < 1e-10


def test_c_constant_frozen(cfg1):
    c = sf.c_constant(cfg1)
    assert abs(c - (4.840880552961979 + 12.708403184073061j)) < 1e-10
    assert sf.c_equation_residual(cfg1, c) < 1e-13


def test_prefactor():
    cfg = ModelConfig.random(0, 3, 2)
    assert sf.tq_prefactor(cfg) == 2.0 ** (-18)
