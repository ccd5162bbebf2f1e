import json

import numpy as np
import pytest

from tau2 import ConfigError, ModelConfig
from tau2.weyl_model import (det_q_L, gen_site_params, is_chiral_potts, l_hat_operator, l_operator,
                             weyl_generators)


def test_weyl_relations():
    X, Z = weyl_generators(3)
    q = np.exp(-2j * np.pi / 3)
    X, Z = X.data, Z.data
    assert np.allclose(X @ Z, q * Z @ X)
    assert np.allclose(np.linalg.matrix_power(X, 3), np.eye(3))
    assert np.allclose(np.linalg.matrix_power(Z, 3), np.eye(3))


@pytest.mark.parametrize("p", [1, 2, 4])
def test_bad_p(p):
    with pytest.raises(ConfigError, match="odd"):
        ModelConfig.random(0, p, 1)


def test_site_constraints_hold():
    s = gen_site_params(5)
    assert max(s.constraint_residuals()) < 1e-13


def test_json_roundtrip(cfg2):
    data = json.loads(json.dumps(cfg2.to_json_dict()))
    assert data["N"] == 2 and len(data["sites"]) == 2
    assert all(len(v) == 2 for v in data["boundary"].values())
    back = ModelConfig.from_json_dict(data)
    assert back.to_json_dict() == cfg2.to_json_dict()


def test_json_rejects_string_complex(cfg1):
    data = cfg1.to_json_dict()
    data["boundary"]["alpha_minus"] = "1+2j"
    with pytest.raises(ConfigError):
        ModelConfig.from_json_dict(data)


def test_constraint_violation_rejected(cfg1):
    data = cfg1.to_json_dict()
    data["sites"][0]["d_plus"][0] += 0.1
    with pytest.raises(ConfigError):
        ModelConfig.from_json_dict(data)


def test_quantum_determinant_via_inverse(cfg1):
    s = cfg1.sites[0]
    u = 0.3 - 0.2j
    prod = l_operator(s, 1, u, cfg1).data @ l_hat_operator(s, 1, -u, cfg1).data
    assert np.allclose(prod, det_q_L(s, u, cfg1.eta) * np.eye(6), rtol=0, atol=1e-12 * np.abs(prod).max())


def test_random_configs_are_not_chiral_potts(cfg2):
    assert not is_chiral_potts(cfg2)
