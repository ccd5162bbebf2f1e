import numpy as np
import pytest

from tau2 import ModelConfig
from tau2 import scalar_functions as sf
from tau2 import spectrum as sp
from tau2 import tq_solver as tq


@pytest.fixture(scope="module")
def sols2(cfg2, curves2, F2):
    return [tq.full_solve(c, cfg2, F=F2) for c in curves2]


def test_root_count(cfg1, cfg2):
    assert tq.n_roots(cfg1) == 8 and tq.n_roots(cfg2) == 10


def test_every_eigenvalue_solves(cfg2, sols2):
    for s in sols2:
        assert s.tq_residual < 1e-8
        assert len(s.roots) == 10
        assert s.bae_residuals.max() < 1e-6
        assert s.rebuild_residual < 1e-8
        assert s.reconstruction_residual < 1e-7
        # the fitted scale of the inhomogeneous term reproduces the prefactor
        assert abs(s.c_factor_fit - 1) < 1e-6


def test_forced_roots(sols2):
    # w = ±1 once each, w = ±1/2 twice each, for every eigenvalue
    for s in sols2:
        w = np.cosh(2 * s.roots + 2j * np.pi / 3)
        for target, mult in ((1, 1), (-1, 1), (0.5, 2), (-0.5, 2)):
            assert np.sum(np.abs(w - target) < 1e-6) == mult


def test_branch_swap_leaves_q_invariant(cfg2, sols2):
    s = sols2[0]
    eta = cfg2.eta
    roots = s.roots.copy()
    roots[0] = -roots[0] - eta
    us = np.array([0.1 + 0.3j, -0.2 + 1.1j])
    assert np.max(np.abs(tq.q_from_roots(roots, us, eta) - tq.q_from_roots(s.roots, us, eta))) < 1e-12 * np.max(
        np.abs(tq.q_from_roots(s.roots, us, eta)))


def test_perturbed_root_raises_bae(cfg2, sols2, F2):
    s = sols2[0]
    w = np.cosh(2 * s.roots + cfg2.eta)
    k = int(np.argmax(np.abs(w ** 2 - 1) * np.abs(w ** 2 - 0.25)))
    roots = s.roots.copy()
    roots[k] += 1e-3
    assert tq.bae_residuals(s, cfg2, F2, roots=roots)[k] > 1e-4


def test_corrupt_c_large_factor(cfg2, curves2, F2):
    res = [tq.solve_Q(c, cfg2, 2.0, F=F2).tq_residual for c in curves2]
    assert np.median(res) > 1e-4


def test_corrupt_c_small_factor_n1(cfg1, curves1, F1):
    res = [tq.solve_Q(c, cfg1, 1.001, F=F1).tq_residual for c in curves1]
    assert np.median(res) > 1e-4


def test_degenerate_constraints_generic(cfg1, cfg2):
    for cfg in (cfg1, cfg2):
        info = tq.degenerate_constraints(cfg)
        assert len(info["residuals"]) == cfg.N + 3
        assert min(info["residuals"]) > 1e-2


def test_degenerate_constraints_frozen(cfg1):
    ref = [2.285550825215386, 20.7096276608693, 0.6639058680438197, 41.419255321738326]
    assert np.allclose(tq.degenerate_constraints(cfg1)["residuals"], ref, rtol=1e-8)


def test_conventional_precondition(cfg1, curves1):
    r = tq.conventional_tq_verify(curves1[0], None, cfg1)
    assert r["status"] == "not in degenerate regime"


@pytest.fixture(scope="module")
def degenerate1():
    res = tq.search_degenerate(ModelConfig.random(7, 3, 1), starts=2, max_nfev=100)
    assert res.status == "found"
    return res.cfg


def test_degenerate_search_and_conventional_tq(degenerate1):
    info = tq.degenerate_constraints(degenerate1)
    assert max(info["residuals"]) < 1e-8
    assert info["m_candidates"]
    with pytest.raises(sf.DegenerateError):
        sf.c_constant(degenerate1)
    for c in sp.eigencurves(degenerate1):
        r = tq.conventional_tq_verify(c, None, degenerate1)
        assert r["status"] == "verified"
        assert r["tq_residual"] < 1e-6 and r["bae_max"] < 1e-6
        assert r["M"] % 3 in info["m_candidates"]
