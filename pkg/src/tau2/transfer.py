"""Monodromy matrices, the double-row transfer matrix and its fusion hierarchy."""

from __future__ import annotations

import numpy as np

from . import scalar_functions as sf
from .rk_matrices import (det_q_K, fused_k_minus, fused_k_plus, fused_r, k_minus, k_plus,
                          projector_antisym2, projector_sym, r_matrix)
from .tensorkit import (OperatorMatrix, embed, eval_laurent_coeffs, fit_laurent_coeffs, identity,
                        kron, partial_trace, rel_residual, sample_points, scalar_part)
from .weyl_model import (ModelConfig, det_q_L, det_q_L_hat, l_hat_operator, l_operator,
                         special_value_factor)

__all__ = [
    "NonScalarError", "monodromy", "monodromy_hat", "transfer_matrix", "transfer_asymptotics",
    "special_values", "fused_monodromy", "fused_monodromy_hat", "fused_transfer",
    "check_fusion_hierarchy", "check_truncation", "det_q_T", "det_q_T_hat",
    "det_q_T_trace", "det_q_T_hat_trace", "delta_from_determinants", "truncation_ratio",
    "transfer_laurent_fit", "yang_baxter_residual", "fused_yang_baxter_residual",
]


class NonScalarError(ArithmeticError):
    """An object that must be central came out with a non-scalar part."""


def monodromy(cfg: ModelConfig, u: complex) -> OperatorMatrix:
    """T(u) = L_N(u)···L_1(u) on auxiliary ⊗ quantum."""
    M = identity((2,) + cfg.quantum_dims)
    for n, s in enumerate(cfg.sites, 1):
        M = l_operator(s, n, u, cfg) @ M
    return M


def monodromy_hat(cfg: ModelConfig, u: complex) -> OperatorMatrix:
    """T̂(u) = L̂_1(u)···L̂_N(u)."""
    M = identity((2,) + cfg.quantum_dims)
    for n, s in enumerate(cfg.sites, 1):
        M = M @ l_hat_operator(s, n, u, cfg)
    return M


def _aux_kron(K: OperatorMatrix, cfg: ModelConfig) -> OperatorMatrix:
    return kron(K, identity(cfg.quantum_dims))


def _trace_aux(M: OperatorMatrix, m: int, cfg: ModelConfig) -> OperatorMatrix:
    out = partial_trace(M, list(range(m)))
    return OperatorMatrix(out.data, cfg.quantum_dims)


def transfer_matrix(cfg: ModelConfig, u: complex) -> OperatorMatrix:
    """t(u) = tr₀{K⁺(u) T(u) K⁻(u) T̂(u)}."""
    bp = cfg.boundary
    M = (_aux_kron(k_plus(u, bp, cfg.eta), cfg) @ monodromy(cfg, u)
         @ _aux_kron(k_minus(u, bp), cfg) @ monodromy_hat(cfg, u))
    return _trace_aux(M, 1, cfg)


def transfer_asymptotics(cfg: ModelConfig) -> tuple[complex, complex]:
    """Leading coefficients (t_{N+2}, t_{−(N+2)}) of t(u) in powers of exp(2u)."""
    k, b = cfg.constants, cfg.boundary
    dth = b.theta_plus - b.theta_minus
    core = np.exp(dth) * k.F_plus * k.F_minus + np.exp(-dth) * k.D_plus * k.D_minus
    e = np.exp((cfg.N + 2) * cfg.eta)
    return complex(-0.25 * e * core), complex(-0.25 / e * core)


def special_values(cfg: ModelConfig) -> tuple[complex, complex]:
    """Closed-form scalars of t(0) and t(iπ/2)."""
    b, eta = cfg.boundary, cfg.eta
    f0 = np.prod([special_value_factor(s, eta, -1) for s in cfg.sites])
    f1 = np.prod([special_value_factor(s, eta, +1) for s in cfg.sites])
    t0 = (-8 * np.sinh(b.alpha_minus) * np.cosh(b.beta_minus)
          * np.sinh(b.alpha_plus) * np.cosh(b.beta_plus) * np.cosh(eta) * f0)
    t1 = (-8 * np.cosh(b.alpha_minus) * np.sinh(b.beta_minus)
          * np.cosh(b.alpha_plus) * np.sinh(b.beta_plus) * np.cosh(eta) * f1)
    return complex(t0), complex(t1)


def _fused(j: float, cfg: ModelConfig, u: complex, mono) -> OperatorMatrix:
    m = int(round(2 * j))
    if m < 1 or abs(2 * j - m) > 1e-12:
        raise ValueError(f"2j must be a positive integer, got j = {j}")
    dims = (2,) * m + cfg.quantum_dims
    quantum = list(range(m, m + cfg.N))
    M = identity(dims)
    for k in range(m):
        M = M @ embed(mono(cfg, u + (k - j + 0.5) * cfg.eta), [k] + quantum, dims)
    P = _aux_kron(projector_sym(m), cfg)
    return P @ M @ P


def fused_monodromy(j: float, cfg: ModelConfig, u: complex) -> OperatorMatrix:
    """Spin-j monodromy P·T₁(u−(j−½)η)···T_{2j}(u+(j−½)η)·P."""
    return _fused(j, cfg, u, monodromy)


def fused_monodromy_hat(j: float, cfg: ModelConfig, u: complex) -> OperatorMatrix:
    return _fused(j, cfg, u, monodromy_hat)


def fused_transfer(j: float, cfg: ModelConfig, u: complex) -> OperatorMatrix:
    """t^{(j)}(u); t^{(0)} is the identity and t^{(−1/2)} vanishes."""
    m = int(round(2 * j))
    if abs(2 * j - m) > 1e-12 or m < -1:
        raise ValueError(f"2j must be an integer ≥ -1, got j = {j}")
    if m == -1:
        return OperatorMatrix(np.zeros((cfg.dim, cfg.dim), dtype=complex), cfg.quantum_dims)
    if m == 0:
        return identity(cfg.quantum_dims)
    if m == 1:
        return transfer_matrix(cfg, u)
    bp, eta = cfg.boundary, cfg.eta
    Kp = fused_k_plus(j, u, bp, eta)
    Km = fused_k_minus(j, u, bp, eta)
    M = (_aux_kron(Kp, cfg) @ fused_monodromy(j, cfg, u)
         @ _aux_kron(Km, cfg) @ fused_monodromy_hat(j, cfg, u))
    return _trace_aux(M, m, cfg)


def check_fusion_hierarchy(cfg: ModelConfig, j: float, u: complex) -> float:
    """Residual of t(u)·t^{(j−½)}(u−jη) = t^{(j)}(u−(j−½)η) + δ(u)·t^{(j−1)}(u−(j+½)η)."""
    eta = cfg.eta
    if int(round(2 * j)) == 1:
        return 0.0
    lhs = transfer_matrix(cfg, u) @ fused_transfer(j - 0.5, cfg, u - j * eta)
    rhs = (fused_transfer(j, cfg, u - (j - 0.5) * eta)
           + sf.delta(u, cfg) * fused_transfer(j - 1, cfg, u - (j + 0.5) * eta))
    return rel_residual(lhs, rhs)


def _truncation_parts(cfg: ModelConfig, u: complex):
    j = cfg.p / 2
    top = fused_transfer(j, cfg, u)
    At, Dt = sf.tilde_AD(u, cfg)
    lower = sf.delta(u - (cfg.p - 1) / 2 * cfg.eta, cfg) * fused_transfer(j - 1, cfg, u)
    return top, At + Dt, lower


def check_truncation(cfg: ModelConfig, u: complex) -> float:
    """Residual of t^{(p/2)}(u) = (Ã+D̃)(u)·id + δ(u−(p−1)η/2)·t^{((p−2)/2)}(u)."""
    top, scalar, lower = _truncation_parts(cfg, u)
    return rel_residual(top, scalar * np.eye(cfg.dim) + lower)


def truncation_ratio(cfg: ModelConfig, u: complex) -> complex:
    """Scalar r with t^{(p/2)} − δ·t^{((p−2)/2)} = r·(Ã+D̃)·id; exactly 1 when the identity is literal."""
    top, scalar, lower = _truncation_parts(cfg, u)
    c, dev = scalar_part(top - lower)
    if dev > 1e-6:
        raise NonScalarError(f"t^(p/2) − δ·t^((p−2)/2) is not scalar (deviation {dev:.2e})")
    return complex(c / scalar)


def det_q_T(cfg: ModelConfig, u: complex) -> complex:
    return complex(np.prod([det_q_L(s, u, cfg.eta) for s in cfg.sites]))


def det_q_T_hat(cfg: ModelConfig, u: complex) -> complex:
    return complex(np.prod([det_q_L_hat(s, u, cfg.eta) for s in cfg.sites]))


def _det_trace(cfg: ModelConfig, u: complex, mono) -> complex:
    dims = (2, 2) + cfg.quantum_dims
    quantum = list(range(2, 2 + cfg.N))
    M = (_aux_kron(projector_antisym2(), cfg)
         @ embed(mono(cfg, u), [0] + quantum, dims)
         @ embed(mono(cfg, u - cfg.eta), [1] + quantum, dims))
    c, dev = scalar_part(_trace_aux(M, 2, cfg))
    if dev > 1e-8:
        raise NonScalarError(f"quantum determinant is not central (deviation {dev:.2e})")
    return c


def det_q_T_trace(cfg: ModelConfig, u: complex) -> complex:
    """tr₁₂{P⁻ T₁(u) T₂(u−η)} as a scalar."""
    return _det_trace(cfg, u, monodromy)


def det_q_T_hat_trace(cfg: ModelConfig, u: complex) -> complex:
    return _det_trace(cfg, u, monodromy_hat)


def delta_from_determinants(cfg: ModelConfig, u: complex) -> complex:
    """δ(u) = −ν(u)·Det K⁺(u)·Det T(u)·Det K⁻(u)·Det T̂(u), ν = 1/(sinh(2u+η) sinh(2u−η))."""
    eta, bp = cfg.eta, cfg.boundary
    nu = 1.0 / (np.sinh(2 * u + eta) * np.sinh(2 * u - eta))
    return complex(-nu * det_q_K("+", u, bp, eta) * det_q_T(cfg, u)
                   * det_q_K("-", u, bp, eta) * det_q_T_hat(cfg, u))


def transfer_laurent_fit(cfg: ModelConfig, seed: int = 0, n_extra: int = 6,
                         matrix=None) -> tuple[np.ndarray, float]:
    """Entrywise fit of u ↦ t(u) in exp(2u), degrees −(N+2)..(N+2).

    Returns the coefficient matrices (index 0 is degree −(N+2)) and the
    largest relative error at held-out points.
    """
    matrix = matrix or (lambda u: transfer_matrix(cfg, u).data)
    rng = np.random.default_rng(seed)
    top = cfg.N + 2
    n = 2 * top + 1 + n_extra
    us = sample_points(n, 2, rng)
    held = sample_points(n_extra, 2, rng)
    vals = np.array([matrix(u) for u in us])
    coeffs = fit_laurent_coeffs(us, vals, 2, -top, top)
    pred = eval_laurent_coeffs(coeffs, held, 2, -top)
    err = max(rel_residual(pr, matrix(h)) for pr, h in zip(pred, held))
    return coeffs, err


def yang_baxter_residual(cfg: ModelConfig, u: complex, v: complex, hat: bool = False) -> float:
    """R₁₂(u−v) T₁(u) T₂(v) = T₂(v) T₁(u) R₁₂(u−v) on (C²)⊗(C²)⊗quantum."""
    mono = monodromy_hat if hat else monodromy
    dims = (2, 2) + cfg.quantum_dims
    quantum = list(range(2, 2 + cfg.N))
    R = _aux_kron(r_matrix(u - v, cfg.eta), cfg)
    T1 = embed(mono(cfg, u), [0] + quantum, dims)
    T2 = embed(mono(cfg, v), [1] + quantum, dims)
    return rel_residual(R @ T1 @ T2, T2 @ T1 @ R)


def fused_yang_baxter_residual(cfg: ModelConfig, u: complex, v: complex, j: float = 1) -> float:
    """R_{⟨a⟩b}(u−v) T^{(j)}_a(u) T_b(v) = T_b(v) T^{(j)}_a(u) R_{⟨a⟩b}(u−v)."""
    m = int(round(2 * j))
    dims = (2,) * (m + 1) + cfg.quantum_dims
    quantum = list(range(m + 1, m + 1 + cfg.N))
    R = _aux_kron(fused_r(j, u - v, cfg.eta), cfg)
    Tf = embed(fused_monodromy(j, cfg, u), list(range(m)) + quantum, dims)
    Tb = embed(monodromy(cfg, v), [m] + quantum, dims)
    return rel_residual(R @ Tf @ Tb, Tb @ Tf @ R)
