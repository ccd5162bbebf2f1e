"""Scalar functions of the spectral parameter.

Average values of the monodromy entries, the functions a(u), d(u) and
δ(u) = a(u) d(u-η), the truncation coefficients Ã(u), D̃(u), the inhomogeneous
function F(u) and the constant c of the T-Q relation.
"""

from __future__ import annotations

import numpy as np

from .rk_matrices import (_fused_k_raw, adapted_basis, fused_k_closed_p3, mu_norm)
from .tensorkit import LaurentCurve, LaurentShapeError, fit_laurent_coeffs, sample_points
from .weyl_model import ModelConfig, ModelConstants, SiteParams, is_chiral_potts

__all__ = [
    "ModelConstants", "PoleError", "DegenerateError",
    "average_L", "average_L_hat", "average_monodromy", "average_monodromy_hat",
    "explicit_averages", "a_func", "d_func", "A_bar", "delta", "fused_k_top",
    "tilde_AD", "bar_AD", "F_func", "F_coeffs", "c_constant", "tq_prefactor",
    "constraint_bracket", "m_constraint", "is_chiral_potts",
]


class PoleError(ZeroDivisionError):
    pass


class DegenerateError(ArithmeticError):
    pass


def average_L(n: int, u: complex, cfg: ModelConfig) -> np.ndarray:
    s = cfg.sites[n - 1]
    p, e = cfg.p, np.exp(cfg.p * u)
    return np.array([
        [e * s.d_plus**p + s.d_minus**p / e, s.g_plus**p + s.g_minus**p],
        [s.h_plus**p + s.h_minus**p, e * s.f_plus**p + s.f_minus**p / e],
    ])


def average_L_hat(n: int, u: complex, cfg: ModelConfig) -> np.ndarray:
    s = cfg.sites[n - 1]
    p, e = cfg.p, np.exp(cfg.p * u)
    return np.array([
        [e * s.f_minus**p + s.f_plus**p / e, -s.g_plus**p - s.g_minus**p],
        [-s.h_plus**p - s.h_minus**p, e * s.d_minus**p + s.d_plus**p / e],
    ])


def average_monodromy(u: complex, cfg: ModelConfig) -> np.ndarray:
    """𝒯(u) = ℒ_N(u)···ℒ_1(u)."""
    M = np.eye(2, dtype=complex)
    for n in range(1, cfg.N + 1):
        M = average_L(n, u, cfg) @ M
    return M


def average_monodromy_hat(u: complex, cfg: ModelConfig) -> np.ndarray:
    """𝒯̂(u) = ℒ̂_1(u)···ℒ̂_N(u)."""
    M = np.eye(2, dtype=complex)
    for n in range(1, cfg.N + 1):
        M = M @ average_L_hat(n, u, cfg)
    return M


def explicit_averages(u: complex, cfg: ModelConfig) -> tuple[np.ndarray, np.ndarray]:
    """Hand-expanded average values for one or two sites (reference formulas)."""
    p = cfg.p
    e = np.exp(p * u)
    P = lambda x: x**p
    if cfg.N == 1:
        (s,) = cfg.sites
        A = e * P(s.d_plus) + P(s.d_minus) / e
        D = e * P(s.f_plus) + P(s.f_minus) / e
        B = P(s.g_plus) + P(s.g_minus)
        C = P(s.h_plus) + P(s.h_minus)
        Ah = e * P(s.f_minus) + P(s.f_plus) / e
        Dh = e * P(s.d_minus) + P(s.d_plus) / e
        return np.array([[A, B], [C, D]]), np.array([[Ah, -B], [-C, Dh]])
    if cfg.N == 2:
        s1, s2 = cfg.sites
        g1, g2 = P(s1.g_plus) + P(s1.g_minus), P(s2.g_plus) + P(s2.g_minus)
        h1, h2 = P(s1.h_plus) + P(s1.h_minus), P(s2.h_plus) + P(s2.h_minus)
        A = (e**2 * P(s1.d_plus * s2.d_plus) + P(s1.d_minus * s2.d_minus) / e**2
             + P(s1.d_minus * s2.d_plus) + P(s1.d_plus * s2.d_minus) + g2 * h1)
        D = (e**2 * P(s1.f_plus * s2.f_plus) + P(s1.f_minus * s2.f_minus) / e**2
             + P(s1.f_minus * s2.f_plus) + P(s1.f_plus * s2.f_minus) + g1 * h2)
        B = (e * (g1 * P(s2.d_plus) + g2 * P(s1.f_plus))
             + (g1 * P(s2.d_minus) + g2 * P(s1.f_minus)) / e)
        C = (e * (h1 * P(s2.f_plus) + h2 * P(s1.d_plus))
             + (h1 * P(s2.f_minus) + h2 * P(s1.d_minus)) / e)
        Ah = (e**2 * P(s1.f_minus * s2.f_minus) + P(s1.f_plus * s2.f_plus) / e**2
              + P(s1.f_minus * s2.f_plus) + P(s1.f_plus * s2.f_minus) + g1 * h2)
        Dh = (e**2 * P(s1.d_minus * s2.d_minus) + P(s1.d_plus * s2.d_plus) / e**2
              + P(s1.d_minus * s2.d_plus) + P(s1.d_plus * s2.d_minus) + g2 * h1)
        Bh = -(e * (g1 * P(s2.d_minus) + g2 * P(s1.f_minus))
               + (g1 * P(s2.d_plus) + g2 * P(s1.f_plus)) / e)
        Ch = -(e * (h1 * P(s2.f_minus) + h2 * P(s1.d_minus))
               + (h1 * P(s2.f_plus) + h2 * P(s1.d_plus)) / e)
        return np.array([[A, B], [C, D]]), np.array([[Ah, Bh], [Ch, Dh]])
    raise ValueError("explicit averages are tabulated for N = 1, 2 only")


def A_bar(u: complex, cfg: ModelConfig) -> complex:
    k = cfg.constants
    eta = cfg.eta
    out = np.exp(-cfg.N * eta) * k.G_minus * k.H_plus
    for s in cfg.sites:
        gh = s.g_minus * s.h_plus
        out *= (np.exp(u) - np.exp(-u + 2 * eta) * s.d_minus * s.f_minus / gh)
        out *= (np.exp(-u) * s.d_plus * s.f_plus / gh - np.exp(u))
    return out


def a_func(u: complex, cfg: ModelConfig) -> complex:
    eta, b = cfg.eta, cfg.boundary
    den = np.sinh(2 * u + eta)
    if abs(den) < 1e-12:
        raise PoleError(f"a(u) has a pole at u = {u} (sinh(2u+η) = 0)")
    return (-4 * np.sinh(2 * u + 2 * eta) / den
            * np.sinh(u - b.alpha_minus) * np.sinh(u - b.alpha_plus)
            * np.cosh(u - b.beta_minus) * np.cosh(u - b.beta_plus) * A_bar(u, cfg))


def d_func(u: complex, cfg: ModelConfig) -> complex:
    return a_func(-u - cfg.eta, cfg)


def delta(u: complex, cfg: ModelConfig) -> complex:
    """Quantum-determinant coefficient of the fusion hierarchy, δ(u) = a(u) d(u−η)."""
    return a_func(u, cfg) * d_func(u - cfg.eta, cfg)


def fused_k_top(sign: str, u: complex, cfg: ModelConfig) -> np.ndarray:
    """μ-free top 2x2 block 𝒦^{∓(p/2)} of the spin-p/2 fused K-matrix.

    Closed form at p = 3; for larger p taken from the fusion product.
    """
    eta, bp = cfg.eta, cfg.boundary
    if cfg.p == 3:
        e = fused_k_closed_p3(sign, u, bp, eta)
        return np.array([[e["K11"], e["K12"]], [e["K21"], e["K22"]]])
    B = adapted_basis(cfg.p)
    if sign == "-":
        K = _fused_k_raw(cfg.p / 2, u, bp.minus, eta)
        return (B.T @ K.data @ B)[:2, :2] / mu_norm(u, cfg.p, eta)
    if sign == "+":
        v = -u - eta
        K = _fused_k_raw(cfg.p / 2, v, bp.plus_mapped, eta)
        return (B.T @ K.data @ B)[:2, :2] / mu_norm(v, cfg.p, eta)
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def tilde_AD(u: complex, cfg: ModelConfig) -> tuple[complex, complex]:
    Kp = fused_k_top("+", u, cfg)
    Km = fused_k_top("-", u, cfg)
    T = average_monodromy(u, cfg)
    Th = average_monodromy_hat(u, cfg)
    KT = Kp @ T
    KTh = Km @ Th
    At = KT[0, 0] * KTh[0, 0] + KT[0, 1] * KTh[1, 0]
    Dt = KT[1, 0] * KTh[0, 1] + KT[1, 1] * KTh[1, 1]
    return complex(At), complex(Dt)


def bar_AD(u: complex, cfg: ModelConfig) -> tuple[complex, complex]:
    """Products ∏_{m=1}^{p} a(u−mη) and ∏_{m=1}^{p} d(u−mη)."""
    shifts = [u - m * cfg.eta for m in range(1, cfg.p + 1)]
    return (complex(np.prod([a_func(x, cfg) for x in shifts])),
            complex(np.prod([d_func(x, cfg) for x in shifts])))


def F_func(u: complex, cfg: ModelConfig) -> complex:
    At, Dt = tilde_AD(u, cfg)
    Ab, Db = bar_AD(u, cfg)
    return At + Dt - Ab - Db


def _safe_points(n, step, rng, cfg, xmax=0.2):
    """Sample points kept away from the poles of a(u), d(u) and their shifts."""
    pts = []
    while len(pts) < n:
        for u in sample_points(n, step, rng, xmax):
            shifts = [u + k * cfg.eta for k in range(-cfg.p - 1, cfg.p + 2)]
            if min(abs(np.sinh(2 * x + cfg.eta)) for x in shifts) > 1e-3:
                pts.append(u)
    return np.array(pts[:n])


def F_coeffs(cfg: ModelConfig, seed: int = 0, tol: float = 1e-9,
             return_diagnostics: bool = False, floor: float = 0.0):
    """F(u) as a Laurent curve in exp(2p u) with degrees −(N+2)..(N+2).

    A full step-1 fit is made first; every coefficient at an exponent that is
    not a multiple of 2p must vanish (relative to the largest coefficient, or
    to ``floor`` when F itself is nearly zero).
    """
    rng = np.random.default_rng(seed)
    p, N = cfg.p, cfg.N
    top = p * (2 * N + 4)
    n1 = 2 * top + 1
    us = _safe_points(n1 + 8, 1, rng, cfg)
    vals = np.array([F_func(u, cfg) for u in us])
    c1 = fit_laurent_coeffs(us, vals, 1, -top, top)
    full = LaurentCurve(1, -top, c1)
    fit_res = float(np.abs(full(us) - vals).max() / max(np.abs(vals).max(), floor, 1e-300))
    degrees = np.arange(-top, top + 1)
    off = np.abs(c1[degrees % (2 * p) != 0])
    scale = max(np.abs(c1).max(), floor)
    leak = float(off.max() / scale) if scale > 0 else 0.0
    curve = LaurentCurve(2 * p, -(N + 2), c1[degrees % (2 * p) == 0])
    if leak > tol or fit_res > tol:
        raise LaurentShapeError(
            f"F(u) is not a Laurent polynomial in exp(2pu): leakage {leak:.2e}, fit residual {fit_res:.2e}",
            max(leak, fit_res))
    if return_diagnostics:
        return curve, {"leakage": leak, "fit_residual": fit_res}
    return curve


def _brackets(cfg: ModelConfig, power: int) -> list[complex]:
    """The four terms of the asymptotic bracket with every constant raised to ``power``."""
    k, b = cfg.constants, cfg.boundary
    S = b.alpha_plus + b.beta_plus + b.alpha_minus + b.beta_minus
    dth = b.theta_plus - b.theta_minus
    sg = (-1) ** cfg.N
    return [
        np.exp(power * dth) * (k.F_plus * k.F_minus) ** power,
        np.exp(-power * dth) * (k.D_plus * k.D_minus) ** power,
        -sg * np.exp(-power * S) * (k.G_minus * k.H_plus) ** power,
        -sg * np.exp(power * S) * (k.G_plus * k.H_minus) ** power,
    ]


def constraint_bracket(cfg: ModelConfig, relative: bool = True) -> complex:
    """Left side of the degenerate-case constraint on D±, F±, G±, H± and the boundary."""
    t = _brackets(cfg, 1)
    eta = cfg.eta
    t[2] *= np.exp(-eta)
    t[3] *= np.exp(eta)
    val = sum(t)
    if relative:
        return val / max(abs(x) for x in t)
    return val


def m_constraint(cfg: ModelConfig, M: int) -> complex:
    """Asymptotic matching condition for a conventional Q of M roots (relative)."""
    t = _brackets(cfg, 1)
    x = np.exp((2 * cfg.N + 2 * M + 1) * cfg.eta)
    t[2] /= x
    t[3] *= x
    return sum(t) / max(abs(v) for v in t)


def tq_prefactor(cfg: ModelConfig) -> float:
    """2^{2N(1−p) − 4p + 2}."""
    return 2.0 ** (2 * cfg.N * (1 - cfg.p) - 4 * cfg.p + 2)


def c_constant(cfg: ModelConfig, rtol: float = 1e-12) -> complex:
    p = cfg.p
    left_terms = _brackets(cfg, p)
    left = sum(left_terms)
    if abs(left) <= rtol * max(abs(x) for x in left_terms):
        raise DegenerateError("degenerate: the p-th power bracket vanishes (constraint surface)")
    right = 0.25 * constraint_bracket(cfg, relative=False)
    return complex(right / (0.5 ** (2 * p) * left))


def c_equation_residual(cfg: ModelConfig, c: complex) -> float:
    p = cfg.p
    left = 0.5 ** (2 * p) * c * sum(_brackets(cfg, p))
    right = 0.25 * constraint_bracket(cfg, relative=False)
    return float(abs(left - right) / max(abs(left), abs(right)))
