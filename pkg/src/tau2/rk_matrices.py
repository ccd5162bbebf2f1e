"""Six-vertex R-matrix, symmetrizers, boundary K-matrices and their fusion."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, fields
from functools import lru_cache

import numpy as np

from .tensorkit import OperatorMatrix, embed, identity, kron

SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]])


class FusionPoleError(ZeroDivisionError):
    """The normalization of a fused K⁺-matrix vanishes at the requested point."""


def _eta(x) -> complex:
    return complex(getattr(x, "eta", x))


@dataclass(frozen=True)
class BoundaryParams:
    alpha_minus: complex
    beta_minus: complex
    theta_minus: complex
    alpha_plus: complex
    beta_plus: complex
    theta_plus: complex

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, complex(getattr(self, f.name)))

    def as_dict(self) -> dict[str, complex]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @property
    def minus(self) -> tuple[complex, complex, complex]:
        return self.alpha_minus, self.beta_minus, self.theta_minus

    @property
    def plus_mapped(self) -> tuple[complex, complex, complex]:
        """(α₋, β₋, θ₋) → (−α₊, −β₊, θ₊) substitution used for K⁺."""
        return -self.alpha_plus, -self.beta_plus, self.theta_plus

    def is_generic(self, tol: float = 1e-6) -> bool:
        vals = [np.sinh(self.alpha_minus), np.cosh(self.beta_minus),
                np.sinh(self.alpha_plus), np.cosh(self.beta_plus),
                np.cosh(self.alpha_minus), np.sinh(self.beta_minus),
                np.cosh(self.alpha_plus), np.sinh(self.beta_plus)]
        return all(abs(v) > tol for v in vals)


def gen_boundary_params(seed: int | np.random.Generator) -> BoundaryParams:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    while True:
        z = rng.uniform(-0.8, 0.8, 6) + 1j * rng.uniform(-0.8, 0.8, 6)
        bp = BoundaryParams(*z)
        if bp.is_generic(0.1):
            return bp


def r_matrix(u: complex, eta) -> OperatorMatrix:
    eta = _eta(eta)
    a, b, c = np.sinh(u + eta), np.sinh(u), np.sinh(eta)
    R = np.array([[a, 0, 0, 0], [0, b, c, 0], [0, c, b, 0], [0, 0, 0, a]])
    return OperatorMatrix(R, (2, 2))


@lru_cache(maxsize=None)
def _permutation(perm: tuple[int, ...]) -> np.ndarray:
    m = len(perm)
    P = np.zeros((2**m, 2**m))
    for idx in itertools.product((0, 1), repeat=m):
        out = [0] * m
        for i, bit in enumerate(idx):
            out[perm[i]] = bit
        P[int("".join(map(str, out)), 2), int("".join(map(str, idx)), 2)] = 1.0
    return P


def permutation_operator(perm) -> OperatorMatrix:
    """Operator on (C²)^⊗m moving tensor factor i to position perm[i]."""
    perm = tuple(perm)
    return OperatorMatrix(_permutation(perm), (2,) * len(perm))


@lru_cache(maxsize=None)
def _projector_sym(m: int) -> np.ndarray:
    total = sum(_permutation(s) for s in itertools.permutations(range(m)))
    return total / math.factorial(m)


def projector_sym(m: int) -> OperatorMatrix:
    if m < 1:
        raise ValueError("m must be ≥ 1")
    return OperatorMatrix(_projector_sym(m), (2,) * m)


def projector_antisym2() -> OperatorMatrix:
    return identity((2, 2)) - projector_sym(2)


@lru_cache(maxsize=None)
def sym_basis(m: int) -> np.ndarray:
    """Orthonormal symmetric states of (C²)^⊗m; column k has k down spins."""
    cols = []
    for k in range(m + 1):
        v = np.zeros(2**m)
        for idx in itertools.product((0, 1), repeat=m):
            if sum(idx) == k:
                v[int("".join(map(str, idx)), 2)] = 1.0
        cols.append(v / np.linalg.norm(v))
    return np.array(cols).T


def adapted_basis(m: int) -> np.ndarray:
    """Symmetric basis reordered as (all up, all down, remaining by spin-z)."""
    B = sym_basis(m)
    return B[:, [0, m] + list(range(1, m))]


def _k_matrix(u, alpha, beta, theta, diag_weight: float = 2.0) -> np.ndarray:
    s = np.sinh(alpha) * np.cosh(beta)
    c = np.cosh(alpha) * np.sinh(beta)
    sh2 = np.sinh(2 * u)
    return np.array([
        [diag_weight * (s * np.cosh(u) + c * np.sinh(u)), np.exp(theta) * sh2],
        [np.exp(-theta) * sh2, diag_weight * (s * np.cosh(u) - c * np.sinh(u))],
    ])


def k_minus(u: complex, bp: BoundaryParams) -> OperatorMatrix:
    return OperatorMatrix(_k_matrix(u, *bp.minus))


def k_plus(u: complex, bp: BoundaryParams, eta) -> OperatorMatrix:
    return OperatorMatrix(_k_matrix(-u - _eta(eta), *bp.plus_mapped))


def _fused_k_raw(j: float, u: complex, params, eta: complex, diag_weight: float = 2.0) -> OperatorMatrix:
    m = int(round(2 * j))
    if m < 1 or abs(2 * j - m) > 1e-12:
        raise ValueError(f"2j must be a positive integer, got j = {j}")
    dims = (2,) * m
    M = identity(dims)
    for k in range(1, m + 1):
        for l in range(1, k):
            M = M @ embed(r_matrix(2 * u + (k + l - 2 * j - 1) * eta, eta), [l - 1, k - 1], dims)
        K = OperatorMatrix(_k_matrix(u + (k - j - 0.5) * eta, *params, diag_weight))
        M = M @ embed(K, [k - 1], dims)
    P = projector_sym(m)
    return P @ M @ P


def fused_k_minus(j: float, u: complex, bp: BoundaryParams, eta) -> OperatorMatrix:
    """Spin-j fused K⁻ on the full (C²)^⊗2j space, symmetrizer on both sides."""
    return _fused_k_raw(j, u, bp.minus, _eta(eta))


def rho(u: complex, eta: complex) -> complex:
    return np.sinh(u - eta) * np.sinh(u + eta)


def fused_k_plus_norm(j: float, u: complex, eta) -> complex:
    """f^{(j)}(u) = ∏_{l=1}^{2j-1} ∏_{k=1}^{l} [-ρ(2u + (l+k+1-2j)η)]."""
    eta = _eta(eta)
    m = int(round(2 * j))
    out = 1.0 + 0j
    for l in range(1, m):
        for k in range(1, l + 1):
            factor = -rho(2 * u + (l + k + 1 - 2 * j) * eta, eta)
            if abs(factor) < 1e-13:
                raise FusionPoleError(f"f^({j}) vanishes: factor (l={l}, k={k}) is zero at u={u}")
            out *= factor
    return out


def fused_k_plus(j: float, u: complex, bp: BoundaryParams, eta) -> OperatorMatrix:
    eta = _eta(eta)
    f = fused_k_plus_norm(j, u, eta)
    return _fused_k_raw(j, -u - eta, bp.plus_mapped, eta) / f


def fused_r(j: float, u: complex, eta) -> OperatorMatrix:
    """R between a spin-j fused space (factors 0..2j-1) and one C² (last factor)."""
    eta = _eta(eta)
    m = int(round(2 * j))
    dims = (2,) * (m + 1)
    M = identity(dims)
    for k in range(1, m + 1):
        M = M @ embed(r_matrix(u + (k - j - 0.5) * eta, eta), [k - 1, m], dims)
    P = kron(projector_sym(m), identity((2,)))
    return P @ M @ P


def mu_norm(u: complex, p: int, eta) -> complex:
    """μ^{(p/2)}(u) = ∏_{l=1}^{p-1} ∏_{k=1}^{l} sinh(2u + (l+k-p+1)η)."""
    eta = _eta(eta)
    out = 1.0 + 0j
    for l in range(1, p):
        for k in range(1, l + 1):
            out *= np.sinh(2 * u + (l + k - p + 1) * eta)
    return out


def det_q_K(sign: str, u: complex, bp: BoundaryParams, eta) -> complex:
    """Closed-form quantum determinants of K⁻ (sign '-') and K⁺ (sign '+')."""
    eta = _eta(eta)
    if sign == "-":
        a, b = bp.alpha_minus, bp.beta_minus
        return (-4 * np.sinh(2 * u - 2 * eta) * np.sinh(u + a) * np.sinh(u - a)
                * np.cosh(u + b) * np.cosh(u - b))
    if sign == "+":
        a, b = bp.alpha_plus, bp.beta_plus
        return (4 * np.sinh(2 * u + 2 * eta) * np.sinh(u + a) * np.sinh(u - a)
                * np.cosh(u + b) * np.cosh(u - b))
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def det_q_K_trace(sign: str, u: complex, bp: BoundaryParams, eta) -> complex:
    """Quantum determinant from tr₁₂{P⁻ K₁(u) R₁₂(2u∓η) K₂(u−η)}."""
    eta = _eta(eta)
    dims = (2, 2)
    if sign == "-":
        K1, K2, arg = k_minus(u, bp), k_minus(u - eta, bp), 2 * u - eta
    elif sign == "+":
        K1, K2, arg = k_plus(u, bp, eta), k_plus(u - eta, bp, eta), -2 * u - eta
    else:
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    M = projector_antisym2() @ embed(K1, [0], dims) @ r_matrix(arg, eta) @ embed(K2, [1], dims)
    return complex(np.trace(M.data))


def _sc(alpha, beta):
    return np.sinh(alpha) * np.cosh(beta), np.cosh(alpha) * np.sinh(beta)


def _top_block_p3(u, alpha, beta, theta) -> dict[str, complex]:
    s, c = _sc(alpha, beta)
    ch, sh = np.cosh(3 * u), np.sinh(3 * u)
    even = 2 * (s**3 + 3 * s * c * c) * ch + 1.5 * s * ch
    odd = 2 * (3 * s * s * c + c**3) * sh + 1.5 * c * sh
    return {
        "K11": even + odd,
        "K12": 0.25 * np.exp(3 * theta) * np.sinh(6 * u),
        "K21": 0.25 * np.exp(-3 * theta) * np.sinh(6 * u),
        "K22": even - odd,
    }


def fused_k_closed_p3(sign: str, u: complex, bp: BoundaryParams, eta=2j * np.pi / 3) -> dict:
    """Closed forms of the spin-3/2 fused K-matrix at p = 3.

    Returns the μ-free top block entries ``K11, K12, K21, K22`` and the lower
    2x2 block ``K33``.  For K⁻ the fusion product equals
    μ(u)·[[top, 0], [*, K33]] in :func:`adapted_basis`; for K⁺ the prefactor
    is μ(−u−η)/f^{(3/2)}(u).
    """
    eta = _eta(eta)
    if sign == "-":
        out = _top_block_p3(u, *bp.minus)
        pref = det_q_K("-", u - eta, bp, eta) / np.sinh(2 * u - eta)
        out["K33"] = pref * SIGMA_Z @ k_minus(u, bp).data @ SIGMA_Z
    elif sign == "+":
        out = _top_block_p3(-u - eta, *bp.plus_mapped)
        pref = -det_q_K("+", u - eta, bp, eta) / np.sinh(2 * u)
        out["K33"] = pref * SIGMA_Z @ k_plus(u, bp, eta).data @ SIGMA_Z
    else:
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    return out


def fused_k_top_weighted(sign: str, u: complex, bp: BoundaryParams, eta,
                         diag_weight: float = 2.0, p: int = 3) -> np.ndarray:
    """μ-normalized top block of the spin-p/2 fusion product, K diagonal weighted by ``diag_weight``."""
    eta = _eta(eta)
    if sign == "-":
        v, params = u, bp.minus
    elif sign == "+":
        v, params = -u - eta, bp.plus_mapped
    else:
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    K = _fused_k_raw(p / 2, v, params, eta, diag_weight)
    return top_block(K.data, p) / mu_norm(v, p, eta)


def tabulated_fused_k(sign: str, u: complex, bp: BoundaryParams) -> dict[str, complex]:
    """Top-block entries exactly as tabulated for p = 3 in the literature form.

    These are the fusion product for a K-matrix whose diagonal entries lack
    the factor 2 (see :func:`fused_k_top_weighted`); for the K-matrices used
    by the model the diagonal entries differ, and :func:`fused_k_closed_p3`
    holds instead.
    """
    ch, sh = np.cosh(3 * u), np.sinh(3 * u)
    if sign == "-":
        s, c = _sc(bp.alpha_minus, bp.beta_minus)
        th = bp.theta_minus
        k11 = 0.25 * (s**3 * ch + 3 * s**2 * c * sh + 3 * s * c**2 * ch + c**3 * sh + 3 * s * ch + 3 * c * sh)
        k22 = 0.25 * (s**3 * ch - 3 * s**2 * c * sh + 3 * s * c**2 * ch - c**3 * sh + 3 * s * ch - 3 * c * sh)
        k12 = 0.25 * np.exp(3 * th) * np.sinh(6 * u)
        k21 = 0.25 * np.exp(-3 * th) * np.sinh(6 * u)
    elif sign == "+":
        s, c = _sc(bp.alpha_plus, bp.beta_plus)
        th = bp.theta_plus
        k11 = 0.25 * (-s**3 * ch + 3 * s**2 * c * sh - 3 * s * c**2 * ch + c**3 * sh - 3 * s * ch + 3 * c * sh)
        k22 = -0.25 * (s**3 * ch + 3 * s**2 * c * sh + 3 * s * c**2 * ch + c**3 * sh + 3 * s * ch + 3 * c * sh)
        k12 = -0.25 * np.exp(3 * th) * np.sinh(6 * u)
        k21 = -0.25 * np.exp(-3 * th) * np.sinh(6 * u)
    else:
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    return {"K11": k11, "K12": k12, "K21": k21, "K22": k22}


def fused_k_closed_general(u: complex, bp: BoundaryParams, p: int) -> dict[str, complex]:
    """Experimental: general-p binomial closed forms of the K⁻ top block, taken literally.

    Known not to reproduce the fusion product at p = 3; use only for comparison.
    """
    s, c = _sc(bp.alpha_minus, bp.beta_minus)
    ch, sh = np.cosh(p * u), np.sinh(p * u)
    even = sum(math.comb(p, 2 * l) * s ** (p - 2 * l) * c ** (2 * l) for l in range(p // 2 + 1)) * ch
    odd = sum(math.comb(p, 2 * l + 1) * c ** (p - 2 * l - 1) * s ** (2 * l + 1) for l in range(p // 2 + 1)) * sh
    th = bp.theta_minus
    return {
        "K11": even + odd + p * (s * ch + c * sh),
        "K22": even - odd + p * (s * ch - c * sh),
        "K12": 0.5 ** (p - 1) * np.exp(p * th) * np.sinh(2 * p * u),
        "K21": 0.5 ** (p - 1) * np.exp(-p * th) * np.sinh(2 * p * u),
    }


def top_block(op, m: int) -> np.ndarray:
    """Upper-left 2x2 block of a spin-m/2 fused object in the adapted basis."""
    B = adapted_basis(m)
    return (B.T @ np.asarray(op) @ B)[:2, :2]
