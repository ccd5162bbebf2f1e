"""Cyclic Weyl-algebra representation, site parameters and L-operators."""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from functools import lru_cache
from typing import Sequence

import numpy as np

from .rk_matrices import BoundaryParams, gen_boundary_params
from .tensorkit import OperatorMatrix, identity, kron_all

SITE_FIELDS = ("d_plus", "d_minus", "f_plus", "f_minus", "g_plus", "g_minus", "h_plus", "h_minus")


class ConfigError(ValueError):
    pass


def check_p(p: int) -> int:
    if not isinstance(p, (int, np.integer)) or p < 3 or p % 2 == 0:
        raise ConfigError("p must be odd ≥ 3")
    return int(p)


@dataclass(frozen=True)
class SiteParams:
    d_plus: complex
    d_minus: complex
    f_plus: complex
    f_minus: complex
    g_plus: complex
    g_minus: complex
    h_plus: complex
    h_minus: complex

    def __post_init__(self):
        for f in fields(self):
            v = complex(getattr(self, f.name))
            if v == 0:
                raise ConfigError(f"site parameter {f.name} must be nonzero")
            object.__setattr__(self, f.name, v)

    def constraint_residuals(self) -> tuple[float, float]:
        """|g⁻h⁻ − f⁻d⁺| and |g⁺h⁺ − f⁺d⁻|, relative to the products."""
        r1 = abs(self.g_minus * self.h_minus - self.f_minus * self.d_plus)
        r2 = abs(self.g_plus * self.h_plus - self.f_plus * self.d_minus)
        return (r1 / abs(self.f_minus * self.d_plus), r2 / abs(self.f_plus * self.d_minus))

    def as_dict(self) -> dict[str, complex]:
        return {k: getattr(self, k) for k in SITE_FIELDS}


def _draw(rng: np.random.Generator) -> complex:
    while True:
        r = rng.uniform(0.5, 2.0)
        z = r * np.exp(1j * rng.uniform(0.0, 2 * np.pi))
        if abs(z) > 1e-8:
            return complex(z)


def site_from_free(d_plus, d_minus, f_plus, f_minus, g_plus, g_minus) -> SiteParams:
    """Complete a site by solving the two integrability constraints for h±."""
    return SiteParams(
        d_plus=d_plus, d_minus=d_minus, f_plus=f_plus, f_minus=f_minus,
        g_plus=g_plus, g_minus=g_minus,
        h_plus=f_plus * d_minus / g_plus,
        h_minus=f_minus * d_plus / g_minus,
    )


def gen_site_params(seed: int | np.random.Generator) -> SiteParams:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    d_plus, d_minus, f_plus, f_minus, g_plus, g_minus = (_draw(rng) for _ in range(6))
    return site_from_free(d_plus, d_minus, f_plus, f_minus, g_plus, g_minus)


@dataclass(frozen=True)
class ModelConstants:
    """Products over sites of each site parameter."""

    D_plus: complex
    D_minus: complex
    F_plus: complex
    F_minus: complex
    G_plus: complex
    G_minus: complex
    H_plus: complex
    H_minus: complex

    @classmethod
    def from_sites(cls, sites: Sequence[SiteParams]) -> "ModelConstants":
        prod = lambda name: complex(np.prod([getattr(s, name) for s in sites]))
        return cls(
            D_plus=prod("d_plus"), D_minus=prod("d_minus"),
            F_plus=prod("f_plus"), F_minus=prod("f_minus"),
            G_plus=prod("g_plus"), G_minus=prod("g_minus"),
            H_plus=prod("h_plus"), H_minus=prod("h_minus"),
        )


@dataclass(frozen=True)
class ModelConfig:
    p: int
    sites: tuple[SiteParams, ...]
    boundary: BoundaryParams
    seed: int | None = None
    constants: ModelConstants = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        check_p(self.p)
        object.__setattr__(self, "sites", tuple(self.sites))
        if not self.sites:
            raise ConfigError("need at least one site")
        if abs(self.q ** self.p - 1) > 1e-14:
            raise ConfigError("q is not a p-th root of unity")
        for n, s in enumerate(self.sites, 1):
            if max(s.constraint_residuals()) > 1e-12:
                raise ConfigError(f"site {n} violates g⁻h⁻ = f⁻d⁺ / g⁺h⁺ = f⁺d⁻")
        object.__setattr__(self, "constants", ModelConstants.from_sites(self.sites))

    @property
    def N(self) -> int:
        return len(self.sites)

    @property
    def eta(self) -> complex:
        return 2j * np.pi / self.p

    @property
    def q(self) -> complex:
        return np.exp(-self.eta)

    @property
    def quantum_dims(self) -> tuple[int, ...]:
        return (self.p,) * self.N

    @property
    def dim(self) -> int:
        return self.p ** self.N

    @classmethod
    def random(cls, seed: int, p: int = 3, N: int = 1) -> "ModelConfig":
        check_p(p)
        if N < 1:
            raise ConfigError("N must be positive")
        rng = np.random.default_rng(seed)
        sites = [gen_site_params(rng) for _ in range(N)]
        return cls(p=p, sites=sites, boundary=gen_boundary_params(rng), seed=seed)

    def replace(self, **changes) -> "ModelConfig":
        kw = dict(p=self.p, sites=self.sites, boundary=self.boundary, seed=self.seed)
        kw.update(changes)
        return ModelConfig(**kw)

    def to_json_dict(self) -> dict:
        pair = lambda z: [float(complex(z).real), float(complex(z).imag)]
        return {
            "p": self.p,
            "N": self.N,
            "sites": [{k: pair(v) for k, v in s.as_dict().items()} for s in self.sites],
            "boundary": {k: pair(v) for k, v in self.boundary.as_dict().items()},
            "seed": self.seed,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ModelConfig":
        def cplx(v):
            if not (isinstance(v, (list, tuple)) and len(v) == 2):
                raise ConfigError(f"complex numbers are [re, im] pairs, got {v!r}")
            return complex(float(v[0]), float(v[1]))

        try:
            p = int(data["p"])
            sites = [SiteParams(**{k: cplx(s[k]) for k in SITE_FIELDS}) for s in data["sites"]]
            boundary = BoundaryParams(**{k: cplx(v) for k, v in data["boundary"].items()})
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed config: {exc}") from exc
        if "N" in data and int(data["N"]) != len(sites):
            raise ConfigError(f"N = {data['N']} but {len(sites)} site blocks given")
        return cls(p=p, sites=sites, boundary=boundary, seed=data.get("seed"))


def weyl_generators(p: int) -> tuple[OperatorMatrix, OperatorMatrix]:
    """X = diag(q^m), Z|m> = |m+1> (indices mod p), q = exp(-2iπ/p)."""
    p = check_p(p)
    q = np.exp(-2j * np.pi / p)
    X = np.diag(q ** np.arange(p))
    Z = np.roll(np.eye(p), 1, axis=0)
    return OperatorMatrix(X), OperatorMatrix(Z)


@lru_cache(maxsize=None)
def _site_ops(p: int, N: int, n: int):
    X, Z = weyl_generators(p)
    X, Z = X.data, Z.data
    Xi = np.linalg.matrix_power(X, p - 1)
    Zi = np.linalg.matrix_power(Z, p - 1)
    out = []
    for op in (X, Xi, Z, Zi):
        mats = [np.eye(p)] * N
        mats[n - 1] = op
        out.append(kron_all(mats).data)
    return tuple(out)


def embed_site(op, n: int, cfg: ModelConfig) -> OperatorMatrix:
    if not 1 <= n <= cfg.N:
        raise IndexError(f"site {n} outside 1..{cfg.N}")
    mats = [identity([cfg.p])] * cfg.N
    mats[n - 1] = OperatorMatrix(np.asarray(op))
    return kron_all(mats)


def _with_aux(blocks, cfg: ModelConfig) -> OperatorMatrix:
    return OperatorMatrix(np.block(blocks), (2,) + cfg.quantum_dims)


def l_operator(s: SiteParams, n: int, u: complex, cfg: ModelConfig) -> OperatorMatrix:
    X, Xi, Z, Zi = _site_ops(cfg.p, cfg.N, n)
    e = np.exp(u)
    return _with_aux([
        [e * s.d_plus * X + s.d_minus * Xi / e, (s.g_plus * Xi + s.g_minus * X) @ Z],
        [(s.h_plus * Xi + s.h_minus * X) @ Zi, e * s.f_plus * Xi + s.f_minus * X / e],
    ], cfg)


def l_hat_operator(s: SiteParams, n: int, u: complex, cfg: ModelConfig) -> OperatorMatrix:
    X, Xi, Z, Zi = _site_ops(cfg.p, cfg.N, n)
    e = np.exp(-u - cfg.eta)
    return _with_aux([
        [e * s.f_plus * Xi + s.f_minus * X / e, -(s.g_plus * Xi + s.g_minus * X) @ Z],
        [-(s.h_plus * Xi + s.h_minus * X) @ Zi, e * s.d_plus * X + s.d_minus * Xi / e],
    ], cfg)


def det_q_L(s: SiteParams, u: complex, eta: complex) -> complex:
    return (np.exp(2 * u - eta) * s.d_plus * s.f_plus
            + np.exp(-2 * u + eta) * s.d_minus * s.f_minus
            - np.exp(eta) * s.g_plus * s.h_minus
            - np.exp(-eta) * s.g_minus * s.h_plus)


def det_q_L_hat(s: SiteParams, u: complex, eta: complex) -> complex:
    return (np.exp(-2 * u - eta) * s.d_plus * s.f_plus
            + np.exp(2 * u + eta) * s.d_minus * s.f_minus
            - np.exp(eta) * s.g_plus * s.h_minus
            - np.exp(-eta) * s.g_minus * s.h_plus)


def special_value_factor(s: SiteParams, eta: complex, sign: int) -> complex:
    """Per-site factor of t(0) (sign = -1) and t(iπ/2) (sign = +1)."""
    return (np.exp(-eta) * s.d_plus * s.f_plus + np.exp(eta) * s.d_minus * s.f_minus
            + sign * (np.exp(eta) * s.g_plus * s.h_minus + np.exp(-eta) * s.g_minus * s.h_plus))


def chiral_potts_ratio(cfg: ModelConfig) -> np.ndarray:
    """(g⁺ᵖ + g⁻ᵖ)/(h⁺ᵖ + h⁻ᵖ) per site; constant across sites on the chiral Potts locus."""
    p = cfg.p
    return np.array([(s.g_plus**p + s.g_minus**p) / (s.h_plus**p + s.h_minus**p) for s in cfg.sites])


def is_chiral_potts(cfg: ModelConfig, rtol: float = 1e-10) -> bool:
    r = chiral_potts_ratio(cfg)
    return bool(np.all(np.abs(r - r[0]) <= rtol * np.abs(r[0])))


__all__ = [
    "ConfigError", "SiteParams", "ModelConfig", "ModelConstants", "SITE_FIELDS",
    "weyl_generators", "embed_site", "gen_site_params", "site_from_free",
    "l_operator", "l_hat_operator", "det_q_L", "det_q_L_hat",
    "special_value_factor", "chiral_potts_ratio", "is_chiral_potts",
]
