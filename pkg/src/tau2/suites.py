"""Verification suites and the machine-readable run report."""

from __future__ import annotations

import hashlib
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from . import rk_matrices as rk
from . import scalar_functions as sf
from . import spectrum as sp
from . import tq_solver as tq
from . import transfer as tr
from .tensorkit import (LaurentShapeError, embed, identity, interpolate_laurent, kron,
                        rel_residual, sample_points)
from .weyl_model import ModelConfig, det_q_L, l_hat_operator, l_operator

__all__ = ["Check", "RunReport", "LEVELS", "SUITES", "run_suite", "run_level", "config_digest",
           "thread_count"]


@dataclass(frozen=True)
class Check:
    """One verified identity.  ``relation`` is "<" (residual below tolerance) or ">"."""

    name: str
    anchor: str
    residual: float
    tolerance: float
    relation: str = "<"
    gating: bool = True
    note: str = ""

    @property
    def passed(self) -> bool:
        r = float(self.residual)
        if not math.isfinite(r):
            return False
        if self.relation == ">":
            return r > self.tolerance
        return r < self.tolerance

    def scaled(self, factor: float) -> "Check":
        if self.relation != "<" or factor == 1.0:
            return self
        return Check(self.name, self.anchor, self.residual, self.tolerance * factor,
                     self.relation, self.gating, self.note)

    def to_json(self) -> dict:
        return {
            "name": self.name, "anchor": self.anchor, "residual": _num(float(self.residual)),
            "tolerance": float(self.tolerance), "relation": self.relation, "gating": self.gating,
            "pass": self.passed, "note": self.note,
        }


def _num(x: float):
    return x if math.isfinite(x) else str(x)


def _pts(rng, n, xmax=0.4):
    return sample_points(n, 2, rng, xmax)


# algebra

def _site_embed(op, first, cfg, dims):
    return embed(op, [first] + list(range(2, 2 + cfg.N)), dims)


def algebra_suite(cfg: ModelConfig, seed: int = 0, n_points: int = 20) -> list[Check]:
    rng = np.random.default_rng(seed)
    eta, bp = cfg.eta, cfg.boundary
    us, vs = _pts(rng, n_points), _pts(rng, n_points)
    R = lambda x: rk.r_matrix(x, eta)
    d3, d2 = (2, 2, 2), (2, 2)
    dims = (2, 2) + cfg.quantum_dims
    Q = cfg.dim
    sy = np.kron(rk.SIGMA_Y, np.eye(Q))
    res = {k: 0.0 for k in ("qybe", "rll", "rll_hat", "rtt", "rtt_hat", "reflection",
                            "dual_reflection", "crossing", "inverse")}
    for u, v in zip(us, vs):
        R12, R13, R23 = embed(R(u - v), [0, 1], d3), embed(R(u), [0, 2], d3), embed(R(v), [1, 2], d3)
        res["qybe"] = max(res["qybe"], rel_residual(R12 @ R13 @ R23, R23 @ R13 @ R12))
        Rq = kron(R(u - v), identity(cfg.quantum_dims))
        for n, s in enumerate(cfg.sites, 1):
            for key, op in (("rll", l_operator), ("rll_hat", l_hat_operator)):
                L1 = _site_embed(op(s, n, u, cfg), 0, cfg, dims)
                L2 = _site_embed(op(s, n, v, cfg), 1, cfg, dims)
                res[key] = max(res[key], rel_residual(Rq @ L1 @ L2, L2 @ L1 @ Rq))
            L = l_operator(s, n, u, cfg).data
            Lh = l_hat_operator(s, n, -u - eta, cfg).data
            # transpose in the auxiliary space only
            Lht = Lh.reshape(2, Q, 2, Q).transpose(2, 1, 0, 3).reshape(2 * Q, 2 * Q)
            res["crossing"] = max(res["crossing"], rel_residual(L, sy @ Lht @ sy))
            inv = L @ l_hat_operator(s, n, -u, cfg).data
            res["inverse"] = max(res["inverse"], rel_residual(inv, det_q_L(s, u, eta) * np.eye(2 * Q)))
        res["rtt"] = max(res["rtt"], tr.yang_baxter_residual(cfg, u, v))
        res["rtt_hat"] = max(res["rtt_hat"], tr.yang_baxter_residual(cfg, u, v, hat=True))
        K1, K2 = embed(rk.k_minus(u, bp), [0], d2), embed(rk.k_minus(v, bp), [1], d2)
        res["reflection"] = max(res["reflection"], rel_residual(
            R(u - v) @ K1 @ R(u + v) @ K2, K2 @ R(u + v) @ K1 @ R(u - v)))
        P1, P2 = embed(rk.k_plus(u, bp, eta), [0], d2), embed(rk.k_plus(v, bp, eta), [1], d2)
        w = -u - v - 2 * eta
        res["dual_reflection"] = max(res["dual_reflection"], rel_residual(
            R(v - u) @ P1 @ R(w) @ P2, P2 @ R(w) @ P1 @ R(v - u)))
    anchors = {
        "qybe": "Yang-Baxter equation for the six-vertex R-matrix",
        "rll": "RLL relation for the cyclic L-operator",
        "rll_hat": "RLL relation for the reflected L-operator",
        "rtt": "RTT relation for the monodromy matrix",
        "rtt_hat": "RTT relation for the reflected monodromy matrix",
        "reflection": "reflection equation for K-",
        "dual_reflection": "dual reflection equation for K+",
        "crossing": "crossing relation between L and L-hat",
        "inverse": "inversion relation L(u) L-hat(-u) = Det_q L(u)",
    }
    return [Check(f"algebra.{k}", anchors[k], v, 1e-12) for k, v in res.items()]


# transfer matrix, determinants, averages

def transfer_suite(cfg: ModelConfig, seed: int = 0, n_points: int = 4) -> list[Check]:
    rng = np.random.default_rng(seed)
    eta = cfg.eta
    us, vs = _pts(rng, n_points), _pts(rng, n_points)
    comm = cross = per = 0.0
    for u, v in zip(us, vs):
        t, tv = tr.transfer_matrix(cfg, u).data, tr.transfer_matrix(cfg, v).data
        comm = max(comm, rel_residual(t @ tv, tv @ t))
        cross = max(cross, rel_residual(tr.transfer_matrix(cfg, -u - eta), t))
        per = max(per, rel_residual(tr.transfer_matrix(cfg, u + 1j * np.pi), t))
    t0, t1 = tr.special_values(cfg)
    eye = np.eye(cfg.dim)
    coeffs, held = tr.transfer_laurent_fit(cfg, seed)
    tp, tm = tr.transfer_asymptotics(cfg)
    return [
        Check("transfer.commutativity", "[t(u), t(v)] = 0", comm, 1e-10),
        Check("transfer.crossing", "t(-u-eta) = t(u)", cross, 1e-10),
        Check("transfer.periodicity", "t(u + i pi) = t(u)", per, 1e-10),
        Check("transfer.value_at_0", "special value t(0)", rel_residual(tr.transfer_matrix(cfg, 0.0), t0 * eye), 1e-10),
        Check("transfer.value_at_ipi2", "special value t(i pi/2)",
              rel_residual(tr.transfer_matrix(cfg, 0.5j * np.pi), t1 * eye), 1e-10),
        Check("transfer.asymptotic_plus", "leading coefficient of t(u), u -> +inf",
              rel_residual(coeffs[-1], tp * eye), 1e-9),
        Check("transfer.asymptotic_minus", "leading coefficient of t(u), u -> -inf",
              rel_residual(coeffs[0], tm * eye), 1e-9),
        Check("transfer.laurent_shape", "t(u) is a Laurent polynomial in exp(2u) of degree N+2",
              held, 1e-9),
    ]


def determinant_suite(cfg: ModelConfig, seed: int = 0, n_points: int = 4) -> list[Check]:
    rng = np.random.default_rng(seed)
    rel = lambda a, b: abs(a - b) / max(abs(a), abs(b))
    res = {"T": 0.0, "T_hat": 0.0, "K_minus": 0.0, "K_plus": 0.0, "delta": 0.0}
    for u in _pts(rng, n_points):
        res["T"] = max(res["T"], rel(tr.det_q_T_trace(cfg, u), tr.det_q_T(cfg, u)))
        res["T_hat"] = max(res["T_hat"], rel(tr.det_q_T_hat_trace(cfg, u), tr.det_q_T_hat(cfg, u)))
        for sign, key in (("-", "K_minus"), ("+", "K_plus")):
            res[key] = max(res[key], rel(rk.det_q_K_trace(sign, u, cfg.boundary, cfg.eta),
                                         rk.det_q_K(sign, u, cfg.boundary, cfg.eta)))
        res["delta"] = max(res["delta"], rel(tr.delta_from_determinants(cfg, u), sf.delta(u, cfg)))
    return [
        Check("determinant.T", "Det_q T: trace form vs product of site determinants", res["T"], 1e-11),
        Check("determinant.T_hat", "Det_q T-hat: trace form vs product form", res["T_hat"], 1e-11),
        Check("determinant.K_minus", "Det_q K-: trace form vs closed form", res["K_minus"], 1e-11),
        Check("determinant.K_plus", "Det_q K+: trace form vs closed form", res["K_plus"], 1e-11),
        Check("determinant.delta", "delta(u) from determinants equals a(u) d(u-eta)", res["delta"], 1e-10),
    ]


_ENTRIES = ("A", "B", "C", "D")


def _entry(M, i, j, Q):
    return np.asarray(M).reshape(2, Q, 2, Q)[i, :, j, :]


def average_suite(cfg: ModelConfig, seed: int = 0, n_points: int = 2) -> list[Check]:
    rng = np.random.default_rng(seed)
    eta, p, Q = cfg.eta, cfg.p, cfg.dim
    us = _pts(rng, n_points)
    prod = {f"{e}{h}": 0.0 for h in ("", "_hat") for e in _ENTRIES}
    explicit = per = 0.0
    for u in us:
        avg = {"": sf.average_monodromy(u, cfg), "_hat": sf.average_monodromy_hat(u, cfg)}
        monos = {"": [tr.monodromy(cfg, u - m * eta).data for m in range(1, p + 1)],
                 "_hat": [tr.monodromy_hat(cfg, u - m * eta).data for m in range(1, p + 1)]}
        for h in ("", "_hat"):
            for k, e in enumerate(_ENTRIES):
                i, j = divmod(k, 2)
                P = np.eye(Q, dtype=complex)
                for M in monos[h]:
                    P = P @ _entry(M, i, j, Q)
                prod[e + h] = max(prod[e + h], rel_residual(P, avg[h][i, j] * np.eye(Q)))
            shifted = sf.average_monodromy_hat(u + eta, cfg) if h else sf.average_monodromy(u + eta, cfg)
            per = max(per, rel_residual(shifted, avg[h]))
        if cfg.N <= 2:
            E, Eh = sf.explicit_averages(u, cfg)
            explicit = max(explicit, rel_residual(avg[""], E), rel_residual(avg["_hat"], Eh))
    checks = [Check(f"average.product_{k}", f"p-fold average of {k.replace('_hat', '-hat')} is scalar and "
                    "equals the averaged L-product", v, 1e-9) for k, v in prod.items()]
    checks.append(Check("average.periodicity", "averages are invariant under u -> u + eta", per, 1e-10))
    checks.append(_average_asymptotics(cfg))
    if cfg.N <= 2:
        checks.append(Check("average.explicit", "explicit one- and two-site averages", explicit, 1e-12))
    else:
        checks.append(Check("average.explicit", "explicit one- and two-site averages", 0.0, 1e-12,
                            gating=False, note=f"tabulated for N <= 2; skipped at N = {cfg.N}"))
    return checks


def _average_asymptotics(cfg: ModelConfig) -> Check:
    p, N, k = cfg.p, cfg.N, cfg.constants
    expected = {
        (0, 0, ""): (k.D_plus**p, k.D_minus**p), (1, 1, ""): (k.F_plus**p, k.F_minus**p),
        (0, 0, "h"): (k.F_minus**p, k.F_plus**p), (1, 1, "h"): (k.D_minus**p, k.D_plus**p),
    }
    worst = 0.0
    for (i, j, h), (top, bottom) in expected.items():
        f = sf.average_monodromy_hat if h else sf.average_monodromy
        c = interpolate_laurent(lambda u: f(u, cfg)[i, j], p, -N, N)
        worst = max(worst, abs(c[-1] - top) / abs(top), abs(c[0] - bottom) / abs(bottom))
    return Check("average.asymptotics", "leading exp(+-pNu) coefficients of the diagonal averages",
                 worst, 1e-10)


# fusion

def fusion_suite(cfg: ModelConfig, seed: int = 0, n_points: int = 2) -> list[Check]:
    rng = np.random.default_rng(seed)
    eta, bp = cfg.eta, cfg.boundary
    us, vs = _pts(rng, n_points), _pts(rng, n_points)
    d = (2, 2, 2)
    Rf = lambda x: rk.fused_r(1, x, eta)
    fre = fdre = 0.0
    for u, v in zip(us, vs):
        Kf, K3 = embed(rk.fused_k_minus(1, u, bp, eta), [0, 1], d), embed(rk.k_minus(v, bp), [2], d)
        fre = max(fre, rel_residual(Rf(u - v) @ Kf @ Rf(u + v) @ K3, K3 @ Rf(u + v) @ Kf @ Rf(u - v)))
        Pf = embed(rk.fused_k_plus(1, u, bp, eta), [0, 1], d)
        P3 = embed(rk.k_plus(v, bp, eta), [2], d)
        w = -u - v - 2 * eta
        fdre = max(fdre, rel_residual(Rf(v - u) @ Pf @ Rf(w) @ P3, P3 @ Rf(w) @ Pf @ Rf(v - u)))
    hier = {j: max(tr.check_fusion_hierarchy(cfg, j, u) for u in us) for j in (1, 1.5)}
    fyb = max(tr.fused_yang_baxter_residual(cfg, u, v) for u, v in zip(us, vs))

    curves = sp.eigencurves(cfg, seed=seed)
    diag = sp.diagonalizer(cfg, 0.13 + 0.41j, seed)
    det_rep = {}
    for j in (1, 1.5):
        worst = 0.0
        for u in us:
            vals, leak = diag.diagonal(tr.fused_transfer(j, cfg, u).data)
            ref = np.array([sp.fused_eigenvalue(c, j, cfg, u) for c in curves])
            worst = max(worst, leak, float(np.max(np.abs(vals - ref)) / np.max(np.abs(ref))))
        det_rep[j] = worst
    return [
        Check("fusion.reflection_j1", "fused reflection equation, spin 1 x spin 1/2", fre, 1e-11),
        Check("fusion.dual_reflection_j1", "fused dual reflection equation, spin 1 x spin 1/2", fdre, 1e-11),
        Check("fusion.yang_baxter_j1", "fused RTT relation, spin 1 x spin 1/2", fyb, 1e-11),
        Check("fusion.hierarchy_j1", "fusion hierarchy t t^(1/2) = t^(1) + delta t^(0)", hier[1], 1e-8),
        Check("fusion.hierarchy_j3_2", "fusion hierarchy t t^(1) = t^(3/2) + delta t^(1/2)", hier[1.5], 1e-8),
        Check("fusion.determinant_j1", "fused eigenvalue as a 2x2 determinant in Lambda, a, d",
              det_rep[1], 1e-8),
        Check("fusion.determinant_j3_2", "fused eigenvalue as a 3x3 determinant in Lambda, a, d",
              det_rep[1.5], 1e-8),
    ]


# truncation (p = 3)

def _lower_right_zero(op, q: int) -> float:
    """Relative size of the (top, bottom) block of a spin-3/2 object in the adapted basis."""
    B = np.kron(rk.adapted_basis(3), np.eye(q))
    M = (B.T @ np.asarray(op) @ B).reshape(4, q, 4, q)
    return float(np.abs(M[:2, :, 2:, :]).max() / np.abs(M).max())


def truncation_suite(cfg: ModelConfig, seed: int = 0, n_points: int = 10) -> list[Check]:
    if cfg.p != 3:
        note = "truncation suite is written for p = 3"
        return [Check(f"truncation.{k}", "p = 3 only", float("nan"), 0.0, gating=False, note=note)
                for k in ("tabulated_unit_weight", "fused_k_closed", "tabulated_literal", "block_triangular",
                          "identity", "eigen_relation")]
    rng = np.random.default_rng(seed)
    eta, bp = cfg.eta, cfg.boundary
    us = _pts(rng, n_points)
    app_w1 = closed = literal = 0.0
    for u in us[:4]:
        for sign in "-+":
            A = rk.tabulated_fused_k(sign, u, bp)
            Amat = np.array([[A["K11"], A["K12"]], [A["K21"], A["K22"]]])
            W1 = rk.fused_k_top_weighted(sign, u, bp, eta, diag_weight=1.0)
            app_w1 = max(app_w1, rel_residual(W1, Amat))
            W2 = rk.fused_k_top_weighted(sign, u, bp, eta)
            C = rk.fused_k_closed_p3(sign, u, bp, eta)
            closed = max(closed, rel_residual(W2, np.array([[C["K11"], C["K12"]], [C["K21"], C["K22"]]])))
            literal = max(literal, rel_residual(W2, Amat))
    blocks = 0.0
    for u in us[:2]:
        blocks = max(blocks,
                     _lower_right_zero(rk.fused_k_minus(1.5, u, bp, eta).data, 1),
                     _lower_right_zero(rk.fused_k_plus(1.5, u, bp, eta).data, 1),
                     _lower_right_zero(tr.fused_monodromy(1.5, cfg, u).data, cfg.dim),
                     _lower_right_zero(tr.fused_monodromy_hat(1.5, cfg, u).data, cfg.dim))
    ident = max(tr.check_truncation(cfg, u) for u in us)
    curves = sp.eigencurves(cfg, seed=seed)
    eig_rel = max(sp.truncation_relation_residual(c, cfg, u) for c in curves for u in us[:3])
    return [
        Check("truncation.tabulated_unit_weight", "spin-3/2 fused K top block vs tabulated closed forms "
              "(K with unit diagonal weight)", app_w1, 1e-10),
        Check("truncation.fused_k_closed", "spin-3/2 fused K top block vs corrected closed forms", closed, 1e-10),
        Check("truncation.tabulated_literal", "spin-3/2 fused K of the model vs tabulated closed forms, literal",
              literal, 1e-10, gating=False,
              note="informational: the tabulated diagonal entries belong to K with unit diagonal weight"),
        Check("truncation.block_triangular", "fused K-, K+, T, T-hat are block triangular", blocks, 1e-10),
        Check("truncation.identity", "t^(3/2)(u) = (A~ + D~)(u) id + delta(u - eta) t^(1/2)(u)", ident, 1e-8),
        Check("truncation.eigen_relation", "cubic functional relation of each eigenvalue", eig_rel, 1e-7),
    ]


# T-Q

def tq_suite(cfg: ModelConfig, seed: int = 0, corrupt_c: float = 2.0) -> list[Check]:
    eta = cfg.eta
    F, diag = sf.F_coeffs(cfg, seed, return_diagnostics=True)
    curves = sp.eigencurves(cfg, seed=seed)
    sols = [tq.full_solve(c, cfg, seed=seed, F=F) for c in curves]
    Mp = tq.n_roots(cfg)
    rng = np.random.default_rng(seed)
    us = _pts(rng, 8)
    f_cross = max(abs(F(np.array([-u - eta]))[0] - F(np.array([u]))[0]) / abs(F(np.array([u]))[0]) for u in us)
    f_direct = max(abs(F(np.array([u]))[0] - sf.F_func(u, cfg)) / abs(sf.F_func(u, cfg)) for u in us)
    props = max(max(sp.eigen_functional_checks(c, cfg, seed).values()) for c in curves)
    swap, fixed = 0.0, 0
    for s in sols:
        bae_swapped = tq.bae_residuals(s, cfg, F, roots=-s.roots - eta)
        # at w = ±1 the swap maps a root to itself modulo iπ, and a(u) has a pole
        moved = np.abs(np.cosh(2 * s.roots + eta) ** 2 - 1) > 1e-6
        fixed += int((~moved).sum())
        if moved.any():
            swap = max(swap, float(np.max(np.abs(bae_swapped - s.bae_residuals)[moved])))
    corrupt = [tq.solve_Q(c, cfg, corrupt_c, seed, F).tq_residual for c in curves]
    return [
        Check("tq.residual", "inhomogeneous T-Q relation at 50 fresh points, every eigenvalue",
              max(s.tq_residual for s in sols), 1e-6),
        Check("tq.root_count", "Q has (p-1)N + 2p Bethe roots",
              float(max(abs(len(s.roots) - Mp) for s in sols)), 0.5),
        Check("tq.bae", "Bethe ansatz equations at every root", max(float(s.bae_residuals.max()) for s in sols), 1e-6),
        Check("tq.bae_branch_swap", "BAE residuals invariant under lambda -> -lambda - eta", swap, 1e-10,
              note=f"{fixed} roots at w = +-1 are fixed by the swap and skipped"),
        Check("tq.reconstruction", "Lambda rebuilt from the T-Q right side",
              max(s.reconstruction_residual for s in sols), 1e-7),
        Check("tq.F_crossing", "F(-u-eta) = F(u)", f_cross, 1e-9),
        Check("tq.F_shape", "F(u) is a Laurent polynomial in exp(2pu)",
              max(diag["leakage"], diag["fit_residual"], f_direct), 1e-9),
        Check("tq.eigen_properties", "eigenvalue periodicity, crossing, special values, asymptotics", props, 1e-8),
        Check("tq.corrupt_control", f"median T-Q residual with c scaled by {corrupt_c:g}",
              float(np.median(corrupt)), 1e-4, relation=">"),
    ]


def degenerate_suite(cfg: ModelConfig, seed: int = 0, starts: int = 2, max_nfev: int = 100) -> list[Check]:
    info = tq.degenerate_constraints(cfg, seed)
    generic = min(info["residuals"])
    checks = [Check("degenerate.generic_constraints", "constraints are violated on a generic config",
                    generic, 1e-2, relation=">")]
    search = tq.search_degenerate(cfg, starts=starts, seed=seed, max_nfev=max_nfev)
    if search.status != "found":
        checks.append(Check("degenerate.conventional_tq", "conventional T-Q on a constrained config",
                            0.0, 1e-6, note=f"inconclusive: {search.message}"))
        return checks
    worst, notes = 0.0, []
    for c in sp.eigencurves(search.cfg, seed=seed):
        r = tq.conventional_tq_verify(c, None, search.cfg, seed)
        if r["status"] == "not in degenerate regime":
            worst = float("inf")
            notes.append(f"eigenvalue {c.index}: precondition unmet")
            continue
        worst = max(worst, r["tq_residual"], r["bae_max"])
        notes.append(f"{c.index}:M={r['M']}")
    checks.append(Check("degenerate.conventional_tq", "conventional T-Q and BAEs on a constrained config",
                        worst, 1e-6, note=f"found (constraints {search.residual:.1e}); " + " ".join(notes)))
    return checks


# orchestration

SUITES = {
    "algebra": algebra_suite,
    "transfer": transfer_suite,
    "determinant": determinant_suite,
    "average": average_suite,
    "fusion": fusion_suite,
    "truncation": truncation_suite,
    "tq": tq_suite,
    "degenerate": degenerate_suite,
}

LEVELS = {
    "algebra": ("algebra",),
    "transfer": ("transfer", "determinant", "average"),
    "fusion": ("fusion",),
    "truncation": ("truncation",),
    "tq": ("tq", "degenerate"),
    "all": tuple(SUITES),
}


def thread_count() -> int:
    try:
        n = int(os.environ.get("TAU2_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, n)


def config_digest(cfg: ModelConfig) -> str:
    blob = json.dumps(cfg.to_json_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def run_suite(name: str, cfg: ModelConfig, seed: int = 0, **kw) -> tuple[list[Check], float]:
    t0 = time.perf_counter()
    try:
        checks = SUITES[name](cfg, seed, **kw)
    except (LaurentShapeError, sf.DegenerateError, sf.PoleError, np.linalg.LinAlgError,
            ArithmeticError, ValueError) as exc:
        checks = [Check(f"{name}.error", "suite raised", float("nan"), 0.0, note=f"{type(exc).__name__}: {exc}")]
    return checks, time.perf_counter() - t0


@dataclass
class RunReport:
    config_digest: str
    seed: int
    level: str
    checks: list[Check]
    timing: dict[str, float]
    version: str = __version__

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.gating)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.gating and not c.passed]

    def to_json(self, timing: bool = True) -> dict:
        out = {
            "config_digest": self.config_digest,
            "seed": self.seed,
            "level": self.level,
            "version": self.version,
            "pass": self.passed,
            "checks": [c.to_json() for c in self.checks],
        }
        if timing:
            out["timing"] = self.timing
        return out


def run_level(cfg: ModelConfig, level: str = "all", seed: int = 0, tol_scale: float = 1.0,
              corrupt_c: float = 2.0, threads: int | None = None) -> RunReport:
    if level not in LEVELS:
        raise ValueError(f"unknown level {level!r}; choose from {', '.join(LEVELS)}")
    names = LEVELS[level]
    extra = {"tq": {"corrupt_c": corrupt_c}}
    threads = threads or thread_count()
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = {n: pool.submit(run_suite, n, cfg, seed, **extra.get(n, {})) for n in names}
        results = {n: f.result() for n, f in futures.items()}
    checks, timing = [], {}
    for n in names:
        cs, dt = results[n]
        checks.extend(c.scaled(tol_scale) for c in cs)
        timing[n] = dt
    checks.sort(key=lambda c: c.name)
    return RunReport(config_digest(cfg), seed, level, checks, timing)
