"""Command line interface: ``tau2 gen|verify|spectrum|tq``.

Exit codes: 0 when every check passes, 1 on a check failure, 2 on bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from . import scalar_functions as sf
from . import spectrum as sp
from . import tq_solver as tq
from .suites import LEVELS, run_level, thread_count
from .tensorkit import LaurentShapeError
from .transfer import transfer_matrix
from .weyl_model import ConfigError, ModelConfig

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

SPECTRUM_CHECKS = ("periodicity", "crossing", "value_at_0", "value_at_ipi2",
                   "asymptotic_plus", "asymptotic_minus", "degree_excess")
SPECTRUM_TOL = 1e-8
TRACE_TOL = 1e-9


class InputError(Exception):
    pass


def load_config(path: str) -> ModelConfig:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"config is not valid JSON: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise InputError("config must be a JSON object")
    try:
        return ModelConfig.from_json_dict(data)
    except (ConfigError, ValueError) as exc:
        raise InputError(str(exc)) from exc


def _write(text: str, path: str | None):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from exc


def _pair(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def cmd_gen(args) -> int:
    try:
        cfg = ModelConfig.random(args.seed, args.p, args.N)
    except ConfigError as exc:
        raise InputError(str(exc)) from exc
    _write(json.dumps(cfg.to_json_dict(), indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = load_config(args.config)
    corrupt = args.corrupt_c if args.corrupt_c is not None else 2.0
    report = run_level(cfg, args.level, seed=args.seed, tol_scale=args.tol_scale, corrupt_c=corrupt)
    _write(json.dumps(report.to_json(), indent=2) + "\n", args.out)
    for c in report.failures():
        print(f"FAIL {c.name} [{c.anchor}] residual {c.residual:.3e} tolerance {c.tolerance:.1e}",
              file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def _csv_text(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def spectrum_header(cfg: ModelConfig) -> list[str]:
    top = cfg.N + 2
    cols = ["index"]
    for k in range(-top, top + 1):
        cols += [f"c{k}_re", f"c{k}_im"]
    return cols + ["fit_residual"] + list(SPECTRUM_CHECKS)


def cmd_spectrum(args) -> int:
    cfg = load_config(args.config)
    curves = sp.eigencurves(cfg, seed=args.seed)
    rows = [spectrum_header(cfg)]
    ok = True
    for c in curves:
        checks = sp.eigen_functional_checks(c, cfg, args.seed)
        row = [c.index]
        for z in c.curve.coeffs:
            row += _pair(z)
        row.append(c.fit_residual)
        row += [checks[k] for k in SPECTRUM_CHECKS]
        rows.append(row)
        ok &= c.fit_residual < sp.FIT_TOL * args.tol_scale
        ok &= max(checks.values()) < SPECTRUM_TOL * args.tol_scale
    # the eigenvalues must add up to the trace of t(u)
    u = 0.27 + 0.61j
    total = sum(complex(c(np.array([u]))[0]) for c in curves)
    trace = complex(np.trace(transfer_matrix(cfg, u).data))
    trace_res = abs(total - trace) / abs(trace)
    ok &= trace_res < TRACE_TOL * args.tol_scale
    rows.append([])
    rows.append(["# trace_check", trace_res])
    _write(_csv_text(rows), args.csv)
    return EXIT_OK if ok else EXIT_FAIL


def tq_header(cfg: ModelConfig) -> list[str]:
    cols = ["index"]
    for k in range(tq.n_roots(cfg)):
        cols += [f"root{k}_re", f"root{k}_im"]
    return cols + ["tq_residual", "max_bae", "branch_flags", "clustered"]


def cmd_tq(args) -> int:
    cfg = load_config(args.config)
    corrupt = args.corrupt_c if args.corrupt_c is not None else 1.0
    F = sf.F_coeffs(cfg, args.seed)
    curves = sp.eigencurves(cfg, seed=args.seed)
    Mp = tq.n_roots(cfg)

    def solve(curve):
        try:
            return tq.full_solve(curve, cfg, corrupt, args.seed, F), None
        except (np.linalg.LinAlgError, ArithmeticError, ValueError) as exc:
            return None, f"{type(exc).__name__}: {exc}"

    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        results = list(pool.map(solve, curves))
    rows = [tq_header(cfg)]
    ok = True
    for curve, (sol, err) in zip(curves, results):
        if sol is None:
            rows.append([curve.index] + [""] * (2 * Mp) + ["nan", "nan", "", err])
            ok = False
            continue
        row = [sol.index]
        for r in sol.roots:
            row += _pair(r)
        bae = float(sol.bae_residuals.max())
        flags = "".join("1" if f else "0" for f in sol.branch_flags)
        row += [sol.tq_residual, bae, flags, int(sol.clustered)]
        rows.append(row)
        tol = tq.TQ_TOL * args.tol_scale
        ok &= len(sol.roots) == Mp and sol.tq_residual < tol and bae < tol
    info = tq.degenerate_constraints(cfg, args.seed)
    rows.append([])
    rows.append(["# degenerate_constraints"] + info["residuals"])
    rows.append(["# m_candidates"] + info["m_candidates"])
    _write(_csv_text(rows), args.csv)
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tau2", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"tau2 {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_config=True):
        if with_config:
            p.add_argument("config", help="JSON config file ('-' for stdin)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol-scale", type=float, default=1.0,
                       help="multiply every upper tolerance by this factor")

    g = sub.add_parser("gen", help="write a random configuration")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--p", type=int, default=3)
    g.add_argument("--N", type=int, default=1)
    g.add_argument("--out", default=None, help="output path (default stdout)")
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", help="run verification suites and print a JSON report")
    common(v)
    v.add_argument("--level", choices=list(LEVELS), default="all")
    v.add_argument("--out", default=None)
    v.add_argument("--corrupt-c", type=float, nargs="?", const=2.0, default=None,
                   help="scale factor on c for the negative control (default 2)")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("spectrum", help="eigenvalue curves as a CSV table")
    common(s)
    s.add_argument("--csv", default=None, help="output path (default stdout)")
    s.set_defaults(func=cmd_spectrum)

    t = sub.add_parser("tq", help="Bethe roots as a CSV table")
    common(t)
    t.add_argument("--csv", default=None)
    t.add_argument("--corrupt-c", type=float, nargs="?", const=2.0, default=None,
                   help="solve with c scaled by this factor (negative control)")
    t.set_defaults(func=cmd_tq)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    if getattr(args, "tol_scale", 1.0) <= 0:
        print("tau2: --tol-scale must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"tau2: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (LaurentShapeError, sp.EigenDecompositionError, sf.DegenerateError) as exc:
        print(f"tau2: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
