"""Command-line driver: ``scnpp {solve,compare,validate} INSTANCE``.

Exit codes: 0 converged, 2 iteration limit reached, 3 breakdown,
1 validation or I/O error. ``compare`` exits with the most severe code of
its runs (1 > 3 > 2 > 0).

When ``--out``/``--out-dir`` is not given, traces go to the directory named
by ``SCNPP_OUTPUT_DIR`` if set; ``solve`` otherwise prints the trace to
standard output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import schemes
from .fileformat import (
    InstanceFormatError,
    fmt,
    format_trace,
    instance_from_dict,
    load_instance,
    write_trace,
)
from .mappings import ResolventParams
from .problems import ValidationError, instance_issues, lift_to_product
from .schemes import SolverConfig, StepSizeError

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_MAX_ITER = 2
EXIT_BREAKDOWN = 3
_SEVERITY = {EXIT_OK: 0, EXIT_MAX_ITER: 1, EXIT_BREAKDOWN: 2, EXIT_ERROR: 3}
_STATUS_CODE = {
    schemes.CONVERGED: EXIT_OK,
    schemes.MAX_ITER: EXIT_MAX_ITER,
    schemes.BREAKDOWN: EXIT_BREAKDOWN,
}
OUTPUT_DIR_ENV = "SCNPP_OUTPUT_DIR"


def _error(msg):
    print(f"scnpp: error: {msg}", file=sys.stderr)


def _add_solver_flags(p):
    p.add_argument("instance", help="path to a JSON instance file")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0, help="resolvent parameter (default 1)")
    p.add_argument("--gamma", type=float, default=None, help="explicit step size; must lie in (0, 2/L_safe)")
    p.add_argument("--gamma-fraction", type=float, default=0.5,
                   help="gamma = fraction * 2/L_safe when --gamma is absent (default 0.5)")
    p.add_argument("--alpha", default="harmonic", help="Halpern weights: 'harmonic' or 'power:q'")
    p.add_argument("--relax", type=float, default=None, dest="relaxation_c",
                   help="relaxation constant c in (0,1) for fb (default: none)")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=100_000)
    p.add_argument("--record-every", type=int, default=None,
                   help="record every n-th iterate (default: all up to 1000, then every 10th)")
    p.add_argument("--inner-tol", type=float, default=1e-12, help="AffineVI inner-loop tolerance")
    p.add_argument("--inner-max-iter", type=int, default=10_000, help="AffineVI inner-loop iteration cap")
    p.add_argument("--x0", default=None,
                   help="start point: comma-separated values or 'random' (default: zero vector)")
    p.add_argument("--seed", type=int, default=0, help="seed for --x0 random")
    p.add_argument("--no-iterates", action="store_true", help="omit x_i columns from traces")


def build_parser():
    parser = argparse.ArgumentParser(prog="scnpp", description="Split common null point solvers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run one algorithm and write its trace")
    _add_solver_flags(p)
    p.add_argument("--algorithm", default="fb", choices=schemes.ALGORITHMS)
    p.add_argument("--out", default=None, help="trace file path (default: stdout)")

    p = sub.add_parser("compare", help="run several algorithms from the same start point")
    _add_solver_flags(p)
    p.add_argument("--algorithms", default=",".join(schemes.ALGORITHMS),
                   help="comma-separated list (default: all four)")
    p.add_argument("--out-dir", default=None, help="directory for per-algorithm traces")
    p.add_argument("--jobs", type=int, default=1, help="number of concurrent runs")

    p = sub.add_parser("validate", help="check an instance file and list every violation")
    p.add_argument("instance")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    return parser


def _config(args, algorithm):
    return SolverConfig(
        algorithm=algorithm,
        lam=args.lam,
        gamma=args.gamma,
        gamma_fraction=args.gamma_fraction,
        alpha=args.alpha,
        relaxation_c=args.relaxation_c,
        tol=args.tol,
        max_iter=args.max_iter,
        record_every=args.record_every,
        inner_tol=args.inner_tol,
        inner_max_iter=args.inner_max_iter,
    )


def _start_point(args, n):
    if args.x0 is None:
        return np.zeros(n)
    if args.x0.strip().lower() == "random":
        return np.random.default_rng(args.seed).standard_normal(n)
    vals = [float(v) for v in args.x0.split(",")]
    if len(vals) != n:
        raise ValueError(f"--x0 has {len(vals)} entries, instance dimension is {n}")
    return np.array(vals)


def _load(args):
    params = ResolventParams(lam=args.lam, inner_tol=args.inner_tol, inner_max_iter=args.inner_max_iter)
    return load_instance(args.instance, params=params)


def _run_one(inst, cfg, x0):
    target = inst
    if cfg.algorithm != "product" and (inst.p, inst.r) != (1, 1):
        target = lift_to_product(inst)
    return schemes.run(target, cfg, x0)


def cmd_solve(args):
    try:
        inst = _load(args)
        cfg = _config(args, args.algorithm)
        x0 = _start_point(args, inst.n1)
        if cfg.algorithm != "product" and (inst.p, inst.r) != (1, 1):
            print(f"scnpp: note: lifting ({inst.p}, {inst.r}) instance to product space for {cfg.algorithm}",
                  file=sys.stderr)
        trace = _run_one(inst, cfg, x0)
    except (ValidationError, StepSizeError, ValueError, OSError) as exc:
        _error(exc)
        return EXIT_ERROR
    text = format_trace(trace, iterates=not args.no_iterates)
    out = args.out
    if out is None and os.environ.get(OUTPUT_DIR_ENV):
        out = Path(os.environ[OUTPUT_DIR_ENV]) / f"{Path(args.instance).stem}_{cfg.algorithm}.csv"
    try:
        if out is None:
            sys.stdout.write(text)
        else:
            Path(out).parent.mkdir(parents=True, exist_ok=True)
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    except OSError as exc:
        _error(exc)
        return EXIT_ERROR
    pr, ir = trace.final_residuals
    print(
        f"{trace.algorithm}: {trace.status} after {trace.iterations_used} iterations "
        f"(primal {pr:.3e}, image {ir:.3e}){' - ' + trace.reason if trace.reason else ''}",
        file=sys.stderr,
    )
    return _STATUS_CODE[trace.status]


def cmd_compare(args):
    try:
        inst = _load(args)
        x0 = _start_point(args, inst.n1)
        algos = [a.strip() for a in args.algorithms.split(",") if a.strip()]
        cfgs = [_config(args, a) for a in algos]
    except (ValidationError, ValueError, OSError) as exc:
        _error(exc)
        return EXIT_ERROR

    def job(cfg):
        try:
            return _run_one(inst, cfg, x0), None
        except (StepSizeError, ValueError) as exc:
            return None, str(exc)

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(job, cfgs))
    else:
        results = [job(c) for c in cfgs]

    out_dir = args.out_dir or os.environ.get(OUTPUT_DIR_ENV)
    stem = Path(args.instance).stem
    rows, codes = [], []
    for cfg, (trace, err) in zip(cfgs, results):
        if trace is None:
            codes.append(EXIT_ERROR)
            rows.append([cfg.algorithm, "Error", "-", "-", "-", err])
            continue
        codes.append(_STATUS_CODE[trace.status])
        pr, ir = trace.final_residuals
        rows.append([cfg.algorithm, trace.status, str(trace.iterations_used), f"{pr:.3e}", f"{ir:.3e}",
                     " ".join(fmt(v) for v in trace.final_point)])
        if out_dir:
            try:
                Path(out_dir).mkdir(parents=True, exist_ok=True)
                write_trace(trace, Path(out_dir) / f"{stem}_{cfg.algorithm}.csv", iterates=not args.no_iterates)
            except OSError as exc:
                _error(exc)
                codes[-1] = EXIT_ERROR
    header = ["algorithm", "status", "iterations", "primal_residual", "image_residual", "final_point"]
    widths = [max(len(r[i]) for r in rows + [header]) for i in range(len(header) - 1)]
    for r in [header] + rows:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)) + "  " + r[-1])
    return max(codes, key=_SEVERITY.__getitem__)


def cmd_validate(args):
    try:
        with open(args.instance, encoding="utf-8") as fh:
            text = fh.read()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InstanceFormatError([f"line {exc.lineno}, column {exc.colno}: {exc.msg}"]) from None
        inst = instance_from_dict(doc, name=args.instance)
        issues = instance_issues(inst, ResolventParams(lam=args.lam))
    except ValidationError as exc:
        issues = exc.issues
    except OSError as exc:
        _error(exc)
        return EXIT_ERROR
    if issues:
        print(f"{args.instance}: {len(issues)} problem(s)")
        for m in issues:
            print(f"  - {m}")
        return EXIT_ERROR
    print(f"{args.instance}: OK (n1={inst.n1}, p={inst.p}, r={inst.r})")
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    handler = {"solve": cmd_solve, "compare": cmd_compare, "validate": cmd_validate}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
