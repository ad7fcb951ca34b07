"""Command-line front end.

    qduality verify --config run.json [--samples N] [--seed S] [--tol T] [--out report.json]
    qduality examples [--tol T] [--out report.json]
    qduality beta --config params.json [--out table.json]
    qduality alpha --config params.json --k K [--tol T]

``verify`` exits with status 0 iff no case fails; ill-conditioned cases are
listed but never fail a run.  Set ``QDUALITY_WORKERS`` to evaluate cases in
parallel.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Any, Sequence

from .config import ConfigError, RunConfig, parse_config
from .duality import QParams, beta_table
from .oracle import alpha_identity_sides
from .report import FAIL, ILL, PASS, ResidualReport, relative_residual
from .runner import WORKERS_ENV, params_from_config, run

EXIT_CONFIG = 2


def _clean(obj: Any) -> Any:
    """JSON-safe copy: non-finite floats become ``None``."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def write_report(report: ResidualReport, config: RunConfig, path: str | Path) -> list[Path]:
    """Write ``path`` (one JSON document) and ``path`` with suffix
    ``.jsonl`` (one record per line, then the summary)."""
    path = Path(path)
    doc = {"config": config.model_dump(mode="json"), **report.to_dict()}
    stream = path.with_suffix(".jsonl")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_clean(doc), indent=2) + "\n")
    with stream.open("w") as fh:
        for rec in report.records:
            fh.write(json.dumps(_clean(rec.to_dict())) + "\n")
        fh.write(json.dumps(_clean({"summary": report.summary()})) + "\n")
    return [path, stream]


def print_summary(report: ResidualReport, mode: str, out=None) -> None:
    out = out or sys.stdout
    s = report.summary()
    print(
        f"{mode}: {s['n_cases']} cases, {s['n_pass']} pass, {s['n_fail']} fail, "
        f"{s['n_flagged']} ill-conditioned; max residual {s['max_residual']:.3e}; "
        f"{s['wall_time']:.2f} s",
        file=out,
    )
    for rec in report.records:
        if rec.status == FAIL:
            why = rec.detail.get("error") or f"max residual {rec.max_residual:.3e} > tol {rec.tol:g}"
            print(f"  FAIL {rec.case_id}: {why}", file=out)
        elif rec.status == ILL:
            print(f"  ill-conditioned {rec.case_id}", file=out)


def _finish(report: ResidualReport, config: RunConfig, out_path: str | None) -> int:
    print_summary(report, config.mode)
    target = out_path or config.output_path
    if target:
        try:
            paths = write_report(report, config, target)
        except OSError as exc:
            print(f"error: cannot write report to {target}: {exc.strerror}", file=sys.stderr)
            return EXIT_CONFIG
        print("report: " + ", ".join(str(p) for p in paths))
    return 0 if report.passed else 1


def _load(path: str, **overrides: Any) -> RunConfig:
    config = parse_config(path)
    return config.with_overrides(**overrides) if overrides else config


def cmd_verify(args: argparse.Namespace) -> int:
    config = _load(args.config, samples=args.samples, seed=args.seed, tol=args.tol)
    return _finish(run(config), config, args.out)


def cmd_examples(args: argparse.Namespace) -> int:
    config = RunConfig(mode="examples", tol=args.tol)
    return _finish(run(config), config, args.out)


def _explicit(config: RunConfig, command: str):
    if config.params is None:
        raise ConfigError(f"{command} needs a 'params' entry in the configuration")
    return params_from_config(config.params)


def cmd_beta(args: argparse.Namespace) -> int:
    config = _load(args.config)
    params = _explicit(config, "beta")
    table = beta_table(params)
    print(f"{'k':>4}  {'re':>24}  {'im':>24}")
    for k, c in table.items():
        print(f"{k:>4}  {c.real:>24.16e}  {c.imag:>24.16e}")
    if args.out:
        Path(args.out).write_text(json.dumps({"params": params.to_dict(), "beta": table.to_dict()}, indent=2) + "\n")
    return 0


def cmd_alpha(args: argparse.Namespace) -> int:
    config = _load(args.config)
    params = _explicit(config, "alpha")
    if not isinstance(params, QParams):
        raise ConfigError("alpha needs len(b) == len(a)")
    lhs, rhs = alpha_identity_sides(params, args.k)
    res = relative_residual(lhs, rhs)
    status = PASS if res <= args.tol else FAIL
    print(f"k = {args.k}, p index = {params.p_index}, t = {params.t}")
    print(f"terminating sums: {lhs.real:.16e} {lhs.imag:+.16e}j")
    print(f"recurrences:      {rhs.real:.16e} {rhs.imag:+.16e}j")
    print(f"residual {res:.3e} ({status})")
    return 0 if status == PASS else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qduality",
        description="Numerical verification of duality relations for basic hypergeometric series.",
        epilog=f"Set {WORKERS_ENV}=N to evaluate cases on N worker processes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the verification described by a configuration file")
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--samples", type=int, help="number of random cases (overrides the file)")
    p.add_argument("--seed", type=int, help="master seed (overrides the file)")
    p.add_argument("--tol", type=float, help="residual tolerance (overrides the file)")
    p.add_argument("--out", help="report path; a .jsonl stream is written next to it")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("examples", help="check the five closed-form right-hand sides")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out")
    p.set_defaults(func=cmd_examples)

    p = sub.add_parser("beta", help="print the Laurent coefficients for explicit parameters")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_beta)

    p = sub.add_parser("alpha", help="check the terminating alpha identity at one k")
    p.add_argument("--config", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_alpha)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        # ConfigError, invalid overrides, degenerate parameters or a bad worker count
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
