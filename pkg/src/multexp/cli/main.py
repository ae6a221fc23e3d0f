"""``multexp`` command-line entry point."""

from __future__ import annotations

import argparse
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from .. import __version__
from ..errors import DomainError, ResourceError
from . import report
from .experiments import COMMANDS, ExperimentConfig, run_experiment

EXIT_OK, EXIT_CONFIG, EXIT_RESOURCE = 0, 2, 3


def _interval(text: str) -> tuple[float, float]:
    try:
        lo, hi = text.split(":")
        return float(lo), float(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None


def _plist(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="multexp", description="Exponential sums of multiplicative functions: "
                                 "L^p norms, major arcs, character detection.")
    ap.add_argument("--version", action="version", version=f"multexp {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--f", default="one", help="function spec, e.g. liouville or pretend:5:100:42")
        sp.add_argument("--N", type=int, required=True, help="length (largest N of a sweep)")
        sp.add_argument("--Q", type=float, help="arc / conductor parameter (largest Q of a sweep)")
        sp.add_argument("--T", type=float, default=0.0, help="twist range |t| <= T")
        sp.add_argument("--eps", type=float, help="window parameter")
        sp.add_argument("--A", type=float, help="small-prime threshold")
        sp.add_argument("--Delta", type=float, help="criterion parameter (default: largest admissible)")
        sp.add_argument("--oversample", type=int, default=8)
        sp.add_argument("--seed", type=int, default=0, help="seed for randompm/pretend atoms given without one")
        sp.add_argument("--Nmin", type=int, help="smallest N of a dyadic sweep")
        sp.add_argument("--Qmin", type=float, help="smallest Q of a dyadic sweep")
        sp.add_argument("--interval", type=_interval, help="prime interval LO:HI")
        sp.add_argument("--mode", default="quadratic", help="detect: quadratic | characters [-nonprincipal]")
        sp.add_argument("--p", type=_plist, default=(1.0, 2.0), help="exponents for l1norm")
        sp.add_argument("--out", help="report path (default stdout)")
        sp.add_argument("--format", default="csv", choices=report.FORMATS)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = ExperimentConfig(command=args.command, f=args.f, N=args.N, Q=args.Q, T=args.T, eps=args.eps,
                           A=args.A, Delta=args.Delta, oversample=args.oversample, seed=args.seed,
                           Nmin=args.Nmin, Qmin=args.Qmin, interval=args.interval, mode=args.mode,
                           p=args.p, out=args.out, format=args.format)
    started = datetime.now(timezone.utc)
    t0 = time.perf_counter()
    try:
        rows = run_experiment(cfg)
    except ResourceError as exc:
        print(f"multexp: resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except DomainError as exc:
        print(f"multexp: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = report.render(rows, cfg.to_dict(), __version__, cfg.format, time.perf_counter() - t0, started)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
