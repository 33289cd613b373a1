"""Command-line entry point: run one experiment and write its report.

Exit codes: 0 success, 1 invalid arguments, 2 resource bound exceeded,
3 I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import serialize
from .classical import ek_standardized_ks, omega_census, standardized_values
from .errors import ResourceBoundError
from .exact import exact_moments, ks_exact_vs_normal, lindeberg_sum, normal_cdf, poisson_binomial_pmf
from .model import METHODS, ModelParams, normalize_batch, sample_omega
from .primes import DEFAULT_MAX_LIMIT, sieve_primes
from .serialize import LindebergResult, ReportRow
from .stats import StepCdf, ks_empirical, summarize

COMMANDS = ("primes", "moments", "pmf", "lindeberg", "sample", "ks", "census", "report")
EXIT_OK, EXIT_ARGS, EXIT_RESOURCE, EXIT_IO = 0, 1, 2, 3


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    x: int | None = None
    grid: tuple[int, ...] | None = None
    seed: int = 0
    trials: int = 100_000
    epsilon: float | None = None
    output_path: str = "-"
    format: str = "json"
    chunk_size: int = 10_000
    method: str = "direct"
    threads: int | None = None
    support_cap: int | None = None
    export_standardized: str | None = None
    max_limit: int = DEFAULT_MAX_LIMIT

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"command must be one of {COMMANDS}, got {self.command!r}")
        if self.format not in serialize.FORMATS:
            raise ValueError(f"format must be one of {serialize.FORMATS}, got {self.format!r}")
        if self.grid is not None:
            if not self.grid:
                raise ValueError("grid must not be empty")
            if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
                raise ValueError(f"grid entries must be strictly increasing, got {list(self.grid)}")
        if self.x is None and self.grid is None:
            raise ValueError("x is required (or grid, for moments/lindeberg/report)")
        if self.x is not None and self.x < 1:
            raise ValueError(f"x must be a positive integer, got {self.x}")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.threads is not None and self.threads < 1:
            raise ValueError(f"threads must be >= 1, got {self.threads}")

    @property
    def xs(self) -> list[int]:
        return list(self.grid) if self.grid is not None else [self.x]


def _model_params(cfg: ExperimentConfig) -> ModelParams:
    return ModelParams(x=cfg.x, seed=cfg.seed, trials=cfg.trials, chunk_size=cfg.chunk_size, method=cfg.method)


def _run_pipeline(cfg: ExperimentConfig) -> tuple[str, object, str]:
    """Returns (report kind, report object, one-line summary)."""
    table = sieve_primes(max(cfg.xs), max_limit=cfg.max_limit)
    cmd = cfg.command

    if cmd == "primes":
        return "primes", table, f"{len(table)} primes <= {table.limit}"

    if cmd == "moments":
        reports = [exact_moments(table, x) for x in cfg.xs]
        last = reports[-1]
        return "moments", reports, f"x={last.x} mu={last.mu:.10g} sigma_sq={last.sigma_sq:.10g}"

    if cmd == "pmf":
        pmf = poisson_binomial_pmf(table, cfg.x, cfg.support_cap)
        return "pmf", pmf, f"x={pmf.x} support_cap={pmf.support_cap} truncated_tail={pmf.truncated_tail:.3g}"

    if cmd == "lindeberg":
        eps = 1.0 if cfg.epsilon is None else cfg.epsilon
        rows = []
        for x in cfg.xs:
            m = exact_moments(table, x)
            rows.append(LindebergResult(x=x, epsilon=eps, sigma=m.sigma, value=lindeberg_sum(table, x, eps)))
        return "lindeberg", rows, f"x={rows[-1].x} epsilon={eps} L={rows[-1].value:.6g}"

    if cmd == "sample":
        batch = sample_omega(table, _model_params(cfg), threads=cfg.threads)
        return "sample", batch, f"x={cfg.x} trials={cfg.trials} mean={batch.omegas.mean():.6g}"

    if cmd == "ks":
        batch = sample_omega(table, _model_params(cfg), threads=cfg.threads)
        m = exact_moments(table, cfg.x)
        pmf = poisson_binomial_pmf(table, cfg.x)
        summary = replace(
            summarize(batch),
            ks_vs_exact=ks_empirical(batch.omegas, StepCdf.from_pmf(pmf)),
            ks_vs_normal=ks_empirical(normalize_batch(batch, m.mu, m.sigma), normal_cdf),
        )
        return (
            "summary",
            summary,
            f"x={cfg.x} trials={cfg.trials} ks_vs_exact={summary.ks_vs_exact:.4g} "
            f"ks_vs_normal={summary.ks_vs_normal:.4g}",
        )

    if cmd == "census":
        census = omega_census(table, cfg.x)
        line = f"x={census.x} omega_total={census.omega_total}"
        if census.x >= 100:
            line += f" ek_ks={ek_standardized_ks(census):.4g}"
        if cfg.export_standardized:
            _export_standardized(census, cfg.export_standardized)
        return "census", census, line

    if cmd == "report":
        rows = []
        for x in cfg.xs:
            m = exact_moments(table, x)
            pmf = poisson_binomial_pmf(table, x)
            rows.append(
                ReportRow(
                    x=x,
                    mu=m.mu,
                    sigma_sq=m.sigma_sq,
                    mertens_gap=m.mertens_gap,
                    D_exact_vs_normal=ks_exact_vs_normal(pmf, m.mu, m.sigma),
                )
            )
        return "report", rows, f"{len(rows)} rows, final D={rows[-1].D_exact_vs_normal:.4g}"

    raise ValueError(f"unknown command {cmd!r}")


def _export_standardized(census, path: str) -> None:
    z = np.sort(standardized_values(census))
    text = "z\n" + "".join(serialize.fmt_real(v) + "\n" for v in z)
    serialize.write_atomic(path, text)


def run(cfg: ExperimentConfig) -> int:
    try:
        kind, report, line = _run_pipeline(cfg)
        text = serialize.dumps(report, kind, cfg.format)
        if cfg.output_path == "-":
            sys.stdout.write(text)
            sys.stdout.flush()
            print(line, file=sys.stderr)
        else:
            serialize.write_atomic(cfg.output_path, text)
            print(f"{line} -> {cfg.output_path}")
    except ResourceBoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ARGS
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


class _ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgumentError(message)


def _int(text: str) -> int:
    # accept 1e6-style bounds as well as plain integers
    try:
        if "e" in text.lower():
            v = float(text)
            if v != int(v):
                raise ValueError
            return int(v)
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")


def _grid(text: str) -> tuple[int, ...]:
    return tuple(_int(v) for v in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="randsieve", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, grid=False):
        p.add_argument("--x", type=_int, help="truncation bound")
        if grid:
            p.add_argument("--grid", type=_grid, help="comma-separated increasing x values")
        p.add_argument("--output", default="-", help="output file, '-' for stdout")
        p.add_argument("--format", choices=serialize.FORMATS, default="json")
        p.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")
        return p

    common(sub.add_parser("primes", help="prime table with reciprocal prefix sums"))
    common(sub.add_parser("moments", help="exact mean and variance of Omega_x"), grid=True)
    p = common(sub.add_parser("pmf", help="exact Poisson-binomial law of Omega_x"))
    p.add_argument("--support-cap", type=int, default=None)
    p = common(sub.add_parser("lindeberg", help="Lindeberg functional L(x, epsilon)"), grid=True)
    p.add_argument("--epsilon", type=float, default=None)
    for name, text in (("sample", "Monte Carlo draws of Omega_x"), ("ks", "sample and KS distances")):
        p = common(sub.add_parser(name, help=text))
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--trials", type=_int, default=100_000)
        p.add_argument("--chunk-size", type=_int, default=10_000)
        p.add_argument("--method", choices=METHODS, default="direct")
    p = common(sub.add_parser("census", help="census of omega(n) for n <= x"))
    p.add_argument("--export-standardized", default=None, metavar="PATH", help="sorted standardized values as CSV")
    common(sub.add_parser("report", help="moment and KS-to-normal table over a grid"), grid=True)
    return parser


def config_from_args(ns: argparse.Namespace) -> ExperimentConfig:
    return ExperimentConfig(
        command=ns.command,
        x=ns.x,
        grid=getattr(ns, "grid", None),
        seed=getattr(ns, "seed", 0),
        trials=getattr(ns, "trials", 100_000),
        epsilon=getattr(ns, "epsilon", None),
        output_path=ns.output,
        format=ns.format,
        chunk_size=getattr(ns, "chunk_size", 10_000),
        method=getattr(ns, "method", "direct"),
        threads=ns.threads,
        support_cap=getattr(ns, "support_cap", None),
        export_standardized=getattr(ns, "export_standardized", None),
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(message)s")
        cfg = config_from_args(ns)
    except _ArgumentError as e:
        parser.print_usage(sys.stderr)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ARGS
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ARGS
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
