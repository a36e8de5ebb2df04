"""Batch command line: generate, verify, oracle, bench.

Exit codes: 0 success, 1 verification failure, 2 generation failure,
3 oracle singular system, 64 usage, 65 input integrity.
"""

from __future__ import annotations

import argparse
import os
import platform
import secrets
import statistics
import sys
import time
from dataclasses import dataclass

import numpy as np

from .analysis import CHECK_NAMES, VerificationReport, VerifyConfig, verify_all
from .errors import (
    DocumentIntegrityError,
    FormatVersionError,
    GenerationFailedError,
    SingularSystemError,
)
from .oracle import MAX_SYSTEM_DIM, compare_tensors, count_equations, oracle_structure_constants
from .rng import RNG_ID
from .sampler import FIELDS, MODES, generate
from .serialize import read_sample, write_sample

__all__ = ["main", "build_parser", "BenchRecord", "CSV_HEADER"]

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_GENERATION_FAILED = 2
EXIT_ORACLE_SINGULAR = 3
EXIT_USAGE = 64
EXIT_INPUT = 65

CSV_HEADER = "n,mode,repeats,median_generate_s,median_verify_s,rng_id"

# reference wall-clock upper bounds for median generation time, from an
# interpreted-language implementation on 2008-era hardware; treated as
# upper bounds, not targets
GENERATE_BASELINES_S = {100: 0.3, 500: 40.0}


@dataclass(frozen=True)
class BenchRecord:
    n: int
    mode: str
    repeats: int
    median_generate_s: float
    median_verify_s: float | None
    rng_id: str
    hardware: str

    def csv_row(self) -> str:
        verify = "" if self.median_verify_s is None else repr(self.median_verify_s)
        return (
            f"{self.n},{self.mode},{self.repeats},"
            f"{self.median_generate_s!r},{verify},{self.rng_id}"
        )


class _Parser(argparse.ArgumentParser):
    """argparse maps usage errors to exit 2 by default; we need 64."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _uint64(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}")
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="lieforge",
        description="Random solvable Lie algebra samples: generate, verify, cross-check, benchmark.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("generate", help="draw a sample and write its document")
    gen.add_argument("--dim", type=int, required=True, help="number of generators, at least 2")
    gen.add_argument(
        "--seed",
        type=_uint64,
        default=None,
        help="RNG seed (default: OS entropy, echoed to stderr)",
    )
    gen.add_argument("--field", choices=FIELDS, default="real")
    gen.add_argument("--mode", choices=MODES, default="generic")
    gen.add_argument(
        "--emit",
        choices=("adjoint", "structure", "both", "none"),
        default="structure",
        help="optional payloads to embed in the document",
    )
    gen.add_argument("--out", default=None, help="output path (default: stdout)")
    gen.add_argument("--max-attempts", type=int, default=16)
    gen.set_defaults(func=cmd_generate, _parser=gen)

    ver = sub.add_parser("verify", help="run the check suite on a stored document")
    ver.add_argument("file", help="path to a lieforge/1 document")
    ver.add_argument(
        "--checks",
        default=None,
        help=f"comma-separated subset of: {','.join(CHECK_NAMES)} (default all)",
    )
    ver.add_argument(
        "--tol",
        type=float,
        default=None,
        help="verification tolerance (default: the tau_ver stored in the document)",
    )
    ver.add_argument(
        "--seed", type=_uint64, default=0, help="seed for sampled checks (default 0)"
    )
    ver.add_argument("--format", choices=("text", "json"), default="text")
    ver.set_defaults(func=cmd_verify, _parser=ver)

    orc = sub.add_parser(
        "oracle", help="compare closed-form structure constants with the linear-system solution"
    )
    orc.add_argument("--dim", type=int, required=True)
    orc.add_argument(
        "--seed",
        type=_uint64,
        default=None,
        help="RNG seed (default: OS entropy, echoed to stderr)",
    )
    orc.add_argument("--field", choices=FIELDS, default="real")
    orc.add_argument("--mode", choices=MODES, default="generic")
    orc.add_argument(
        "--tol", type=float, default=1e-9, help="relative agreement tolerance (default 1e-9)"
    )
    orc.set_defaults(func=cmd_oracle, _parser=orc)

    ben = sub.add_parser("bench", help="time sample generation at the requested dimensions")
    ben.add_argument("--dims", required=True, help="comma-separated dimensions, each at least 2")
    ben.add_argument("--repeat", type=int, default=3, help="timed runs per dimension (min 3)")
    ben.add_argument("--field", choices=FIELDS, default="real")
    ben.add_argument("--mode", choices=MODES, default="generic")
    ben.add_argument("--csv", default=None, help="CSV output path (default stdout)")
    ben.add_argument(
        "--seed", type=_uint64, default=0, help="base seed; run r uses seed + r (default 0)"
    )
    ben.add_argument(
        "--verify",
        action="store_true",
        help="also time verify_all per run and report its median",
    )
    ben.set_defaults(func=cmd_bench, _parser=ben)
    return parser


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    seed = secrets.randbits(64)
    print(f"seed: {seed}", file=sys.stderr)
    return seed


def cmd_generate(args) -> int:
    if args.dim < 2:
        args._parser.error("--dim must be at least 2")
    if args.max_attempts < 1:
        args._parser.error("--max-attempts must be at least 1")
    seed = _resolve_seed(args)
    try:
        sample = generate(
            args.dim, seed, field=args.field, mode=args.mode, max_attempts=args.max_attempts
        )
    except GenerationFailedError as err:
        print(f"lieforge generate: {err}", file=sys.stderr)
        return EXIT_GENERATION_FAILED
    doc = write_sample(
        sample,
        include_adjoint=args.emit in ("adjoint", "both"),
        include_structure=args.emit in ("structure", "both"),
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(doc)
    else:
        sys.stdout.write(doc)
    return EXIT_OK


def _format_text_report(report: VerificationReport) -> str:
    lines = [
        f"sample: dim={report.dim} field={report.field} mode={report.mode} "
        f"seed={report.seed} rng_id={report.rng_id}",
        f"scale: {report.scale:.6e}  tau_ver: {report.tau_ver:.3e}",
        f"{'check':<10} {'residual':>12} {'tolerance':>12} {'status':<6} {'seconds':>8}  detail",
    ]
    for c in report.checks:
        status = "pass" if c.passed else "FAIL"
        lines.append(
            f"{c.name:<10} {c.residual:>12.4e} {c.tolerance:>12.4e} "
            f"{status:<6} {c.seconds:>8.3f}  {c.detail}"
        )
    lines.append(f"result: {'PASS' if report.passed else 'FAIL'}")
    return "\n".join(lines) + "\n"


def cmd_verify(args) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        print(f"lieforge verify: cannot read input: {err}", file=sys.stderr)
        return EXIT_INPUT
    try:
        sample = read_sample(text)
    except (FormatVersionError, DocumentIntegrityError) as err:
        print(f"lieforge verify: {err}", file=sys.stderr)
        return EXIT_INPUT

    checks = CHECK_NAMES
    if args.checks is not None:
        requested = tuple(name.strip() for name in args.checks.split(",") if name.strip())
        unknown = [name for name in requested if name not in CHECK_NAMES]
        if unknown:
            args._parser.error(
                f"unknown checks: {', '.join(unknown)} (valid: {', '.join(CHECK_NAMES)})"
            )
        if not requested:
            args._parser.error("--checks must name at least one check")
        checks = requested
    config = VerifyConfig(tau_ver=args.tol, seed=args.seed, checks=checks)
    report = verify_all(sample, config)

    if args.format == "json":
        import json

        sys.stdout.write(json.dumps(report.as_dict(), indent=2) + "\n")
    else:
        sys.stdout.write(_format_text_report(report))
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def cmd_oracle(args) -> int:
    if args.dim < 2:
        args._parser.error("--dim must be at least 2")
    dim_sys = count_equations(args.dim)
    if dim_sys > MAX_SYSTEM_DIM:
        args._parser.error(
            f"oracle system size dim_sys = {dim_sys} exceeds the guard ({MAX_SYSTEM_DIM}); "
            "reduce --dim"
        )
    seed = _resolve_seed(args)
    try:
        sample = generate(args.dim, seed, field=args.field, mode=args.mode)
    except GenerationFailedError as err:
        print(f"lieforge oracle: {err}", file=sys.stderr)
        return EXIT_GENERATION_FAILED
    try:
        tensor, diagnostics = oracle_structure_constants(sample, return_diagnostics=True)
    except SingularSystemError as err:
        print(f"lieforge oracle: singular system: {err}", file=sys.stderr)
        return EXIT_ORACLE_SINGULAR
    comparison = compare_tensors(sample.structure, tensor, args.tol)

    print(f"dim: {args.dim}  unknowns: {dim_sys}  equations: {dim_sys}")
    if dim_sys == 0:
        print("empty system: no unknowns beyond the a-priori slice")
    print(f"condition estimate: {diagnostics.condition_estimate:.6e}")
    print(f"solve residual: {diagnostics.residual:.6e}")
    print(
        f"max |closed-form - oracle|: {comparison.max_abs_diff:.6e}"
        + (f" at (i, j, k) = {comparison.where}" if comparison.where is not None else "")
    )
    print(f"threshold: {comparison.threshold:.6e}")
    print(f"result: {'PASS' if comparison.passed else 'FAIL'}")
    return EXIT_OK if comparison.passed else EXIT_VERIFY_FAILED


def _hardware_note() -> str:
    return (
        f"{platform.machine() or 'unknown-arch'}, {os.cpu_count()} cpu, "
        f"python {platform.python_version()}, numpy {np.__version__}"
    )


def cmd_bench(args) -> int:
    try:
        dims = [int(part) for part in args.dims.split(",") if part.strip()]
    except ValueError:
        args._parser.error(f"--dims must be a comma-separated integer list, got {args.dims!r}")
    if not dims or any(n < 2 for n in dims):
        args._parser.error("--dims entries must all be at least 2")
    if args.repeat < 3:
        args._parser.error("--repeat must be at least 3 for a meaningful median")
    dims = list(dict.fromkeys(dims))

    hardware = _hardware_note()
    records: list[BenchRecord] = []
    for n in dims:
        gen_times: list[float] = []
        verify_times: list[float] = []
        for run in range(args.repeat):
            seed = (args.seed + run) % 2**64
            begin = time.perf_counter()
            try:
                sample = generate(n, seed, field=args.field, mode=args.mode)
            except GenerationFailedError as err:
                print(f"lieforge bench: {err}", file=sys.stderr)
                return EXIT_GENERATION_FAILED
            gen_times.append(time.perf_counter() - begin)
            if args.verify:
                begin = time.perf_counter()
                verify_all(sample)
                verify_times.append(time.perf_counter() - begin)
        records.append(
            BenchRecord(
                n=n,
                mode=args.mode,
                repeats=args.repeat,
                median_generate_s=statistics.median(gen_times),
                median_verify_s=statistics.median(verify_times) if verify_times else None,
                rng_id=RNG_ID,
                hardware=hardware,
            )
        )

    csv_text = CSV_HEADER + "\n" + "".join(rec.csv_row() + "\n" for rec in records)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)

    print(f"hardware: {hardware}", file=sys.stderr)
    for rec in records:
        line = f"N={rec.n}: median generate {rec.median_generate_s:.4f} s"
        if rec.median_verify_s is not None:
            line += f", median verify {rec.median_verify_s:.4f} s"
        baseline = GENERATE_BASELINES_S.get(rec.n)
        if baseline is not None:
            ratio = baseline / rec.median_generate_s if rec.median_generate_s > 0 else float("inf")
            line += f" (reference baseline {baseline:g} s, {ratio:.1f}x headroom)"
        print(line, file=sys.stderr)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        code = exc.code
        if code is None:
            return EXIT_OK
        return code if isinstance(code, int) else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
