"""``uhardy`` command line: verification suites, sampling, kernel tables, transforms."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from uhardy import __version__
from uhardy.errors import UHardyError
from uhardy.fock import EVector
from uhardy.hardy import (
    HardyFunction,
    boundary_gap,
    extend,
    kernel_compare,
    radial_transform,
)
from uhardy.montecarlo import sphere_moment_check
from uhardy.partitions import BasisKey
from uhardy.report import Report, jsonable
from uhardy.suites import SUITES, SuiteConfig, run_suite, stream
from uhardy.unitary import GroupElement, RandomStream, dumps_matrices, haar_sample

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
MAX_SAMPLE_DIM = 64
MAX_SAMPLE_COUNT = 10_000
MAX_COMPARE_Q = 8


class UsageError(Exception):
    """Bad flag value; reported with exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def default_seed() -> int:
    raw = os.environ.get("UHARDY_SEED")
    if raw is None or raw == "":
        return 0
    try:
        return int(raw, 0)
    except ValueError:
        raise UsageError(f"UHARDY_SEED must be an integer, got {raw!r}") from None


def parse_complex(text: str, field: str) -> complex:
    """``"re,im"`` or ``"re"``."""
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]))
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise UsageError(f"{field}: expected 're,im', got {text!r}")


def parse_vector(text: str, field: str) -> EVector:
    """Comma-separated complex entries in Python syntax, e.g. ``0.3,0.1+0.2j``."""
    try:
        return EVector([complex(t.strip().replace(" ", "")) for t in text.split(",")])
    except ValueError:
        raise UsageError(f"{field}: cannot parse {text!r} as a complex vector") from None


def parse_int_list(text: str, field: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"{field}: expected comma-separated integers, got {text!r}") from None


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="RNG seed (default: $UHARDY_SEED or 0)")
    p.add_argument("--out", default=None, help="write the report to this path")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="uhardy", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", help="run a verification suite")
    _add_common(p)
    p.add_argument("--suite", default="all", help=f"one of: {', '.join(SUITES)}")
    p.add_argument("--samples", type=int, default=200_000)
    p.add_argument("--level", type=int, default=6)
    p.add_argument("--degree", type=int, default=6)
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("sample", help="print Haar unitaries as JSON")
    _add_common(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--count", type=int, default=1)

    p = sub.add_parser("kernel-compare", help="tabulate the three kernel forms")
    _add_common(p)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--nmax", type=int, default=6)
    p.add_argument("--z", default="0.5,0")

    p = sub.add_parser("mc", help="sphere moment of one monomial at a sampling level")
    _add_common(p)
    p.add_argument("--lambda", dest="lam", required=True, help="partition, e.g. 2,1")
    p.add_argument("--iota", default=None, help="indices, e.g. 1,2 (default 1..len)")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--samples", type=int, default=200_000)

    p = sub.add_parser("transform", help="evaluate f~(x) and C_r[f](x) for a coefficient file")
    _add_common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--x", required=True)
    return parser


def _header(args, config: dict, started: float) -> dict:
    return {
        "command": args.command,
        "seed": args.seed,
        "config": config,
        "version": __version__,
        "wall_clock_ms": round((time.perf_counter() - started) * 1000, 3),
    }


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    try:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {out}: {exc}") from exc


def cmd_verify(args, started: float) -> int:
    if args.suite not in SUITES:
        raise UsageError(f"--suite: unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    try:
        config = SuiteConfig(
            seed=args.seed,
            samples=args.samples,
            level=args.level,
            degree=args.degree,
            dim=args.dim,
            out_path=args.out,
            format=args.format,
            workers=args.workers,
        )
    except UHardyError as exc:
        raise UsageError(str(exc)) from None
    rows, diagnostics = run_suite(args.suite, config)
    cfg = config.as_dict()
    cfg["suite"] = args.suite
    report = Report(_header(args, cfg, started), rows, diagnostics)
    report.diagnostics["sigma_histogram"] = [report.sigma_histogram()]
    report.header["wall_clock_ms"] = round((time.perf_counter() - started) * 1000, 3)
    _emit(report.render(args.format), args.out)
    for c in report.checks:
        if c.asserted:
            print(c.line(), file=sys.stderr)
    failed = report.asserted_failures
    print(
        f"{len(report.checks)} rows, {len(failed)} asserted failures", file=sys.stderr
    )
    return EXIT_OK if not failed else EXIT_FAIL


def cmd_sample(args, started: float) -> int:
    if not 1 <= args.m <= MAX_SAMPLE_DIM:
        raise UsageError(f"--m: must lie in 1..{MAX_SAMPLE_DIM}, got {args.m}")
    if not 1 <= args.count <= MAX_SAMPLE_COUNT:
        raise UsageError(f"--count: must lie in 1..{MAX_SAMPLE_COUNT}, got {args.count}")
    rng = RandomStream(args.seed)
    mats = [haar_sample(args.m, rng) for _ in range(args.count)]
    if args.format == "csv":
        lines = ["sample,row,col,re,im"]
        for s, u in enumerate(mats):
            for (i, j), z in np.ndenumerate(u.entries):
                lines.append(f"{s},{i},{j},{z.real!r},{z.imag!r}")
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(dumps_matrices(mats), args.out)
    return EXIT_OK


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, complex):
        return f"{v.real:.6g}{v.imag:+.6g}j"
    return f"{v:.3e}" if isinstance(v, float) else str(v)


def cmd_kernel_compare(args, started: float) -> int:
    if not 1 <= args.q <= MAX_COMPARE_Q:
        raise UsageError(f"--q: must lie in 1..{MAX_COMPARE_Q}, got {args.q}")
    if not 0 <= args.nmax <= 20:
        raise UsageError(f"--nmax: must lie in 0..20, got {args.nmax}")
    z = parse_complex(args.z, "--z")
    if abs(z) >= 1:
        raise UsageError(f"--z: need |z| < 1, got {abs(z):.6g}")
    gen = stream(SuiteConfig(seed=args.seed), f"cli:kernel-compare:{args.q}").generator
    u = GroupElement.rho(haar_sample(args.q, gen))
    v = GroupElement.rho(haar_sample(args.q, gen))
    rep = kernel_compare(u, v, args.nmax, z)
    cols = [
        "n",
        "fock_sum",
        "binomial_sum",
        "product_coeff",
        "fock_vs_binomial",
        "fock_vs_product",
        "binomial_vs_product",
    ]
    if args.format == "json":
        obj = {
            "header": _header(args, {"q": args.q, "nmax": args.nmax, "z": z}, started),
            "q": rep.q,
            "c": rep.c,
            "product_value": rep.product_value,
            "rows": rep.rows,
            "discrepancy_rows": [r["n"] for r in rep.discrepancy_rows()],
        }
        _emit(json.dumps(jsonable(obj), indent=1), args.out)
    else:
        lines = [f"# q={rep.q} c={_fmt(rep.c)} z={_fmt(complex(z))}", ",".join(cols)]
        lines += [",".join(_fmt(r[c]) for c in cols) for r in rep.rows]
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_mc(args, started: float) -> int:
    lam = parse_int_list(args.lam, "--lambda")
    iota = parse_int_list(args.iota, "--iota") if args.iota else list(range(1, len(lam) + 1))
    try:
        key = BasisKey.from_partition(lam, iota)
    except UHardyError as exc:
        raise UsageError(f"--lambda/--iota: {exc}") from None
    if args.samples <= 0:
        raise UsageError("--samples: must be positive")
    if args.level < 1 or key.max_index > args.level:
        raise UsageError(f"--level: must be >= 1 and >= every index, got {args.level}")
    rng = stream(SuiteConfig(seed=args.seed, level=args.level, dim=1), f"cli:mc:{key.pairs}:{args.level}")
    check = sphere_moment_check(key, args.level, args.samples, rng)
    cfg = {"lambda": lam, "iota": iota, "level": args.level, "samples": args.samples}
    report = Report(_header(args, cfg, started), [check])
    _emit(report.render(args.format), args.out)
    print(check.line(), file=sys.stderr)
    return EXIT_OK if check.passed else EXIT_FAIL


def cmd_transform(args, started: float) -> int:
    try:
        with open(args.input, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"--input: cannot read {args.input}: {exc.strerror}") from None
    try:
        f = HardyFunction.loads(text)
    except (UHardyError, ValueError) as exc:
        raise UsageError(f"--input: {exc}") from None
    r = args.r
    if not 0 <= r <= 1:
        raise UsageError(f"--r: must lie in [0, 1], got {r}")
    x = parse_vector(args.x, "--x")
    if not x.norm() < 1:
        raise UsageError(f"--x: need ||x|| < 1, got {x.norm():.6g}")
    fr = f if r == 1 else radial_transform(f, r)
    out = {
        "header": _header(args, {"input": args.input, "r": r, "x": args.x}, started),
        "f(x)": extend(f, x),
        "C_r[f](x)": extend(fr, x),
        "norm_f": f.norm(),
        "norm_C_r_f": fr.norm(),
        "boundary_gap": boundary_gap(f, r),
    }
    if args.format == "json":
        _emit(json.dumps(jsonable(out), indent=1), args.out)
    else:
        lines = ["quantity,re,im"]
        for k, v in out.items():
            if k != "header":
                v = complex(v)
                lines.append(f"{k},{v.real!r},{v.imag!r}")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "sample": cmd_sample,
    "kernel-compare": cmd_kernel_compare,
    "mc": cmd_mc,
    "transform": cmd_transform,
}


def main(argv: list[str] | None = None) -> int:
    started = time.perf_counter()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.seed is None:
            args.seed = default_seed()
        return COMMANDS[args.command](args, started)
    except UsageError as exc:
        print(f"uhardy: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"uhardy: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except UHardyError as exc:
        print(f"uhardy: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
