"""Command-line front end: ``spectrum``, ``kernel``, ``mathieu``, ``verify``.

Exit codes: 0 ok, 1 verification failure, 2 bad configuration,
3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import TOOL_NAME, __version__
from . import io as out_io
from .errors import ConvergenceError, DegenerateModeError, IllConditionedError
from .mathieu import (
    MAX_B2,
    ModeFamily,
    eval_modified_bessel_series,
    eval_modified_fourier,
    eval_periodic,
    fourier_coefficients,
    joining_constants,
)
from .propagator import (
    MAX_MODES,
    PAPER,
    PHYSICAL,
    Splitting,
    TimeArgument,
    euclidean_trotter_kernel,
    kernel_trace,
    spectral_grid_kernel,
    spectral_kernel,
    spectral_partition_sum,
)
from .spectrum import energy_levels, negative_coupling_spectrum
from .verify import FAIL, GROUPS, VerifyConfig, resolve_group, run_groups

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

DIMENSION_NOTE = (
    "q and t are dimensionless; rescaling t -> mu t, q -> mu q "
    "(mu = pendulum mass) restores units. No conversion is applied."
)


class ConfigError(ValueError):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def _check_b2(b2: float, allow_negative: bool = False) -> None:
    _require(math.isfinite(b2), "b2 must be finite")
    lo = -MAX_B2 if allow_negative else 0.0
    _require(lo <= b2 <= MAX_B2, f"b2 must lie in [{lo:g}, {MAX_B2:g}]")


# -- commands -----------------------------------------------------------------

def run_spectrum(args) -> int:
    _check_b2(args.b2, allow_negative=True)
    _require(1 <= args.levels <= 64, "--levels must be in [1, 64]")
    if args.b2 < 0:
        spec = negative_coupling_spectrum(args.b2, args.levels, args.truncation)
    else:
        spec = energy_levels(args.b2, args.levels, args.truncation)
    text = out_io.spectrum_csv(spec) if args.format == "csv" else out_io.spectrum_json(spec)
    _emit(text, args.out)
    return EXIT_OK


def _time_argument(args) -> TimeArgument:
    _require((args.beta is None) != (args.time is None), "give exactly one of --beta or --time")
    if args.beta is not None:
        _require(args.beta > 0, "--beta must be positive")
        return TimeArgument.imaginary(args.beta)
    _require(args.time != 0 and math.isfinite(args.time), "--time must be finite and non-zero")
    return TimeArgument.real(args.time)


def run_kernel(args) -> int:
    _check_b2(args.b2)
    time = _time_argument(args)
    _require(1 <= args.modes <= MAX_MODES, f"--modes must be in [1, {MAX_MODES}]")
    convention = args.convention
    if time.kind.value == "IMAGINARY_TIME":
        _require(convention in (None, PHYSICAL), "imaginary time uses the physical convention")

    if args.trotter is not None:
        _require(time.kind.value == "IMAGINARY_TIME", "--trotter needs --beta (imaginary time)")
        _require(1 <= args.trotter <= 4096, "--trotter must be in [1, 4096]")
        grid = args.grid or 128
        _require(grid >= 64 and grid & (grid - 1) == 0, "--grid must be a power of two >= 64")
        splitting = Splitting(args.splitting.upper())
        trot = euclidean_trotter_kernel(time.value, args.trotter, grid, args.b2, splitting)
        if not args.compare:
            _emit(out_io.grid_csv(trot) if args.format == "csv" else out_io.grid_json(trot), args.out)
            return EXIT_OK
        ref = spectral_grid_kernel(time, args.b2, grid, args.modes)
        import numpy as np

        sup = float(np.max(np.abs(trot.matrix - ref.matrix)))
        report = out_io.header(
            b2=args.b2,
            time={"kind": time.kind.value, "beta": time.value},
            grid_size=grid,
            slices=args.trotter,
            eps=trot.eps,
            splitting=splitting.value,
            modes_per_family=ref.truncation,
            convention=PHYSICAL,
            sup_norm_error=sup,
            trace_trotter=kernel_trace(trot),
            trace_spectral=kernel_trace(ref),
            partition_sum=spectral_partition_sum(args.b2, time.value, ref.truncation),
        )
        if args.format == "csv":
            text = out_io._csv_text({k: v for k, v in report.items()}, [], [])
        else:
            text = out_io.dumps(report)
        _emit(text, args.out)
        return EXIT_OK

    if args.q is not None or args.qprime is not None:
        _require(args.q is not None and args.qprime is not None, "give both --q and --qprime")
        q, qp = (args.qprime, args.q) if args.swap else (args.q, args.qprime)
        ev = spectral_kernel(q, qp, time, args.b2, args.modes, convention)
        text = out_io.kernel_value_csv(ev) if args.format == "csv" else out_io.kernel_value_json(ev)
        _emit(text, args.out)
        return EXIT_OK

    grid = args.grid or 128
    _require(grid >= 4, "--grid must be >= 4")
    k = spectral_grid_kernel(time, args.b2, grid, args.modes, convention)
    if args.format == "csv":
        _require(time.kind.value == "IMAGINARY_TIME", "CSV grid output needs --beta; use --format json")
        text = out_io.grid_csv(k)
    else:
        text = out_io.grid_json(k)
    _emit(text, args.out)
    return EXIT_OK


def run_mathieu(args) -> int:
    _check_b2(args.b2)
    _require(0 <= args.m < MAX_MODES, f"--m must be in [0, {MAX_MODES})")
    family = ModeFamily(args.family.upper())
    mode = fourier_coefficients(args.b2, family, args.m, args.truncation)
    points = [{"x": x, "value": eval_periodic(mode, x)} for x in args.x]
    modified = []
    for y in args.y:
        _require(abs(y) <= 10, "|y| must be <= 10")
        if args.representation == "bessel":
            _require(args.b2 > 0, "Bessel-product representation needs b2 > 0")
            val = eval_modified_bessel_series(mode, y, math.sqrt(args.b2))
        else:
            val = eval_modified_fourier(mode, y)
        modified.append({"y": y, "re": val.real, "im": val.imag})
    meta = out_io.header(
        b2=args.b2,
        family=family.value,
        m=args.m,
        label=family.label(args.m),
        characteristic_value=mode.h,
        truncation=mode.truncation,
        representation=args.representation,
        convention="ce/se normalized to integral of square over [0, 2 pi) = pi; Ce(y)=ce(iy), Se(y)=se(iy)",
    )
    if args.b2 > 0 or family is ModeFamily.CE_EVEN:
        meta["joining_constant"] = joining_constants(mode).value
    if args.format == "csv":
        rows = [["periodic", out_io.fmt(p["x"]), out_io.fmt(p["value"]), out_io.fmt(0.0)] for p in points]
        rows += [["modified", out_io.fmt(v["y"]), out_io.fmt(v["re"]), out_io.fmt(v["im"])] for v in modified]
        text = out_io._csv_text(meta, ["kind", "argument", "re", "im"], rows)
    else:
        meta["periodic"] = points
        meta["modified"] = modified
        text = out_io.dumps(meta)
    _emit(text, args.out)
    return EXIT_OK


def _parse_tolerances(items) -> dict:
    out = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        _require(bool(sep), f"--tolerance expects NAME=VALUE, got {item!r}")
        try:
            out[name] = float(value)
        except ValueError:
            raise ConfigError(f"bad tolerance value in {item!r}") from None
    return out


def run_verify(args) -> int:
    _check_b2(args.b2)
    _require(args.beta > 0, "--beta must be positive")
    if args.all:
        names = list(GROUPS)
    else:
        _require(bool(args.group), "give --group NAME (repeatable) or --all")
        try:
            names = [resolve_group(g) for g in args.group]
        except KeyError as exc:
            raise ConfigError(f"unknown group {exc.args[0]!r}; choose from {', '.join(GROUPS)}") from None
    cfg = VerifyConfig(b2=args.b2, beta=args.beta, tolerances=_parse_tolerances(args.tolerance))
    reports = run_groups(names, cfg)
    for rep in reports:
        print(rep.line())
    failed = sum(rep.status == FAIL for rep in reports)
    print(f"{len(reports)} checks, {failed} failed")
    if args.out:
        data = out_io.header(b2=args.b2, beta=args.beta, groups=names,
                             reports=[rep.as_dict() for rep in reports])
        Path(args.out).write_text(json.dumps(data, indent=2) + "\n")
    return EXIT_VERIFY if failed else EXIT_OK


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=TOOL_NAME, description=__doc__.splitlines()[0],
                                     epilog=DIMENSION_NOTE)
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt=True):
        p.add_argument("--b2", type=float, default=1.0, help="coupling b^2 of V = b^2 cos 2q")
        p.add_argument("--out", help="write output here instead of stdout")
        if fmt:
            p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("spectrum", help="energy levels in both conventions")
    common(p)
    p.add_argument("--levels", type=int, default=4, help="levels per family")
    p.add_argument("--truncation", type=int, help="starting recurrence size N")
    p.set_defaults(func=run_spectrum)

    p = sub.add_parser("kernel", help="spectral or time-sliced propagator")
    common(p)
    p.add_argument("--beta", type=float, help="imaginary time")
    p.add_argument("--time", type=float, help="real time T")
    p.add_argument("--q", type=float)
    p.add_argument("--qprime", type=float)
    p.add_argument("--swap", action="store_true", help="exchange q and q'")
    p.add_argument("--grid", type=int, help="grid size G")
    p.add_argument("--modes", type=int, default=32, help="modes per family")
    p.add_argument("--convention", choices=(PAPER, PHYSICAL))
    p.add_argument("--trotter", type=int, metavar="N", help="compose N+1 Euclidean slices")
    p.add_argument("--splitting", choices=("strang", "lie", "STRANG", "LIE"), default="strang")
    p.add_argument("--compare", action="store_true", help="report Trotter vs spectral errors")
    p.set_defaults(func=run_kernel)

    p = sub.add_parser("mathieu", help="evaluate ce/se and Ce/Se")
    common(p)
    p.add_argument("--family", default="CE_EVEN", choices=[f.value for f in ModeFamily] +
                   [f.value.lower() for f in ModeFamily])
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--x", type=_floats, default=[], help="points for ce/se")
    p.add_argument("--y", type=_floats, default=[], help="points for Ce/Se")
    p.add_argument("--representation", choices=("fourier", "bessel"), default="fourier")
    p.add_argument("--truncation", type=int, help="starting recurrence size N")
    p.set_defaults(func=run_mathieu)

    p = sub.add_parser("verify", help="run verification groups")
    common(p, fmt=False)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--group", action="append", help=f"one of: {', '.join(GROUPS)}")
    p.add_argument("--all", action="store_true")
    p.add_argument("--tolerance", action="append", metavar="NAME=VALUE")
    p.set_defaults(func=run_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "truncation", None) is not None:
            _require(4 <= args.truncation <= 512, "--truncation must be in [4, 512]")
        return args.func(args)
    except ConfigError as exc:
        print(f"{TOOL_NAME} {args.command}: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, DegenerateModeError) as exc:
        print(f"{TOOL_NAME} {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (IllConditionedError, ValueError) as exc:
        print(f"{TOOL_NAME} {args.command}: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
