"""Command-line front end: ``render``, ``verify``, ``pipeline`` and ``retrieve``.

Exit codes: 0 success, 1 invalid arguments, 2 numerical or tolerance
failure, 3 file I/O failure.
"""

import argparse
import csv
import math
import os
import sys
from dataclasses import replace

import numpy as np

from . import verify as verify_suite
from .analysis import write_report
from .field import (
    FieldError,
    FieldFormatError,
    GridSpec,
    ScalarField,
    intensity,
    phase,
    read_field,
    read_pgm,
    write_field,
    write_pgm,
)
from .holography import ENCODINGS, HologramError, HologramSpec, four_frame, run_pipeline
from .specfun import J_MAX_ABS, SpecialFunctionError
from .states import (
    DEFAULT_TOL,
    CoherentParam,
    Family,
    LGIndex,
    StateError,
    StateSpec,
    TruncationError,
    state_field,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3

PIPELINE_MIN_CORRELATION = 0.99
PIPELINE_MAX_RMS_PHASE = 0.05


class UsageError(Exception):
    """Invalid command-line input; reported with exit code 1."""


def _sign(text):
    table = {"+": 1, "+1": 1, "1": 1, "-": -1, "-1": -1}
    if text not in table:
        raise argparse.ArgumentTypeError(f"sign must be + or -, got {text!r}")
    return table[text]


def _vector(text):
    try:
        parts = [float(v) for v in str(text).split(",")]
    except ValueError:
        parts = []
    if len(parts) != 2 or not all(math.isfinite(v) for v in parts):
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}")
    return tuple(parts)


def _add_state_flags(p):
    g = p.add_argument_group("state")
    g.add_argument("--family", choices=[f.value for f in Family], help="coherent-state family")
    g.add_argument("--zeta", type=float, default=0.0, help="modulus of the coherent parameter")
    g.add_argument("--theta", type=float, default=0.0, help="phase of the coherent parameter (radians)")
    g.add_argument("--j", type=float, default=0.0, help="SU(2) Bargmann parameter (half-integer >= 0)")
    g.add_argument("--k", type=float, default=0.5, help="SU(1,1) Bargmann parameter")
    g.add_argument("--n", type=int, default=0, help="circular excitation number (subspace families)")
    g.add_argument("--sign", type=_sign, default=1, help="circular branch, + or -")
    g.add_argument("--p", type=int, default=0, help="LG radial number")
    g.add_argument("--l", type=int, default=0, help="LG azimuthal number")
    g.add_argument("--tol", type=float, default=DEFAULT_TOL, help="series truncation tolerance")


def _add_grid_flags(p, n):
    g = p.add_argument_group("grid")
    g.add_argument("--grid-n", type=int, default=n, help=f"samples per axis (default {n})")
    g.add_argument("--half-width", type=float, default=8.0, help="window half-width L (default 8)")


def build_parser():
    parser = argparse.ArgumentParser(prog="lgcoherent", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="key=value file whose entries act as defaults for the flags")
    sub = parser.add_subparsers(dest="command", required=True)
    parser.subcommands = sub.choices

    p = sub.add_parser("render", help="sample a state and write intensity, phase and CFLD1 files")
    _add_state_flags(p)
    _add_grid_flags(p, 1024)
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--sweep-theta", help="a:b:steps, render frames with theta from a to b inclusive")

    p = sub.add_parser("verify", help="run the property-lattice verification suite")
    p.add_argument("--only", help="comma-separated groups: " + ",".join(verify_suite.GROUPS))
    p.add_argument("--report", default="verify_report.csv", help="CSV report path ('-' for stdout)")
    p.add_argument("--dump-fields", help="directory to write every sampled field as CFLD1")

    p = sub.add_parser("pipeline", help="simulate hologram encoding, 4f filtering and four-frame retrieval")
    _add_state_flags(p)
    _add_grid_flags(p, 512)
    p.add_argument("--target", help="CFLD1 file to use as the target instead of --family")
    p.add_argument("--encoding", choices=ENCODINGS, default="phase_of_sum")
    p.add_argument("--reference", choices=("analytic", "hologram"), default="analytic")
    p.add_argument("--reference-amplitude", type=float, help="reference amplitude A (default 3)")
    p.add_argument("--carrier1", type=_vector, help="object carrier kx,ky in cycles per unit length")
    p.add_argument("--carrier2", type=_vector, help="reference carrier kx,ky in cycles per unit length")
    p.add_argument("--filter-center", type=_vector, help="filter centre (default: carrier1)")
    p.add_argument("--filter-radius", type=float, help="filter radius in cycles per unit length")
    p.add_argument("--out", default=".", help="output directory")

    p = sub.add_parser("retrieve", help="four-frame phase retrieval from PGM interferograms")
    p.add_argument("frames", nargs=4, help="frames at phase steps 0, pi/2, pi, 3pi/2")
    p.add_argument("--half-width", type=float, default=8.0, help="window half-width recorded with the result")
    p.add_argument("--out", default="phase.pgm", help="output phase PGM")
    return parser


# -- configuration --------------------------------------------------------------


def read_config(path):
    """Parse ``key=value`` lines; ``#`` starts a comment, dashes in keys become underscores."""
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc.strerror}") from exc
    for num, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{num}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def _parse(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.config:
        return args
    config = read_config(args.config)
    # re-parse with the config entries as defaults so explicit flags still win
    subparser = parser.subcommands[args.command]
    known = {a.dest: a for a in subparser._actions}
    defaults = {}
    for key, text in config.items():
        if key not in known or key in ("help", "config"):
            raise UsageError(f"config key {key!r} is not an option of {args.command!r}")
        action = known[key]
        try:
            defaults[key] = action.type(text) if action.type else text
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"config key {key!r}: {exc}") from exc
        if action.choices is not None and defaults[key] not in action.choices:
            raise UsageError(f"config key {key!r} must be one of {sorted(action.choices)}")
    subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


# -- validation -----------------------------------------------------------------


def state_from_args(args, require=True):
    if args.family is None:
        if require:
            raise UsageError("--family is required")
        return None
    if not (0 < args.tol <= 1e-6):
        raise UsageError(f"--tol must lie in (0, 1e-6], got {args.tol}")
    try:
        spec = StateSpec(
            Family(args.family),
            CoherentParam(args.zeta, args.theta),
            sign=args.sign,
            j=args.j,
            k=args.k,
            n=args.n,
            lg=LGIndex(args.p, args.l),
        )
    except StateError as exc:
        raise UsageError(str(exc)) from exc
    return spec


def grid_from_args(args, power_of_two=False):
    try:
        grid = GridSpec(args.grid_n, args.half_width)
    except FieldError as exc:
        raise UsageError(str(exc)) from exc
    if power_of_two and grid.n & (grid.n - 1):
        raise UsageError(f"--grid-n must be a power of two for the pipeline, got {grid.n}")
    return grid


def check_range(spec, grid):
    """Reject states whose Bessel-Gauss argument would leave the working range on ``grid``."""
    if spec.family is Family.SU11_BG:
        reach = 2.0 * math.sqrt(spec.param.zeta) * math.sqrt(2.0) * grid.half_width
        if reach > J_MAX_ABS:
            limit = (J_MAX_ABS / (2.0 * math.sqrt(2.0) * grid.half_width)) ** 2
            raise UsageError(
                f"su11bg with zeta={spec.param.zeta:g} needs |J argument| up to {reach:.4g} > {J_MAX_ABS:g} "
                f"on half-width {grid.half_width:g}; use zeta <= {limit:.4g} or a smaller --half-width"
            )


def _parse_sweep(text):
    parts = text.split(":")
    try:
        a, b, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except (ValueError, IndexError):
        raise UsageError(f"--sweep-theta must be a:b:steps, got {text!r}") from None
    if len(parts) != 3 or steps < 1 or not (math.isfinite(a) and math.isfinite(b)):
        raise UsageError(f"--sweep-theta must be a:b:steps with steps >= 1, got {text!r}")
    if steps == 1:
        return [a]
    return [a + (b - a) * i / (steps - 1) for i in range(steps)]


def _ensure_dir(path):
    os.makedirs(path, exist_ok=True)


# -- subcommands ----------------------------------------------------------------


def _write_state(f, out, suffix=""):
    write_pgm(intensity(f), os.path.join(out, f"intensity{suffix}.pgm"))
    write_pgm(phase(f), os.path.join(out, f"phase{suffix}.pgm"))
    write_field(f, os.path.join(out, f"field{suffix}.cfld"))


def cmd_render(args):
    spec = state_from_args(args)
    grid = grid_from_args(args)
    check_range(spec, grid)
    thetas = _parse_sweep(args.sweep_theta) if args.sweep_theta else None
    _ensure_dir(args.out)
    if thetas is None:
        _write_state(state_field(spec, grid, args.tol), args.out)
        print(f"rendered {spec.label()} on n={grid.n} L={grid.half_width:g} -> {args.out}")
        return EXIT_OK
    width = max(3, len(str(len(thetas) - 1)))
    for i, theta in enumerate(thetas):
        frame = replace(spec, param=CoherentParam(spec.param.zeta, theta))
        _write_state(state_field(frame, grid, args.tol), args.out, f"_{i:0{width}d}")
    print(f"rendered {len(thetas)} frames of {spec.family.value} -> {args.out}")
    return EXIT_OK


def cmd_verify(args):
    only = [g.strip() for g in args.only.split(",") if g.strip()] if args.only else None
    if only is not None:
        unknown = [g for g in only if g not in verify_suite.GROUPS]
        if unknown or not only:
            raise UsageError(f"--only: unknown group(s) {unknown}; choose from {','.join(verify_suite.GROUPS)}")
    try:
        workers = verify_suite.worker_count()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.dump_fields:
        _ensure_dir(args.dump_fields)
    ctx = verify_suite.VerifyContext(dump_dir=args.dump_fields)
    rows = verify_suite.run(only, ctx=ctx, workers=workers)
    if args.report == "-":
        write_report(rows, sys.stdout)
    else:
        parent = os.path.dirname(args.report)
        if parent:
            _ensure_dir(parent)
        with open(args.report, "w", newline="", encoding="utf-8") as fh:
            write_report(rows, fh)
    failed = [r for r in rows if not r.passed]
    print(f"verify: {len(rows) - len(failed)}/{len(rows)} checks passed", file=sys.stderr)
    for r in failed:
        print(f"  FAIL {r.family} [{r.parameters}] {r.metric}={r.value:.6g} (reference {r.reference:.6g})", file=sys.stderr)
    return EXIT_OK if not failed else EXIT_NUMERICAL


def _hologram_from_args(args, grid):
    base = HologramSpec.default(grid, args.encoding)
    try:
        return HologramSpec(
            carrier_1=args.carrier1 or base.carrier_1,
            carrier_2=args.carrier2 or base.carrier_2,
            filter_radius=base.filter_radius if args.filter_radius is None else args.filter_radius,
            encoding=args.encoding,
            filter_center=args.filter_center,
            reference_amplitude=base.reference_amplitude if args.reference_amplitude is None else args.reference_amplitude,
        )
    except HologramError as exc:
        raise UsageError(str(exc)) from exc


def cmd_pipeline(args):
    if args.target and args.family:
        raise UsageError("give either --target or --family, not both")
    if args.target:
        target = read_field(args.target)
        grid = target.spec
        if grid.n & (grid.n - 1):
            raise UsageError(f"target grid n={grid.n} is not a power of two")
        if not np.any(target.data):
            raise UsageError(f"target {args.target} is identically zero")
        label = os.path.basename(args.target)
        family = "file"
    else:
        spec = state_from_args(args)
        grid = grid_from_args(args, power_of_two=True)
        check_range(spec, grid)
        target = None
        label = spec.label()
        family = spec.family.value
    h = _hologram_from_args(args, grid)
    if h.reference_amplitude == 0:
        raise UsageError("--reference-amplitude must be positive for four-frame retrieval")
    if args.reference == "hologram" and h.encoding != "phase_of_sum":
        raise UsageError("--reference hologram requires --encoding phase_of_sum")
    _ensure_dir(args.out)
    if target is None:
        target = state_field(spec, grid, args.tol)
    res = run_pipeline(target, h, reference=args.reference)

    out = args.out
    for i, mask in enumerate(res.masks):
        name = "mask.pgm" if len(res.masks) == 1 else f"mask_{i + 1}.pgm"
        write_pgm(ScalarField(grid, mask.values), os.path.join(out, name), "fixed", (0.0, 2 * math.pi))
    # a shared scale keeps the frames mutually consistent for ``retrieve``
    top = max(float(f.data.max()) for f in res.frames)
    for i, frame in enumerate(res.frames, 1):
        write_pgm(frame, os.path.join(out, f"frame_{i}.pgm"), "fixed", (0.0, top))
    write_pgm(res.recovered_phase, os.path.join(out, "recovered_phase.pgm"))
    write_pgm(intensity(res.recovered_field), os.path.join(out, "recovered_intensity.pgm"))
    write_field(res.recovered_field, os.path.join(out, "recovered.cfld"))
    write_field(target, os.path.join(out, "target.cfld"))

    passed = res.correlation > PIPELINE_MIN_CORRELATION and res.rms_phase_error < PIPELINE_MAX_RMS_PHASE
    with open(os.path.join(out, "metrics.csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["family", "parameters", "encoding", "reference", "correlation", "rms_phase_error", "pass"])
        w.writerow(
            [family, label, h.encoding, args.reference, repr(res.correlation), repr(res.rms_phase_error),
             "pass" if passed else "fail"]
        )
    print(f"pipeline {label} [{h.encoding}]: correlation={res.correlation:.6f} rms_phase_error={res.rms_phase_error:.4f} rad")
    return EXIT_OK if passed else EXIT_NUMERICAL


def cmd_retrieve(args):
    frames = [read_pgm(path) for path in args.frames]
    shape = frames[0].shape
    for path, f in zip(args.frames, frames):
        if f.shape != shape:
            raise UsageError(f"{path}: size {f.shape} differs from {shape}")
    if shape[0] != shape[1]:
        raise UsageError(f"frames must be square, got {shape}")
    try:
        grid = GridSpec(shape[0], args.half_width)
    except FieldError as exc:
        raise UsageError(str(exc)) from exc
    fields = [ScalarField(grid, f.astype(float), kind="intensity") for f in frames]
    ph, valid = four_frame(*fields, return_valid=True)
    write_pgm(ph, args.out)
    print(f"retrieved phase -> {args.out} ({int((~valid).sum())} pixels without fringe contrast)")
    return EXIT_OK


COMMANDS = {"render": cmd_render, "verify": cmd_verify, "pipeline": cmd_pipeline, "retrieve": cmd_retrieve}


def main(argv=None):
    try:
        args = _parse(argv)
    except SystemExit as exc:
        # argparse reports its own usage errors with status 2; map to the validation code
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except FieldFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (TruncationError, SpecialFunctionError, FieldError, ArithmeticError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
