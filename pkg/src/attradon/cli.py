"""Command-line interface.

Exit codes: 0 success, 1 usage, 2 numerical or validation failure, 3 I/O.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import formats
from .fields import UnsupportedOperationError, parse_phantom_spec
from .formats import FormatError
from .geometry import SinogramGrid
from .novikov import ReconstructionConfig, reconstruct, relative_l2_error
from .plancherel import (SinogramInterpolator, direct_evaluator, pair_monte_carlo,
                         pair_quadrature, pairing_kernel)
from .radon import GridMismatchError, forward_sinogram
from .selftest import format_report, run_selftest

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _phantom(spec, flag):
    """Registry spec ``name:key=val,...`` or ``file:<path>`` for a sampled AFG1
    field (evaluable, but without a gradient)."""
    if spec is None:
        raise UsageError(f"{flag} is required")
    if spec.startswith("file:"):
        return formats.read_field(spec[len("file:"):]).to_field()
    try:
        return parse_phantom_spec(spec)
    except ValueError as exc:
        raise UsageError(f"{flag}: {exc}") from None


def _grid(args):
    try:
        return SinogramGrid(args.n_angles, args.n_p, args.p_max)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _add_grid(p):
    p.add_argument("--n-angles", type=int, default=360, help="angles on [0, 2 pi)")
    p.add_argument("--n-p", type=int, default=512, help="offsets per angle")
    p.add_argument("--p-max", type=float, default=6.0, help="offsets span [-p_max, p_max]")


SPEC_HELP = ("phantom spec: name[:key=value,...], e.g. gaussian:A=0.3,sigma=1.5; "
             "file:<path.afg> for a sampled field")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="attradon", description="Attenuated Radon transform toolkit")
    parser.add_argument("--config", help="key=value file overriding flag defaults")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("forward", help="write the attenuated sinogram of f (ASG1)")
    p.add_argument("--f", required=True, help=SPEC_HELP)
    p.add_argument("--a", default="zero", help="attenuation spec (default: zero)")
    _add_grid(p)
    p.add_argument("--out", required=True, help="output .asg path")
    p.add_argument("--workers", type=int, default=1, help="threads over angle rows")

    p = sub.add_parser("invert", help="reconstruct f from an ASG1 sinogram (AFG1)")
    p.add_argument("--sino", required=True, help="ASG1 sinogram of f")
    p.add_argument("--a", default="zero", help="attenuation spec the data was taken with")
    p.add_argument("--nx", type=int, default=128, help="pixels along x")
    p.add_argument("--ny", type=int, default=128, help="pixels along y")
    p.add_argument("--L", type=float, default=3.0, help="field of view [-L, L]^2")
    p.add_argument("--out", required=True, help="output .afg path")
    p.add_argument("--pgm", help="also write an 8-bit PGM rendering")
    p.add_argument("--truth", help="phantom spec; print the relative L2 error")

    for name, helptext in (("pair", "pairing by quadrature"),
                           ("pair-mc", "pairing by Monte Carlo over lines")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--sino", help="ASG1 sinogram of f")
        p.add_argument("--f", help="phantom spec for f when no sinogram is given")
        p.add_argument("--g", required=True, help="probe spec; needs an analytic gradient")
        p.add_argument("--a", default="zero", help="attenuation spec")
        _add_grid(p)
        p.add_argument("--csv", action="store_true", help="print CSV instead of the record")
        p.add_argument("--workers", type=int, default=1, help="threads (result unchanged)")
        if name == "pair-mc":
            p.add_argument("--samples", type=int, default=1000, help="number of random lines")
            p.add_argument("--seed", type=int, default=0, help="RNG seed")
            p.add_argument("--kernel-table", action="store_true",
                           help="look K up in a kernel precomputed on the grid")

    p = sub.add_parser("selftest", help="run the reduced-resolution invariant suite")
    p.add_argument("--quick", action="store_true", help="coarser grids, a few seconds")

    p = sub.add_parser("render", help="AFG1 field to PGM")
    p.add_argument("--in", dest="inp", required=True, help="AFG1 field")
    p.add_argument("--out", required=True, help="output .pgm path")
    return parser


def _read_config(path):
    values = {}
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            if not sep:
                raise UsageError(f"{path}:{n}: expected key=value")
            values[key.strip().replace("-", "_")] = val.strip()
    return values


def _apply_config(parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    overrides = _read_config(known.config)
    sub = parser._subparsers._group_actions[0]
    for sp in sub.choices.values():
        dests = {a.dest: a for a in sp._actions}
        usable = {}
        for key, val in overrides.items():
            if key in dests:
                action = dests[key]
                try:
                    usable[key] = action.type(val) if action.type else val
                except ValueError:
                    raise UsageError(f"config key {key}: bad value {val!r}") from None
        sp.set_defaults(**usable)
    all_dests = {a.dest for sp in sub.choices.values() for a in sp._actions}
    unknown = set(overrides) - all_dests
    if unknown:
        raise UsageError(f"unknown config key(s): {sorted(unknown)}")


def cmd_forward(args):
    f, a = _phantom(args.f, "--f"), _phantom(args.a, "--a")
    grid = _grid(args)
    t0 = time.perf_counter()
    sino = forward_sinogram(f, a, grid, workers=args.workers)
    formats.write_sinogram(args.out, sino)
    print(f"sinogram {grid.n_angles}x{grid.n_p} p_max={grid.p_max:g} -> {args.out}")
    print(f"wall time {time.perf_counter() - t0:.2f}s")
    return EXIT_OK


def cmd_invert(args):
    a = _phantom(args.a, "--a")
    truth = _phantom(args.truth, "--truth") if args.truth else None
    sino = formats.read_sinogram(args.sino)
    cfg = ReconstructionConfig(args.nx, args.ny, args.L)
    t0 = time.perf_counter()
    recon = reconstruct(sino, a, cfg)
    formats.write_field(args.out, recon)
    if args.pgm:
        formats.write_pgm(args.pgm, recon.values)
    print(f"field {cfg.n_x}x{cfg.n_y} over [-{cfg.L:g}, {cfg.L:g}]^2 -> {args.out}")
    if truth is not None:
        print(f"relative L2 error {relative_l2_error(recon, truth):.6e}")
    print(f"wall time {time.perf_counter() - t0:.2f}s")
    return EXIT_OK


def _data(args):
    if args.sino:
        return formats.read_sinogram(args.sino), None
    f = _phantom(args.f, "--f or --sino")
    return None, f


def cmd_pair(args):
    g, a = _phantom(args.g, "--g"), _phantom(args.a, "--a")
    sino, f = _data(args)
    if sino is None:
        sino = forward_sinogram(f, a, _grid(args), workers=args.workers)
    result = pair_quadrature(sino, g, a, workers=args.workers)
    print(result.csv() if args.csv else result.record())
    return EXIT_OK


def cmd_pair_mc(args):
    g, a = _phantom(args.g, "--g"), _phantom(args.a, "--a")
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    sino, f = _data(args)
    if sino is not None:
        evaluator, grid = SinogramInterpolator(sino), sino.grid
    else:
        evaluator, grid = direct_evaluator(f, a), _grid(args)
    kernel = pairing_kernel(g, a, grid, workers=args.workers) if args.kernel_table else None
    result = pair_monte_carlo(evaluator, g, a, args.samples, args.seed, grid.p_max,
                              kernel=kernel, workers=args.workers)
    print(result.csv() if args.csv else result.record())
    return EXIT_OK


def cmd_selftest(args):
    results = run_selftest(quick=args.quick)
    print(format_report(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERIC


def cmd_render(args):
    field = formats.read_field(args.inp)
    formats.write_pgm(args.out, field.values)
    print(f"{field.n_x}x{field.n_y} -> {args.out}")
    return EXIT_OK


COMMANDS = {"forward": cmd_forward, "invert": cmd_invert, "pair": cmd_pair,
            "pair-mc": cmd_pair_mc, "selftest": cmd_selftest, "render": cmd_render}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (GridMismatchError, UnsupportedOperationError, ValueError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

