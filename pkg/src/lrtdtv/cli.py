"""Command-line front end.

Exit codes: 0 success, 2 usage, 3 I/O or file format, 4 invalid data.
Band numbers on the command line are 1-based.
"""

import argparse
import csv
import json
import logging
import platform
import sys
import time

import numpy as np

from . import __version__
from .hsi_io import HSIFormatError, denormalize_bands, normalize_bands, read_cube, write_cube
from .metrics import evaluate, mean_profile
from .noise_sim import NoiseSpec, apply_noise
from .solver import Model, SolverConfig, restore
from .synthetic import make_clean_cube

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_DATA = 0, 2, 3, 4

log = logging.getLogger("lrtdtv")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


def _band_range(text):
    try:
        a, b = (int(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b, got {text!r}") from None
    if not 1 <= a <= b:
        raise argparse.ArgumentTypeError(f"need 1 <= a <= b, got {text!r}")
    return a, b


def _floats(n):
    def parse(text):
        try:
            vals = tuple(float(v) for v in text.split(","))
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers") from None
        if len(vals) != n:
            raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers, got {text!r}")
        return vals
    return parse


def _ints(n):
    def parse(text):
        try:
            vals = tuple(int(v) for v in text.split(","))
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected {n} comma-separated integers") from None
        if len(vals) != n or min(vals) < 1:
            raise argparse.ArgumentTypeError(f"expected {n} positive integers, got {text!r}")
        return vals
    return parse


def _ranks(text):
    if text == "auto":
        return None
    return _ints(3)(text)


def _versions():
    return {
        "lrtdtv": __version__,
        "numpy": np.__version__,
        "python": platform.python_version(),
    }


def cmd_synth(args):
    cube = make_clean_cube(args.shape, seed=args.seed)
    write_cube(args.output, cube, args.dtype)
    return EXIT_OK


def cmd_simulate(args):
    try:
        spec = NoiseSpec(
            case_id=args.case,
            seed=args.seed,
            gaussian_sigma=args.sigma,
            impulse_fraction=args.impulse,
            deadline_band_range=args.deadline_bands,
            stripe_band_range=args.stripe_bands,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    clean = read_cube(args.input)
    for rng in (spec.deadline_band_range, spec.stripe_band_range):
        if rng is not None and rng[1] > clean.shape[2]:
            raise UsageError(f"band window {rng[0]}:{rng[1]} exceeds {clean.shape[2]} bands")
    try:
        noisy, masks = apply_noise(clean, spec)
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    write_cube(args.output, noisy)
    for name, mask in masks.items():
        write_cube(f"{args.output}.mask_{name}", mask.astype(np.float64), "f32")
    with open(f"{args.output}.noise.json", "w") as fh:
        fh.write(spec.to_json())
    return EXIT_OK


def cmd_restore(args):
    try:
        cfg = SolverConfig(
            model=Model.GENERAL if args.model == "general" else Model.APPROXIMATE,
            tau=args.tau,
            lambda_c=args.lambda_c,
            beta=args.beta,
            weights=args.weights,
            ranks=args.ranks,
            eps=args.eps,
            max_iter=args.max_iter,
            hooi_sweeps=args.hooi_sweeps,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    Y = read_cube(args.input)
    try:
        cfg.ranks_for(Y.shape)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if not np.all(np.isfinite(Y)):
        raise DataError(f"{args.input}: cube contains non-finite values")

    ranges = None
    if args.normalize:
        Y, ranges = normalize_bands(Y)
    t0 = time.perf_counter()
    report = restore(Y, cfg)
    wall = time.perf_counter() - t0

    restored, sparse = report.restored, report.sparse
    if ranges is not None:
        restored = denormalize_bands(restored, ranges)
        # sparse part lives in normalized units; rescale without offset
        spans = np.array([hi - lo for lo, hi in ranges])
        sparse = sparse * spans
    write_cube(args.output, restored)
    write_cube(f"{args.output}.sparse", sparse)

    doc = {
        "input": str(args.input),
        "output": str(args.output),
        "shape": list(Y.shape),
        "normalized": bool(args.normalize),
        "config": cfg.to_dict(),
        "wall_time_s": wall,
        "versions": _versions(),
        **report.summary(),
    }
    with open(f"{args.output}.report.json", "w") as fh:
        json.dump(doc, fh, indent=2)
    log.info("restored in %d iterations (converged=%s, %.2fs)",
             report.iterations, report.converged, wall)
    return EXIT_OK


def cmd_evaluate(args):
    ref = read_cube(args.ref)
    test = read_cube(args.test)
    if ref.shape != test.shape:
        raise DataError(f"shape mismatch: ref {ref.shape} vs test {test.shape}")
    try:
        rep = evaluate(ref, test, win_size=args.win_size)
    except ValueError as exc:
        raise DataError(str(exc)) from exc
    rep.to_csv(args.out)
    if args.json is not None:
        rep.to_json(args.json or f"{args.out}.json")
    print(rep.summary())
    return EXIT_OK


def cmd_profile(args):
    cube = read_cube(args.input)
    if not 1 <= args.band <= cube.shape[2]:
        raise UsageError(f"band {args.band} out of range 1..{cube.shape[2]}")
    prof = mean_profile(cube, args.band - 1, args.axis)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "value"])
        for i, v in enumerate(prof, start=1):
            w.writerow([i, repr(float(v))])
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(
        prog="lrtdtv",
        description="Mixed-noise restoration of hyperspectral cubes.",
    )
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="write a synthetic clean cube")
    s.add_argument("--output", required=True)
    s.add_argument("--shape", type=_ints(3), default=(40, 40, 20), metavar="H,W,B")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--dtype", choices=["f32", "f64"], default="f64")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("simulate", help="corrupt a clean cube with one of the six noise cases")
    s.add_argument("--input", required=True)
    s.add_argument("--case", type=int, choices=range(1, 7), required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--output", required=True)
    s.add_argument("--sigma", type=float, help="Gaussian sigma (upper bound in cases 5-6)")
    s.add_argument("--impulse", type=float, help="impulse fraction (upper bound in cases 5-6)")
    s.add_argument("--deadline-bands", type=_band_range, metavar="A:B")
    s.add_argument("--stripe-bands", type=_band_range, metavar="A:B")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("restore", help="run the ALM restoration")
    s.add_argument("--input", required=True)
    s.add_argument("--output", required=True)
    s.add_argument("--model", choices=["general", "approx"], default="approx")
    s.add_argument("--ranks", type=_ranks, default=None, help="r1,r2,r3 or auto")
    s.add_argument("--tau", type=float, default=1.0)
    s.add_argument("--lambda-c", type=float, default=10.0)
    s.add_argument("--beta", type=float, default=None)
    s.add_argument("--weights", type=_floats(3), default=(0.5, 1.0, 1.0))
    s.add_argument("--eps", type=float, default=1e-6)
    s.add_argument("--max-iter", type=int, default=100)
    s.add_argument("--hooi-sweeps", type=int, default=1)
    s.add_argument("--normalize", action="store_true",
                   help="normalize bands to [0,1] before solving and undo afterwards")
    s.set_defaults(func=cmd_restore)

    s = sub.add_parser("evaluate", help="compare a test cube against a reference")
    s.add_argument("--ref", required=True)
    s.add_argument("--test", required=True)
    s.add_argument("--out", required=True, help="CSV output path")
    s.add_argument("--json", nargs="?", const="", default=None,
                   help="also write JSON (default path: OUT.json)")
    s.add_argument("--win-size", type=int, default=11)
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("profile", help="mean profile of one band")
    s.add_argument("--input", required=True)
    s.add_argument("--band", type=int, required=True, help="1-based band number")
    s.add_argument("--axis", choices=["horizontal", "vertical"], required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_profile)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"lrtdtv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, HSIFormatError) as exc:
        print(f"lrtdtv: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DataError, ValueError) as exc:
        print(f"lrtdtv: invalid data: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
