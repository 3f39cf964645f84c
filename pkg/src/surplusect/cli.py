"""Command-line surface.

Subcommands: bounds, crofton, count, normals, cleanloop.  Exit codes:
0 success, 2 usage error, 3 invalid input data, 4 degenerate geometry,
5 structural check failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import bounds as bounds_mod
from .cleanloop import verify_intersection_structure
from .core import RngState, check_unitary
from .counting import (
    clifford_quadric_system,
    count_clifford_multistart,
    count_conic_pencil,
)
from .errors import DegenerateError, StructureViolationError
from .normals import (
    Ellipsoid,
    TrigPolynomial2D,
    caustic_grid,
    count_normals,
)
from .stats import distribution_report, run_clifford_trials

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BAD_INPUT = 3
EXIT_DEGENERATE = 4
EXIT_STRUCTURE = 5


def _dumps17(obj, indent=0) -> str:
    """JSON with every float rendered at 17 significant digits."""
    pad = " " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{pad}  {json.dumps(str(k))}: {_dumps17(v, indent + 2).lstrip()}'
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}  {_dumps17(v, indent + 2).lstrip()}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return format(obj, ".17g")
    return json.dumps(obj)


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _default_threads() -> int:
    env = os.environ.get("SURPLUSECT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _parse_body(spec: str):
    try:
        kind, _, rest = spec.partition(":")
        values = [float(x) for x in rest.split(",") if x != ""]
        if kind == "ellipse":
            if len(values) != 2:
                raise ValueError
            return Ellipsoid(tuple(values))
        if kind == "ellipsoid":
            if len(values) < 2:
                raise ValueError
            return Ellipsoid(tuple(values))
        if kind == "trig2d":
            # c0, then interleaved cos/sin coefficients per harmonic
            if not values:
                raise ValueError
            c0, rest_vals = values[0], values[1:]
            return TrigPolynomial2D(
                c0=c0,
                cos_coeffs=tuple(rest_vals[0::2]),
                sin_coeffs=tuple(rest_vals[1::2]),
            )
        raise ValueError
    except ValueError:
        raise SystemExit(EXIT_USAGE)


def cmd_bounds(args) -> int:
    if not (1 <= args.n_max <= 12):
        print("error: --n-max must be in [1, 12]", file=sys.stderr)
        return EXIT_USAGE
    rows = bounds_mod.table1(args.n_max)
    if args.format == "csv":
        _emit(bounds_mod.rows_to_csv(rows), args.out)
    else:
        from dataclasses import asdict

        _emit(_dumps17([asdict(r) for r in rows]), args.out)
    return EXIT_OK


def cmd_crofton(args) -> int:
    if not (1 <= args.n <= 4):
        print("error: --n must be in [1, 4]", file=sys.stderr)
        return EXIT_USAGE
    if args.samples < 1:
        print("error: --samples must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    tally = run_clifford_trials(
        args.n, args.samples, args.seed, threads=args.threads
    )
    report = distribution_report(tally)
    _emit(
        _dumps17({"tally": tally.to_dict(), "report": report.to_dict()}), args.out
    )
    return EXIT_OK


def cmd_count(args) -> int:
    try:
        with open(args.matrix) as fh:
            raw = json.load(fh)
        entries = np.array(
            [[complex(re, im) for re, im in row] for row in raw], dtype=complex
        )
        g = check_unitary(entries)
    except (OSError, ValueError, TypeError, json.JSONDecodeError) as exc:
        print(f"error: invalid matrix input: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    sys_ = clifford_quadric_system(g)
    method = args.method
    if method == "auto":
        method = "pencil" if sys_.n == 2 else "multistart"
    if method == "pencil" and sys_.n != 2:
        print("error: the pencil method requires a 3x3 matrix", file=sys.stderr)
        return EXIT_USAGE
    try:
        if method == "pencil":
            result = count_conic_pencil(sys_)
        else:
            result = count_clifford_multistart(sys_, rng=RngState(args.seed))
    except DegenerateError as exc:
        print(f"error: degenerate configuration: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    _emit(
        _dumps17(
            {
                "n": sys_.n,
                "method": method,
                "count": result.count,
                "transverse": result.transverse,
                "min_jacobian_sigma": result.min_jacobian_sigma,
                "witnesses": [[float(x) for x in w.real] for w in result.witnesses],
            }
        ),
        args.out,
    )
    return EXIT_OK


def cmd_normals(args) -> int:
    body = _parse_body(args.body)
    if args.grid is not None:
        if body.dim != 2:
            print("error: grid mode requires a planar body", file=sys.stderr)
            return EXIT_USAGE
        if args.bbox is None:
            print("error: grid mode requires --bbox", file=sys.stderr)
            return EXIT_USAGE
        bbox = [float(x) for x in args.bbox.split(",")]
        if len(bbox) != 4:
            print("error: --bbox wants xmin,ymin,xmax,ymax", file=sys.stderr)
            return EXIT_USAGE
        grid = caustic_grid(body, tuple(bbox), args.grid)
        _emit(grid.to_csv(), args.out)
        if args.pgm:
            with open(args.pgm, "w") as fh:
                fh.write(grid.to_pgm())
        return EXIT_OK
    if args.q is None:
        print("error: give either --q or --grid", file=sys.stderr)
        return EXIT_USAGE
    q = [float(x) for x in args.q.split(",")]
    if len(q) != body.dim:
        print("error: query point dimension mismatch", file=sys.stderr)
        return EXIT_USAGE
    res = count_normals(body, q)
    _emit(
        _dumps17(
            {
                "count": res.count,
                "degenerate": res.degenerate,
                "morse_indices": list(res.morse_indices),
                "critical_directions": [
                    [float(x) for x in v] for v in res.critical_directions
                ],
            }
        ),
        args.out,
    )
    return EXIT_OK


def cmd_cleanloop(args) -> int:
    gap = abs((args.t1 - args.t2) % 1.0)
    if gap < 1e-12 or abs(gap - 1.0) < 1e-12:
        print("error: --t1 and --t2 must differ mod 1", file=sys.stderr)
        return EXIT_USAGE
    if args.samples < 1000:
        print("error: --samples must be >= 1000", file=sys.stderr)
        return EXIT_USAGE
    try:
        report = verify_intersection_structure(
            args.t1, args.t2, args.samples, tol=args.tol, seed=args.seed
        )
    except StructureViolationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STRUCTURE
    _emit(_dumps17(report.to_dict()), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="surplusect",
        description="Intersection statistics in CP^n and concurrent normals "
        "of convex bodies",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="volume bounds table")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("crofton", help="Monte Carlo intersection statistics")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=_default_threads())
    p.add_argument("--out")
    p.set_defaults(func=cmd_crofton)

    p = sub.add_parser("count", help="count one torus/RP^n intersection")
    p.add_argument("--matrix", required=True, help="JSON file of [re, im] pairs")
    p.add_argument(
        "--method", choices=("auto", "pencil", "multistart"), default="auto"
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("normals", help="concurrent-normal counts")
    p.add_argument(
        "--body",
        required=True,
        help="ellipse:a,b | ellipsoid:a,b,c | trig2d:c0,a1,b1,a2,b2,...",
    )
    p.add_argument("--q", help="query point, comma separated")
    p.add_argument("--grid", type=int, help="grid resolution per axis")
    p.add_argument("--bbox", help="xmin,ymin,xmax,ymax")
    p.add_argument("--pgm", help="also write a portable graymap here")
    p.add_argument("--out")
    p.set_defaults(func=cmd_normals)

    p = sub.add_parser("cleanloop", help="verify the clean-loop structure")
    p.add_argument("--t1", type=float, required=True)
    p.add_argument("--t2", type=float, required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_cleanloop)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
