"""Command line interface: solve, normalize, reduce, verify, render."""

from __future__ import annotations

import argparse
import math
import sys

from . import cspath as cp
from .dubins import PATH_TYPES, all_candidates, solve_dubins
from .geometry import Config
from .normalization import FragmentError, normalize_detailed
from .oracle import LatticeSpec, Unreachable, compare_batch, random_query_pairs
from .reduction import IterationCap, ReductionInternal, reduce_to_minimizer, trace_jsonl
from .render import RenderSpec, render_svg, write_stages

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INGESTION = 3
EXIT_REDUCTION = 4
EXIT_VERIFY = 5


class UsageError(Exception):
    pass


def _config(text: str, degrees: bool, kappa: float) -> Config:
    try:
        x, y, th = (float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"expected x,y,theta, got {text!r}") from None
    if not all(math.isfinite(v) for v in (x, y, th)):
        raise UsageError(f"non-finite value in {text!r}")
    if degrees:
        th = math.radians(th)
    # unit turning radius inside the library
    return Config(kappa * x, kappa * y, th)


def _row(t: str, lengths, kappa: float) -> str:
    v = [l / kappa for l in lengths]
    return " ".join([t] + [f"{x:.12f}" for x in v] + [f"{math.fsum(v):.12f}"])


def cmd_solve(args) -> int:
    if not args.kappa > 0:
        raise UsageError("--kappa must be positive")
    x = _config(args.from_, args.degrees, args.kappa)
    y = _config(args.to, args.degrees, args.kappa)
    best = solve_dubins(x, y)
    if args.all_candidates:
        cands = all_candidates(x, y)
        for t in PATH_TYPES:
            s = cands[t]
            if s is None:
                print(f"{t} notfound")
            else:
                print(_row(t, s.lengths, args.kappa) + (" boundary" if s.boundary else ""))
    else:
        print(_row(best.path_type, best.lengths, args.kappa))
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(cp.to_json(best.path) + "\n")
    return EXIT_OK


def cmd_normalize(args) -> int:
    if not 0.0 < args.max_len < 1.0:
        raise UsageError("--max-len must lie in (0, 1)")
    try:
        with open(args.input, encoding="utf-8") as fh:
            sampled = cp.from_csv(fh.read())
        res = normalize_detailed(sampled, args.max_len)
    except cp.IngestionError as e:
        print(f"ingestion failed: {e}", file=sys.stderr)
        return EXIT_INGESTION
    except FragmentError as e:
        print(f"normalization failed: {e}", file=sys.stderr)
        return EXIT_INGESTION
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(cp.to_json(res.path) + "\n")
    print(f"input_length {sampled.total_length:.12f}")
    print(f"output_length {cp.length(res.path):.12f}")
    print(f"fragments {res.fragment_count}")
    return EXIT_OK


def _read_path(name: str) -> cp.CsPath:
    try:
        with open(name, encoding="utf-8") as fh:
            return cp.from_json(fh.read())
    except (OSError, ValueError, KeyError, TypeError) as e:
        raise UsageError(f"cannot read path from {name}: {e}") from None


def cmd_reduce(args) -> int:
    p = _read_path(args.input)
    try:
        final, steps = reduce_to_minimizer(p)
    except (ReductionInternal, IterationCap) as e:
        print(f"reduction failed: {e}", file=sys.stderr)
        return EXIT_REDUCTION
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(cp.to_json(final) + "\n")
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write(trace_jsonl(steps))
    if args.svg_stages:
        write_stages([(s.rule, s.after) for s in steps], args.svg_stages,
                     RenderSpec(show_adjacent_circles=True))
    opt = solve_dubins(p.start, cp.endpoint(p)).total
    print(f"initial_length {cp.length(p):.12f}")
    print(f"initial_complexity {cp.complexity(p)}")
    print(f"final_length {cp.length(final):.12f}")
    print(f"final_complexity {cp.complexity(final)}")
    print(f"final_word {cp.canonicalize(final).word or '-'}")
    print(f"dubins_optimum {opt:.12f}")
    print(f"steps {len(steps)}")
    for s in steps:
        print(f"  {s.rule} {s.detail} length_delta {s.length_delta:.3e} complexity_delta {s.complexity_delta}")
    return EXIT_OK


def cmd_verify(args) -> int:
    if not 0.0 < args.lattice_step <= 0.05:
        raise UsageError("--lattice-step must lie in (0, 0.05]")
    spec = LatticeSpec(control_step=args.lattice_step)
    if args.from_ or args.to:
        if not (args.from_ and args.to):
            raise UsageError("--from and --to go together")
        pairs = [(_config(args.from_, args.degrees, 1.0), _config(args.to, args.degrees, 1.0))]
    else:
        if args.count < 1:
            raise UsageError("--count must be at least 1")
        pairs = random_query_pairs(args.count, args.seed)
    try:
        res = compare_batch(pairs, spec, workers=args.workers)
    except Unreachable as e:
        print(f"lattice search failed: {e}", file=sys.stderr)
        return EXIT_VERIFY
    gaps = [r.gap for r in res]
    tol = spec.resolution
    worst = max(res, key=lambda r: r.gap)
    print(f"queries {len(res)}")
    print(f"control_step {spec.control_step:g}")
    print(f"max_gap {max(gaps):.6f}")
    print(f"mean_gap {math.fsum(gaps) / len(gaps):.6f}")
    print(f"tolerance {tol:.6f}")
    if worst.gap > tol:
        print(f"breach: from {worst.x.x!r},{worst.x.y!r},{worst.x.theta!r} "
              f"to {worst.y.x!r},{worst.y.y!r},{worst.y.theta!r} "
              f"analytic {worst.analytic:.6f} lattice {worst.lattice:.6f}")
        return EXIT_VERIFY
    return EXIT_OK


def cmd_render(args) -> int:
    p = _read_path(args.input)
    try:
        spec = RenderSpec(args.width, args.height, args.circles, args.region)
    except ValueError as e:
        raise UsageError(str(e)) from None
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(render_svg(p, spec))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bcpath", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="shortest path between two configurations")
    s.add_argument("--from", dest="from_", required=True, metavar="X,Y,THETA")
    s.add_argument("--to", required=True, metavar="X,Y,THETA")
    s.add_argument("--json", metavar="FILE", help="write the winning path as JSON")
    s.add_argument("--all-candidates", action="store_true", help="print all six path types")
    s.add_argument("--degrees", action="store_true", help="headings are given in degrees")
    s.add_argument("--kappa", type=float, default=1.0, help="curvature bound of the input units")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("normalize", help="replace a sampled path by a cs path")
    s.add_argument("--input", required=True, metavar="CSV")
    s.add_argument("--max-len", type=float, default=0.9)
    s.add_argument("--output", required=True, metavar="JSON")
    s.set_defaults(func=cmd_normalize)

    s = sub.add_parser("reduce", help="reduce a cs path to complexity at most three")
    s.add_argument("--input", required=True, metavar="JSON")
    s.add_argument("--output", metavar="JSON")
    s.add_argument("--trace", metavar="JSONL")
    s.add_argument("--svg-stages", metavar="DIR")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("verify", help="compare the solver with the lattice search")
    s.add_argument("--count", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--lattice-step", type=float, default=0.02, help="control step of the lattice")
    s.add_argument("--from", dest="from_", metavar="X,Y,THETA", help="single explicit query")
    s.add_argument("--to", metavar="X,Y,THETA")
    s.add_argument("--degrees", action="store_true")
    s.add_argument("--workers", type=int, default=None)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("render", help="draw a cs path as SVG")
    s.add_argument("--input", required=True, metavar="JSON")
    s.add_argument("--output", required=True, metavar="SVG")
    s.add_argument("--circles", action="store_true", help="dashed adjacent circles")
    s.add_argument("--region", action="store_true", help="shade the region about the start")
    s.add_argument("--width", type=int, default=800)
    s.add_argument("--height", type=int, default=600)
    s.set_defaults(func=cmd_render)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
