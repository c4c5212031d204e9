"""Command line front end.

Exit codes: 0 converged, 3 iteration cap reached, 4 invalid input,
5 b not visible from infinity, 6 polygon not x-monotone (and no manual cuts),
2 bad usage, 1 anything unexpected.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import fixtures
from .domain import DomainError, build_domain, sp_avoids_b1
from .geometry import GeometryError, hausdorff_distance
from .partition import NonMonotoneError, PartitionError, make_vertical_partition, partition_from_cuts, verify_partition
from .polygon import InvalidPolygonError, NotVisibleFromInfinity, visibility_from_infinity
from .report import build_report, format_table, plot_sweep, render_svg, write_csv, write_report
from .solver import CONVERGED, SolverConfig, rope_from, solve
from .sweep import epsilon_decades, independent_sweep, prefix_sweep

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CAPPED = 3
EXIT_INVALID = 4
EXIT_NOT_VISIBLE = 5
EXIT_NON_MONOTONE = 6

log = logging.getLogger("convexrope")


def _pair(text):
    try:
        a, b = (float(t) for t in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'dx,dy', got {text!r}") from None
    return (a, b)


def _gen(text):
    try:
        fam, n = text.split(",")
        return fam.strip(), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'family,n', got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="convexrope", description="Convex ropes by multiple shooting.")
    p.add_argument("--input", "-i", help="polygon file (rope-polygon v1)")
    p.add_argument("--b-index", type=int, help="vertex index of b (overrides the file)")
    p.add_argument("--a-index", type=int, help="start vertex a; omitted means the closed rope a = b")
    p.add_argument("--ray", type=_pair, help="escape ray direction for b, as dx,dy")
    p.add_argument("--cuts", type=int, default=8, help="number of cutting segments N")
    p.add_argument("--cut-file", help="manual cutting segments, one 'ux uy vx vy' per line")
    p.add_argument("--margin", type=float, default=0.25, help="rectangle margin (fraction of diagonal)")
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--max-iters", type=int, default=10000)
    p.add_argument("--sweep", "--epsilon-sweep", dest="sweep", help="tolerance sweep hi:lo, e.g. 1e0:1e-9")
    p.add_argument("--sweep-mode", choices=("prefix", "independent"), default="prefix")
    p.add_argument("--parallel", action="store_true", help="run independent sweep configurations in parallel")
    p.add_argument("--svg", help="write an SVG rendering")
    p.add_argument("--report", help="write a JSON report (plus CSV and PNG alongside)")
    p.add_argument("--oracle", action="store_true", help="also run the visibility-graph oracle")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--generate", type=_gen, help="write a fixture: family,n")
    p.add_argument("--output", "-o", help="output file for --generate (default stdout)")
    p.add_argument("--quiet", "-q", action="store_true")
    p.add_argument("--verbose", "-v", action="store_true")
    return p


def _load_cuts(path):
    cuts = []
    for ln in Path(path).read_text().splitlines():
        ln = ln.split("#", 1)[0].strip()
        if not ln:
            continue
        ux, uy, vx, vy = (float(t) for t in ln.replace(",", " ").split())
        cuts.append(((ux, uy), (vx, vy)))
    return cuts


def _generate(args, out) -> int:
    fam, n = args.generate
    try:
        pf = fixtures.generate_fixture(n, args.seed, fam)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = fixtures.dumps(pf)
    if args.output:
        Path(args.output).write_text(text)
    else:
        out.write(text)
    return EXIT_OK


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.generate:
        return _generate(args, out)
    if not args.input:
        print("error: --input is required (or use --generate)", file=sys.stderr)
        return 2
    say = (lambda *a: None) if args.quiet else (lambda *a: print(*a, file=out))

    # input
    try:
        pf = fixtures.read(args.input)
        poly = pf.polygon()
    except (OSError, InvalidPolygonError, GeometryError) as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    b_index = args.b_index if args.b_index is not None else pf.b
    a_index = args.a_index if args.a_index is not None else pf.a
    ray = args.ray if args.ray is not None else pf.ray
    if b_index is None or not (0 <= b_index < poly.n):
        print(f"error: invalid input: b index {b_index!r} missing or out of range", file=sys.stderr)
        return EXIT_INVALID
    if a_index is not None and not (0 <= a_index < poly.n):
        print(f"error: invalid input: a index {a_index} out of range", file=sys.stderr)
        return EXIT_INVALID
    if args.cuts < 1 or not args.epsilon > 0 or args.max_iters < 1 or not args.margin > 0:
        print("error: invalid input: need cuts >= 1, epsilon > 0, max-iters >= 1, margin > 0", file=sys.stderr)
        return EXIT_INVALID
    # validation reverses clockwise input; keep indices pointing at the same vertices
    if poly.vertices != tuple(pf.vertices):
        n = poly.n
        b_index = n - 1 - b_index
        a_index = None if a_index is None else n - 1 - a_index

    # visibility and domain
    try:
        cert = visibility_from_infinity(poly, b_index, ray)
        d = build_domain(poly, b_index, cert, args.margin)
    except NotVisibleFromInfinity as exc:
        print(f"error: not visible from infinity: {exc}", file=sys.stderr)
        return EXIT_NOT_VISIBLE
    except DomainError as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID

    # partition
    try:
        if args.cut_file:
            part = partition_from_cuts(d, _load_cuts(args.cut_file))
            rep = verify_partition(d, part)
            if not rep.ok:
                bad = "; ".join(f"{k}: {v[1]}" for k, v in rep.conditions.items() if not v[0])
                print(f"error: invalid input: manual cuts rejected ({bad})", file=sys.stderr)
                return EXIT_INVALID
        else:
            part = make_vertical_partition(d, args.cuts)
    except NonMonotoneError as exc:
        print(f"error: not x-monotone: {exc} (supply --cut-file)", file=sys.stderr)
        return EXIT_NON_MONOTONE
    except (PartitionError, OSError, ValueError) as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID

    if args.sweep:
        return _sweep(args, d, part, say)

    cfg = SolverConfig(n_cuts=part.n_cuts, epsilon=args.epsilon, max_iterations=args.max_iters)
    res = solve(d, cfg, partition=part)
    notes = []
    rope = res.path
    if a_index is not None and a_index != b_index:
        sub = rope_from(res.path, poly.vertices[a_index])
        if sub is None:
            notes.append(f"a (vertex {a_index}) is not on the closed rope; reporting the closed rope from b_tilde")
            log.warning(notes[-1])
        else:
            rope = sub
    if not sp_avoids_b1(res.path, d):
        notes.append("rope touches chain B1 away from b")
        log.warning(notes[-1])

    rows = [{"j": r.j, "length": r.length, "max_shift": r.max_shift, "violated": r.violated} for r in res.history]
    say(format_table(rows, ("j", "length", "max_shift", "violated")))
    say(f"status: {res.status}  iterations: {res.iterations}  length: {rope.length():.12g}  time: {res.wall_time:.3f}s")
    say("path:")
    for x, y in rope.vertices:
        say(f"  {x:.17g} {y:.17g}")

    oracle = None
    if args.oracle:
        from .visibility_graph import vg_shortest_path

        g = vg_shortest_path(d.boundary, 0, 7)
        gap = abs(res.length - g.length()) / g.length() if g.length() > 0 else abs(res.length)
        hd = hausdorff_distance(res.path, g.path)
        oracle = {"length": g.length(), "relative_gap": gap, "hausdorff": hd}
        say(f"oracle: length {g.length():.12g}  relative gap {gap:.3e}  hausdorff {hd:.3e}")
    for n_ in notes:
        say(f"note: {n_}")
    if args.report:
        rep = build_report(res, cfg, pf.digest(), args.seed, oracle, notes)
        rep.final_path = [list(p) for p in rope.vertices]
        rep.final_length = rope.length()
        for pth in write_report(rep, args.report):
            say(f"wrote {pth}")
    if args.svg:
        try:
            render_svg(d, part, res.state, rope, args.svg)
        except OSError as exc:
            print(f"error: cannot write {args.svg}: {exc}", file=sys.stderr)
            return EXIT_UNEXPECTED
        say(f"wrote {args.svg}")
    return EXIT_OK if res.status == CONVERGED else EXIT_CAPPED


def _sweep(args, d, part, say) -> int:
    try:
        eps = epsilon_decades(args.sweep)
    except ValueError as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.sweep_mode == "prefix" and not args.parallel:
        rows = prefix_sweep(d, part.n_cuts, eps, args.max_iters)
    else:
        rows = independent_sweep(d, part.n_cuts, eps, args.max_iters, parallel=args.parallel)
    cols = ("epsilon", "iterations", "runtime", "length", "status")
    say(format_table(rows, cols))
    if args.report:
        import json

        path = Path(args.report)
        path.write_text(json.dumps({"rows": rows, "mode": args.sweep_mode, "n_cuts": part.n_cuts}, indent=2))
        write_csv(rows, cols, path.with_suffix(".csv"))
        plot_sweep(rows, path.with_name(path.stem + "_sweep.png"))
        say(f"wrote {path}")
    return EXIT_OK if all(r["status"] == CONVERGED for r in rows) else EXIT_CAPPED


def main(argv=None) -> int:
    try:
        return run(argv)
    except SystemExit:
        raise
    except Exception as exc:  # pragma: no cover - last resort
        print(f"error: unexpected failure: {exc!r}", file=sys.stderr)
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
