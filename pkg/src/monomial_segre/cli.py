"""Command-line surface: parse presentations, run the pipelines and the
verifier, dump traces and triangulations, draw the n=2 picture.

Exit codes: 0 success / all checks pass, 1 verification failure, 2 usage
error, 3 tower divergence.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .chow import base_ring
from .errors import MonomialSegreError, TowerDivergenceError
from .lattice import MonomialPresentation, presentation
from .polytope import ORDER_PRESETS, hvol
from .principalize import DEFAULT_STRATEGY, STRATEGIES
from .segre import (default_degree_bound, orthant_triangulation, segre_integral,
                    segre_tower, simplex_contribution, split_cells, verify)

ENV_DMAX = "MONOMIAL_SEGRE_DMAX"

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_DIVERGED = 3


class UsageError(Exception):
    pass


def parse_inline_generators(text: str):
    """Grammar: semicolon-separated vectors, comma-separated entries,
    e.g. "3,0;1,1;0,3"."""
    gens = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            gens.append(tuple(int(x) for x in chunk.split(",")))
        except ValueError:
            raise UsageError(f"cannot parse generator {chunk!r}")
    if not gens:
        raise UsageError("no generators given")
    return tuple(gens)


def load_job(args):
    """Build (presentation, dmax, strategy, nil_pairs) from flags and/or an
    input document.  Inline --gens and --input are mutually exclusive."""
    if (args.gens is None) == (getattr(args, "input", None) is None):
        raise UsageError("give exactly one of --gens or --input")
    nil_pairs = ()
    dmax = None
    strategy = None
    if args.gens is not None:
        gens = parse_inline_generators(args.gens)
        n = args.n if args.n is not None else len(gens[0])
        labels = None
    else:
        if args.input == "-":
            doc = json.load(sys.stdin)
        else:
            with open(args.input) as fh:
                doc = json.load(fh)
        try:
            n = doc["n"]
            gens = tuple(tuple(g) for g in doc["generators"])
        except (KeyError, TypeError):
            raise UsageError("input document needs fields n and generators")
        labels = doc.get("labels")
        nil_pairs = tuple(tuple(pr) for pr in doc.get("nil_pairs", ()))
        dmax = doc.get("dmax")
        strategy = doc.get("strategy")
    try:
        p = presentation(gens, num_vars=n, labels=labels)
    except MonomialSegreError as exc:
        raise UsageError(str(exc))
    if getattr(args, "dmax", None) is not None:
        dmax = args.dmax
    if dmax is None and os.environ.get(ENV_DMAX):
        try:
            dmax = int(os.environ[ENV_DMAX])
        except ValueError:
            raise UsageError(f"bad {ENV_DMAX} value {os.environ[ENV_DMAX]!r}")
    if dmax is None:
        dmax = default_degree_bound(p.num_vars)
    if dmax < 1:
        raise UsageError("dmax must be >= 1")
    if getattr(args, "strategy", None) is not None:
        strategy = args.strategy
    if strategy is None:
        strategy = DEFAULT_STRATEGY
    return p, dmax, strategy, nil_pairs


def series_doc(series):
    return [{"coefficient": _num(c), "exponents": list(e)}
            for e, c in series.sorted_terms()]


def _num(c: Fraction):
    if c.denominator == 1:
        return int(c)
    return {"numerator": c.numerator, "denominator": c.denominator}


def presentation_doc(p: MonomialPresentation, dmax, strategy=None, nil_pairs=()):
    doc = {"n": p.num_vars, "generators": [list(g) for g in p.generators],
           "labels": list(p.variable_labels), "dmax": dmax}
    if nil_pairs:
        doc["nil_pairs"] = [list(pr) for pr in nil_pairs]
    if strategy is not None:
        doc["strategy"] = strategy
    return doc


def emit(doc, out=None):
    (out or sys.stdout).write(json.dumps(doc, indent=2) + "\n")


def _ring_for(p, nil_pairs):
    if not nil_pairs:
        return None
    return base_ring(p.num_vars, p.variable_labels, nil_pairs)


def cmd_compute(args) -> int:
    p, dmax, strategy, nil_pairs = load_job(args)
    result = segre_integral(p, dmax, order_preset=args.preset,
                            ring=_ring_for(p, nil_pairs))
    doc = presentation_doc(p, dmax, nil_pairs=nil_pairs)
    doc["pipeline"] = result.pipeline
    doc["series"] = series_doc(result.series)
    emit(doc)
    return EXIT_OK


def cmd_tower(args) -> int:
    p, dmax, strategy, nil_pairs = load_job(args)
    result = segre_tower(p, dmax, strategy=strategy,
                         ring=_ring_for(p, nil_pairs))
    trace = result.trace
    doc = presentation_doc(p, dmax, strategy=strategy, nil_pairs=nil_pairs)
    doc["pipeline"] = result.pipeline
    doc["series"] = series_doc(result.series)
    doc["trace"] = {
        "strategy": trace.strategy_name,
        "iterations": trace.iterations_used,
        "terminal_divisor": list(trace.terminal_divisor),
        "steps": [{"center": list(s.center),
                   "exceptional": s.exceptional_label,
                   "variables": list(s.upper.variables)}
                  for s in trace.steps],
    }
    emit(doc)
    return EXIT_OK


def cmd_verify(args) -> int:
    p, dmax, strategy, nil_pairs = load_job(args)
    report = verify(p, dmax, strategy=strategy, nil_pairs=nil_pairs)
    doc = presentation_doc(p, dmax, strategy=strategy, nil_pairs=nil_pairs)
    doc["checks"] = [{"name": c.name, "passed": c.passed, "detail": c.detail}
                     for c in report.checks]
    doc["ok"] = report.ok
    emit(doc)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_triangulate(args) -> int:
    p, dmax, strategy, nil_pairs = load_job(args)
    tri = orthant_triangulation(p, args.preset)
    complement, newton = split_cells(tri)

    def cell_doc(cell):
        return {"finite_vertices": [list(v) for v in cell.finite_vertices],
                "infinite_directions": sorted(d + 1 for d in
                                              cell.infinite_directions),
                "provenance": list(cell.provenance),
                "hvol": hvol(cell),
                "contribution": series_doc(simplex_contribution(cell, dmax))}

    doc = presentation_doc(p, dmax)
    doc["placement_order"] = list(tri.placement_order)
    doc["complement_cells"] = [cell_doc(c) for c in complement]
    doc["newton_cells"] = [cell_doc(c) for c in newton]
    emit(doc)
    return EXIT_OK


def cmd_render(args) -> int:
    p, dmax, strategy, nil_pairs = load_job(args)
    if p.num_vars != 2:
        raise UsageError("render only supports n = 2")
    svg = render_svg(p)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(svg)
    else:
        sys.stdout.write(svg)
    return EXIT_OK


def render_svg(p: MonomialPresentation) -> str:
    """Staircase picture of the Newton region for n=2: shaded convex
    complement, generator points, triangulation overlay.  Lattice units."""
    tri = orthant_triangulation(p)
    complement, newton = split_cells(tri)
    gens = p.generators
    top = max([a for g in gens for a in g], default=1) + 2
    unit = 40
    size = top * unit + 2 * unit

    def xy(v):
        # lattice coords -> svg coords (flip the vertical axis)
        return (unit + v[0] * unit, size - unit - v[1] * unit)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
           f'height="{size}" viewBox="0 0 {size} {size}">',
           f'<rect width="{size}" height="{size}" fill="white"/>']
    # shaded convex complement: one polygon per cell, rays clipped at `top`
    for cell in complement:
        pts = [list(v) for v in cell.finite_vertices]
        for d in sorted(cell.infinite_directions):
            for v in cell.finite_vertices:
                w = list(v)
                w[d] = top
                pts.append(w)
        cx = sum(q[0] for q in pts) / len(pts)
        cy = sum(q[1] for q in pts) / len(pts)
        pts.sort(key=lambda q: math.atan2(q[1] - cy, q[0] - cx))
        path = " ".join("{},{}".format(*xy(q)) for q in pts)
        out.append(f'<polygon points="{path}" fill="#cccccc" stroke="none"/>')
    # lattice grid
    for k in range(top + 1):
        a0, a1 = xy((k, 0)), xy((k, top))
        out.append(f'<line x1="{a0[0]}" y1="{a0[1]}" x2="{a1[0]}" y2="{a1[1]}" '
                   'stroke="#eeeeee"/>')
        b0, b1 = xy((0, k)), xy((top, k))
        out.append(f'<line x1="{b0[0]}" y1="{b0[1]}" x2="{b1[0]}" y2="{b1[1]}" '
                   'stroke="#eeeeee"/>')
    # triangulation overlay
    for cell in complement + newton:
        vs = [list(v) for v in cell.finite_vertices]
        rays = [[v[0] + (top if d == 0 else 0), v[1] + (top if d == 1 else 0)]
                for d in sorted(cell.infinite_directions) for v in vs]
        corners = vs + rays
        for a in range(len(corners)):
            for b in range(a + 1, len(corners)):
                qa, qb = xy(corners[a]), xy(corners[b])
                out.append(f'<line x1="{qa[0]}" y1="{qa[1]}" x2="{qb[0]}" '
                           f'y2="{qb[1]}" stroke="#666666" stroke-width="1"/>')
    # axes
    o, ox, oy = xy((0, 0)), xy((top, 0)), xy((0, top))
    out.append(f'<line x1="{o[0]}" y1="{o[1]}" x2="{ox[0]}" y2="{ox[1]}" '
               'stroke="black" stroke-width="2"/>')
    out.append(f'<line x1="{o[0]}" y1="{o[1]}" x2="{oy[0]}" y2="{oy[1]}" '
               'stroke="black" stroke-width="2"/>')
    # generator points
    for g in gens:
        q = xy(g)
        out.append(f'<circle cx="{q[0]}" cy="{q[1]}" r="4" fill="black"/>')
        out.append(f'<text x="{q[0] + 6}" y="{q[1] - 6}" font-size="12">'
                   f'({g[0]},{g[1]})</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _corpus_instance(seed_and_index):
    seed, k = seed_and_index
    rng = random.Random(f"{seed}:{k}")
    n = rng.choice([2, 3])
    m = rng.randint(1, 4)
    gens = set()
    while len(gens) < m:
        gens.add(tuple(rng.randint(0, 4) for _ in range(n)))
    return tuple(sorted(gens))


def _corpus_check(job):
    seed, k, strategy = job
    gens = _corpus_instance((seed, k))
    p = presentation(gens)
    try:
        report = verify(p, strategy=strategy)
        return {"index": k, "generators": [list(g) for g in gens],
                "status": "pass" if report.ok else "fail",
                "failed": [c.name for c in report.checks if not c.passed]}
    except TowerDivergenceError:
        return {"index": k, "generators": [list(g) for g in gens],
                "status": "diverged", "failed": []}


def cmd_corpus(args) -> int:
    jobs = [(args.seed, k, args.strategy or DEFAULT_STRATEGY)
            for k in range(args.count)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_corpus_check, jobs))
    else:
        results = [_corpus_check(job) for job in jobs]
    results.sort(key=lambda r: r["index"])
    n_fail = sum(r["status"] == "fail" for r in results)
    n_div = sum(r["status"] == "diverged" for r in results)
    doc = {"seed": args.seed, "count": args.count,
           "passed": args.count - n_fail - n_div,
           "failed": n_fail, "diverged": n_div, "results": results}
    emit(doc)
    if n_fail:
        return EXIT_FAIL
    if n_div:
        return EXIT_DIVERGED
    return EXIT_OK


def _add_input_flags(sp, with_dmax=True, with_strategy=False, with_preset=False):
    sp.add_argument("--gens", help='inline generators, e.g. "3,0;1,1;0,3"')
    sp.add_argument("--input", help="path to a JSON job document, - for stdin")
    sp.add_argument("--n", type=int, help="number of variables")
    if with_dmax:
        sp.add_argument("--dmax", type=int, help="truncation degree "
                        f"(default n+3, or ${ENV_DMAX})")
    if with_strategy:
        sp.add_argument("--strategy", choices=STRATEGIES)
    if with_preset:
        sp.add_argument("--preset", choices=ORDER_PRESETS, default="default",
                        help="placement-order preset")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="monomial-segre",
        description="Segre classes of monomial schemes, two ways.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("compute", help="Newton-region integral pipeline")
    _add_input_flags(sp, with_preset=True)
    sp.set_defaults(func=cmd_compute)

    sp = sub.add_parser("tower", help="blow-up tower pipeline with trace")
    _add_input_flags(sp, with_strategy=True)
    sp.set_defaults(func=cmd_tower)

    sp = sub.add_parser("verify", help="run the full identity report")
    _add_input_flags(sp, with_strategy=True)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("triangulate", help="dump cells, hvol, contributions")
    _add_input_flags(sp, with_preset=True)
    sp.set_defaults(func=cmd_triangulate)

    sp = sub.add_parser("render", help="n=2 Newton-region figure (SVG)")
    _add_input_flags(sp, with_dmax=False)
    sp.add_argument("--output", "-o", help="output file (default stdout)")
    sp.set_defaults(func=cmd_render)

    sp = sub.add_parser("corpus", help="seeded random verification batch")
    sp.add_argument("--count", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    sp.add_argument("--strategy", choices=STRATEGIES)
    sp.set_defaults(func=cmd_corpus)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TowerDivergenceError as exc:
        print(f"tower divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except MonomialSegreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
