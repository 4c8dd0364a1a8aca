"""Command-line interface.

One binary with subcommands; every run writes a JSON report (stdout or
--output).  Exact scalar values serialize as 'p/q' strings, float-mode
values as decimals with an explicit mode marker.  Exit status: 0 success,
1 validation error, 2 internal invariant failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction
from typing import List, Optional

from . import counting, generators, linking, pipeline, sametype, stairs
from .drawing import SpatialDrawing, decode_drawing, encode_drawing
from .errors import (DegenerateInput, DegeneratePosition, NotDisjoint,
                     PreconditionViolated, RetryExhausted, ValidationError)
from .geometry import PluckerLine
from .linking import PolygonalCycle
from .scalars import rat_from_str, rat_to_str, scalar_to_json

log = logging.getLogger("spacecross")


def _setup_logging():
    level = os.environ.get("SPACECROSSING_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _read_input(path: Optional[str]):
    if path is None or path == "-":
        return sys.stdin.read()
    with open(path, "rb") as fh:
        return fh.read()


def _write_report(doc, path: Optional[str]):
    data = json.dumps(doc, indent=1)
    if path is None or path == "-":
        print(data)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(data + "\n")


def _point_doc(p):
    return [rat_to_str(c) for c in p]


def _line_doc(line: PluckerLine):
    return {"direction": [scalar_to_json(c) for c in line.direction],
            "moment": [scalar_to_json(c) for c in line.moment]}


def _witness_doc(w: counting.CrossingWitness):
    return {
        "edges": [list(e) for e in w.edges],
        "line": _line_doc(w.line),
        "contacts": [{"edge": list(e), "segment": s,
                      "parameter": scalar_to_json(u)}
                     for e, s, u in w.contacts],
    }


def _cycles_from_doc(doc) -> List[PolygonalCycle]:
    return [PolygonalCycle(tuple(tuple(rat_from_str(c) for c in p)
                                 for p in cyc))
            for cyc in doc["cycles"]]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_count_crossings(args) -> dict:
    d = decode_drawing(_read_input(args.input))
    rep = counting.count_line_crossings(
        d, args.k, mode=args.mode, want_witnesses=args.witnesses,
        tol=args.tol, threads=args.threads)
    doc = {"mode": rep.mode, "k": rep.k, "count": rep.count,
           "tuples_total": rep.tuples_total, "elapsed": rep.elapsed}
    if rep.witnesses is not None:
        doc["witnesses"] = [_witness_doc(w) for w in rep.witnesses]
    return doc


def cmd_count_planar(args) -> dict:
    d = decode_drawing(_read_input(args.input))
    return {"count": counting.count_planar_crossings(d)}


def cmd_lift_sphere(args) -> dict:
    d = decode_drawing(_read_input(args.input))
    lifted = counting.lift_to_sphere(d, args.subdivision, seed=args.seed)
    out = encode_drawing(lifted).decode("utf-8")
    if args.output and args.output != "-":
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out + "\n")
        return {"written": args.output, "subdivision": args.subdivision}
    print(out)
    return {}


def cmd_gen_stair(args) -> dict:
    n, m = args.n, args.m
    count = stairs.count_candidate_quadruples(n, m)
    b105 = stairs.crossing_bound_105(n, m)
    b6720 = stairs.crossing_bound_explicit(n, m)
    doc = {"n": n, "m": m, "D": stairs.interval_width(n, m), "count": count,
           "bound_105": b105, "bound_6720": rat_to_str(b6720)}
    if args.check_bounds:
        doc["pass"] = bool(count <= b105 and count <= b6720)
    return doc


def cmd_gen_hexgrid(args) -> dict:
    hc = pipeline.hexgrid_construction(args.k, args.subdivision, seed=args.seed)
    doc = {"k": args.k, "subdivision": args.subdivision,
           "vertices": hc.graph.n, "edges": hc.graph.m,
           "special_edge": list(hc.special_edge)}
    if args.output and args.output != "-":
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(encode_drawing(hc.drawing).decode("utf-8") + "\n")
        doc["written"] = args.output
    return doc


def cmd_linking(args) -> dict:
    doc_in = json.loads(_read_input(args.input))
    c1, c2 = _cycles_from_doc(doc_in)
    return {"lk": linking.linking_number(c1, c2)}


def cmd_conway_gordon(args) -> dict:
    if args.input:
        doc_in = json.loads(_read_input(args.input))
        pts = [tuple(rat_from_str(c) for c in p) for p in doc_in["points"]]
    else:
        pts = generators.random_six_points(args.seed)
    res = linking.conway_gordon_check(pts)
    return {"odd_pair": [list(res.odd_pair[0]), list(res.odd_pair[1])],
            "parity_sum": res.parity_sum,
            "linking_numbers": [
                {"triangles": [list(a), list(b)], "lk": v}
                for (a, b), v in sorted(res.linking_numbers.items())]}


def cmd_transversal_4cycles(args) -> dict:
    doc_in = json.loads(_read_input(args.input))
    cycles = _cycles_from_doc(doc_in)
    line = linking.transversal_through_cycles(cycles)
    if line is None:
        return {"found": False}
    return {"found": True, "line": _line_doc(line)}


def cmd_witness_pipeline(args) -> dict:
    d = decode_drawing(_read_input(args.input))
    ws = pipeline.boost_witness_pipeline(d, seed=args.seed, budget=args.budget)
    return {"witnesses": [_witness_doc(w) for w in ws], "count": len(ws)}


def cmd_order_types(args) -> dict:
    types = stairs.enumerate_order_types()
    by_comp = {}
    for t in types:
        by_comp[t.components] = by_comp.get(t.components, 0) + 1
    return {"total": len(types),
            "by_components": {str(k): v for k, v in sorted(by_comp.items())}}


def cmd_yao_yao(args) -> dict:
    doc_in = json.loads(_read_input(args.input))
    dim = int(doc_in["dim"])
    pts = [tuple(rat_from_str(c) for c in p) for p in doc_in["points"]]
    part = sametype.yao_yao_partition(pts, dim)
    return {
        "center": [rat_to_str(c) for c in part.center],
        "cones": [[[rat_to_str(c) for c in g] for g in gens]
                  for gens in part.generators],
        "counts": [len(members) for members in part.cone_points],
    }


def cmd_same_type(args) -> dict:
    doc_in = json.loads(_read_input(args.input))
    multisets = [sametype.PointMultiset(
        int(ms["dim"]), [tuple(rat_from_str(c) for c in p)
                         for p in ms["points"]])
        for ms in doc_in["multisets"]]
    polys = [sametype.SparsePolynomial.from_json(p)
             for p in doc_in["polynomials"]]
    res = sametype.same_type_refine(multisets, polys)
    return {"subsets": res.subsets, "signs": res.signs,
            "epsilon": rat_to_str(res.epsilon)}


def cmd_gen_fixture(args) -> dict:
    params = json.loads(args.params) if args.params else {}
    obj = generators.seeded_generators(args.kind, params, args.seed)
    if isinstance(obj, SpatialDrawing):
        out = encode_drawing(obj).decode("utf-8")
        if args.output and args.output != "-":
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(out + "\n")
            return {"kind": args.kind, "written": args.output}
        print(out)
        return {}
    if isinstance(obj, tuple) and obj and isinstance(obj[0], PolygonalCycle):
        return {"cycles": [[_point_doc(p) for p in c.points] for c in obj]}
    if isinstance(obj, list):
        return {"points": [_point_doc(p) for p in obj]}
    from .drawing import Graph
    if isinstance(obj, Graph):
        return {"n": obj.n, "edges": [list(e) for e in obj.edges]}
    raise ValidationError(f"cannot serialize generator output {type(obj)}")


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="spacecross",
        description="space crossing counts, linking numbers and "
                    "stair-convex constructions")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, input_arg=True):
        if input_arg:
            p.add_argument("--input", help="input document path (- for stdin)")
        p.add_argument("--output", help="report path (default stdout)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--mode", choices=["exact", "float"], default="exact")
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--budget", type=int, default=200000)
        p.add_argument("--subdivision", type=int, default=8)
        p.add_argument("--threads", type=int, default=1)
        return p

    p = common(sub.add_parser("count-crossings"))
    p.add_argument("--k", type=int, choices=[3, 4], default=4)
    p.add_argument("--witnesses", action="store_true")
    p.set_defaults(func=cmd_count_crossings)

    common(sub.add_parser("count-planar")).set_defaults(func=cmd_count_planar)
    common(sub.add_parser("lift-sphere")).set_defaults(func=cmd_lift_sphere)

    p = common(sub.add_parser("gen-stair"), input_arg=False)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--check-bounds", action="store_true")
    p.set_defaults(func=cmd_gen_stair)

    p = common(sub.add_parser("gen-hexgrid"), input_arg=False)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_gen_hexgrid)

    common(sub.add_parser("linking")).set_defaults(func=cmd_linking)
    common(sub.add_parser("conway-gordon")).set_defaults(func=cmd_conway_gordon)
    common(sub.add_parser("transversal-4cycles")).set_defaults(
        func=cmd_transversal_4cycles)
    common(sub.add_parser("witness-pipeline")).set_defaults(
        func=cmd_witness_pipeline)
    common(sub.add_parser("order-types"), input_arg=False).set_defaults(
        func=cmd_order_types)
    common(sub.add_parser("yao-yao")).set_defaults(func=cmd_yao_yao)
    common(sub.add_parser("same-type")).set_defaults(func=cmd_same_type)

    p = common(sub.add_parser("gen-fixture"), input_arg=False)
    p.add_argument("--kind", required=True)
    p.add_argument("--params", help="JSON parameter object")
    p.set_defaults(func=cmd_gen_fixture)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    _setup_logging()
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        doc = args.func(args)
    except (ValidationError, DegenerateInput, NotDisjoint, DegeneratePosition,
            PreconditionViolated, FileNotFoundError, json.JSONDecodeError,
            KeyError) as exc:
        log.error("validation failure: %s", exc)
        _write_report({"error": str(exc), "code": type(exc).__name__},
                      getattr(args, "output", None))
        return 1
    except (AssertionError, RetryExhausted) as exc:
        log.error("internal invariant failure: %s", exc)
        _write_report({"error": str(exc), "code": type(exc).__name__},
                      getattr(args, "output", None))
        return 2
    if doc:
        _write_report(doc, getattr(args, "output", None))
    return 0


if __name__ == "__main__":
    sys.exit(main())
