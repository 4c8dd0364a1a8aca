"""Crossing counts for spatial drawings.

``count_line_crossings`` counts vertex-disjoint k-tuples of edges (k = 3
or 4) admitting a common transversal line.  Exact mode certifies every
counted tuple through the exact predicate; a staged floating-point
prefilter (enclosing-ball collinearity tests, then a numeric transversal
feasibility check with a safety margin) discards tuples that are far from
admitting a transversal.  Tuples the prefilter cannot safely reject are
always passed to exact arithmetic.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .drawing import Edge, Graph, SpatialDrawing
from .errors import DegenerateInput, ValidationError
from .geometry import (PluckerLine, Segment3, plucker_from_segment,
                       segments_intersect_2d, transversal_exists_segments,
                       v_add, v_cross, v_scale, v_sub)
from .scalars import QuadExt, rat

# margin used by the float prefilter when rejecting; anything closer to
# feasibility than this goes to the exact path
REJECT_MARGIN = 1e-6


@dataclass
class CrossingWitness:
    """A k-tuple of vertex-disjoint edges with a certified transversal."""

    edges: Tuple[Edge, ...]
    line: PluckerLine
    contacts: List[Tuple[Edge, int, object]]  # (edge, segment index, parameter)


@dataclass
class CrossingReport:
    mode: str
    k: int
    count: int
    witnesses: Optional[List[CrossingWitness]] = None
    elapsed: float = 0.0
    tuples_total: int = 0
    tuples_after_prefilter: int = 0


def enumerate_disjoint_tuples(g: Graph, k: int) -> Iterable[Tuple[Edge, ...]]:
    """All k-sets of pairwise vertex-disjoint edges, lexicographically."""
    for idx in enumerate_disjoint_index_tuples(g, k):
        yield tuple(g.edges[i] for i in idx)


def enumerate_disjoint_index_tuples(g: Graph, k: int) -> Iterable[Tuple[int, ...]]:
    edges = g.edges
    n_edges = len(edges)

    def rec(start: int, used: set, acc: List[int]):
        if len(acc) == k:
            yield tuple(acc)
            return
        # not enough edges left to finish
        for i in range(start, n_edges - (k - len(acc)) + 1):
            u, v = edges[i]
            if u in used or v in used:
                continue
            used.add(u)
            used.add(v)
            acc.append(i)
            yield from rec(i + 1, used, acc)
            acc.pop()
            used.discard(u)
            used.discard(v)

    yield from rec(0, set(), [])


def count_planar_crossings(d: SpatialDrawing) -> int:
    """Pairs of vertex-disjoint straight edges crossing in the z = 0 plane."""
    if not d.is_straight() or not d.is_flat():
        raise ValidationError("planar crossing count needs a flat straight-line drawing")
    pts = [(p[0], p[1]) for p in d.positions]
    edges = d.graph.edges
    count = 0
    for i in range(len(edges)):
        u1, v1 = edges[i]
        for j in range(i + 1, len(edges)):
            u2, v2 = edges[j]
            if len({u1, v1, u2, v2}) < 4:
                continue
            a = (pts[u1], pts[v1])
            b = (pts[u2], pts[v2])
            if segments_intersect_2d(a, b) == "crossing":
                count += 1
    return count


# ---------------------------------------------------------------------------
# sphere lift
# ---------------------------------------------------------------------------

def _jitter(seed: int, e: Edge, idx: int, comp: int, scale: Fraction) -> Fraction:
    import random
    rng = random.Random(seed * 1000003 + e[0] * 8191 + e[1] * 131 + idx * 7 + comp)
    return Fraction(rng.randint(-2 ** 30, 2 ** 30), 2 ** 30) * scale


def lift_to_sphere(planar: SpatialDrawing, subdivision: int, seed: int = 0,
                   radius_factor: int = 2 ** 16,
                   jitter_scale: Fraction = Fraction(1, 2 ** 40)) -> SpatialDrawing:
    """Map a flat straight-line drawing onto a large rational sphere.

    Inverse stereographic projection from a pole far above the drawing:
    the image of a rational plane point is a rational sphere point.  Every
    edge becomes a polyline of ``subdivision`` chords whose interior
    vertices get a deterministic tiny rational jitter so that no point is
    shared by the interiors of vertex-disjoint edges.
    """
    if subdivision < 1:
        raise ValidationError("subdivision must be at least 1")
    if not planar.is_straight() or not planar.is_flat():
        raise ValidationError("sphere lift needs a flat straight-line drawing")
    xs = [p[0] for p in planar.positions]
    ys = [p[1] for p in planar.positions]
    cx, cy = (min(xs) + max(xs)) / 2, (min(ys) + max(ys)) / 2
    extent = (max(xs) - min(xs)) + (max(ys) - min(ys))
    if extent == 0:
        extent = Fraction(1)
    radius = radius_factor * extent

    def to_sphere(p) -> Tuple[Fraction, Fraction, Fraction]:
        ux, uy = p[0] - cx, p[1] - cy
        denom = ux * ux + uy * uy + 4 * radius * radius
        return (cx + 4 * radius * radius * ux / denom,
                cy + 4 * radius * radius * uy / denom,
                2 * radius * (ux * ux + uy * uy) / denom)

    positions = [to_sphere(p) for p in planar.positions]
    polylines: Dict[Edge, List] = {}
    amp = jitter_scale * radius
    for e in planar.graph.edges:
        u, v = e
        pu, pv = planar.positions[u], planar.positions[v]
        interior = []
        for i in range(1, subdivision):
            t = Fraction(i, subdivision)
            flat = (pu[0] + t * (pv[0] - pu[0]), pu[1] + t * (pv[1] - pu[1]), 0)
            x, y, z = to_sphere(flat)
            interior.append((x + _jitter(seed, e, i, 0, amp),
                             y + _jitter(seed, e, i, 1, amp),
                             z + _jitter(seed, e, i, 2, amp)))
        if interior:
            polylines[e] = interior
    return SpatialDrawing(planar.graph, positions, polylines)


# ---------------------------------------------------------------------------
# the counting pipeline
# ---------------------------------------------------------------------------

@dataclass
class _EdgeData:
    segments: List[Segment3]
    seg_p: np.ndarray        # (s, 3) float endpoints
    seg_q: np.ndarray
    seg_center: np.ndarray   # (s, 3)
    seg_radius: np.ndarray   # (s,)
    center: np.ndarray       # (3,) enclosing ball of the whole edge
    radius: float
    chord_p: Tuple[float, float, float]   # straight chord between endpoints
    chord_q: Tuple[float, float, float]
    chord_width: float                    # max polyline deviation from it


def _edge_data(d: SpatialDrawing, e: Edge) -> _EdgeData:
    segs = d.edge_segments(e)
    p = np.array([[float(c) for c in s.p] for s in segs])
    q = np.array([[float(c) for c in s.q] for s in segs])
    mid = (p + q) / 2
    half = np.linalg.norm(q - p, axis=1) / 2
    rad = half * (1 + 1e-9) + 1e-12
    pts = np.vstack([p, q])
    center = (pts.min(axis=0) + pts.max(axis=0)) / 2
    radius = float(np.linalg.norm(pts - center, axis=1).max())
    radius = radius * (1 + 1e-9) + 1e-12
    cp, cq = p[0], q[-1]
    axis = cq - cp
    alen = float(np.linalg.norm(axis))
    if alen > 0 and len(segs) > 1:
        diffs = pts - cp
        perp = diffs - np.outer(diffs @ axis / (alen * alen), axis)
        width = float(np.linalg.norm(perp, axis=1).max())
    else:
        width = 0.0
    width = width * (1 + 1e-9) + 1e-12
    return _EdgeData(segs, p, q, mid, rad, center, radius,
                     tuple(cp), tuple(cq), width)


def _chord_stab_batch(chord_p, chord_q, widths, tuples) -> np.ndarray:
    """Vectorized necessary 2D stabbing test over tuple batches.

    For each tuple, project the four fattened edge chords along the axis
    most normal to the configuration and ask whether some line through two
    chord endpoints stabs all four within their width slack; a transversal
    would project to such a stabber.  Returns a keep mask.
    """
    m = len(tuples)
    P = chord_p[tuples]          # (m, 4, 3)
    Q = chord_q[tuples]
    W = widths[tuples]           # (m, 4)
    dirs = Q - P
    best = np.zeros((m, 3))
    best_n = np.zeros(m)
    for i in range(4):
        for j in range(i + 1, 4):
            ax = np.cross(dirs[:, i], dirs[:, j])
            n2 = np.einsum("ij,ij->i", ax, ax)
            take = n2 > best_n
            best[take] = ax[take]
            best_n[take] = n2[take]
    keep_parallel = best_n == 0.0   # all chords parallel: no useful axis
    nrm = np.sqrt(np.maximum(best_n, 1e-300))
    axis = best / nrm[:, None]
    # in-plane frame
    ex = np.abs(axis)
    e1 = np.zeros((m, 3))
    smallest = np.argmin(ex, axis=1)
    rows = np.arange(m)
    e1[rows, (smallest + 1) % 3] = -axis[rows, (smallest + 2) % 3]
    e1[rows, (smallest + 2) % 3] = axis[rows, (smallest + 1) % 3]
    e1 /= np.maximum(np.linalg.norm(e1, axis=1), 1e-300)[:, None]
    e2 = np.cross(axis, e1)
    ends = np.concatenate([P, Q], axis=1)              # (m, 8, 3)
    px = np.einsum("mkj,mj->mk", ends, e1)             # (m, 8)
    py = np.einsum("mkj,mj->mk", ends, e2)
    w8 = np.concatenate([W, W], axis=1)                # (m, 8)
    ok = np.zeros(m, dtype=bool)
    for a in range(8):
        for b in range(a + 1, 8):
            ux = px[:, b] - px[:, a]
            uy = py[:, b] - py[:, a]
            ln = np.sqrt(ux * ux + uy * uy)
            ln = np.maximum(ln, 1e-300)
            ux, uy = ux / ln, uy / ln
            slack0 = 2 * (w8[:, a] + w8[:, b]) + 1e-9
            good = np.ones(m, dtype=bool)
            for i in range(4):
                sp = (px[:, i] - px[:, a]) * uy - (py[:, i] - py[:, a]) * ux
                sq = (px[:, i + 4] - px[:, a]) * uy - (py[:, i + 4] - py[:, a]) * ux
                miss = (sp * sq > 0) & (np.minimum(np.abs(sp), np.abs(sq))
                                        > 2 * W[:, i] + slack0)
                good &= ~miss
            ok |= good
            if ok.all():
                return ok
    return ok | keep_parallel


def _tuple_chord_stab(eds) -> bool:
    """Necessary 2D condition: projected fattened chords admit a stabber.

    Projects the four edge chords along the direction most normal to the
    configuration (largest cross product of two chord directions) and asks
    whether some line through two chord endpoints stabs all four chords
    with slack for their polyline widths.  Any true transversal projects
    to such a stabber, so a clearly negative answer is a sound rejection.
    """
    chords = [(ed.chord_p, ed.chord_q, ed.chord_width) for ed in eds]
    dirs = [_fsub(c[1], c[0]) for c in chords]
    best_axis, best_norm = None, 0.0
    for i in range(4):
        for j in range(i + 1, 4):
            ax = _fcross(dirs[i], dirs[j])
            n2 = _fdot(ax, ax)
            if n2 > best_norm:
                best_norm, best_axis = n2, ax
    if best_axis is None or best_norm == 0.0:
        return True  # all chords parallel: no useful projection
    n = math.sqrt(best_norm)
    axis = (best_axis[0] / n, best_axis[1] / n, best_axis[2] / n)
    if abs(axis[0]) <= abs(axis[1]) and abs(axis[0]) <= abs(axis[2]):
        e1 = (0.0, -axis[2], axis[1])
    elif abs(axis[1]) <= abs(axis[2]):
        e1 = (-axis[2], 0.0, axis[0])
    else:
        e1 = (-axis[1], axis[0], 0.0)
    n1 = math.sqrt(_fdot(e1, e1)) or 1.0
    e1 = (e1[0] / n1, e1[1] / n1, e1[2] / n1)
    e2 = _fcross(axis, e1)
    P = [( _fdot(c[0], e1), _fdot(c[0], e2)) for c in chords]
    Q = [( _fdot(c[1], e1), _fdot(c[1], e2)) for c in chords]
    W = [c[2] for c in chords]
    ends = P + Q
    widths = W + W
    for a in range(8):
        for b in range(a + 1, 8):
            pa, pb = ends[a], ends[b]
            ux, uy = pb[0] - pa[0], pb[1] - pa[1]
            ln = math.hypot(ux, uy)
            if ln < 1e-300:
                continue
            ux, uy = ux / ln, uy / ln
            slack0 = 2 * (widths[a] + widths[b]) + 1e-9
            ok = True
            for i in range(4):
                sp = (P[i][0] - pa[0]) * uy - (P[i][1] - pa[1]) * ux
                sq = (Q[i][0] - pa[0]) * uy - (Q[i][1] - pa[1]) * ux
                if sp * sq > 0 and min(abs(sp), abs(sq)) > 2 * W[i] + slack0:
                    ok = False
                    break
            if ok:
                return True
    return False


def _collinear_possible(centers: np.ndarray, radii: np.ndarray) -> np.ndarray:
    """Vectorized necessary condition for stabbing k balls with one line.

    centers: (m, k, 3), radii: (m, k).  Points q_i inside the balls can be
    collinear only if every centre triple is nearly collinear relative to
    the ball radii; returns a boolean keep-mask of shape (m,).
    """
    m, k, _ = centers.shape
    keep = np.ones(m, dtype=bool)
    for a, b, c in itertools.combinations(range(k), 3):
        ca, cb, cc = centers[:, a], centers[:, b], centers[:, c]
        ra, rb, rc = radii[:, a], radii[:, b], radii[:, c]
        dab = np.linalg.norm(cb - ca, axis=1)
        dac = np.linalg.norm(cc - ca, axis=1)
        resid = np.linalg.norm(np.cross(cb - ca, cc - ca), axis=1)
        slack = ((dab + ra + rb) * (ra + rc)
                 + (dac + ra + rc) * (ra + rb)
                 + (ra + rb) * (ra + rc))
        keep &= resid <= slack * (1 + 1e-6) + 1e-18
    return keep


def _float_feasibility(segquad) -> float:
    """Numeric feasibility margin for a 4-segment transversal.

    Positive margins indicate a likely transversal, strongly negative ones
    safe rejection; +inf means float arithmetic cannot be trusted on this
    configuration and the caller must decide exactly.  Coordinates are
    centred and rescaled so thresholds are honest absolute constants.
    """
    pts = [[float(c) for c in s.p] for s in segquad] + \
          [[float(c) for c in s.q] for s in segquad]
    cx = sum(p[0] for p in pts) / 8
    cy = sum(p[1] for p in pts) / 8
    cz = sum(p[2] for p in pts) / 8
    spread = max(max(abs(p[0] - cx), abs(p[1] - cy), abs(p[2] - cz))
                 for p in pts) or 1e-300

    def norm(v):
        return ((v[0] - cx) / spread, (v[1] - cy) / spread, (v[2] - cz) / spread)

    p = [norm(v) for v in pts[:4]]
    q = [norm(v) for v in pts[4:]]
    d = [_fsub(qq, pp) for pp, qq in zip(p, q)]
    mo = [_fcross(pp, qq) for pp, qq in zip(p, q)]

    def rel_side(i, j):
        val = _fdot(d[i], mo[j]) + _fdot(d[j], mo[i])
        ref = (_fnrm(d[i]) * _fnrm(mo[j]) + _fnrm(d[j]) * _fnrm(mo[i]) + 1e-300)
        return abs(val) / ref

    best_order, best_s = None, 0.0
    for last in range(3, -1, -1):
        rest = [i for i in range(4) if i != last]
        s_min = min(rel_side(rest[0], rest[1]), rel_side(rest[0], rest[2]),
                    rel_side(rest[1], rest[2]))
        if s_min > best_s:
            best_s, best_order = s_min, (*rest, last)
    if best_s > 1e-5:
        return _regulus_feasibility(p, q, d, mo, best_order)
    if best_s > 1e-8:
        # marginally skew: the regulus margins carry an error that grows
        # like 1/skew^2, so reject only beyond that uncertainty
        margin = _regulus_feasibility(p, q, d, mo, best_order)
        uncertainty = 1e-14 / (best_s * best_s) + 1e-9
        if uncertainty > 0.3 or math.isinf(margin):
            return _degenerate_feasibility(p, q, d)
        if margin < -uncertainty:
            return margin
        return math.inf  # inside the uncertainty band: decide exactly
    return _degenerate_feasibility(p, q, d)


def _fsub(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def _fcross(a, b):
    return (a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0])


def _fdot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _fnrm(v):
    return abs(v[0]) + abs(v[1]) + abs(v[2])


def _faxpy(a, s, b):
    return (a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2])


def _regulus_feasibility(p, q, d, mo, order) -> float:
    """Margin via the transversal quadratic on a well-conditioned triple."""
    i1, i2, i3, i4 = order
    p1, d1 = p[i1], d[i1]
    A2 = _faxpy(mo[i2], 1.0, _fcross(d[i2], p1))
    B2 = _fcross(d[i2], d1)
    a2, b2 = -_fdot(mo[i2], p1), -_fdot(mo[i2], d1)
    A3 = _faxpy(mo[i3], 1.0, _fcross(d[i3], p1))
    B3 = _fcross(d[i3], d1)
    a3, b3 = -_fdot(mo[i3], p1), -_fdot(mo[i3], d1)
    d4, m4 = d[i4], mo[i4]
    qa = _fdot(_fcross(B2, B3), m4) + b2 * _fdot(d4, B3) - b3 * _fdot(d4, B2)
    qb = (_fdot(_fcross(A2, B3), m4) + _fdot(_fcross(B2, A3), m4)
          + a2 * _fdot(d4, B3) + b2 * _fdot(d4, A3)
          - a3 * _fdot(d4, B2) - b3 * _fdot(d4, A2))
    qc = _fdot(_fcross(A2, A3), m4) + a2 * _fdot(d4, A3) - a3 * _fdot(d4, A2)
    nd4, nm4 = _fnrm(d4), _fnrm(m4)
    nA2, nB2, nA3, nB3 = _fnrm(A2), _fnrm(B2), _fnrm(A3), _fnrm(B3)
    sa = nB2 * nB3 * nm4 + abs(b2) * nd4 * nB3 + abs(b3) * nd4 * nB2 + 1e-300
    sb = ((nA2 * nB3 + nB2 * nA3) * nm4 + abs(a2) * nd4 * nB3
          + abs(b2) * nd4 * nA3 + abs(a3) * nd4 * nB2 + abs(b3) * nd4 * nA2
          + 1e-300)
    sc = nA2 * nA3 * nm4 + abs(a2) * nd4 * nA3 + abs(a3) * nd4 * nA2 + 1e-300
    if abs(qa) <= 1e-9 * sa and abs(qb) <= 1e-9 * sb:
        if abs(qc) <= 1e-9 * sc:
            return math.inf  # possibly an infinite family: decide exactly
        return -1.0
    if abs(qa) <= 1e-12 * sa:
        roots = [-qc / qb]
    else:
        disc = qb * qb - 4 * qa * qc
        if disc < -1e-9 * (qb * qb + 4 * abs(qa * qc) + 1e-300):
            return -1.0
        disc = max(disc, 0.0)
        roots = [(-qb + math.sqrt(disc)) / (2 * qa),
                 (-qb - math.sqrt(disc)) / (2 * qa)]
    best = -math.inf
    for t in roots:
        margin = min(t, 1 - t)
        for (A, B, al, be, j) in ((A3, B3, a3, b3, i2), (A2, B2, a2, b2, i3),
                                  (A2, B2, a2, b2, i4)):
            n = _faxpy(A, t, B)
            e = al + t * be
            den = _fdot(n, d[j])
            num = -(_fdot(n, p[j]) + e)
            den_ref = _fnrm(n) * _fnrm(d[j]) + 1e-300
            if abs(den) <= 1e-9 * den_ref:
                num_ref = _fnrm(n) * _fnrm(p[j]) + abs(e) + 1e-300
                if abs(num) <= 1e-6 * num_ref:
                    margin = math.inf  # trace degenerates: decide exactly
                    break
                margin = -math.inf    # transversal misses the line affinely
                break
            u = num / den
            margin = min(margin, u, 1 - u)
        best = max(best, margin)
    return best


def _degenerate_feasibility(p, q, d) -> float:
    """Margin when no supporting-line triple is comfortably skew.

    Two sound necessary conditions cover the degenerate structures seen in
    near-spherical drawings: the projection of any transversal along the
    configuration's thinnest axis must stab the projected segments, and
    for a two-cluster quadruple the transversal must hug one of the two
    canonical candidate lines.
    """
    pts = p + q
    # covariance of the 8 endpoints; its smallest axis is the projection
    cov = [[sum(a[i] * a[j] for a in pts) for j in range(3)] for i in range(3)]
    normal = _smallest_axis(cov)
    if normal is None:
        return math.inf
    m2d = _stab2d_margin(p, q, normal)
    if m2d < -REJECT_MARGIN:
        return m2d
    mcl = _cluster_feasibility(p, q, d)
    if mcl is not None:
        return mcl
    return math.inf


def _smallest_axis(cov):
    """Unit eigenvector of the smallest eigenvalue of a 3x3 covariance."""
    try:
        w, v = np.linalg.eigh(np.array(cov))
    except np.linalg.LinAlgError:
        return None
    axis = v[:, 0]
    n = math.sqrt(float(axis @ axis))
    if n == 0:
        return None
    return (float(axis[0]) / n, float(axis[1]) / n, float(axis[2]) / n)


def _stab2d_margin(p, q, axis) -> float:
    """Best stabbing margin of the segments projected along ``axis``.

    A 3D transversal projects onto a 2D line (or point) stabbing all four
    projected segments, and some line through two projected endpoints then
    stabs them as well, so the margin over those candidates bounds the
    3D feasibility from above.
    """
    ax, ay, az = axis
    # build two in-plane axes
    if abs(ax) <= abs(ay) and abs(ax) <= abs(az):
        e1 = (0.0, -az, ay)
    elif abs(ay) <= abs(az):
        e1 = (-az, 0.0, ax)
    else:
        e1 = (-ay, ax, 0.0)
    n1 = math.sqrt(_fdot(e1, e1)) or 1.0
    e1 = (e1[0] / n1, e1[1] / n1, e1[2] / n1)
    e2 = _fcross(axis, e1)

    P = [(_fdot(v, e1), _fdot(v, e2)) for v in p]
    Q = [(_fdot(v, e1), _fdot(v, e2)) for v in q]
    ends = P + Q
    best = -math.inf
    for a in range(8):
        for b in range(a + 1, 8):
            pa, pb = ends[a], ends[b]
            ux, uy = pb[0] - pa[0], pb[1] - pa[1]
            ln = math.hypot(ux, uy)
            if ln < 1e-12:
                continue
            ux, uy = ux / ln, uy / ln
            margin = math.inf
            for i in range(4):
                sp = (P[i][0] - pa[0]) * uy - (P[i][1] - pa[1]) * ux
                sq = (Q[i][0] - pa[0]) * uy - (Q[i][1] - pa[1]) * ux
                if sp * sq <= 0:
                    m = min(abs(sp), abs(sq))
                else:
                    m = -min(abs(sp), abs(sq))
                margin = min(margin, m)
                if margin < best:
                    break
            best = max(best, margin)
    return best if best > -math.inf else math.inf


def _cluster_feasibility(p, q, d):
    """Margin for the two-cluster structure, or None when not applicable.

    When the four supporting lines split into two pairs of nearly
    intersecting lines, every transversal hugs either the join of the two
    near-intersection points or the meet of the two near-planes.
    """
    pairings = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))
    best_pairing, best_gap = None, math.inf
    for pairing in pairings:
        gaps = []
        ok = True
        for (i, j) in pairing:
            info = _line_gap(p[i], d[i], p[j], d[j])
            if info is None:
                ok = False
                break
            gaps.append(info)
        if not ok:
            continue
        worst = max(g[1] for g in gaps)
        if worst < best_gap:
            best_gap = worst
            best_pairing = gaps
    if best_pairing is None or best_gap > 0.02:
        return None
    (x1, g1, n1), (x2, g2, n2) = best_pairing
    delta = 8 * (g1 + g2) + 1e-9
    # a transversal through one near-intersection but inside the other
    # pair's plane evades both candidates; escalate in that case
    nn1 = math.sqrt(_fdot(n1, n1)) or 1.0
    nn2 = math.sqrt(_fdot(n2, n2)) or 1.0
    if abs(_fdot(_fsub(x1, x2), n2)) / nn2 < delta or \
            abs(_fdot(_fsub(x2, x1), n1)) / nn1 < delta:
        return math.inf

    candidates = []
    axis = _fsub(x2, x1)
    if math.sqrt(_fdot(axis, axis)) > 1e-9:
        candidates.append((x1, axis))
    meet_dir = _fcross(n1, n2)
    if math.sqrt(_fdot(meet_dir, meet_dir)) > 1e-12 * nn1 * nn2:
        e2 = -_fdot(n2, x2)
        w = _fcross(meet_dir, n1)
        denom = _fdot(w, n2)
        if abs(denom) > 1e-300:
            lam = -(e2 + _fdot(n2, x1)) / denom
            candidates.append((_faxpy(x1, lam, w), meet_dir))
    if not candidates:
        return math.inf

    best = -math.inf
    for origin, direction in candidates:
        dl = math.sqrt(_fdot(direction, direction))
        if dl == 0:
            continue
        direction = (direction[0] / dl, direction[1] / dl, direction[2] / dl)
        margin = math.inf
        for i in range(4):
            w = _fcross(d[i], direction)
            wl = math.sqrt(_fdot(w, w))
            if wl < 1e-6 * math.sqrt(_fdot(d[i], d[i])):
                margin = math.inf  # candidate parallel to a segment: exact
                break
            w0 = _fsub(origin, p[i])
            u = _fdot(_fcross(w0, direction), w) / (wl * wl)
            miss = abs(_fdot(w0, w)) / wl
            slack = delta / wl + 1e-6
            margin = min(margin, u + slack, 1 + slack - u,
                         (delta - miss) / wl + 1e-6)
        if math.isinf(margin):
            return math.inf
        best = max(best, margin)
    return best


def _line_gap(p1, d1, p2, d2):
    """Closest approach of two lines: (midpoint, gap, normal) or None."""
    a = _fdot(d1, d1)
    b = _fdot(d1, d2)
    c = _fdot(d2, d2)
    den = a * c - b * b
    if a * c <= 0 or den / (a * c) < 1e-10:
        return None  # nearly parallel
    w0 = _fsub(p2, p1)
    s = (c * _fdot(d1, w0) - b * _fdot(d2, w0)) / den
    t = (b * _fdot(d1, w0) - a * _fdot(d2, w0)) / den
    f1 = _faxpy(p1, s, d1)
    f2 = _faxpy(p2, t, d2)
    mid = ((f1[0] + f2[0]) / 2, (f1[1] + f2[1]) / 2, (f1[2] + f2[2]) / 2)
    gap = math.sqrt(_fdot(_fsub(f1, f2), _fsub(f1, f2)))
    return mid, gap, _fcross(d1, d2)


def _tuple_has_transversal_exact(edge_datas, want_witness):
    """Exact decision over all segment combinations of a k-tuple."""
    seg_lists = [ed.segments for ed in edge_datas]
    combo_centers = [ed.seg_center for ed in edge_datas]
    combo_radii = [ed.seg_radius for ed in edge_datas]
    k = len(seg_lists)
    sizes = [len(s) for s in seg_lists]
    total = 1
    for s in sizes:
        total *= s
    if total > 1:
        grids = np.meshgrid(*[np.arange(s) for s in sizes], indexing="ij")
        idx = np.stack([g.ravel() for g in grids], axis=1)
        centers = np.stack([combo_centers[i][idx[:, i]] for i in range(k)], axis=1)
        radii = np.stack([combo_radii[i][idx[:, i]] for i in range(k)], axis=1)
        keep = _collinear_possible(centers, radii)
        idx = idx[keep]
    else:
        idx = np.zeros((1, k), dtype=int)
    for row in idx:
        segs = [seg_lists[i][int(row[i])] for i in range(k)]
        if k == 4:
            margin = _float_feasibility(segs)
            if margin < -REJECT_MARGIN:
                continue
        res = transversal_exists_segments(segs)
        if res.exists:
            contacts = [(int(row[i]), res.params[i]) for i in range(k)]
            return True, res.line, contacts
    return False, None, None


def count_line_crossings(d: SpatialDrawing, k: int, mode: str = "exact",
                         want_witnesses: bool = False, tol: float = 1e-9,
                         prefilter: bool = True, threads: int = 1) -> CrossingReport:
    """Count vertex-disjoint k-tuples of edges pierced by a common line.

    A tuple counts once no matter how many transversal lines it admits.
    In exact mode every counted tuple carries an exactly verified witness;
    float mode trusts the numeric feasibility margin against ``tol``.
    """
    if k not in (3, 4):
        raise ValueError("k must be 3 or 4")
    if mode not in ("exact", "float"):
        raise ValueError("mode must be 'exact' or 'float'")
    t0 = time.time()
    g = d.graph
    edge_datas = {e: _edge_data(d, e) for e in g.edges}
    centers = np.array([edge_datas[e].center for e in g.edges])
    radii = np.array([edge_datas[e].radius for e in g.edges])
    chord_p = np.array([edge_datas[e].chord_p for e in g.edges])
    chord_q = np.array([edge_datas[e].chord_q for e in g.edges])
    chord_w = np.array([edge_datas[e].chord_width for e in g.edges])

    count = 0
    witnesses: List[CrossingWitness] = []

    n_edges = g.m
    if n_edges < k:
        return CrossingReport(mode=mode, k=k, count=0,
                              witnesses=[] if want_witnesses else None,
                              elapsed=time.time() - t0)
    combos = np.array(list(itertools.combinations(range(n_edges), k)),
                      dtype=np.int32)
    eu = np.array([e[0] for e in g.edges])
    ev = np.array([e[1] for e in g.edges])
    disjoint = ((eu[:, None] != eu[None, :]) & (eu[:, None] != ev[None, :])
                & (ev[:, None] != eu[None, :]) & (ev[:, None] != ev[None, :]))
    mask = np.ones(len(combos), dtype=bool)
    for i in range(k):
        for j in range(i + 1, k):
            mask &= disjoint[combos[:, i], combos[:, j]]
    tuples = combos[mask]
    tuples_total = len(tuples)

    if prefilter and len(tuples):
        kept = []
        for lo in range(0, len(tuples), 262144):
            batch = tuples[lo:lo + 262144]
            keep = _collinear_possible(centers[batch], radii[batch])
            batch = batch[keep]
            if k == 4 and len(batch):
                keep2 = _chord_stab_batch(chord_p, chord_q, chord_w, batch)
                batch = batch[keep2]
            kept.append(batch)
        survivors = np.vstack(kept) if kept else tuples[:0]
    else:
        survivors = tuples

    for idx in survivors:
        eds = [edge_datas[g.edges[i]] for i in idx]
        if mode == "float" and k == 4 and all(len(ed.segments) == 1 for ed in eds):
            margin = _float_feasibility([ed.segments[0] for ed in eds])
            if margin == math.inf:
                ok, line, contacts = _tuple_has_transversal_exact(eds, want_witnesses)
            else:
                ok, line, contacts = margin > -tol, None, None
        else:
            ok, line, contacts = _tuple_has_transversal_exact(eds, want_witnesses)
        if ok:
            count += 1
            if want_witnesses and line is not None:
                edges = tuple(g.edges[i] for i in idx)
                witnesses.append(CrossingWitness(
                    edges,
                    line,
                    [(edges[i], contacts[i][0], contacts[i][1])
                     for i in range(k)]))

    return CrossingReport(
        mode=mode, k=k, count=count,
        witnesses=witnesses if want_witnesses else None,
        elapsed=time.time() - t0,
        tuples_total=tuples_total,
        tuples_after_prefilter=len(survivors))
