"""Stair-convexity machinery on stretched grids.

Contains the stretched grid model (explicit fast-growing coordinates or
index-only mode), stair-paths and the grid closeness metric, the interval
graph whose standard drawing lives on the grid diagonal, the stair-line
crossing decision for four diagonal stair-paths, the census of the 105
interval order types, and the combinatorial count of candidate crossing
quadruples together with its closed-form bounds.
"""

from __future__ import annotations

import itertools
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .drawing import Graph
from .errors import PreconditionViolated, ValidationError
from .scalars import rat

GridPoint = Tuple[int, int, int]


@dataclass(frozen=True)
class StretchedGrid:
    """Product grid X1 x X2 x X3 with strictly increasing axis values.

    In index-only mode (coords is None) only combinatorial operations are
    available.  Explicit mode stores per-axis value sequences that grow
    fast enough for segments to behave like stair-paths; the default uses
    x[1][j] = j and x[i][j] = base ** ((j-1) * scale ** (i-1)).
    """

    n: int
    coords: Optional[Tuple[Tuple[Fraction, ...], ...]] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("grid needs at least one point per axis")
        if self.coords is not None:
            if len(self.coords) != 3 or any(len(ax) != self.n for ax in self.coords):
                raise ValidationError("need three axes with n values each")
            for ax in self.coords:
                if any(ax[i] >= ax[i + 1] for i in range(len(ax) - 1)):
                    raise ValidationError("axis values must strictly increase")
                if ax[0] != 1:
                    raise ValidationError("axis values must start at 1")

    @staticmethod
    def explicit(n: int, base: int = 2, scale: Optional[int] = None) -> "StretchedGrid":
        scale = 16 * n if scale is None else scale
        axes = [tuple(Fraction(j) for j in range(1, n + 1))]
        for i in (1, 2):
            step = scale ** i
            axes.append(tuple(Fraction(base) ** ((j - 1) * step)
                              for j in range(1, n + 1)))
        return StretchedGrid(n, tuple(axes))

    @property
    def is_explicit(self) -> bool:
        return self.coords is not None

    def check_point(self, p: GridPoint):
        if len(p) != 3 or any(not (1 <= c <= self.n) for c in p):
            raise ValidationError(f"grid point {p} out of range")

    def value(self, axis: int, index: int) -> Fraction:
        if not self.is_explicit:
            raise ValidationError("index-only grid has no coordinates")
        return self.coords[axis][index - 1]

    def point_coords(self, p: GridPoint) -> Tuple[Fraction, Fraction, Fraction]:
        self.check_point(p)
        return tuple(self.value(i, p[i]) for i in range(3))

    def diagonal_point(self, i: int) -> Tuple[Fraction, Fraction, Fraction]:
        return self.point_coords((i, i, i))

    def neighbors_on_axis(self, axis: int, v: Fraction):
        """Strict predecessor and successor grid values around v (None at
        the ends); the closed interval between them is exactly the set of
        values with no grid value strictly between them and v."""
        ax = self.coords[axis]
        lo = bisect_left(ax, v)
        pred = ax[lo - 1] if lo > 0 else None
        hi = bisect_right(ax, v)
        succ = ax[hi] if hi < len(ax) else None
        return pred, succ

    def separators(self, axis: int, u: Fraction, v: Fraction) -> int:
        if u > v:
            u, v = v, u
        ax = self.coords[axis]
        return max(0, bisect_left(ax, v) - bisect_right(ax, u))


def grid_distance(grid: StretchedGrid, a: GridPoint, b: GridPoint) -> int:
    """Least k such that a and b are separated by fewer than k grid points
    in every coordinate; equal points are at distance 1."""
    grid.check_point(a)
    grid.check_point(b)
    return max(1, max(abs(x - y) for x, y in zip(a, b)))


def point_distance(grid: StretchedGrid, p, q) -> int:
    """Closeness distance for arbitrary points in the grid bounding box."""
    return 1 + max(grid.separators(i, p[i], q[i]) for i in range(3))


# ---------------------------------------------------------------------------
# stair-paths
# ---------------------------------------------------------------------------

def stair_path(a: Sequence, b: Sequence) -> List[Tuple[Tuple, Tuple]]:
    """Axis-parallel path from a to b, at most one segment per axis.

    The last coordinate is resolved first (orienting so that it does not
    decrease), then the recursion continues on the remaining prefix.  The
    returned segments chain from a to b; degenerate steps are skipped, so
    equal points give an empty path.
    """
    a, b = tuple(a), tuple(b)
    if len(a) != len(b):
        raise ValidationError("dimension mismatch")
    d = len(a)
    if d == 1:
        return [] if a == b else [(a, b)]
    if a[-1] > b[-1]:
        rev = stair_path(b, a)
        return [(hi, lo) for lo, hi in reversed(rev)]
    mid = (*a[:-1], b[-1])
    segs = [] if a == mid else [(a, mid)]
    for lo, hi in stair_path(a[:-1], b[:-1]):
        segs.append(((*lo, b[-1]), (*hi, b[-1])))
    return segs


def stair_path_axes(segs) -> List[int]:
    axes = []
    for lo, hi in segs:
        diff = [i for i in range(len(lo)) if lo[i] != hi[i]]
        if len(diff) != 1:
            raise ValidationError("stair segment not axis parallel")
        axes.append(diff[0])
    return axes


# ---------------------------------------------------------------------------
# the interval graph and its standard stair drawing
# ---------------------------------------------------------------------------

def interval_graph(n: int, m: int) -> Graph:
    """Vertices 0..n-1 joined when index distance is at most ceil(2m/n)."""
    if not (1 <= m <= n * (n - 1) // 2):
        raise ValidationError(f"need 1 <= m <= C({n},2)")
    width = ceil(Fraction(2 * m, n))
    edges = [(i, j) for i in range(n) for j in range(i + 1, min(i + width, n - 1) + 1)]
    return Graph.from_edges(n, edges)


def interval_width(n: int, m: int) -> int:
    return ceil(Fraction(2 * m, n))


@dataclass
class StairDrawing:
    """Standard stair drawing: vertex i at the diagonal point with index
    5(i+1), edges drawn as stair-paths between diagonal points."""

    graph: Graph
    grid: StretchedGrid
    anchors: List[int]                       # diagonal index per vertex
    paths: Dict[Tuple[int, int], List] = field(default_factory=dict)


def standard_stair_drawing(n: int, m: int, grid: StretchedGrid) -> StairDrawing:
    if grid.n < 5 * n:
        raise ValidationError(f"grid needs at least {5 * n} points per axis")
    g = interval_graph(n, m)
    anchors = [5 * (i + 1) for i in range(n)]
    paths = {}
    for (u, v) in g.edges:
        s, t = anchors[u], anchors[v]
        paths[(u, v)] = stair_path((s, s, s), (t, t, t))
    d = StairDrawing(g, grid, anchors, paths)
    for i in range(n):
        for j in range(i + 1, n):
            if grid_distance(grid, (anchors[i],) * 3, (anchors[j],) * 3) < 5:
                raise ValidationError("vertices too close on the grid")
    return d


# ---------------------------------------------------------------------------
# stair-line crossing decision
# ---------------------------------------------------------------------------

_BIG = 10 ** 9


def _edge_boxes(s: int, t: int):
    """The three axis-parallel pieces of the diagonal stair-path from
    (s,s,s) to (t,t,t) with s < t, as coordinate-range boxes."""
    return (
        ((s, s), (s, s), (s, t)),   # rise in z
        ((s, s), (s, t), (t, t)),   # run in y
        ((s, t), (t, t), (t, t)),   # run in x
    )


def _boxes_meet(a, b) -> bool:
    return all(al <= bh and bl <= ah for (al, ah), (bl, bh) in zip(a, b))


def _line_boxes(kind: int, x0, y0, c3, z1):
    """Pieces of a stair-line.  kind 0 and 1 take (x0, y0, y1, z1) and run
    to +/- infinity in x; kind 2 takes (x0, y0, x1, z1) and descends to
    -infinity in y."""
    if kind < 2:
        y1 = c3
        ylo, yhi = min(y0, y1), max(y0, y1)
        xray = ((x0, _BIG), (y1, y1), (z1, z1)) if kind == 0 else \
               ((-_BIG, x0), (y1, y1), (z1, z1))
        return (
            ((x0, x0), (y0, y0), (0, z1)),
            ((x0, x0), (ylo, yhi), (z1, z1)),
            xray,
        )
    x1 = c3
    xlo, xhi = min(x0, x1), max(x0, x1)
    return (
        ((x0, x0), (y0, y0), (0, z1)),
        ((x1, x1), (-_BIG, y0), (z1, z1)),
        ((xlo, xhi), (y0, y0), (z1, z1)),
    )


@dataclass
class StairCrossing:
    exists: bool
    kind: Optional[int] = None        # 0, 1, 2 for the three stair-line types
    coords: Optional[Tuple] = None    # the witness stair-line coordinates


def stair_crossing_exists(anchor_pairs: Sequence[Tuple], witness: bool = True
                          ) -> StairCrossing:
    """Decide whether a stair-line meets all four diagonal stair-paths.

    anchor_pairs are four (s, t) value pairs with eight distinct values.
    Candidate stair-line coordinates are drawn from the anchor values, the
    midpoints of consecutive gaps, and one value beyond each extreme: the
    incidence pattern only depends on the order of a coordinate against
    the anchors, so this finite set is exhaustive.
    """
    if len(anchor_pairs) != 4:
        raise ValidationError("need four anchor pairs")
    values = [v for pair in anchor_pairs for v in pair]
    if len(set(values)) != 8:
        raise ValidationError("anchor values must be pairwise distinct")
    order = sorted(values)
    rank = {v: 10 * (i + 1) for i, v in enumerate(order)}
    # candidate ranks: below all, each anchor, each gap midpoint, above all
    cand_ranks = [5] + [r for v in order for r in (rank[v], rank[v] + 5)]
    cand_values = [None] * len(cand_ranks)

    def unrank(r):
        if r == 5:
            return order[0] - 1
        i = (r - 10) // 10
        if r % 10 == 0:
            return order[i]
        if i + 1 < len(order):
            return rat(order[i] + order[i + 1]) / 2
        return order[-1] + 1

    pairs_ranked = [tuple(sorted((rank[s], rank[t]))) for s, t in anchor_pairs]
    edge_boxes = [_edge_boxes(s, t) for s, t in pairs_ranked]

    c = np.array(cand_ranks)
    shape_axes = [c[:, None, None, None], c[None, :, None, None],
                  c[None, None, :, None], c[None, None, None, :]]

    for kind in range(3):
        feasible = None
        for boxes in edge_boxes:
            meets = None
            for lb_template in range(3):
                lb = _line_boxes_np(kind, lb_template, *shape_axes)
                for eb in boxes:
                    hit = _box_overlap_np(lb, eb)
                    meets = hit if meets is None else (meets | hit)
            feasible = meets if feasible is None else (feasible & meets)
        if feasible.any():
            if not witness:
                return StairCrossing(True, kind, None)
            idx = np.argwhere(feasible)[0]
            coords = tuple(unrank(cand_ranks[i]) for i in idx)
            result = StairCrossing(True, kind, coords)
            _assert_pairing_condition(anchor_pairs)
            return result
    return StairCrossing(False)


def _line_boxes_np(kind: int, piece: int, x0, y0, c3, z1):
    """Coordinate ranges of one stair-line piece as broadcast arrays."""
    big = np.full(x0.shape if hasattr(x0, "shape") else (), _BIG)
    zero = 0
    if kind < 2:
        y1 = c3
        if piece == 0:
            return ((x0, x0), (y0, y0), (zero, z1))
        if piece == 1:
            return ((x0, x0), (np.minimum(y0, y1), np.maximum(y0, y1)), (z1, z1))
        if kind == 0:
            return ((x0, _BIG), (y1, y1), (z1, z1))
        return ((-_BIG, x0), (y1, y1), (z1, z1))
    x1 = c3
    if piece == 0:
        return ((x0, x0), (y0, y0), (zero, z1))
    if piece == 1:
        return ((x1, x1), (-_BIG, y0), (z1, z1))
    return ((np.minimum(x0, x1), np.maximum(x0, x1)), (y0, y0), (z1, z1))


def _box_overlap_np(lb, eb) -> np.ndarray:
    out = None
    for (al, ah), (bl, bh) in zip(lb, eb):
        cond = (al <= bh) & (bl <= ah)
        out = cond if out is None else (out & cond)
    return out


def _assert_pairing_condition(anchor_pairs):
    """Every positive must satisfy the necessary overlap pairing: each
    interval meets at least one other."""
    ivs = [tuple(sorted(p)) for p in anchor_pairs]
    for i, (lo, hi) in enumerate(ivs):
        if not any(lo <= ivs[j][1] and ivs[j][0] <= hi
                   for j in range(4) if j != i):
            raise AssertionError(
                "stair-crossing found but interval pairing condition fails")


# ---------------------------------------------------------------------------
# order types of four disjoint intervals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntervalMatching:
    """Perfect matching on positions 1..8 read as four intervals."""

    pairs: Tuple[Tuple[int, int], ...]
    components: int


def _component_count(pairs) -> int:
    ivs = sorted((min(p), max(p)) for p in pairs)
    comps = 0
    reach = 0
    for lo, hi in ivs:
        if lo > reach:
            comps += 1
            reach = hi
        else:
            reach = max(reach, hi)
    return comps


def enumerate_order_types() -> List[IntervalMatching]:
    """All 105 perfect matchings of 8 positions, with component counts."""
    out = []

    def rec(remaining, acc):
        if not remaining:
            out.append(IntervalMatching(tuple(acc), _component_count(acc)))
            return
        first = remaining[0]
        for k in range(1, len(remaining)):
            pair = (first, remaining[k])
            rest = [x for x in remaining[1:] if x != remaining[k]]
            acc.append(pair)
            rec(rest, acc)
            acc.pop()

    rec(list(range(1, 9)), [])
    return out


# ---------------------------------------------------------------------------
# candidate quadruple counting and the closed-form bounds
# ---------------------------------------------------------------------------

_sweep_cache: Dict[int, Tuple[np.ndarray, List[IntervalMatching]]] = {}


def _per_width_counts(n: int) -> Tuple[np.ndarray, List[IntervalMatching]]:
    """counts[r][w] = number of (8-subset, order type) pairs with the given
    component count r whose four interval spans all fit within width w."""
    if n in _sweep_cache:
        return _sweep_cache[n]
    types = [t for t in enumerate_order_types() if t.components <= 2]
    subsets = np.array(list(itertools.combinations(range(1, n + 1), 8)),
                       dtype=np.int16)
    counts = np.zeros((3, n + 1), dtype=np.int64)
    for t in types:
        spans = np.zeros(len(subsets), dtype=np.int16)
        for a, b in t.pairs:
            span = subsets[:, b - 1] - subsets[:, a - 1]
            np.maximum(spans, span, out=spans)
        hist = np.bincount(spans, minlength=n + 1)
        cum = np.cumsum(hist)
        counts[t.components] += cum
    _sweep_cache[n] = (counts, types)
    return counts, types


def count_candidate_quadruples(n: int, m: int, breakdown: bool = False):
    """Vertex-disjoint edge quadruples of interval_graph(n, m) whose four
    vertex intervals form at most two connected components.

    Counting goes per interval order type: an 8-subset of vertices
    realizes a type exactly when each of its four matched spans fits the
    graph's width, so the total is a cumulative histogram lookup.
    """
    if not (1 <= m <= n * (n - 1) // 2):
        raise ValidationError(f"need 1 <= m <= C({n},2)")
    if n < 8:
        return (0, {1: 0, 2: 0}) if breakdown else 0
    width = interval_width(n, m)
    counts, _ = _per_width_counts(n)
    w = min(width, n)
    by_r = {1: int(counts[1][w]), 2: int(counts[2][w])}
    total = by_r[1] + by_r[2]
    return (total, by_r) if breakdown else total


def crossing_bound_105(n: int, m: int) -> int:
    """105 n^2 D^6 with the integer width D actually used by the graph."""
    return 105 * n ** 2 * interval_width(n, m) ** 6


def crossing_bound_explicit(n: int, m: int) -> Fraction:
    """6720 m^6 / n^4, the closed form of the quadruple bound."""
    return Fraction(6720 * m ** 6, n ** 4)
