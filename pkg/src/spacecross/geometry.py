"""Exact line and segment geometry in R^3 built on Pluecker coordinates.

Everything here is decision-exact: predicates are computed over rationals
(or degree-2 extensions for roots of the transversal quadratic) and never
consult floating point.  The central operation decides whether some line
meets three or four closed segments, returning a certified witness line.

A line through points p, q is stored as (direction, moment) with
direction = q - p and moment = p x q; two lines are coplanar exactly when
the bilinear incidence form <d1,m2> + <d2,m1> vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import List, Optional, Sequence, Tuple, Union

from .scalars import DegenerateInput, QuadExt, rat, sign_of

Scalar = Union[int, Fraction, QuadExt]
Vec3 = Tuple[Scalar, Scalar, Scalar]


# ---------------------------------------------------------------------------
# vector helpers (work uniformly on int, Fraction and QuadExt components)
# ---------------------------------------------------------------------------

def v_add(a, b):
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def v_sub(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def v_scale(a, s):
    return (a[0] * s, a[1] * s, a[2] * s)


def v_dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def v_cross(a, b):
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def v_is_zero(a) -> bool:
    return all(sign_of(c) == 0 for c in a)


def point3(x, y, z) -> Vec3:
    return (rat(x), rat(y), rat(z))


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Segment3:
    """Closed nondegenerate segment between rational points p and q."""

    p: Vec3
    q: Vec3

    def __post_init__(self):
        if self.p == self.q:
            raise DegenerateInput(f"zero-length segment at {self.p}")

    @property
    def direction(self) -> Vec3:
        return v_sub(self.q, self.p)

    def at(self, t) -> Vec3:
        return v_add(self.p, v_scale(self.direction, t))


@dataclass(frozen=True)
class PluckerLine:
    """Projective line coordinates (direction, moment), moment = p x q."""

    direction: Vec3
    moment: Vec3

    def __post_init__(self):
        if v_is_zero(self.direction):
            raise DegenerateInput("line with zero direction")
        if sign_of(v_dot(self.direction, self.moment)) != 0:
            raise ValueError("Pluecker relation <d,m> = 0 violated")

    def base_point(self) -> Vec3:
        """The point of the line closest to the origin (rational lines only)."""
        d, m = self.direction, self.moment
        n2 = v_dot(d, d)
        return tuple(Fraction(c, 1) / n2 if isinstance(c, int) else c / n2
                     for c in v_cross(d, m))

    def is_rational(self) -> bool:
        return all(not isinstance(c, QuadExt) or c.is_rational
                   for c in self.direction + self.moment)


def plucker_from_segment(seg: Segment3) -> PluckerLine:
    """Supporting line of a segment: direction q - p, moment p x q."""
    return PluckerLine(v_sub(seg.q, seg.p), v_cross(seg.p, seg.q))


def line_through_points(p: Vec3, q: Vec3) -> PluckerLine:
    if p == q:
        raise DegenerateInput("coincident points do not span a line")
    return PluckerLine(v_sub(q, p), v_cross(p, q))


def side_form(l1: PluckerLine, l2: PluckerLine):
    """Bilinear incidence form; zero exactly when the lines are coplanar."""
    return v_dot(l1.direction, l2.moment) + v_dot(l2.direction, l1.moment)


def side_product(l1: PluckerLine, l2: PluckerLine) -> int:
    """Sign in {-1, 0, +1} of the incidence form of two lines."""
    return sign_of(side_form(l1, l2))


def same_line(l1: PluckerLine, l2: PluckerLine) -> bool:
    """Projective equality of Pluecker coordinates (up to nonzero scaling)."""
    d1, d2 = l1.direction, l2.direction
    if not v_is_zero(v_cross(d1, d2)):
        return False
    i = next(k for k in range(3) if sign_of(d1[k]) != 0)
    if sign_of(d2[i]) == 0:
        return False
    # scale so directions match, then moments must match as well
    lhs = v_scale(l2.moment, d1[i])
    rhs = v_scale(l1.moment, d2[i])
    return all(sign_of(a - b) == 0 for a, b in zip(lhs, rhs))


# ---------------------------------------------------------------------------
# planes
# ---------------------------------------------------------------------------

def plane_through_line_point(line_d, line_m, x):
    """Plane (n, e) with <n,y> + e = 0 containing the line and the point x.

    Degenerate (n = 0) exactly when x lies on the line.
    """
    n = v_add(v_cross(line_d, x), line_m)
    e = -v_dot(line_m, x)
    return n, e


def plane_meet(n1, e1, n2, e2):
    """Line of intersection of two distinct planes as (direction, moment)."""
    return v_cross(n1, n2), v_sub(v_scale(n2, e1), v_scale(n1, e2))


def plane_eval(n, e, x):
    return v_dot(n, x) + e


# ---------------------------------------------------------------------------
# rational interval sets (closed; None stands for an unbounded end)
# ---------------------------------------------------------------------------

FULL = [(None, None)]


def iv_intersect(xs, ys):
    out = []
    for (a1, b1) in xs:
        for (a2, b2) in ys:
            lo = a1 if a2 is None else a2 if a1 is None else max(a1, a2)
            hi = b1 if b2 is None else b2 if b1 is None else min(b1, b2)
            if lo is None or hi is None or lo <= hi:
                out.append((lo, hi))
    out.sort(key=lambda iv: (iv[0] is not None, iv[0]))
    return out


def iv_from_linear(a, b, nonneg: bool):
    """Solution set of a*t + b >= 0 (or <= 0 when nonneg is False)."""
    a, b = Fraction(a), Fraction(b)
    if not nonneg:
        a, b = -a, -b
    if a == 0:
        return FULL if b >= 0 else []
    root = -b / a
    return [(root, None)] if a > 0 else [(None, root)]


def iv_from_linear_product(l1, l2, nonneg: bool):
    """Solution set of (a1 t + b1)(a2 t + b2) >= 0 (or <= 0)."""
    (a1, b1), (a2, b2) = l1, l2
    a1, b1, a2, b2 = Fraction(a1), Fraction(b1), Fraction(a2), Fraction(b2)
    if a1 == 0:
        if b1 == 0:
            return FULL if nonneg else FULL  # identically zero product
        return iv_from_linear(a2, b2, nonneg if b1 > 0 else not nonneg)
    if a2 == 0:
        if b2 == 0:
            return FULL
        return iv_from_linear(a1, b1, nonneg if b2 > 0 else not nonneg)
    r1, r2 = -b1 / a1, -b2 / a2
    if r1 > r2:
        r1, r2 = r2, r1
    positive_leading = (a1 > 0) == (a2 > 0)
    if positive_leading == nonneg:
        # outside the roots (closed); a double root leaves the whole line
        return [(None, r1), (r2, None)] if r1 != r2 else FULL
    # between the roots
    return [(r1, r2)]


def mobius_in_unit_interval(num, den):
    """Closed algebraic set where (n1 t + n0)/(d1 t + d0) lies in [0, 1].

    num and den are (slope, intercept) pairs.  Pole points where the
    numerator does not also vanish appear only as isolated spurious points
    and are weeded out by exact witness verification downstream.
    """
    n1, n0 = num
    d1, d0 = den
    if n1 == 0 and n0 == 0:
        # ratio identically zero wherever defined
        if d1 == 0:
            return FULL if d0 != 0 else []
        return FULL
    if d1 == 0 and d0 == 0:
        return []
    ge0 = iv_from_linear_product((n1, n0), (d1, d0), nonneg=True)
    le1 = iv_from_linear_product((n1 - d1, n0 - d0), (d1, d0), nonneg=False)
    return iv_intersect(ge0, le1)


def iv_sample_points(intervals):
    """Candidate rational points: finite endpoints plus one interior point."""
    pts = []
    for lo, hi in intervals:
        if lo is not None and hi is not None:
            if lo == hi:
                pts.append(lo)
            else:
                pts.extend([(lo + hi) / 2, lo, hi])
        elif lo is not None:
            pts.extend([lo + 1, lo])
        elif hi is not None:
            pts.extend([hi - 1, hi])
        else:
            pts.append(Fraction(0))
    return pts


# ---------------------------------------------------------------------------
# segment / line incidence
# ---------------------------------------------------------------------------

def line_meets_segment(line: PluckerLine, seg: Segment3):
    """Exact intersection of a line with a closed segment.

    Returns (True, parameter) with parameter in [0, 1], the whole-segment
    containment reporting parameter 0, or (False, None).
    """
    d_l, m_l = line.direction, line.moment
    d_s = seg.direction
    w = v_cross(d_s, d_l)
    rhs = v_sub(m_l, v_cross(seg.p, d_l))
    if v_is_zero(w):
        # parallel or identical supporting lines
        if v_is_zero(rhs):
            return True, Fraction(0)
        return False, None
    comp = next(i for i in range(3) if sign_of(w[i]) != 0)
    u = rhs[comp] / w[comp]
    point = seg.at(u)
    if not v_is_zero(v_sub(v_cross(point, d_l), m_l)):
        return False, None  # skew lines: the componentwise solve was spurious
    if sign_of(u) < 0 or sign_of(u - 1) > 0:
        return False, None
    return True, u


def verify_transversal(line: PluckerLine, segments: Sequence[Segment3]):
    """Re-check a candidate transversal; returns parameters or None."""
    params = []
    for seg in segments:
        ok, u = line_meets_segment(line, seg)
        if not ok:
            return None
        params.append(u)
    return params


# ---------------------------------------------------------------------------
# regulus parametrization: transversals through three pairwise skew lines
# ---------------------------------------------------------------------------

class _Regulus:
    """Transversals T(t) through P(t) = p1 + t*d1 meeting lines 2 and 3.

    Lines are given by (p, d, m) triples with pairwise nonzero incidence
    form (pairwise skew).  All plane coefficients are linear in t.
    """

    def __init__(self, p1, d1, l2, l3):
        self.p1, self.d1 = p1, d1
        self.l2, self.l3 = l2, l3
        self.A2, self.B2, self.a2, self.b2 = self._plane_coeffs(l2)
        self.A3, self.B3, self.a3, self.b3 = self._plane_coeffs(l3)

    def _plane_coeffs(self, l):
        p, d, m = l
        A = v_add(v_cross(d, self.p1), m)
        B = v_cross(d, self.d1)
        alpha = -v_dot(m, self.p1)
        beta = -v_dot(m, self.d1)
        return A, B, alpha, beta

    def incidence_quadratic(self, l4):
        """Coefficients (A, B, C) of the incidence form with line 4 in t."""
        _, d4, m4 = l4
        A2, B2, a2, b2 = self.A2, self.B2, self.a2, self.b2
        A3, B3, a3, b3 = self.A3, self.B3, self.a3, self.b3
        qa = v_dot(v_cross(B2, B3), m4) + v_dot(
            d4, v_sub(v_scale(B3, b2), v_scale(B2, b3)))
        qb = (v_dot(v_add(v_cross(A2, B3), v_cross(B2, A3)), m4)
              + v_dot(d4, v_sub(v_add(v_scale(B3, a2), v_scale(A3, b2)),
                                v_add(v_scale(B2, a3), v_scale(A2, b3)))))
        qc = v_dot(v_cross(A2, A3), m4) + v_dot(
            d4, v_sub(v_scale(A3, a2), v_scale(A2, a3)))
        return qa, qb, qc

    def trace_fraction(self, which: int, target):
        """Parameter of the target line's crossing of plane 2 or 3 as a
        pair of linear forms (num, den) in t."""
        p, d, _ = target
        if which == 2:
            A, B, alpha, beta = self.A2, self.B2, self.a2, self.b2
        else:
            A, B, alpha, beta = self.A3, self.B3, self.a3, self.b3
        num = (-(v_dot(B, p) + beta), -(v_dot(A, p) + alpha))
        den = (v_dot(B, d), v_dot(A, d))
        return num, den

    def line_at(self, t) -> PluckerLine:
        """The transversal line at parameter t (t rational or QuadExt)."""
        n2 = v_add(self.A2, v_scale(self.B2, t))
        e2 = self.a2 + self.b2 * t
        n3 = v_add(self.A3, v_scale(self.B3, t))
        e3 = self.a3 + self.b3 * t
        d, m = plane_meet(n2, e2, n3, e3)
        return PluckerLine(d, m)


def _line_triple(seg_or_line):
    """Normalize to (p, d, m) with p a point on the line."""
    if isinstance(seg_or_line, Segment3):
        p = seg_or_line.p
        d = seg_or_line.direction
        return p, d, v_cross(seg_or_line.p, seg_or_line.q)
    line = seg_or_line
    return line.base_point(), line.direction, line.moment


def _eval_linear(form, t):
    slope, intercept = form
    return slope * t + intercept


def _param_on_line(p_target, d_target, p_other, u_other, d_other):
    """Parameter on the target line of the point p_other + u*d_other."""
    point = v_add(p_other, v_scale(d_other, u_other))
    diff = v_sub(point, p_target)
    comp = next(i for i in range(3) if sign_of(d_target[i]) != 0)
    return diff[comp] / d_target[comp]


# ---------------------------------------------------------------------------
# transversals of four lines
# ---------------------------------------------------------------------------

@dataclass
class TransversalSet:
    """Result of a four-line transversal query."""

    infinite: bool
    lines: List[PluckerLine]

    @property
    def count(self) -> int:
        if self.infinite:
            raise ValueError("infinite family has no finite count")
        return len(self.lines)


def _skew_triple_order(lines) -> Optional[Tuple[int, int, int, int]]:
    n = len(lines)
    forms = {}
    for i in range(n):
        for j in range(i + 1, n):
            forms[(i, j)] = side_product(lines[i], lines[j])
    for last in range(n - 1, -1, -1):
        rest = [i for i in range(n) if i != last]
        if all(forms[tuple(sorted((a, b)))] != 0
               for k, a in enumerate(rest) for b in rest[k + 1:]):
            return (*rest, last)
    return None


def _quadratic_roots(qa, qb, qc):
    """Real roots of qa t^2 + qb t + qc over the rationals, as exact scalars.

    Returns None when the polynomial vanishes identically.
    """
    qa, qb, qc = Fraction(qa), Fraction(qb), Fraction(qc)
    if qa == 0 and qb == 0 and qc == 0:
        return None
    if qa == 0:
        if qb == 0:
            return []
        return [-qc / qb]
    disc = qb * qb - 4 * qa * qc
    if disc < 0:
        return []
    if disc == 0:
        return [-qb / (2 * qa)]
    half = 2 * qa
    r1 = QuadExt(-qb / half, Fraction(1) / half, disc)
    r2 = QuadExt(-qb / half, Fraction(-1) / half, disc)
    return [r1, r2]


def transversals_of_4_lines(lines: Sequence[PluckerLine]) -> TransversalSet:
    """All lines meeting four given lines at affine points.

    With three of the lines pairwise skew this reduces to a quadratic along
    the first line; the identically vanishing case reports an infinite
    family (a full ruling).  Configurations without a pairwise skew triple
    are resolved by explicit case analysis on a coplanar pair.
    """
    if len(lines) != 4:
        raise ValueError("need exactly four lines")
    order = _skew_triple_order(lines)
    if order is None:
        return _transversals_degenerate(lines)
    triples = [_line_triple(lines[i]) for i in order]
    reg = _Regulus(triples[0][0], triples[0][1], triples[1], triples[2])
    quad = reg.incidence_quadratic(triples[3])
    roots = _quadratic_roots(*quad)
    if roots is None:
        return TransversalSet(True, [])
    found = []
    for t in roots:
        cand = reg.line_at(t)
        if all(side_product(cand, l) == 0 for l in lines):
            found.append(cand)
    return TransversalSet(False, found)


def _coplanar_pair(lines):
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            if side_product(lines[i], lines[j]) == 0:
                return i, j
    return None


def _lines_intersection_point(l1: PluckerLine, l2: PluckerLine):
    """Affine intersection point of two coplanar non-parallel lines."""
    w = v_cross(l1.direction, l2.direction)
    if v_is_zero(w):
        return None
    p1 = l1.base_point()
    # point p1 + u d1 lying on l2:  (p1 + u d1) x d2 = m2
    rhs = v_sub(l2.moment, v_cross(p1, l2.direction))
    den = v_cross(l1.direction, l2.direction)
    comp = next(i for i in range(3) if sign_of(den[i]) != 0)
    u = rhs[comp] / den[comp]
    return v_add(p1, v_scale(l1.direction, u))


def _plane_of_coplanar_lines(l1: PluckerLine, l2: PluckerLine):
    x = _lines_intersection_point(l1, l2)
    if x is not None:
        # plane through l1 and a point of l2 away from x
        p2 = l2.base_point()
        probe = p2 if p2 != x else v_add(p2, l2.direction)
        n, e = plane_through_line_point(l1.direction, l1.moment, probe)
    else:
        n, e = plane_through_line_point(l1.direction, l1.moment, l2.base_point())
    if v_is_zero(n):
        return None  # identical lines
    return n, e


def _line_plane_relation(line: PluckerLine, n, e):
    """Classify a line against a plane: ('in',), ('parallel',) or ('point', x)."""
    dn = v_dot(line.direction, n)
    p = line.base_point()
    h = plane_eval(n, e, p)
    if sign_of(dn) == 0:
        if sign_of(h) == 0:
            return ("in", None)
        return ("parallel", None)
    u = -h / dn
    return ("point", v_add(p, v_scale(line.direction, u)))


def _transversals_degenerate(lines) -> TransversalSet:
    """Four-line transversals when no three of the lines are pairwise skew."""
    # identical pair: reduces to a three-line problem, always an infinite
    # family (meeting three lines is a codimension-3 condition on lines)
    for i in range(4):
        for j in range(i + 1, 4):
            if same_line(lines[i], lines[j]):
                return TransversalSet(True, [])
    pair = _coplanar_pair(lines)
    if pair is None:  # cannot happen: no skew triple forces a coplanar pair
        raise RuntimeError("inconsistent skew classification")
    i, j = pair
    others = [lines[k] for k in range(4) if k not in (i, j)]
    li, lj = lines[i], lines[j]
    x = _lines_intersection_point(li, lj)
    candidates: List[PluckerLine] = []

    if x is not None:
        # transversals through the intersection point
        rel = []
        for l in others:
            on = v_is_zero(v_sub(v_cross(x, l.direction), l.moment))
            rel.append(on)
        if all(rel):
            return TransversalSet(True, [])  # pencil through x works wholesale
        if any(rel):
            # any line joining x to a point of the free line qualifies
            free = others[rel.index(False)]
            y = free.base_point()
            if y == x:
                y = v_add(y, free.direction)
            candidates.append(line_through_points(x, y))
            # a one-parameter family exists: x sits on one of the others
            cand_ok = [c for c in candidates
                       if all(side_product(c, l) == 0 for l in lines)]
            if cand_ok:
                return TransversalSet(True, [])
        else:
            n1, e1 = plane_through_line_point(
                others[0].direction, others[0].moment, x)
            n2, e2 = plane_through_line_point(
                others[1].direction, others[1].moment, x)
            if v_is_zero(v_cross(n1, n2)):
                return TransversalSet(True, [])  # coplanar pencil through x
            d, m = plane_meet(n1, e1, n2, e2)
            if not v_is_zero(d):
                candidates.append(PluckerLine(d, m))

    plane = _plane_of_coplanar_lines(li, lj)
    if plane is not None:
        n, e = plane
        traces = [_line_plane_relation(l, n, e) for l in others]
        kinds = [t[0] for t in traces]
        if "parallel" not in kinds:
            pts = [t[1] for t in traces if t[0] == "point"]
            if len(pts) == 0:
                return TransversalSet(True, [])  # both others inside the plane
            if len(pts) == 1:
                return TransversalSet(True, [])  # pencil through the trace
            if pts[0] == pts[1]:
                return TransversalSet(True, [])
            candidates.append(line_through_points(pts[0], pts[1]))

    good = []
    for c in candidates:
        if all(side_product(c, l) == 0 for l in lines) and \
                not any(same_line(c, g) for g in good):
            good.append(c)
    return TransversalSet(False, good)


# ---------------------------------------------------------------------------
# transversals of closed segments (the space-crossing predicate)
# ---------------------------------------------------------------------------

@dataclass
class SegmentTransversal:
    """Outcome of the segment transversal decision."""

    exists: bool
    line: Optional[PluckerLine] = None
    params: Optional[List[Scalar]] = None


def _scaled_int_segments(segments):
    """Clear denominators with one common positive factor (parameters are
    invariant; a found witness moment is divided back by the factor)."""
    denoms = [c.denominator for s in segments for p in (s.p, s.q) for c in p]
    scale = lcm(*denoms) if denoms else 1
    scaled = []
    for s in segments:
        p = tuple(int(c * scale) for c in s.p)
        q = tuple(int(c * scale) for c in s.q)
        scaled.append(Segment3(tuple(map(Fraction, p)), tuple(map(Fraction, q))))
    return scaled, scale


def _unscale_line(line: PluckerLine, scale: int) -> PluckerLine:
    if scale == 1:
        return line
    return PluckerLine(line.direction, tuple(c / scale for c in line.moment))


def transversal_exists_segments(segments: Sequence[Segment3]) -> SegmentTransversal:
    """Decide exactly whether one line meets all k closed segments (k in 3, 4).

    Every positive answer carries a witness line that has been re-verified
    against each segment with exact arithmetic.
    """
    k = len(segments)
    if k not in (3, 4):
        raise ValueError("supported for 3 or 4 segments")
    for s in segments:
        if not isinstance(s, Segment3):
            raise TypeError("expected Segment3 inputs")
    scaled, scale = _scaled_int_segments(segments)
    res = _transversal_scaled(scaled)
    if res.exists and scale != 1:
        line = _unscale_line(res.line, scale)
        params = verify_transversal(line, segments)
        return SegmentTransversal(True, line, params)
    return res


def _int_triple(seg: Segment3):
    """(p, d, m) of a supporting line with raw integer components."""
    p = tuple(int(c) for c in seg.p)
    q = tuple(int(c) for c in seg.q)
    return p, v_sub(q, p), v_cross(p, q)


def _transversal_scaled(segments) -> SegmentTransversal:
    lines = [plucker_from_segment(s) for s in segments]
    order = _skew_triple_order(lines)
    if order is None:
        return _transversal_degenerate(segments, lines)
    segs = [segments[i] for i in order]
    lns = [lines[i] for i in order]
    triples = [_int_triple(s) for s in segs]
    reg = _Regulus(triples[0][0], triples[0][1], triples[1], triples[2])

    if len(segments) == 3:
        conds = [[(Fraction(0), Fraction(1))]]
        conds.append(mobius_in_unit_interval(*reg.trace_fraction(3, triples[1])))
        conds.append(mobius_in_unit_interval(*reg.trace_fraction(2, triples[2])))
        return _witness_from_intervals(reg, conds, segments)

    quad = reg.incidence_quadratic(triples[3])
    roots = _quadratic_roots(*quad)
    if roots is None:
        # the fourth supporting line meets every transversal of the ruling
        conds = [[(Fraction(0), Fraction(1))]]
        conds.append(mobius_in_unit_interval(*reg.trace_fraction(3, triples[1])))
        conds.append(mobius_in_unit_interval(*reg.trace_fraction(2, triples[2])))
        conds.append(_fourth_line_condition(reg, triples, lns, segs))
        return _witness_from_intervals(reg, conds, segments)

    traces = [reg.trace_fraction(3, triples[1]),
              reg.trace_fraction(2, triples[2]),
              reg.trace_fraction(2, triples[3])]
    for t in roots:
        if sign_of(t) < 0 or sign_of(t - 1) > 0:
            continue
        # division-free range checks of the three crossing parameters
        rejected = False
        for num, den in traces:
            nval = num[0] * t + num[1]
            dval = den[0] * t + den[1]
            s_n, s_d = sign_of(nval), sign_of(dval)
            if s_d == 0:
                if s_n != 0:
                    rejected = True  # transversal misses this line affinely
                break  # 0/0: the line may contain the segment; verify below
            if s_n * s_d < 0 or sign_of(nval - dval) * s_d > 0:
                rejected = True
                break
        if rejected:
            continue
        cand = reg.line_at(t)
        params = verify_transversal(cand, segments)
        if params is not None:
            return SegmentTransversal(True, cand, params)
    return SegmentTransversal(False)


def _fourth_line_condition(reg, triples, lns, segs):
    """Interval condition in t for the fourth segment when its supporting
    line meets every transversal of the regulus."""
    p4, d4, m4 = triples[3]
    # the fourth line may coincide with a parametrizing line
    for idx in (1, 2):
        if same_line(lns[3], lns[idx]):
            # remap that line's crossing parameter onto segment 4
            other = triples[idx]
            num, den = reg.trace_fraction(3 if idx == 1 else 2, other)
            comp = next(i for i in range(3) if sign_of(d4[i]) != 0)
            shift = Fraction(other[0][comp] - p4[comp], d4[comp])
            ratio = Fraction(other[1][comp], d4[comp])
            new_num = (Fraction(num[0]) * ratio + Fraction(den[0]) * shift,
                       Fraction(num[1]) * ratio + Fraction(den[1]) * shift)
            return mobius_in_unit_interval(new_num, den)
    if same_line(lns[3], lns[0]):
        # transversal meets segment 4 exactly at P(t)
        comp = next(i for i in range(3) if sign_of(d4[i]) != 0)
        p1, d1 = triples[0][0], triples[0][1]
        num = (Fraction(d1[comp], d4[comp]),
               Fraction(p1[comp] - p4[comp], d4[comp]))
        return mobius_in_unit_interval(num, (Fraction(0), Fraction(1)))
    return mobius_in_unit_interval(*reg.trace_fraction(2, triples[3]))


def _witness_from_intervals(reg, conds, segments) -> SegmentTransversal:
    feasible = FULL
    for c in conds:
        feasible = iv_intersect(feasible, c)
        if not feasible:
            return SegmentTransversal(False)
    for t in iv_sample_points(feasible):
        cand = reg.line_at(t)
        if v_is_zero(cand.direction):
            continue
        params = verify_transversal(cand, segments)
        if params is not None:
            return SegmentTransversal(True, cand, params)
    return SegmentTransversal(False)


# -- degenerate configurations ----------------------------------------------

def _collinear_overlap(seg_a: Segment3, seg_b: Segment3):
    """Intersection of two segments on one common supporting line."""
    d = seg_a.direction
    comp = next(i for i in range(3) if sign_of(d[i]) != 0)
    ua = sorted([Fraction(0), Fraction(1)])
    ub = sorted([(seg_b.p[comp] - seg_a.p[comp]) / d[comp],
                 (seg_b.q[comp] - seg_a.p[comp]) / d[comp]])
    lo, hi = max(ua[0], ub[0]), min(ua[1], ub[1])
    if lo > hi:
        return None
    return seg_a.at(lo), seg_a.at(hi)


def _transversal_degenerate(segments, lines) -> SegmentTransversal:
    k = len(segments)
    for i in range(k):
        for j in range(i + 1, k):
            if same_line(lines[i], lines[j]):
                return _transversal_shared_line(segments, lines, i, j)
    for i in range(k):
        for j in range(i + 1, k):
            if side_product(lines[i], lines[j]) == 0:
                return _transversal_coplanar_pair(segments, lines, i, j)
    raise RuntimeError("inconsistent skew classification")


def _transversal_shared_line(segments, lines, i, j) -> SegmentTransversal:
    others = [segments[k] for k in range(len(segments)) if k not in (i, j)]
    # the shared supporting line itself
    params = verify_transversal(lines[i], segments)
    if params is not None:
        return SegmentTransversal(True, lines[i], params)
    overlap = _collinear_overlap(segments[i], segments[j])
    if overlap is None:
        return SegmentTransversal(False)
    lo, hi = overlap
    if lo == hi:
        found = _pencil_through_point(lo, others)
    elif len(others) + 1 >= 3:
        reduced = [Segment3(lo, hi), *others]
        found = _transversal_scaled_rational(reduced)
    else:
        found = _pencil_through_segment_trivial(Segment3(lo, hi), others)
    if found is None:
        return SegmentTransversal(False)
    params = verify_transversal(found, segments)
    if params is None:
        return SegmentTransversal(False)
    return SegmentTransversal(True, found, params)


def _transversal_scaled_rational(segments):
    """Recurse on a reduced problem whose endpoints may be rational."""
    if len(segments) in (3, 4):
        res = transversal_exists_segments(segments)
        return res.line if res.exists else None
    # two segments: any line meeting both, if one exists
    return _two_segment_line(segments[0], segments[1])


def _two_segment_line(s1: Segment3, s2: Segment3):
    for a in (s1.p, s1.q):
        for b in (s2.p, s2.q):
            if a != b:
                cand = line_through_points(a, b)
                if verify_transversal(cand, [s1, s2]) is not None:
                    return cand
    # segments sharing all endpoints would be identical; handled earlier
    return None


def _pencil_through_segment_trivial(seg, others):
    # with at most one other constraint a join through endpoints suffices
    if not others:
        return plucker_from_segment(seg)
    return _two_segment_line(seg, others[0])


def _point_on_segment(x, seg: Segment3) -> bool:
    if not v_is_zero(v_cross(v_sub(x, seg.p), seg.direction)):
        return False
    d = seg.direction
    comp = next(i for i in range(3) if sign_of(d[i]) != 0)
    u = (x[comp] - seg.p[comp]) / d[comp]
    return 0 <= u <= 1


def _point_on_line(x, line: PluckerLine) -> bool:
    return v_is_zero(v_sub(v_cross(x, line.direction), line.moment))


def _pencil_through_point(x, segs) -> Optional[PluckerLine]:
    """A line through the fixed point x meeting every segment, or None."""
    free = [s for s in segs if not _point_on_segment(x, s)]
    if not free:
        # any direction works; reuse a segment direction when available
        d = segs[0].direction if segs else (Fraction(1), Fraction(0), Fraction(0))
        return PluckerLine(d, v_cross(x, v_add(x, d)))
    if len(free) == 1:
        s = free[0]
        if _point_on_line(x, plucker_from_segment(s)):
            return None  # only the supporting line could work, but x misses s
        y = s.p if s.p != x else s.q
        return line_through_points(x, y)
    s, r = free
    ls, lr = plucker_from_segment(s), plucker_from_segment(r)
    if same_line(ls, lr):
        if _point_on_line(x, ls):
            return None  # a non-supporting line through x hits the common
            # line once, so it cannot reach both segments
        # join x to a common point of the two collinear segments
        overlap = _collinear_overlap(s, r)
        if overlap is None:
            return None
        return line_through_points(x, overlap[0])
    if _point_on_line(x, ls):
        return ls if verify_transversal(ls, [s, r]) is not None else None
    if _point_on_line(x, lr):
        return lr if verify_transversal(lr, [s, r]) is not None else None
    n, e = plane_through_line_point(lr.direction, lr.moment, x)
    hp, hq = plane_eval(n, e, s.p), plane_eval(n, e, s.q)
    sp, sq = sign_of(hp), sign_of(hq)
    if sp == 0 and sq == 0:
        # s lies inside the plane spanned by x and r: 2D fan search
        for endpoint in (s.p, s.q, r.p, r.q):
            if endpoint == x:
                continue
            cand = line_through_points(x, endpoint)
            if verify_transversal(cand, [s, r]) is not None:
                return cand
        return None
    if sp * sq > 0:
        return None
    u = Fraction(hp) / (hp - hq)
    y = s.at(u)
    if y == x:
        return None
    cand = line_through_points(x, y)
    if verify_transversal(cand, [s, r]) is not None:
        return cand
    return None


def _transversal_coplanar_pair(segments, lines, i, j) -> SegmentTransversal:
    others = [segments[k] for k in range(len(segments)) if k not in (i, j)]
    li, lj = lines[i], lines[j]
    x = _lines_intersection_point(li, lj)

    if x is not None and _point_on_segment(x, segments[i]) and \
            _point_on_segment(x, segments[j]):
        found = _pencil_through_point(x, others)
        if found is not None:
            params = verify_transversal(found, segments)
            if params is not None:
                return SegmentTransversal(True, found, params)

    plane = _plane_of_coplanar_lines(li, lj)
    if plane is None:
        raise RuntimeError("identical lines must be handled earlier")
    n, e = plane
    found = _stab_in_plane(n, e, segments)
    if found is not None:
        params = verify_transversal(found, segments)
        if params is not None:
            return SegmentTransversal(True, found, params)
    return SegmentTransversal(False)


def _stab_in_plane(n, e, segments) -> Optional[PluckerLine]:
    """A line inside the plane (n, e) meeting every segment, or None.

    Each segment is clipped to the plane (empty, a point, or a subsegment);
    a pinning argument reduces the search to lines through two of the
    finitely many constraint points.
    """
    points = []     # 3D points each transversal must contain
    subsegs = []    # in-plane subsegments
    for seg in segments:
        hp, hq = plane_eval(n, e, seg.p), plane_eval(n, e, seg.q)
        sp, sq = sign_of(hp), sign_of(hq)
        if sp == 0 and sq == 0:
            subsegs.append(seg)
        elif sp == 0:
            points.append(seg.p)
        elif sq == 0:
            points.append(seg.q)
        elif sp * sq > 0:
            return None
        else:
            points.append(seg.at(Fraction(hp) / (hp - hq)))

    distinct = []
    for p in points:
        if p not in distinct:
            distinct.append(p)

    if len(distinct) >= 2:
        candidates = [(distinct[0], distinct[1])]
    elif len(distinct) == 1:
        p = distinct[0]
        ends = [q for s in subsegs for q in (s.p, s.q) if q != p]
        if not ends:
            d = subsegs[0].direction if subsegs else (1, 0, 0)
            cand = PluckerLine(tuple(map(Fraction, d)),
                               v_cross(p, v_add(p, tuple(map(Fraction, d)))))
            return cand
        candidates = [(p, q) for q in ends]
    else:
        ends = []
        for s in subsegs:
            for q in (s.p, s.q):
                if q not in ends:
                    ends.append(q)
        candidates = [(a, b) for ai, a in enumerate(ends)
                      for b in ends[ai + 1:]]

    for a, b in candidates:
        if a == b:
            continue
        cand = line_through_points(a, b)
        if verify_transversal(cand, segments) is not None:
            return cand
    return None


# ---------------------------------------------------------------------------
# planar segment classification
# ---------------------------------------------------------------------------

def orient2d(a, b, c):
    """Sign of the signed area of triangle abc."""
    return sign_of((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))


def segments_intersect_2d(a, b) -> str:
    """Classify two plane segments: 'disjoint', 'crossing' or 'touching'.

    Crossing means the open interiors meet transversally; every other
    nonempty intersection (endpoint contact, collinear overlap) is touching.
    """
    (p1, q1), (p2, q2) = a, b
    if p1 == q1 or p2 == q2:
        raise DegenerateInput("zero-length segment")
    d1 = orient2d(p1, q1, p2)
    d2 = orient2d(p1, q1, q2)
    d3 = orient2d(p2, q2, p1)
    d4 = orient2d(p2, q2, q1)
    if d1 * d2 < 0 and d3 * d4 < 0:
        return "crossing"

    def on_seg(p, q, r):
        if orient2d(p, q, r) != 0:
            return False
        return (min(p[0], q[0]) <= r[0] <= max(p[0], q[0])
                and min(p[1], q[1]) <= r[1] <= max(p[1], q[1]))

    touching = (on_seg(p1, q1, p2) or on_seg(p1, q1, q2)
                or on_seg(p2, q2, p1) or on_seg(p2, q2, q1))
    return "touching" if touching else "disjoint"
