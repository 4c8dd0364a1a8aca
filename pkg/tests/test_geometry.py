import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from spacecross.errors import DegenerateInput
from spacecross.geometry import (PluckerLine, Segment3, line_through_points,
                                 plucker_from_segment, point3, same_line,
                                 segments_intersect_2d, side_form,
                                 side_product, transversal_exists_segments,
                                 transversals_of_4_lines, v_add, v_cross,
                                 v_dot, verify_transversal)

coord = st.fractions(min_value=0, max_value=4, max_denominator=16)
points = st.tuples(coord, coord, coord)


def rand_segment(rng, span=64):
    while True:
        p = point3(Fraction(rng.randint(0, span), span),
                   Fraction(rng.randint(0, span), span),
                   Fraction(rng.randint(0, span), span))
        q = point3(Fraction(rng.randint(0, span), span),
                   Fraction(rng.randint(0, span), span),
                   Fraction(rng.randint(0, span), span))
        if p != q:
            return Segment3(p, q)


# ---------------------------------------------------------------------------
# Pluecker basics
# ---------------------------------------------------------------------------

def test_plucker_from_segment_examples():
    l1 = plucker_from_segment(Segment3(point3(0, 0, 0), point3(1, 0, 0)))
    assert l1.direction == point3(1, 0, 0) and l1.moment == point3(0, 0, 0)
    l2 = plucker_from_segment(Segment3(point3(0, 0, 0), point3(0, 1, 0)))
    assert l2.direction == point3(0, 1, 0) and l2.moment == point3(0, 0, 0)
    l3 = plucker_from_segment(Segment3(point3(1, 0, 0), point3(1, 1, 0)))
    assert l3.direction == point3(0, 1, 0)
    assert l3.moment == point3(0, 0, 1)


def test_plucker_moment_against_symbolic_cross():
    sympy = pytest.importorskip("sympy")
    rng = random.Random(1)
    for _ in range(20):
        s = rand_segment(rng)
        line = plucker_from_segment(s)
        p = sympy.Matrix([sympy.Rational(c) for c in s.p])
        q = sympy.Matrix([sympy.Rational(c) for c in s.q])
        expect = p.cross(q)
        assert all(sympy.Rational(line.moment[i]) == expect[i] for i in range(3))


def test_degenerate_segment_rejected():
    with pytest.raises(DegenerateInput):
        Segment3(point3(1, 2, 3), point3(1, 2, 3))


def test_side_product_examples():
    xaxis = line_through_points(point3(0, 0, 0), point3(1, 0, 0))
    yaxis = line_through_points(point3(0, 0, 0), point3(0, 1, 0))
    parallel = line_through_points(point3(0, 0, 1), point3(1, 0, 1))
    skew = line_through_points(point3(0, 0, 1), point3(0, 1, 1))
    assert side_product(xaxis, yaxis) == 0
    assert side_product(xaxis, parallel) == 0
    assert side_product(xaxis, skew) != 0
    # hand evaluation of the incidence form for the skew pair
    assert side_form(xaxis, skew) == -1


def _det4_homogeneous(a, b, c, d):
    rows = [list(a) + [Fraction(1)], list(b) + [Fraction(1)],
            list(c) + [Fraction(1)], list(d) + [Fraction(1)]]
    total = Fraction(0)
    for perm in itertools.permutations(range(4)):
        sign = 1
        seen = list(perm)
        for i in range(4):
            for j in range(i + 1, 4):
                if seen[i] > seen[j]:
                    sign = -sign
        prod = Fraction(1)
        for i in range(4):
            prod *= rows[i][perm[i]]
        total += sign * prod
    return total


def test_side_product_matches_endpoint_determinant():
    rng = random.Random(2)
    for _ in range(300):
        s = rand_segment(rng, span=16)
        t = rand_segment(rng, span=16)
        sign_pl = side_product(plucker_from_segment(s), plucker_from_segment(t))
        det = _det4_homogeneous(s.p, s.q, t.p, t.q)
        assert (sign_pl == 0) == (det == 0)


def test_side_product_orientation_flip():
    rng = random.Random(3)
    for _ in range(40):
        s, t = rand_segment(rng), rand_segment(rng)
        l1, l2 = plucker_from_segment(s), plucker_from_segment(t)
        flipped = plucker_from_segment(Segment3(s.q, s.p))
        assert side_product(l1, l2) == -side_product(flipped, l2)


def test_plucker_relation_always_holds():
    rng = random.Random(4)
    for _ in range(100):
        line = plucker_from_segment(rand_segment(rng))
        assert v_dot(line.direction, line.moment) == 0


# ---------------------------------------------------------------------------
# transversals of four lines
# ---------------------------------------------------------------------------

def test_four_lines_through_zaxis():
    zaxis = line_through_points(point3(0, 0, 0), point3(0, 0, 1))
    lines = [line_through_points(point3(0, 0, h), point3(1, s, h))
             for h, s in [(1, 1), (2, 3), (3, 9), (4, 27)]]
    res = transversals_of_4_lines(lines)
    assert not res.infinite
    assert any(same_line(l, zaxis) for l in res.lines)
    for l in res.lines:
        assert all(side_product(l, m) == 0 for m in lines)


def _ruling_line(n, d):
    # one ruling of x^2 + y^2 - z^2 = 1, rationally parametrized
    dd = n * n + d * d
    p = point3(Fraction(d * d - n * n, dd), Fraction(2 * n * d, dd), 0)
    direction = (Fraction(-2 * n * d, dd), Fraction(d * d - n * n, dd), Fraction(1))
    return PluckerLine(direction, v_cross(p, v_add(p, direction)))


def test_one_ruling_gives_infinite_family():
    lines = [_ruling_line(0, 1), _ruling_line(1, 1),
             _ruling_line(1, 2), _ruling_line(2, 1)]
    for a, b in itertools.combinations(lines, 2):
        assert side_product(a, b) != 0
    res = transversals_of_4_lines(lines)
    assert res.infinite


def test_random_lines_count_matches_numeric_roots():
    mp = pytest.importorskip("mpmath")
    mp.mp.prec = 256
    rng = random.Random(5)
    checked = 0
    for _ in range(60):
        segs = [rand_segment(rng, span=8) for _ in range(4)]
        lines = [plucker_from_segment(s) for s in segs]
        if any(side_product(a, b) == 0
               for a, b in itertools.combinations(lines, 2)):
            continue
        res = transversals_of_4_lines(lines)
        count = 0 if res.infinite else len(res.lines)
        n_roots = _numeric_root_count(mp, segs)
        if n_roots is None:
            continue
        assert count == n_roots
        checked += 1
    assert checked >= 30


def _numeric_root_count(mp, segs):
    def vec(p):
        return [mp.mpf(c.numerator) / mp.mpf(c.denominator) for c in p]

    def cross(a, b):
        return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0]]

    def dot(a, b):
        return sum(x * y for x, y in zip(a, b))

    p = [vec(s.p) for s in segs]
    q = [vec(s.q) for s in segs]
    d = [[x - y for x, y in zip(qq, pp)] for pp, qq in zip(p, q)]
    m = [cross(pp, qq) for pp, qq in zip(p, q)]
    A2 = [x + y for x, y in zip(cross(d[1], p[0]), m[1])]
    B2 = cross(d[1], d[0])
    a2, b2 = -dot(m[1], p[0]), -dot(m[1], d[0])
    A3 = [x + y for x, y in zip(cross(d[2], p[0]), m[2])]
    B3 = cross(d[2], d[0])
    a3, b3 = -dot(m[2], p[0]), -dot(m[2], d[0])
    qa = dot(cross(B2, B3), m[3]) + b2 * dot(d[3], B3) - b3 * dot(d[3], B2)
    qb = (dot(cross(A2, B3), m[3]) + dot(cross(B2, A3), m[3])
          + a2 * dot(d[3], B3) + b2 * dot(d[3], A3)
          - a3 * dot(d[3], B2) - b3 * dot(d[3], A2))
    qc = dot(cross(A2, A3), m[3]) + a2 * dot(d[3], A3) - a3 * dot(d[3], A2)
    scale = max(abs(qa), abs(qb), abs(qc))
    if scale == 0 or abs(qa) < mp.mpf("1e-40") * scale:
        return None
    disc = qb * qb - 4 * qa * qc
    if abs(disc) < mp.mpf("1e-40") * scale * scale:
        return None
    return 2 if disc > 0 else 0


# ---------------------------------------------------------------------------
# segment transversals
# ---------------------------------------------------------------------------

def _circle_point(n, d):
    dd = n * n + d * d
    return Fraction(d * d - n * n, dd), Fraction(2 * n * d, dd)


def test_four_segments_through_common_axis():
    segs = []
    for i, (n, d) in enumerate([(0, 1), (1, 2), (1, 1), (2, 1)], start=1):
        c, s = _circle_point(n, d)
        segs.append(Segment3(point3(c, s, i), point3(-c, -s, i)))
    res = transversal_exists_segments(segs)
    assert res.exists
    zaxis = line_through_points(point3(0, 0, 0), point3(0, 0, 1))
    assert same_line(res.line, zaxis)
    assert res.params == [Fraction(1, 2)] * 4


def test_shrunk_segments_lose_transversal():
    segs = []
    for i, (n, d) in enumerate([(0, 1), (1, 2), (1, 1), (2, 1)], start=1):
        c, s = _circle_point(n, d)
        segs.append(Segment3(point3(c, s, i), point3(c / 2, s / 2, i)))
    assert not transversal_exists_segments(segs).exists
    # sampled line candidates agree that nothing works
    rng = random.Random(6)
    for _ in range(500):
        i, j = rng.sample(range(4), 2)
        ti = Fraction(rng.randint(0, 16), 16)
        tj = Fraction(rng.randint(0, 16), 16)
        a, b = segs[i].at(ti), segs[j].at(tj)
        if a == b:
            continue
        cand = line_through_points(a, b)
        assert verify_transversal(cand, segs) is None


def test_three_segments_sharing_point():
    s1 = Segment3(point3(1, 1, 1), point3(2, 3, 4))
    s2 = Segment3(point3(0, 0, 0), point3(2, 2, 2))
    s3 = Segment3(point3(1, 1, 1), point3(-1, 5, 0))
    res = transversal_exists_segments([s1, s2, s3])
    assert res.exists
    assert verify_transversal(res.line, [s1, s2, s3]) is not None


def test_witness_reverifies_and_has_quad_coordinates():
    rng = random.Random(7)
    found_irrational = 0
    for _ in range(400):
        segs = [rand_segment(rng) for _ in range(4)]
        res = transversal_exists_segments(segs)
        if not res.exists:
            continue
        params = verify_transversal(res.line, segs)
        assert params is not None
        assert all(side_product(res.line, plucker_from_segment(s)) == 0
                   for s in segs)
        if not res.line.is_rational():
            found_irrational += 1
    assert found_irrational > 0


def test_invariance_under_permutation_and_flip():
    rng = random.Random(8)
    for _ in range(60):
        segs = [rand_segment(rng, span=8) for _ in range(4)]
        base = transversal_exists_segments(segs).exists
        perm = list(segs)
        rng.shuffle(perm)
        assert transversal_exists_segments(perm).exists == base
        flipped = [Segment3(s.q, s.p) if rng.random() < 0.5 else s
                   for s in segs]
        assert transversal_exists_segments(flipped).exists == base


def test_invariance_under_affine_map():
    rng = random.Random(9)
    M = ((2, 1, 0), (0, 1, 1), (1, 0, 3))  # det = 7, invertible
    shift = point3(Fraction(1, 3), Fraction(-2, 5), 4)

    def apply(p):
        img = tuple(sum(Fraction(M[i][j]) * p[j] for j in range(3))
                    for i in range(3))
        return v_add(img, shift)

    for _ in range(40):
        segs = [rand_segment(rng, span=8) for _ in range(4)]
        base = transversal_exists_segments(segs).exists
        mapped = [Segment3(apply(s.p), apply(s.q)) for s in segs]
        assert transversal_exists_segments(mapped).exists == base


def test_monotone_under_extension():
    rng = random.Random(10)
    grown = 0
    for _ in range(80):
        segs = [rand_segment(rng, span=8) for _ in range(4)]
        if not transversal_exists_segments(segs).exists:
            continue
        grown += 1
        wider = [Segment3(v_add(s.p, v_cross((0, 0, 0), (0, 0, 0))), s.q)
                 for s in segs]
        extended = [Segment3(s.at(Fraction(-1, 2)), s.at(Fraction(3, 2)))
                    for s in segs]
        assert transversal_exists_segments(extended).exists
    assert grown > 0


# -- degenerate configurations ------------------------------------------------

def test_collinear_pair_reuses_common_line():
    # two collinear disjoint segments force the common supporting line
    s1 = Segment3(point3(0, 0, 0), point3(1, 0, 0))
    s2 = Segment3(point3(2, 0, 0), point3(3, 0, 0))
    s3 = Segment3(point3(Fraction(1, 2), -1, 0), point3(Fraction(1, 2), 1, 0))
    s4 = Segment3(point3(Fraction(5, 2), -1, 0), point3(Fraction(5, 2), 1, 0))
    res = transversal_exists_segments([s1, s2, s3, s4])
    assert res.exists
    xaxis = line_through_points(point3(0, 0, 0), point3(1, 0, 0))
    assert same_line(res.line, xaxis)
    # moving one crossing segment off the line kills it
    s4b = Segment3(point3(Fraction(5, 2), 1, 1), point3(Fraction(5, 2), 2, 1))
    assert not transversal_exists_segments([s1, s2, s3, s4b]).exists


def test_pencil_through_shared_intersection():
    # two segments crossing at a point, two others reachable from it
    s1 = Segment3(point3(-1, 0, 0), point3(1, 0, 0))
    s2 = Segment3(point3(0, -1, 0), point3(0, 1, 0))
    s3 = Segment3(point3(2, 2, 2), point3(3, 2, 2))
    s4 = Segment3(point3(4, 4, 4), point3(4, 5, 4))
    res = transversal_exists_segments([s1, s2, s3, s4])
    # the pencil through the origin must find the line through (0,0,0)
    # hitting s3 and s4 only if they are collinear with it; they are not
    # aligned, so fall back to explicit verification of the answer
    if res.exists:
        assert verify_transversal(res.line, [s1, s2, s3, s4]) is not None
    else:
        rng = random.Random(11)
        for _ in range(300):
            a = s3.at(Fraction(rng.randint(0, 8), 8))
            b = s4.at(Fraction(rng.randint(0, 8), 8))
            if a == b:
                continue
            assert verify_transversal(line_through_points(a, b),
                                      [s1, s2, s3, s4]) is None


def test_coplanar_quadruple_in_plane_stab():
    # four segments in the z = 0 plane admitting an in-plane transversal
    s1 = Segment3(point3(0, 0, 0), point3(0, 2, 0))
    s2 = Segment3(point3(1, 0, 0), point3(1, 2, 0))
    s3 = Segment3(point3(2, 0, 0), point3(2, 2, 0))
    s4 = Segment3(point3(3, 0, 0), point3(3, 2, 0))
    res = transversal_exists_segments([s1, s2, s3, s4])
    assert res.exists
    assert verify_transversal(res.line, [s1, s2, s3, s4]) is not None
    # shifting one far in y removes every in-plane stabber
    s4b = Segment3(point3(3, 10, 0), point3(3, 12, 0))
    assert not transversal_exists_segments([s1, s2, s3, s4b]).exists


# ---------------------------------------------------------------------------
# planar segment classification
# ---------------------------------------------------------------------------

def test_segments_intersect_2d_examples():
    assert segments_intersect_2d(((0, 0), (1, 1)), ((0, 1), (1, 0))) == "crossing"
    assert segments_intersect_2d(((0, 0), (1, 0)), ((0, 1), (1, 1))) == "disjoint"
    assert segments_intersect_2d(((0, 0), (1, 0)), ((1, 0), (2, 1))) == "touching"
    # collinear overlap is touching, not crossing
    assert segments_intersect_2d(((0, 0), (2, 0)), ((1, 0), (3, 0))) == "touching"


@given(st.tuples(coord, coord), st.tuples(coord, coord),
       st.tuples(coord, coord), st.tuples(coord, coord))
@settings(max_examples=200)
def test_segments_intersect_2d_symmetry(a, b, c, d):
    if a == b or c == d:
        return
    r1 = segments_intersect_2d((a, b), (c, d))
    assert r1 == segments_intersect_2d((c, d), (a, b))
    assert r1 == segments_intersect_2d((b, a), (c, d))
