import itertools
import math
import random
from fractions import Fraction

import pytest

from spacecross.errors import (DegeneratePosition, NotDisjoint, ValidationError)
from spacecross.geometry import point3, v_add, v_sub
from spacecross.linking import (PolygonalCycle, conway_gordon_check,
                                find_generic_projection, find_linked_pair,
                                linking_number, transversal_through_cycles,
                                _projection_for)
from spacecross.drawing import Graph, SpatialDrawing
from spacecross.generators import hopf_pair, stacked_pairs
from spacecross.pipeline import SubdivisionEmbedding


# ---------------------------------------------------------------------------
# the numeric Gauss-integral oracle
# ---------------------------------------------------------------------------

def _solid_angle(a, b, c):
    # van Oosterom-Strackee: signed solid angle of the spherical triangle
    na, nb, nc = (math.sqrt(sum(x * x for x in v)) for v in (a, b, c))
    det = (a[0] * (b[1] * c[2] - b[2] * c[1])
           - a[1] * (b[0] * c[2] - b[2] * c[0])
           + a[2] * (b[0] * c[1] - b[1] * c[0]))
    dab = sum(x * y for x, y in zip(a, b))
    dac = sum(x * y for x, y in zip(a, c))
    dbc = sum(x * y for x, y in zip(b, c))
    denom = na * nb * nc + dab * nc + dac * nb + dbc * na
    return 2 * math.atan2(det, denom)


def gauss_linking_numeric(c1: PolygonalCycle, c2: PolygonalCycle) -> float:
    total = 0.0
    pts1 = [tuple(map(float, p)) for p in c1.points]
    pts2 = [tuple(map(float, p)) for p in c2.points]
    n1, n2 = len(pts1), len(pts2)
    for i in range(n1):
        a0, a1 = pts1[i], pts1[(i + 1) % n1]
        for j in range(n2):
            b0, b1 = pts2[j], pts2[(j + 1) % n2]
            r = [tuple(x - y for x, y in zip(p, q))
                 for p, q in ((a0, b0), (a1, b0), (a1, b1), (a0, b1))]
            omega = _solid_angle(r[0], r[1], r[2]) + _solid_angle(r[0], r[2], r[3])
            total += omega
    return total / (4 * math.pi)


# ---------------------------------------------------------------------------
# linking numbers
# ---------------------------------------------------------------------------

def test_hopf_pair_is_plus_one():
    c1, c2 = hopf_pair()
    assert linking_number(c1, c2) == 1
    assert linking_number(c2, c1) == 1


def test_mirrored_hopf_is_minus_one():
    c1, c2 = hopf_pair()
    m1 = PolygonalCycle(tuple((x, y, -z) for x, y, z in c1.points))
    m2 = PolygonalCycle(tuple((x, y, -z) for x, y, z in c2.points))
    assert linking_number(m1, m2) == -1


def test_split_link_is_zero():
    c1, _ = hopf_pair()
    far = PolygonalCycle((point3(10, 0, 0), point3(11, 0, 0), point3(11, 1, 0)))
    assert linking_number(c1, far) == 0


def test_double_wrap_is_two_and_matches_gauss_integral():
    big = PolygonalCycle((point3(3, 3, 0), point3(-3, 3, 0),
                          point3(-3, -3, 0), point3(3, -3, 0)))
    wrap = PolygonalCycle(tuple(point3(*p) for p in [
        (1, 0, 1), (1, 0, -1), (5, 0, -1), (5, 0, 5), (-1, 1, 5),
        (-1, 1, -1), (6, 1, -1), (6, 1, 6), (1, 0, 6)]))
    lk = linking_number(big, wrap)
    assert abs(lk) == 2
    numeric = gauss_linking_numeric(big, wrap)
    assert abs(numeric - lk) < 1e-6


def test_gauss_integral_agrees_on_random_pairs():
    rng = random.Random(4)
    for _ in range(10):
        pts1 = [point3(rng.randint(0, 8), rng.randint(0, 8), rng.randint(0, 8))
                for _ in range(4)]
        pts2 = [point3(rng.randint(0, 8) + Fraction(1, 3),
                       rng.randint(0, 8) + Fraction(1, 5),
                       rng.randint(0, 8) + Fraction(1, 7)) for _ in range(4)]
        try:
            c1, c2 = PolygonalCycle(tuple(pts1)), PolygonalCycle(tuple(pts2))
            lk = linking_number(c1, c2)
        except (ValidationError, NotDisjoint):
            continue
        assert abs(gauss_linking_numeric(c1, c2) - lk) < 1e-6


def test_linking_independent_of_direction():
    c1, c2 = hopf_pair()
    found = 0
    t = 1
    while found < 10:
        proj = _projection_for(t)
        t += 1
        from spacecross.linking import _projection_is_generic
        if not _projection_is_generic(proj, c1, c2):
            continue
        assert linking_number(c1, c2, projection=proj) == 1
        found += 1


def _subdivide_cycle(cycle, rng):
    pts = list(cycle.points)
    i = rng.randrange(len(pts))
    a, b = pts[i], pts[(i + 1) % len(pts)]
    t = Fraction(rng.randint(1, 7), 8)
    mid = v_add(a, tuple(t * (x - y) for x, y in zip(b, a)))
    pts.insert(i + 1, mid)
    return PolygonalCycle(tuple(pts))


def test_linking_invariant_under_edge_subdivision():
    rng = random.Random(5)
    c1, c2 = hopf_pair()
    for _ in range(100):
        if rng.random() < 0.5:
            c1 = _subdivide_cycle(c1, rng)
        else:
            c2 = _subdivide_cycle(c2, rng)
    assert linking_number(c1, c2) == 1


def test_linking_flips_under_reflection_and_survives_positive_affine():
    c1, c2 = hopf_pair()

    def refl(c):
        return PolygonalCycle(tuple((x, y, -z) for x, y, z in c.points))

    assert linking_number(refl(c1), refl(c2)) == -1

    def pos_affine(c):
        return PolygonalCycle(tuple(
            (2 * x + y + 1, y - z, x + 3 * z - Fraction(1, 2))
            for x, y, z in c.points))  # determinant 10 > 0

    assert linking_number(pos_affine(c1), pos_affine(c2)) == 1


def test_intersecting_cycles_rejected():
    c1 = PolygonalCycle((point3(0, 0, 0), point3(2, 0, 0), point3(1, 2, 0)))
    c2 = PolygonalCycle((point3(1, 0, -1), point3(1, 0, 1), point3(3, 3, 1)))
    with pytest.raises(NotDisjoint):
        linking_number(c1, c2)


def test_cycle_validation():
    with pytest.raises(ValidationError):
        PolygonalCycle((point3(0, 0, 0), point3(1, 0, 0)))
    with pytest.raises(ValidationError):
        PolygonalCycle((point3(0, 0, 0), point3(0, 0, 0), point3(1, 1, 1)))
    # figure-eight style self intersection
    with pytest.raises(ValidationError):
        PolygonalCycle((point3(0, 0, 0), point3(2, 2, 0), point3(2, 0, 0),
                        point3(0, 2, 0)))


# ---------------------------------------------------------------------------
# intrinsic linking of K6
# ---------------------------------------------------------------------------

def octahedron_points(rng):
    base = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    return [point3(Fraction(64 * x + rng.randint(-5, 5), 64),
                   Fraction(64 * y + rng.randint(-5, 5), 64),
                   Fraction(64 * z + rng.randint(-5, 5), 64))
            for x, y, z in base]


def test_conway_gordon_octahedron():
    rng = random.Random(6)
    pts = octahedron_points(rng)
    res = conway_gordon_check(pts)
    assert res.parity_sum == 1
    lk = res.linking_numbers[res.odd_pair]
    assert lk % 2 == 1
    # numeric cross-check of every pair
    for (t1, t2), val in res.linking_numbers.items():
        c1 = PolygonalCycle(tuple(pts[i] for i in t1))
        c2 = PolygonalCycle(tuple(pts[i] for i in t2))
        assert abs(gauss_linking_numeric(c1, c2) - val) < 1e-6


def test_conway_gordon_rejects_coplanar():
    pts = [point3(i, i * i, 0) for i in range(6)]
    with pytest.raises(DegeneratePosition):
        conway_gordon_check(pts)


def test_conway_gordon_parity_on_random_configurations():
    rng = random.Random(7)
    accepted = 0
    for _ in range(50):
        pts = [point3(Fraction(rng.randint(0, 64), 64),
                      Fraction(rng.randint(0, 64), 64),
                      Fraction(rng.randint(0, 64), 64)) for _ in range(6)]
        try:
            res = conway_gordon_check(pts)
        except DegeneratePosition:
            continue
        assert res.parity_sum == 1
        accepted += 1
    assert accepted >= 45


# ---------------------------------------------------------------------------
# linked pairs in subdivisions
# ---------------------------------------------------------------------------

def identity_k6_embedding():
    paths = {(i, j): [i, j] for i in range(6) for j in range(i + 1, 6)}
    return SubdivisionEmbedding(tuple(range(6)), paths)


def test_find_linked_pair_on_plain_k6():
    rng = random.Random(8)
    pts = octahedron_points(rng)
    g = Graph.from_edges(6, itertools.combinations(range(6), 2))
    d = SpatialDrawing(g, pts)
    pair = find_linked_pair(d, identity_k6_embedding())
    assert pair.lk % 2 == 1
    res = conway_gordon_check(pts)
    assert res.linking_numbers[tuple(sorted((pair.tri1, pair.tri2)))] % 2 == 1


def test_find_linked_pair_on_subdivided_k6():
    rng = random.Random(9)
    base = octahedron_points(rng)
    positions = list(base)
    paths = {}
    edges = []
    nxt = 6
    for i in range(6):
        for j in range(i + 1, 6):
            mid = tuple((base[i][c] + base[j][c]) / 2 for c in range(3))
            mid = tuple(mid[c] + Fraction(rng.randint(-3, 3), 2048)
                        for c in range(3))
            positions.append(mid)
            paths[(i, j)] = [i, nxt, j]
            edges += [(i, nxt), (nxt, j)]
            nxt += 1
    g = Graph.from_edges(nxt, edges)
    d = SpatialDrawing(g, positions)
    emb = SubdivisionEmbedding(tuple(range(6)), paths)
    pair = find_linked_pair(d, emb)
    assert pair.lk % 2 == 1
    assert len(pair.cycle1) == 6 and len(pair.cycle2) == 6


def test_find_linked_pair_rejects_broken_embedding():
    rng = random.Random(10)
    pts = octahedron_points(rng)
    g = Graph.from_edges(6, itertools.combinations(range(6), 2))
    d = SpatialDrawing(g, pts)
    emb = identity_k6_embedding()
    del emb.paths[(0, 1)]
    with pytest.raises(ValidationError):
        find_linked_pair(d, emb)


# ---------------------------------------------------------------------------
# transversals through cycles
# ---------------------------------------------------------------------------

def test_stacked_hopf_pairs_admit_transversal():
    cycles = stacked_pairs()
    line = transversal_through_cycles(list(cycles))
    assert line is not None


def test_four_coplanar_triangles_crossing_axis():
    tris = []
    for i in range(4):
        x = 3 * i
        tris.append(PolygonalCycle((point3(x, -1, 0), point3(x + 1, 1, 0),
                                    point3(x - 1, 1, 0))))
    line = transversal_through_cycles(tris, check_guarantee=False)
    assert line is not None


def test_far_unlinked_triangles_have_none():
    rng = random.Random(11)
    tris = []
    for i in range(4):
        cx, cy, cz = 50 * i, 37 * i * i % 91, (13 * i) % 17
        pts = tuple(point3(Fraction(cx * 64 + rng.randint(-8, 8), 64),
                           Fraction(cy * 64 + rng.randint(-8, 8), 64),
                           Fraction(cz * 64 + rng.randint(-8, 8), 64))
                    for _ in range(3))
        tris.append(PolygonalCycle(pts))
    assert transversal_through_cycles(tris, check_guarantee=False) is None
