"""Deterministic seeded generators for inputs and fixtures."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .drawing import Graph, SpatialDrawing
from .errors import ValidationError
from .geometry import point3
from .linking import PolygonalCycle


def _rng(seed: int) -> random.Random:
    return random.Random(seed & 0xFFFFFFFFFFFFFFFF)


def random_rational(rng: random.Random, denominator_bound: int = 64,
                    span: int = 1) -> Fraction:
    den = rng.randint(1, denominator_bound)
    return Fraction(rng.randint(0, span * den), den)


def random_points(count: int, seed: int, denominator_bound: int = 64,
                  span: int = 1) -> List[Tuple[Fraction, Fraction, Fraction]]:
    rng = _rng(seed)
    return [point3(*(random_rational(rng, denominator_bound, span)
                     for _ in range(3))) for _ in range(count)]


def erdos_renyi(n: int, p: float, seed: int) -> Graph:
    rng = _rng(seed)
    edges = [e for e in itertools.combinations(range(n), 2) if rng.random() < p]
    return Graph.from_edges(n, edges)


def random_drawing(n: int, p: float, seed: int, denominator_bound: int = 64,
                   span: int = 4, flat: bool = False) -> SpatialDrawing:
    g = erdos_renyi(n, p, seed)
    rng = _rng(seed ^ 0x9E3779B97F4A7C15)
    pts = []
    while len(pts) < n:
        if flat:
            cand = point3(random_rational(rng, denominator_bound, span),
                          random_rational(rng, denominator_bound, span), 0)
        else:
            cand = point3(*(random_rational(rng, denominator_bound, span)
                            for _ in range(3)))
        if cand not in pts:
            pts.append(cand)
    return SpatialDrawing(g, pts)


def random_six_points(seed: int, denominator_bound: int = 64
                      ) -> List[Tuple[Fraction, Fraction, Fraction]]:
    return random_points(6, seed, denominator_bound)


def hopf_pair() -> Tuple[PolygonalCycle, PolygonalCycle]:
    """The standard positively linked polygonal pair (linking number +1)."""
    c1 = PolygonalCycle((point3(1, 0, 0), point3(0, 1, 0),
                         point3(-1, 0, 0), point3(0, -1, 0)))
    c2 = PolygonalCycle((point3(2, 0, 0), point3(1, 0, 1),
                         point3(0, 0, 0), point3(1, 0, -1)))
    return c1, c2


def stacked_pairs(offset: int = 10) -> Tuple[PolygonalCycle, ...]:
    """Two coaxial linked pairs, one near z = 0 and one near z = offset."""
    c1, c2 = hopf_pair()
    d1 = PolygonalCycle(tuple((x, y, z + offset) for x, y, z in c1.points))
    d2 = PolygonalCycle(tuple((x, y, z + offset) for x, y, z in c2.points))
    return c1, c2, d1, d2


def four_k6_drawing(seed: int, denominator_bound: int = 64
                    ) -> SpatialDrawing:
    """Four vertex-disjoint K6 copies at generic rational positions; the
    witness pipeline fixture."""
    edges = []
    for c in range(4):
        edges.extend((a + 6 * c, b + 6 * c)
                     for a, b in itertools.combinations(range(6), 2))
    g = Graph.from_edges(24, edges)
    rng = _rng(seed)
    pts = []
    while len(pts) < 24:
        cand = point3(*(random_rational(rng, denominator_bound, span=8)
                        for _ in range(3)))
        if cand not in pts:
            pts.append(cand)
    return SpatialDrawing(g, pts)


def seeded_generators(kind: str, params: dict, seed: int):
    """Dispatch generator by name; outputs are deterministic in
    (kind, params, seed)."""
    params = dict(params or {})
    if kind == "points":
        return random_points(int(params.get("count", 8)), seed,
                             int(params.get("denominator_bound", 64)),
                             int(params.get("span", 1)))
    if kind == "six-points":
        return random_six_points(seed, int(params.get("denominator_bound", 64)))
    if kind == "graph":
        return erdos_renyi(int(params["n"]), float(params.get("p", 0.5)), seed)
    if kind == "drawing":
        return random_drawing(int(params["n"]), float(params.get("p", 0.5)),
                              seed, int(params.get("denominator_bound", 64)),
                              int(params.get("span", 4)),
                              flat=bool(params.get("flat", False)))
    if kind == "hopf-pair":
        return hopf_pair()
    if kind == "stacked-pairs":
        return stacked_pairs(int(params.get("offset", 10)))
    if kind == "four-k6":
        return four_k6_drawing(seed, int(params.get("denominator_bound", 64)))
    raise ValidationError(f"unknown generator kind {kind!r}")
