"""Graph-level procedures: randomized bisection, heuristic K6-subdivision
extraction, the linked-cycle witness pipeline, and the hexagonal-grid
construction whose sphere drawing has no space crossings.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .counting import CrossingWitness, lift_to_sphere
from .drawing import Edge, Graph, SpatialDrawing
from .errors import RetryExhausted, ValidationError
from .geometry import line_meets_segment, point3, segments_intersect_2d
from .linking import LinkedCyclePair, find_linked_pair, transversal_through_cycles


# ---------------------------------------------------------------------------
# bisection
# ---------------------------------------------------------------------------

@dataclass
class Bisection:
    side1: Tuple[int, ...]
    side2: Tuple[int, ...]
    edges1: int
    edges2: int
    retries: int


def _bisection_bound_met(e_i: int, n_edges: int, n_vertices: int) -> bool:
    # e_i >= E/4 - sqrt(V E), decided exactly on integers
    if 4 * e_i >= n_edges:
        return True
    return (n_edges - 4 * e_i) ** 2 <= 16 * n_vertices * n_edges


def random_bisection(g: Graph, seed: int = 0, max_retries: int = 1000) -> Bisection:
    """Fair vertex bisection retried until both sides hold at least
    E/4 - sqrt(V E) induced edges; a retry cap guards nontermination."""
    rng = random.Random(seed)
    for attempt in range(1, max_retries + 1):
        colors = [rng.randint(0, 1) for _ in range(g.n)]
        e1 = sum(1 for u, v in g.edges if colors[u] == 0 and colors[v] == 0)
        e2 = sum(1 for u, v in g.edges if colors[u] == 1 and colors[v] == 1)
        if _bisection_bound_met(e1, g.m, g.n) and _bisection_bound_met(e2, g.m, g.n):
            side1 = tuple(v for v in range(g.n) if colors[v] == 0)
            side2 = tuple(v for v in range(g.n) if colors[v] == 1)
            return Bisection(side1, side2, e1, e2, attempt)
    raise RetryExhausted(f"no valid bisection in {max_retries} attempts")


# ---------------------------------------------------------------------------
# K6 subdivisions
# ---------------------------------------------------------------------------

@dataclass
class SubdivisionEmbedding:
    """Six branch vertices and 15 internally disjoint connecting paths."""

    branch_vertices: Tuple[int, ...]
    paths: Dict[Tuple[int, int], List[int]]

    def edge_set(self) -> Set[Edge]:
        out: Set[Edge] = set()
        for path in self.paths.values():
            for a, b in zip(path, path[1:]):
                out.add((min(a, b), max(a, b)))
        return out


def validate_embedding(g: Graph, emb: SubdivisionEmbedding):
    branch = emb.branch_vertices
    if len(branch) != 6 or len(set(branch)) != 6:
        raise ValidationError("need six distinct branch vertices")
    if set(emb.paths) != {(i, j) for i in range(6) for j in range(i + 1, 6)}:
        raise ValidationError("need one path per pair of branches")
    edge_set = set(g.edges)
    interior_seen: Set[int] = set()
    for (i, j), path in emb.paths.items():
        if len(path) < 2 or path[0] != branch[i] or path[-1] != branch[j]:
            raise ValidationError(f"path {(i, j)} does not join its branches")
        if len(set(path)) != len(path):
            raise ValidationError(f"path {(i, j)} repeats a vertex")
        for a, b in zip(path, path[1:]):
            if (min(a, b), max(a, b)) not in edge_set:
                raise ValidationError(f"path {(i, j)} uses a missing edge")
        for v in path[1:-1]:
            if v in branch or v in interior_seen:
                raise ValidationError(f"paths share interior vertex {v}")
        interior_seen.update(path[1:-1])


def find_k6_subdivision(g: Graph, budget: int = 200000, seed: int = 0
                        ) -> Optional[SubdivisionEmbedding]:
    """Randomized search for a K6 subdivision; None is not a proof of
    absence, only that the budget ran out."""
    if g.m < 15:
        return None
    adj = g.adjacency()
    for nbrs in adj:
        nbrs.sort()
    cand = [v for v in range(g.n) if len(adj[v]) >= 5]
    if len(cand) < 6:
        return None
    rng = random.Random(seed)
    expansions = 0
    while expansions < budget:
        weights = [len(adj[v]) for v in cand]
        branch = _weighted_sample(rng, cand, weights, 6)
        pairs = [(i, j) for i in range(6) for j in range(i + 1, 6)]
        rng.shuffle(pairs)
        used: Set[int] = set()
        paths: Dict[Tuple[int, int], List[int]] = {}
        ok = True
        for (i, j) in pairs:
            blocked = used | (set(branch) - {branch[i], branch[j]})
            path, cost = _bfs_path(adj, branch[i], branch[j], blocked)
            expansions += cost
            if path is None or expansions >= budget:
                ok = expansions < budget
                ok = False
                break
            paths[(i, j)] = path
            used.update(path[1:-1])
        if ok and len(paths) == 15:
            emb = SubdivisionEmbedding(tuple(branch), paths)
            validate_embedding(g, emb)
            return emb
    return None


def _weighted_sample(rng, items, weights, k):
    chosen = []
    pool = list(zip(items, weights))
    for _ in range(k):
        total = sum(w for _, w in pool)
        r = rng.uniform(0, total)
        acc = 0.0
        for idx, (v, w) in enumerate(pool):
            acc += w
            if r <= acc:
                chosen.append(v)
                pool.pop(idx)
                break
        else:
            chosen.append(pool.pop()[0])
    return chosen


def _bfs_path(adj, src, dst, blocked):
    if src == dst:
        return [src], 1
    prev = {src: None}
    queue = deque([src])
    cost = 0
    while queue:
        u = queue.popleft()
        cost += 1
        for w in adj[u]:
            if w == dst:
                path = [w, u]
                while prev[path[-1]] is not None:
                    path.append(prev[path[-1]])
                path.reverse()
                return path, cost
            if w in blocked or w in prev:
                continue
            prev[w] = u
            queue.append(w)
    return None, cost


def extract_disjoint_subdivisions(g: Graph, budget: int = 200000, seed: int = 0
                                  ) -> List[SubdivisionEmbedding]:
    """Greedy edge-disjoint K6 subdivisions: find one, delete its edges,
    repeat until the finder gives up."""
    found: List[SubdivisionEmbedding] = []
    edges = set(g.edges)
    round_no = 0
    while True:
        current = Graph(g.n, tuple(sorted(edges)))
        emb = find_k6_subdivision(current, budget=budget, seed=seed + round_no)
        if emb is None:
            return found
        found.append(emb)
        edges -= emb.edge_set()
        round_no += 1


# ---------------------------------------------------------------------------
# linked-cycle witness pipeline
# ---------------------------------------------------------------------------

def _induced_subgraph(g: Graph, vertices: Sequence[int]) -> Graph:
    vs = set(vertices)
    return Graph(g.n, tuple(e for e in g.edges if e[0] in vs and e[1] in vs))


def boost_witness_pipeline(d: SpatialDrawing, seed: int = 0,
                           budget: int = 100000,
                           bisection_attempts: int = 2000
                           ) -> List[CrossingWitness]:
    """Explicit space-crossing witnesses from linked cycle pairs.

    Bisect the graph, extract edge-disjoint K6 subdivisions on each side,
    convert each to an odd-linked cycle pair, and search a transversal for
    every cross pair of linked pairs.  Because a fair bisection rarely
    keeps whole subdivisions inside one side on small graphs, bisections
    are retried (deterministically seeded) until both sides are
    productive or the attempt budget runs out.
    """
    if not d.is_straight():
        raise ValidationError("witness pipeline needs a straight-line drawing")
    g = d.graph
    best: Optional[Tuple[List[SubdivisionEmbedding], List[SubdivisionEmbedding]]] = None
    for attempt in range(bisection_attempts):
        bis = random_bisection(g, seed=seed * 1000003 + attempt)
        sides = []
        productive = True
        for side_vertices in (bis.side1, bis.side2):
            sub = _induced_subgraph(g, side_vertices)
            if sum(1 for v in side_vertices if sub.degree(v) >= 5) < 6:
                productive = False
                break
            sides.append(sub)
        if not productive:
            continue
        subs = [extract_disjoint_subdivisions(s, budget=budget, seed=seed + attempt)
                for s in sides]
        if all(len(s) >= 1 for s in subs):
            best = (subs[0], subs[1])
            break
    if best is None:
        return []

    linked: List[List[LinkedCyclePair]] = []
    for side in best:
        pairs = []
        for emb in side:
            pairs.append(find_linked_pair(d, emb))
        linked.append(pairs)

    witnesses: List[CrossingWitness] = []
    seen_quadruples: Set[Tuple[Edge, ...]] = set()
    for lp1 in linked[0]:
        for lp2 in linked[1]:
            cycles = [lp1.cycle1, lp1.cycle2, lp2.cycle1, lp2.cycle2]
            loops = [lp1.loop1, lp1.loop2, lp2.loop1, lp2.loop2]
            line = transversal_through_cycles(cycles)
            if line is None:
                continue
            edges = []
            contacts = []
            for cycle, loop in zip(cycles, loops):
                hit = None
                for si, seg in enumerate(cycle.segments()):
                    ok, u = line_meets_segment(line, seg)
                    if ok:
                        a, b = loop[si], loop[(si + 1) % len(loop)]
                        hit = ((min(a, b), max(a, b)), u)
                        break
                if hit is None:
                    break
                edges.append(hit[0])
                contacts.append((hit[0], 0, hit[1]))
            if len(edges) != 4:
                continue
            quad = tuple(sorted(edges))
            if quad in seen_quadruples:
                raise AssertionError(
                    "edge-disjoint cycles produced a repeated quadruple (bug)")
            seen_quadruples.add(quad)
            witnesses.append(CrossingWitness(tuple(edges), line, contacts))
    return witnesses


# ---------------------------------------------------------------------------
# truncated hexagonal grid and its spherical drawing
# ---------------------------------------------------------------------------

_HEX_OFFSETS = [(2, 0), (1, 2), (-1, 2), (-2, 0), (-1, -2), (1, -2)]


def _hex_center(x: int, y: int) -> Tuple[int, int]:
    return (3 * (x - y), 2 * (x + y))


@dataclass
class HexGrid:
    """Truncated hexagonal grid: the hexagons with axial coordinates in
    [-k, k]^2 except two опposite corner cells (replaced by chords), plus
    one boundary chord per consecutive pair of degree-2 rim vertices.

    The truncation rule is exposed through ``cells``, ``corner_chords``
    and ``closure_chords`` for inspection.
    """

    k: int
    graph: Graph
    coords: List[Tuple[int, int]]
    cells: List[Tuple[int, int]]
    corner_chords: List[Edge]
    closure_chords: List[Edge]
    faces: List[List[int]]
    outer_face: int


def _trace_faces(n: int, edges, coords):
    adj: Dict[int, List[int]] = {v: [] for v in range(n)}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    for v in adj:
        adj[v].sort(key=lambda w: math.atan2(coords[w][1] - coords[v][1],
                                             coords[w][0] - coords[v][0]))
    visited = set()
    faces = []
    for a, b in edges:
        for (u, v) in ((a, b), (b, a)):
            if (u, v) in visited:
                continue
            face = []
            cu, cv = u, v
            while (cu, cv) not in visited:
                visited.add((cu, cv))
                face.append(cu)
                ns = adj[cv]
                i = ns.index(cu)
                cu, cv = cv, ns[(i - 1) % len(ns)]
            faces.append(face)
    def signed_area(face):
        s = 0
        for i in range(len(face)):
            x1, y1 = coords[face[i]]
            x2, y2 = coords[face[(i + 1) % len(face)]]
            s += x1 * y2 - x2 * y1
        return s
    outer = min(range(len(faces)), key=lambda i: signed_area(faces[i]))
    return faces, outer


def hexgrid_graph(k: int) -> HexGrid:
    if k < 1:
        raise ValidationError("grid scale must be at least 1")
    cut = {(-k, k), (k, -k)}
    cells = [(x, y) for x in range(-k, k + 1) for y in range(-k, k + 1)
             if (x, y) not in cut]
    edges_xy: Set[Tuple[Tuple[int, int], Tuple[int, int]]] = set()
    corner_xy = []

    def add(a, b, store=None):
        e = (min(a, b), max(a, b))
        edges_xy.add(e)
        if store is not None:
            store.append(e)

    for (x, y) in cells + sorted(cut):
        c = _hex_center(x, y)
        vs = [(c[0] + dx, c[1] + dy) for dx, dy in _HEX_OFFSETS]
        if (x, y) in cut:
            if (x, y) == (-k, k):
                add(vs[5], vs[1], corner_xy)
            else:
                add(vs[2], vs[4], corner_xy)
            continue
        for i in range(6):
            add(vs[i], vs[(i + 1) % 6])

    verts = sorted({v for e in edges_xy for v in e})
    index = {v: i for i, v in enumerate(verts)}
    base_edges = sorted((index[a], index[b]) if index[a] < index[b]
                        else (index[b], index[a]) for a, b in edges_xy)
    n = len(verts)
    faces, outer = _trace_faces(n, base_edges, verts)
    rim = faces[outer]
    degree = [0] * n
    for a, b in base_edges:
        degree[a] += 1
        degree[b] += 1
    d2 = [i for i, v in enumerate(rim) if degree[v] == 2]
    if len(d2) % 2 != 0:
        raise AssertionError("odd number of rim degree-2 vertices (bug)")
    # pair consecutive degree-2 rim vertices; choose the pairing phase that
    # avoids joining boundary-adjacent vertices (which would double edges)
    closure: List[Edge] = []
    for phase in (0, 1):
        trial = []
        ok = True
        for t in range(0, len(d2), 2):
            i = d2[(t + phase) % len(d2)]
            j = d2[(t + 1 + phase) % len(d2)]
            u, v = rim[i], rim[j]
            gap = (j - i) % len(rim)
            if gap <= 1 or (min(u, v), max(u, v)) in base_edges:
                ok = False
                break
            trial.append((min(u, v), max(u, v)))
        if ok:
            closure = trial
            break
    if not closure:
        raise AssertionError("no valid rim pairing found (bug)")

    all_edges = sorted(set(base_edges) | set(closure))
    graph = Graph(n, tuple(all_edges))
    _validate_hexgrid(graph, verts)
    faces, outer = _trace_faces(n, all_edges, verts)
    corner = sorted((index[a], index[b]) if index[a] < index[b]
                    else (index[b], index[a]) for a, b in corner_xy)
    return HexGrid(k, graph, verts, cells, corner, closure, faces, outer)


def _validate_hexgrid(graph: Graph, coords):
    for v in range(graph.n):
        if graph.degree(v) != 3:
            raise AssertionError(f"vertex {v} has degree {graph.degree(v)}")
    # connectivity and 3-connectivity by exhaustive 2-vertex removal
    if not _connected_after_removal(graph, ()):
        raise AssertionError("grid is not connected")
    for pair in itertools.combinations(range(graph.n), 2):
        if not _connected_after_removal(graph, pair):
            raise AssertionError(f"removing {pair} disconnects the grid")
    # planarity of the straight-line drawing: exact pairwise segment checks
    for i in range(graph.m):
        a, b = graph.edges[i]
        sa = (tuple(map(Fraction, coords[a])), tuple(map(Fraction, coords[b])))
        for j in range(i + 1, graph.m):
            c, d = graph.edges[j]
            shared = {a, b} & {c, d}
            sc = (tuple(map(Fraction, coords[c])), tuple(map(Fraction, coords[d])))
            kind = segments_intersect_2d(sa, sc)
            if not shared and kind != "disjoint":
                raise AssertionError(f"edges {(a, b)} and {(c, d)} {kind}")
            if shared and kind == "crossing":
                raise AssertionError(f"adjacent edges {(a, b)}, {(c, d)} cross")


def _connected_after_removal(graph: Graph, removed) -> bool:
    removed = set(removed)
    remaining = [v for v in range(graph.n) if v not in removed]
    if not remaining:
        return True
    adj = {v: [] for v in remaining}
    for a, b in graph.edges:
        if a in removed or b in removed:
            continue
        adj[a].append(b)
        adj[b].append(a)
    seen = {remaining[0]}
    queue = deque([remaining[0]])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == len(remaining)


def _dual_face_distance(grid: HexGrid, u: int, v: int) -> int:
    """BFS distance in the planar dual between the face sets at u and v."""
    edge_faces: Dict[Edge, List[int]] = {}
    for fi, face in enumerate(grid.faces):
        for i in range(len(face)):
            a, b = face[i], face[(i + 1) % len(face)]
            edge_faces.setdefault((min(a, b), max(a, b)), []).append(fi)
    dual_adj: Dict[int, Set[int]] = {fi: set() for fi in range(len(grid.faces))}
    for fs in edge_faces.values():
        if len(fs) == 2:
            dual_adj[fs[0]].add(fs[1])
            dual_adj[fs[1]].add(fs[0])
    def faces_at(w):
        return {fi for fi, face in enumerate(grid.faces) if w in face}
    src, dst = faces_at(u), faces_at(v)
    dist = {fi: 0 for fi in src}
    queue = deque(src)
    while queue:
        f = queue.popleft()
        if f in dst:
            return dist[f]
        for nf in dual_adj[f]:
            if nf not in dist:
                dist[nf] = dist[f] + 1
                queue.append(nf)
    return math.inf


@dataclass
class HexGridConstruction:
    graph: Graph              # the grid plus the special chord edge
    special_edge: Edge
    drawing: SpatialDrawing
    grid: HexGrid


def hexgrid_construction(k: int, subdivision: int, seed: int = 0
                         ) -> HexGridConstruction:
    """Spherical drawing of the truncated hexagonal grid plus one straight
    chord between two vertices far apart in the face metric.

    The grid itself is drawn on a large sphere (crossing-free); a line
    meets the sphere in at most two points, so these edges alone admit no
    common transversal quadruple, and the chord only adds one more edge
    to any line's menu.
    """
    grid = hexgrid_graph(k)
    hx = max(1, k - 1)
    cu = _hex_center(-hx, 0)
    cv = _hex_center(hx, 0)
    coord_u = (cu[0] - 2, cu[1])   # the 180-degree vertex of the left cell
    coord_v = (cv[0] + 2, cv[1])   # the 0-degree vertex of the right cell
    index = {c: i for i, c in enumerate(grid.coords)}
    u, v = index[coord_u], index[coord_v]
    if grid.graph.has_edge(u, v):
        raise AssertionError("chord endpoints are adjacent (bug)")
    rows = 2 * k + 1
    need = math.ceil(rows / 4)
    got = _dual_face_distance(grid, u, v)
    if got < need:
        raise AssertionError(f"face separation {got} below {need}")

    flat = SpatialDrawing(grid.graph, [point3(x, y, 0) for x, y in grid.coords])
    lifted = lift_to_sphere(flat, subdivision, seed=seed)
    edges = sorted(set(grid.graph.edges) | {(min(u, v), max(u, v))})
    full_graph = Graph(grid.graph.n, tuple(edges))
    drawing = SpatialDrawing(full_graph, lifted.positions, dict(lifted.polylines))
    return HexGridConstruction(full_graph, (min(u, v), max(u, v)), drawing, grid)
