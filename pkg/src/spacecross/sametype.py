"""Sign-constant refinement of point multisets under polynomial relations.

Implements sparse multivariate polynomials over blocked variables, the
monomial linearization of the last block, center-point partitions in
dimensions 1 and 2 (median split and a two-line equipartition with the
halfspace-contains-a-cell property), and the recursive refinement that
shrinks finite multisets until every given polynomial has constant sign
on the product, with immediate exhaustive verification of the result.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import (PreconditionViolated, RetryExhausted, ValidationError)
from .scalars import rat, rat_from_str, rat_to_str, sign_of

Point = Tuple[Fraction, ...]
MonomialKey = Tuple[Tuple[Tuple[int, int], int], ...]  # ((block, var), exp)


@dataclass(frozen=True)
class SparsePolynomial:
    """Polynomial over variables grouped into blocks of given dimensions."""

    blocks: Tuple[int, ...]
    monomials: Dict[MonomialKey, Fraction] = field(hash=False)

    @staticmethod
    def from_terms(blocks: Sequence[int], terms) -> "SparsePolynomial":
        """terms: iterable of (coeff, {(block, var): exp}) pairs."""
        blocks = tuple(int(b) for b in blocks)
        acc: Dict[MonomialKey, Fraction] = {}
        for coeff, exps in terms:
            coeff = rat(coeff)
            for (b, v), e in exps.items():
                if not (0 <= b < len(blocks)) or not (0 <= v < blocks[b]):
                    raise ValidationError(f"variable ({b},{v}) out of range")
                if e < 0:
                    raise ValidationError("negative exponent")
            key = tuple(sorted(((b, v), e) for (b, v), e in exps.items() if e > 0))
            acc[key] = acc.get(key, Fraction(0)) + coeff
        acc = {k: c for k, c in acc.items() if c != 0}
        return SparsePolynomial(blocks, acc)

    @property
    def k(self) -> int:
        return len(self.blocks)

    def is_zero(self) -> bool:
        return not self.monomials

    def evaluate(self, args: Sequence[Sequence]) -> Fraction:
        total = Fraction(0)
        for key, coeff in self.monomials.items():
            term = coeff
            for (b, v), e in key:
                term *= rat(args[b][v]) ** e
            total += term
        return total

    def scale(self, c) -> "SparsePolynomial":
        c = rat(c)
        if c == 0:
            return SparsePolynomial(self.blocks, {})
        return SparsePolynomial(self.blocks,
                                {k: v * c for k, v in self.monomials.items()})

    def block_projection(self, key: MonomialKey, block: int) -> MonomialKey:
        return tuple(((b, v), e) for (b, v), e in key if b == block)

    def to_json(self) -> dict:
        return {
            "blocks": list(self.blocks),
            "monomials": [
                {"coeff": rat_to_str(c),
                 "exponents": {f"{b}:{v}": e for (b, v), e in key}}
                for key, c in sorted(self.monomials.items())],
        }

    @staticmethod
    def from_json(doc: dict) -> "SparsePolynomial":
        terms = []
        for mono in doc["monomials"]:
            exps = {}
            for kv, e in mono["exponents"].items():
                b, v = kv.split(":")
                exps[(int(b), int(v))] = int(e)
            terms.append((rat_from_str(mono["coeff"]), exps))
        return SparsePolynomial.from_terms(doc["blocks"], terms)


def block_term_count(f: SparsePolynomial, block: int) -> int:
    """Number of distinct monomials of f in the given block's variables,
    with all other blocks treated as symbolic coefficients."""
    if not (0 <= block < f.k):
        raise ValidationError(f"block {block} out of range")
    if f.is_zero():
        return 0
    return len({f.block_projection(key, block) for key in f.monomials})


@dataclass
class Linearization:
    """Monomial map of the last block and the polynomial linear in it."""

    source: SparsePolynomial
    monomial_map: List[MonomialKey]     # the non-constant last-block monomials
    linear: SparsePolynomial            # blocks (d1..d_{k-1}, t)

    def lift_point(self, point: Sequence) -> Point:
        out = []
        for key in self.monomial_map:
            val = Fraction(1)
            for (b, v), e in key:
                val *= rat(point[v]) ** e
            out.append(val)
        return tuple(out)


def linearize_last_block(f: SparsePolynomial) -> Linearization:
    """Split f into f = f'(x_1, .., x_{k-1}, pi(x_k)) with f' affine in the
    new last block, one coordinate per non-constant last-block monomial."""
    last = f.k - 1
    groups: Dict[MonomialKey, List[Tuple[MonomialKey, Fraction]]] = {}
    for key, coeff in f.monomials.items():
        proj = f.block_projection(key, last)
        rest = tuple(item for item in key if item[0][0] != last)
        groups.setdefault(proj, []).append((rest, coeff))
    nonconstant = sorted(g for g in groups if g)
    t = len(nonconstant)
    new_blocks = (*f.blocks[:-1], t)
    terms = []
    for rest, coeff in groups.get((), []):
        terms.append((coeff, dict(rest)))
    for j, proj in enumerate(nonconstant):
        for rest, coeff in groups[proj]:
            exps = dict(rest)
            exps[(f.k - 1, j)] = 1
            terms.append((coeff, exps))
    linear = SparsePolynomial.from_terms(new_blocks, terms)
    lin = Linearization(f, list(nonconstant), linear)
    _verify_linearization(f, lin)
    return lin


def _verify_linearization(f: SparsePolynomial, lin: Linearization):
    """Symbolic identity f = f' composed with the monomial map."""
    last = f.k - 1
    recomposed: Dict[MonomialKey, Fraction] = {}
    for key, coeff in lin.linear.monomials.items():
        z_part = [(item, e) for item, e in
                  (((b, v), e) for (b, v), e in key) if item[0] == last]
        rest = tuple(((b, v), e) for (b, v), e in key if b != last)
        exps = dict(rest)
        for (b, j), e in z_part:
            if e != 1:
                raise AssertionError("composition is not affine in the block")
            for (bb, vv), ee in lin.monomial_map[j]:
                exps[(bb, vv)] = exps.get((bb, vv), 0) + ee
        ckey = tuple(sorted((kv, e) for kv, e in exps.items() if e > 0))
        recomposed[ckey] = recomposed.get(ckey, Fraction(0)) + coeff
    recomposed = {k: c for k, c in recomposed.items() if c != 0}
    if recomposed != f.monomials:
        raise AssertionError("linearization does not recompose to the input")


# ---------------------------------------------------------------------------
# point multisets and center partitions
# ---------------------------------------------------------------------------

@dataclass
class PointMultiset:
    dim: int
    points: List[Point]

    def __post_init__(self):
        self.points = [tuple(rat(c) for c in p) for p in self.points]
        for p in self.points:
            if len(p) != self.dim:
                raise ValidationError(f"point {p} has wrong dimension")

    def __len__(self):
        return len(self.points)


@dataclass
class YaoYaoPartition:
    """Center plus 2^d closed cones of d generators covering R^d; every
    cone holds at least |F|/2^d points and every closed halfspace through
    the center contains a whole cone."""

    dim: int
    center: Point
    generators: List[Tuple[Point, ...]]     # per cone
    cone_points: List[List[int]]            # point indices per closed cone
    simplex_scale: Fraction                 # T with cone cap conv(c, c+T g)
    points_used: List[Point]                # possibly perturbed copies


class _Degenerate(Exception):
    pass


def yao_yao_partition(points: Sequence[Point], dim: int,
                      max_perturb: int = 8) -> YaoYaoPartition:
    """Equipartition into 2^dim cones for dim in {1, 2}.

    Inputs that defeat the exact construction (ties, collinearity) are
    deterministically perturbed: point i moves by (i+1) * (eps, eps^2)
    with eps = 2^-64, squaring eps on every retry.  The partition then
    describes the perturbed multiset, which is recorded in the result.
    """
    pts = [tuple(rat(c) for c in p) for p in points]
    if dim not in (1, 2):
        raise PreconditionViolated("partition implemented for dimensions 1 and 2")
    if len(pts) < 2 ** dim:
        raise ValidationError("not enough points")
    eps = Fraction(1, 2 ** 64)
    for attempt in range(max_perturb + 1):
        try:
            if dim == 1:
                part = _yao_yao_1d(pts)
            else:
                part = _yao_yao_2d(pts)
            _validate_partition(part)
            return part
        except _Degenerate:
            if dim == 1:
                pts = [(p[0] + (i + 1) * eps,) for i, p in enumerate(pts)]
            else:
                pts = [(p[0] + (i + 1) * eps, p[1] + (i + 1) * eps * eps)
                       for i, p in enumerate(pts)]
            eps = eps * eps
    raise RetryExhausted("partition construction kept hitting degeneracies")


def _yao_yao_1d(pts) -> YaoYaoPartition:
    xs = sorted(p[0] for p in pts)
    n = len(xs)
    if n % 2 == 1:
        center = xs[n // 2]
    else:
        center = (xs[n // 2 - 1] + xs[n // 2]) / 2
    gens = [((Fraction(-1),),), ((Fraction(1),),)]
    cone_points = [
        [i for i, p in enumerate(pts) if p[0] <= center],
        [i for i, p in enumerate(pts) if p[0] >= center],
    ]
    spread = max(abs(p[0] - center) for p in pts) + 1
    return YaoYaoPartition(1, (center,), gens, cone_points, spread, list(pts))


def _halfplane_counts(pts, a, b):
    """(left-closed, right-closed) counts of points against line a->b."""
    dx, dy = b[0] - a[0], b[1] - a[1]
    left = right = 0
    for p in pts:
        s = sign_of(dx * (p[1] - a[1]) - dy * (p[0] - a[0]))
        if s >= 0:
            left += 1
        if s <= 0:
            right += 1
    return left, right


def _yao_yao_2d(pts) -> YaoYaoPartition:
    n = len(pts)
    ys = sorted(p[1] for p in pts)
    mu = ys[(n - 1) // 2] if n % 2 == 1 else (ys[n // 2 - 1] + ys[n // 2]) / 2
    upper = [p for p in pts if p[1] >= mu]
    lower = [p for p in pts if p[1] <= mu]
    half = (n + 1) // 2
    if len(upper) < half or len(lower) < half:
        raise _Degenerate  # median ties spilled too far to one side
    # simultaneous bisector of the two halves through one point of each
    found = None
    for a in upper:
        for b in lower:
            if a == b or a[1] == b[1]:
                continue  # must cross the median line at a finite point
            ul, ur = _halfplane_counts(upper, a, b)
            ll, lr = _halfplane_counts(lower, a, b)
            if (2 * ul >= len(upper) and 2 * ur >= len(upper)
                    and 2 * ll >= len(lower) and 2 * lr >= len(lower)):
                found = (a, b)
                break
        if found:
            break
    if found is None:
        raise _Degenerate
    a, b = found
    # center: crossing of the bisector with the median level
    t = (mu - a[1]) / (b[1] - a[1])
    cx = a[0] + t * (b[0] - a[0])
    center = (cx, mu)
    d2 = (b[0] - a[0], b[1] - a[1])
    if d2[1] < 0:
        d2 = (-d2[0], -d2[1])
    rays = [(Fraction(1), Fraction(0)), d2, (Fraction(-1), Fraction(0)),
            (-d2[0], -d2[1])]
    gens = [(rays[i], rays[(i + 1) % 4]) for i in range(4)]
    cone_points: List[List[int]] = [[] for _ in range(4)]
    for i, p in enumerate(pts):
        w = (p[0] - center[0], p[1] - center[1])
        for ci, (g1, g2) in enumerate(gens):
            lam = _cone_coordinates(w, g1, g2)
            if lam is not None and lam[0] >= 0 and lam[1] >= 0:
                cone_points[ci].append(i)
    scale = Fraction(1)
    for ci, (g1, g2) in enumerate(gens):
        for i in cone_points[ci]:
            w = (pts[i][0] - center[0], pts[i][1] - center[1])
            lam = _cone_coordinates(w, g1, g2)
            scale = max(scale, lam[0] + lam[1])
    return YaoYaoPartition(2, center, gens, cone_points, scale + 1, list(pts))


def _cone_coordinates(w, g1, g2):
    det = g1[0] * g2[1] - g1[1] * g2[0]
    if det == 0:
        return None
    l1 = (w[0] * g2[1] - w[1] * g2[0]) / det
    l2 = (g1[0] * w[1] - g1[1] * w[0]) / det
    return (l1, l2)


def _validate_partition(part: YaoYaoPartition):
    n = len(part.points_used)
    need = Fraction(n, 2 ** part.dim)
    for ci, members in enumerate(part.cone_points):
        if len(members) < need:
            raise _Degenerate
    if part.dim == 1:
        if not set(part.cone_points[0]) | set(part.cone_points[1]) == set(range(n)):
            raise _Degenerate
        return
    covered = set()
    for members in part.cone_points:
        covered.update(members)
    if covered != set(range(n)):
        raise _Degenerate
    _check_halfspace_property(part)


def _check_halfspace_property(part: YaoYaoPartition):
    """Exact rotating sweep: for every combinatorially distinct closed
    halfplane through the center, some cone lies entirely inside."""
    rays = [g for cone in part.generators for g in cone]
    uniq: List[Point] = []
    for r in rays:
        if not any(r[0] * s[1] - r[1] * s[0] == 0
                   and r[0] * s[0] + r[1] * s[1] > 0 for s in uniq):
            uniq.append(r)
    candidates: List[Point] = []
    for r in uniq:
        candidates.append((-r[1], r[0]))
        candidates.append((r[1], -r[0]))
    # midpoint directions between angularly consecutive candidates
    def angle_key(u):
        import math
        return math.atan2(float(u[1]), float(u[0]))
    ordered = sorted(candidates, key=angle_key)
    for u1, u2 in zip(ordered, ordered[1:] + ordered[:1]):
        mid = (u1[0] + u2[0], u1[1] + u2[1])
        if mid != (0, 0):
            candidates.append(mid)
    for u in candidates:
        ok = False
        for (g1, g2) in part.generators:
            if (u[0] * g1[0] + u[1] * g1[1] >= 0
                    and u[0] * g2[0] + u[1] * g2[1] >= 0):
                ok = True
                break
        if not ok:
            raise _Degenerate


# ---------------------------------------------------------------------------
# the refinement recursion
# ---------------------------------------------------------------------------

@dataclass
class RefineResult:
    subsets: List[List[int]]        # retained indices per multiset
    signs: List[int]                # constant sign per polynomial
    epsilon: Fraction               # the guaranteed size fraction


def theorem_epsilon(polys: Sequence[SparsePolynomial]) -> Fraction:
    """prod over polynomials of 3^(-3^(t_2 + ... + t_k)); the first block's
    term count deliberately never enters."""
    eps = Fraction(1)
    for f in polys:
        exponent = sum(block_term_count(f, i) for i in range(1, f.k))
        eps *= Fraction(1, 3) ** (3 ** exponent)
    return eps


def same_type_refine(multisets: Sequence[PointMultiset],
                     polys: Sequence[SparsePolynomial]) -> RefineResult:
    """Shrink the multisets until every polynomial is sign-constant on the
    product, returning retained indices, the signs, and the guaranteed
    fraction.  Sign constancy is re-verified exhaustively before
    returning; the subsets always meet the theorem's epsilon bound."""
    k = len(multisets)
    if k < 1:
        raise ValidationError("need at least one multiset")
    for f in polys:
        if f.k != k:
            raise ValidationError("polynomial block count mismatch")
        for i, d in enumerate(f.blocks):
            if d != multisets[i].dim:
                raise ValidationError(f"block {i} dimension mismatch")
    active = [list(range(len(F))) for F in multisets]
    points = [F.points for F in multisets]
    signs = []
    for f in polys:
        signs.append(_refine_single(points, active, f))

    # exhaustive verification over the final product
    for f, expected in zip(polys, signs):
        for combo in itertools.product(*[[points[i][j] for j in active[i]]
                                         for i in range(k)]):
            if sign_of(f.evaluate(combo)) != expected:
                raise AssertionError("sign constancy verification failed")
    eps = theorem_epsilon(polys)
    for i, F in enumerate(multisets):
        if len(active[i]) < eps * len(F):
            raise AssertionError("size bound verification failed")
    return RefineResult([list(a) for a in active], signs, eps)


def _refine_single(points, active, f: SparsePolynomial) -> int:
    """Refine the active index lists for one polynomial; returns its sign."""
    k = f.k
    constant = _constant_sign(points, active, f)
    if constant is not None:
        return constant
    if k == 1:
        return _refine_base(points[0], active, f)
    lin = linearize_last_block(f)
    t = len(lin.monomial_map)
    if t == 0:
        sub = SparsePolynomial(f.blocks[:-1],
                               {key: c for key, c in f.monomials.items()})
        return _refine_single(points, active, sub)
    if t > 2:
        raise PreconditionViolated(
            f"last block linearizes to dimension {t} > 2")

    lifted = [lin.lift_point(points[k - 1][i]) for i in active[k - 1]]
    part = yao_yao_partition(lifted, t)
    center = part.center
    T = part.simplex_scale
    vertices: List[Point] = [center]
    for gens in part.generators:
        for g in gens:
            w = tuple(center[j] + T * g[j] for j in range(t))
            if w not in vertices:
                vertices.append(w)

    # vertex polynomials g_m = f'(x_1..x_{k-1}, v_m), refined recursively
    vertex_signs = []
    for v in vertices:
        g_m = _substitute_last_block(lin.linear, v)
        vertex_signs.append(_refine_single(points, active, g_m))

    sign_of_vertex = dict(zip(range(len(vertices)), vertex_signs))
    cone_idx, s = _covered_cone(part, vertices, sign_of_vertex)

    # split the chosen cone's points between the zero face and the rest
    gens = part.generators[cone_idx]
    members = part.cone_points[cone_idx]
    zero_face: List[int] = []
    positive_part: List[int] = []
    for local in members:
        z = part.points_used[local]
        lam = _simplex_coordinates(z, center, gens, T)
        on_face = True
        for mu, vtx in zip(lam, _cone_vertex_list(center, gens, T)):
            vi = vertices.index(vtx)
            if sign_of_vertex[vi] != 0 and mu != 0:
                on_face = False
                break
        (zero_face if on_face else positive_part).append(local)
    chosen = zero_face if len(zero_face) >= len(positive_part) else positive_part
    result_sign = 0 if chosen is zero_face else s
    active[k - 1][:] = [active[k - 1][i] for i in chosen]
    return result_sign


def _cone_vertex_list(center, gens, T):
    out = [center]
    for g in gens:
        out.append(tuple(center[j] + T * g[j] for j in range(len(center))))
    return out


def _simplex_coordinates(z, center, gens, T):
    """Barycentric coordinates of z in conv(center, center + T g_i),
    ordered (center, then generators)."""
    t = len(center)
    w = tuple(z[j] - center[j] for j in range(t))
    if t == 1:
        lam = w[0] / (T * gens[0][0])
        return (1 - lam, lam)
    lam = _cone_coordinates(w, gens[0], gens[1])
    a1, a2 = lam[0] / T, lam[1] / T
    return (1 - a1 - a2, a1, a2)


def _covered_cone(part, vertices, sign_of_vertex):
    """Cone fully inside the positive or negative halfspace of the linear
    functional, which exists by the halfspace property."""
    for target in (1, -1):
        for ci, gens in enumerate(part.generators):
            ok = True
            for vtx in _cone_vertex_list(part.center, gens, part.simplex_scale):
                vi = vertices.index(vtx)
                if sign_of_vertex[vi] * target < 0:
                    ok = False
                    break
            if ok:
                return ci, target
    raise AssertionError("no cone lies in a halfspace; partition is broken")


def _substitute_last_block(linear: SparsePolynomial, value: Point
                           ) -> SparsePolynomial:
    last = linear.k - 1
    terms = []
    for key, coeff in linear.monomials.items():
        exps = {}
        c = coeff
        for (b, v), e in key:
            if b == last:
                c *= rat(value[v]) ** e
            else:
                exps[(b, v)] = e
        terms.append((c, exps))
    return SparsePolynomial.from_terms(linear.blocks[:-1], terms)


def _constant_sign(points, active, f: SparsePolynomial,
                   budget: int = 200000) -> Optional[int]:
    """The common sign when f is already constant on the active product,
    else None; skipped when the product is too large to sweep."""
    size = 1
    for i in range(f.k):
        size *= len(active[i])
        if size > budget:
            return None
    sign = None
    for combo in itertools.product(*[[points[i][j] for j in active[i]]
                                     for i in range(f.k)]):
        s = sign_of(f.evaluate(combo))
        if sign is None:
            sign = s
        elif s != sign:
            return None
    return sign


def _refine_base(pts, active, f: SparsePolynomial) -> int:
    by_sign = {1: [], -1: [], 0: []}
    for i in active[0]:
        by_sign[sign_of(f.evaluate((pts[i],)))].append(i)
    best = max((1, -1, 0), key=lambda s: len(by_sign[s]))
    active[0][:] = by_sign[best]
    return best


# ---------------------------------------------------------------------------
# brute-force feasibility oracle
# ---------------------------------------------------------------------------

def brute_force_same_type(multisets: Sequence[PointMultiset],
                          poly: SparsePolynomial,
                          target_sizes: Sequence[int],
                          limit: int = 10 ** 7):
    """Exhaustive search for sign-constant product subsets of the target
    sizes; None when no such subsets exist."""
    import math
    k = len(multisets)
    if any(s > len(F) for s, F in zip(target_sizes, multisets)):
        return None
    space = 1
    for F, s in zip(multisets, target_sizes):
        space *= math.comb(len(F), s)
    if space > limit:
        raise ValidationError(f"search space {space} exceeds {limit}")
    if k == 2:
        return _brute_force_two(multisets, poly, target_sizes)
    for combos in itertools.product(*[
            itertools.combinations(range(len(F)), s)
            for F, s in zip(multisets, target_sizes)]):
        sign = None
        ok = True
        for choice in itertools.product(*[
                [multisets[i].points[j] for j in combos[i]] for i in range(k)]):
            s = sign_of(poly.evaluate(choice))
            if sign is None:
                sign = s
            elif s != sign:
                ok = False
                break
        if ok:
            return [list(c) for c in combos], sign
    return None


def _brute_force_two(multisets, poly, target_sizes):
    F1, F2 = multisets
    s1, s2 = target_sizes
    for combo in itertools.combinations(range(len(F1)), s1):
        groups: Dict[int, List[int]] = {}
        for j, q in enumerate(F2.points):
            sgns = {sign_of(poly.evaluate((F1.points[i], q))) for i in combo}
            if len(sgns) == 1:
                groups.setdefault(sgns.pop(), []).append(j)
        for sgn, js in groups.items():
            if len(js) >= s2:
                return [list(combo), js[:s2]], sgn
    return None
