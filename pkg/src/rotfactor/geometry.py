"""Finite-window Delone set analysis on Z^d.

Radii estimation, the exact Voronoi neighbor graph, first-return vector
sets, and the word metric induced by a first-return set.  Float KDTree
queries are used only to preselect candidates; every reported fact is
decided again in integer arithmetic (squared distances) or by the exact
feasibility kernel, so corner-touching cells are detected reliably.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import numpy as np
from scipy.spatial import cKDTree

from .errors import NotGeneratedError, WindowTooSmallError
from .feasibility import feasible

Point = Tuple[int, ...]


def sub(p: Point, q: Point) -> Point:
    return tuple(a - b for a, b in zip(p, q))


def add(p: Point, q: Point) -> Point:
    return tuple(a + b for a, b in zip(p, q))


def norm_sq(p: Point) -> int:
    return sum(v * v for v in p)


@dataclass(frozen=True)
class Window:
    """Axis-aligned box with inclusive integer corners."""

    lo: Point
    hi: Point

    def __post_init__(self):
        if len(self.lo) != len(self.hi) or not self.lo:
            raise ValueError("window corners must be nonempty, same dimension")
        if any(a > b for a, b in zip(self.lo, self.hi)):
            raise ValueError("window is empty: lo must be <= hi componentwise")

    @property
    def dim(self) -> int:
        return len(self.lo)

    def contains(self, p: Point) -> bool:
        return all(a <= v <= b for v, a, b in zip(p, self.lo, self.hi))

    def boundary_distance(self, p) -> float:
        """Distance from p to the boundary of the box (box is axis aligned,
        so this is the min slack over the faces)."""
        return min(
            min(v - a, b - v) for v, a, b in zip(p, self.lo, self.hi)
        )

    def erode(self, margin: float) -> "Window":
        m = math.ceil(margin)
        lo = tuple(a + m for a in self.lo)
        hi = tuple(b - m for b in self.hi)
        if any(a > b for a, b in zip(lo, hi)):
            raise WindowTooSmallError(
                f"window too small: erosion by {margin} empties {self}"
            )
        return Window(lo, hi)

    def lattice_points(self) -> Iterable[Point]:
        return itertools.product(
            *(range(a, b + 1) for a, b in zip(self.lo, self.hi))
        )

    def side_lengths(self) -> Point:
        return tuple(b - a + 1 for a, b in zip(self.lo, self.hi))


@dataclass
class PointSet:
    """Finite window sample of a Delone subset of Z^d."""

    points: FrozenSet[Point]
    window: Window
    interior_margin: float = 0.0

    def __post_init__(self):
        self.points = frozenset(map(tuple, self.points))
        for p in self.points:
            if not self.window.contains(p):
                raise ValueError(f"point {p} outside window {self.window}")

    @property
    def dim(self) -> int:
        return self.window.dim

    def interior_points(self, margin: Optional[float] = None) -> List[Point]:
        m = self.interior_margin if margin is None else margin
        return sorted(
            p for p in self.points if self.window.boundary_distance(p) >= m
        )

    def sorted_points(self) -> List[Point]:
        return sorted(self.points)


@dataclass
class Radii:
    """Packing radius r and covering radius R with exact squared values.

    r_sq4 and R_sq4 are 4*r^2 and 4*R^2 as integers (the half-integer
    scan makes squared distances multiples of 1/4).
    """

    r: float
    R: float
    r_sq4: int
    R_sq4: int

    @property
    def r_sq(self) -> Fraction:
        return Fraction(self.r_sq4, 4)

    @property
    def R_sq(self) -> Fraction:
        return Fraction(self.R_sq4, 4)


def packing_covering_radii(ps: PointSet) -> Radii:
    """Estimate (r, R) from the window sample.

    r is half the minimum pairwise distance over interior points.  R is
    the covering radius measured on the half-integer lattice, after one
    fixpoint pass: a first scan of the full window gives an estimate, the
    window eroded by that estimate gives the reported value (truncation
    near the boundary must not inflate R).
    """
    interior = ps.interior_points()
    if len(interior) < 2:
        raise WindowTooSmallError(
            "window too small: fewer than 2 interior points"
        )
    pts = np.array(ps.sorted_points(), dtype=np.int64)
    tree = cKDTree(pts)

    arr = np.array(interior, dtype=np.int64)
    dists, _ = tree.query(arr, k=2)
    # squared distances of small integer points are exact in binary64
    min_sq = int(round(dists[:, 1].min() ** 2))
    r_sq4 = min_sq  # r = d_min/2, so 4 r^2 = d_min^2
    r = math.sqrt(min_sq) / 2

    def covering_sq4(window: Window) -> int:
        # scan the half-integer lattice: scale everything by 2
        lo2 = tuple(2 * a for a in window.lo)
        hi2 = tuple(2 * b for b in window.hi)
        grid = np.array(
            list(
                itertools.product(
                    *(range(a, b + 1) for a, b in zip(lo2, hi2))
                )
            ),
            dtype=np.int64,
        )
        tree2 = cKDTree(2 * pts)
        d, _ = tree2.query(grid)
        # integer squared distances up to ~2^50 are exact in binary64
        return int(round(d.max() ** 2))

    first = covering_sq4(ps.window)
    eroded = ps.window.erode(math.sqrt(first) / 2)
    R_sq4 = covering_sq4(eroded)
    return Radii(
        r=r, R=math.sqrt(R_sq4) / 2, r_sq4=r_sq4, R_sq4=R_sq4
    )


@dataclass
class NeighborGraph:
    """Voronoi neighbor pairs among eligible interior points."""

    pairs: Set[Tuple[Point, Point]]  # stored with min(pair) first
    eligible: Set[Point]
    excluded: Set[Point]  # interior points without full 2R context
    radii: Radii

    def neighbors_of(self, p: Point) -> List[Point]:
        out = []
        for a, b in self.pairs:
            if a == p:
                out.append(b)
            elif b == p:
                out.append(a)
        return sorted(out)


def _cell_constraints(x: Point, context: List[Point]) -> List[tuple]:
    """Closed half-space rows for {y : |y-x| <= |y-z| for all z}."""
    rows = []
    nx = norm_sq(x)
    for z in context:
        if z == x:
            continue
        rows.append(
            tuple(2 * (zi - xi) for zi, xi in zip(z, x))
            + (norm_sq(z) - nx,)
        )
    return rows


def voronoi_neighbors(
    ps: PointSet, radii: Optional[Radii] = None
) -> NeighborGraph:
    """Exact Voronoi neighbor graph restricted to eligible points.

    A point is eligible when the ball of radius 2R around it lies inside
    the window, so its pruned constraint set C(x) = D ∩ B(x, 2R) is
    complete.  Points z outside B(x, 2R) give constraints slack on
    B(x, R) ⊇ V_x and are redundant.  A pair is a neighbor iff the two
    closed cell systems intersect; since each point is in the other's
    context, any intersection point lies on the bisector, which is passed
    as an exact equality to the feasibility kernel.
    """
    if radii is None:
        radii = packing_covering_radii(ps)
    two_R = 2 * radii.R
    two_R_sq = 4 * radii.R_sq  # exact (2R)^2 as a Fraction
    pts_sorted = ps.sorted_points()
    arr = np.array(pts_sorted, dtype=np.int64)
    tree = cKDTree(arr)

    eligible, excluded = set(), set()
    for p in ps.interior_points():
        if ps.window.boundary_distance(p) >= two_R:
            eligible.add(p)
        else:
            excluded.add(p)

    def context_of(x: Point) -> List[Point]:
        idxs = tree.query_ball_point(x, two_R * 1.0000001)
        out = []
        for i in idxs:
            z = tuple(int(v) for v in arr[i])
            if z != x and norm_sq(sub(z, x)) <= two_R_sq:
                out.append(z)
        return sorted(out)

    cache: Dict[tuple, bool] = {}
    pairs: Set[Tuple[Point, Point]] = set()
    contexts: Dict[Point, List[Point]] = {}
    for x in sorted(eligible):
        cx = contexts.get(x)
        if cx is None:
            cx = contexts[x] = context_of(x)
        for xp in cx:
            if xp <= x or xp not in eligible:
                continue
            cxp = contexts.get(xp)
            if cxp is None:
                cxp = contexts[xp] = context_of(xp)
            dx = sub(xp, x)
            key = (
                dx,
                frozenset(sub(z, x) for z in cx),
                frozenset(sub(z, x) for z in cxp),
            )
            ok = cache.get(key)
            if ok is None:
                rows = _cell_constraints(x, cx)
                rows += _cell_constraints(x, cxp)  # same center, union context
                bisector = (
                    tuple(2 * d for d in dx) + (norm_sq(xp) - norm_sq(x),)
                )
                ok = feasible(rows, [bisector], dim=ps.dim)
                cache[key] = ok
            if ok:
                pairs.add((x, xp))
    return NeighborGraph(
        pairs=pairs, eligible=eligible, excluded=excluded, radii=radii
    )


@dataclass
class FirstReturnSet:
    """Symmetric set of first-return vectors with neighbor-pair witnesses."""

    vectors: FrozenSet[Point]
    provenance: Dict[Point, Tuple[Point, Point]] = field(default_factory=dict)

    def __post_init__(self):
        vs = frozenset(map(tuple, self.vectors))
        if any(all(c == 0 for c in v) for v in vs):
            raise ValueError("first-return set must not contain 0")
        if frozenset(tuple(-c for c in v) for v in vs) != vs:
            raise ValueError("first-return set must be symmetric (F = -F)")
        self.vectors = vs

    @property
    def max_norm(self) -> float:
        return max(math.sqrt(norm_sq(v)) for v in self.vectors)

    def sorted_vectors(self) -> List[Point]:
        return sorted(self.vectors)


def first_return_vectors(
    ps: PointSet,
    graph: Optional[NeighborGraph] = None,
) -> FirstReturnSet:
    """All differences x - x' over Voronoi neighbor pairs (both signs)."""
    if graph is None:
        graph = voronoi_neighbors(ps)
    vectors = set()
    provenance: Dict[Point, Tuple[Point, Point]] = {}
    for x, xp in sorted(graph.pairs):
        for v, w in ((sub(x, xp), (x, xp)), (sub(xp, x), (xp, x))):
            if v not in vectors:
                vectors.add(v)
                provenance[v] = w
    if not vectors:
        raise WindowTooSmallError(
            "window too small: no neighbor pairs among eligible points"
        )
    return FirstReturnSet(frozenset(vectors), provenance)


def f_distance(
    u: Point,
    F: FirstReturnSet,
    radius: Optional[float] = None,
) -> int:
    """Length of the shortest F-word summing to u (BFS on Z^d).

    The search is restricted to the closed ball of radius |u| + max|F|
    around the origin; exhausting it without reaching u means F does not
    generate u, which is raised as NotGeneratedError.
    """
    u = tuple(u)
    if all(c == 0 for c in u):
        return 0
    if radius is None:
        radius = math.sqrt(norm_sq(u)) + F.max_norm
    radius_sq = radius * radius * (1 + 1e-9)
    moves = F.sorted_vectors()
    origin = tuple(0 for _ in u)
    seen = {origin: 0}
    queue = deque([origin])
    while queue:
        p = queue.popleft()
        d = seen[p] + 1
        for m in moves:
            q = add(p, m)
            if q in seen or norm_sq(q) > radius_sq:
                continue
            if q == u:
                return d
            seen[q] = d
            queue.append(q)
    raise NotGeneratedError(
        f"{u} is not generated by the first-return set within radius "
        f"{radius:.3g}"
    )


def f_diameter(points: Iterable[Point], F: FirstReturnSet) -> int:
    """Max F-distance over pairs of points (0 for singletons)."""
    pts = sorted(set(map(tuple, points)))
    if not pts:
        raise ValueError("f_diameter of an empty set")
    best = 0
    seen_diffs: Dict[Point, int] = {}
    for i, p in enumerate(pts):
        for q in pts[i + 1:]:
            diff = sub(q, p)
            d = seen_diffs.get(diff)
            if d is None:
                d = f_distance(diff, F)
                seen_diffs[diff] = d
            if d > best:
                best = d
    return best
