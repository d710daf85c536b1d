"""Combinatorial data of a nested return-set hierarchy.

For each consecutive pair of levels: the Voronoi patch partition of R_n
with owners in R_{n+1} (lexicographic tie-breaking), the patch-diameter
constant k(n) in the word metric of F_n, well-distributedness checks,
level thinning, composite patches and recursive addressing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree

from .errors import InvariantViolation, WindowTooSmallError
from .generators import ReturnSet
from .geometry import (
    FirstReturnSet,
    NeighborGraph,
    Radii,
    f_distance,
    first_return_vectors,
    norm_sq,
    packing_covering_radii,
    sub,
    voronoi_neighbors,
)

Point = Tuple[int, ...]


@dataclass
class Level:
    """Combinatorics between R_n and R_{n+1}.

    Patches partition the interior points of R_n (margin 2*R of the next
    level); owners whose full Voronoi cell is visible are `complete` and
    are the only ones entering k(n) and the (iii)/(iv) checks.
    """

    n: int
    returns: ReturnSet
    next_returns: ReturnSet
    first_returns: FirstReturnSet
    graph: NeighborGraph
    radii: Radii
    next_radii: Radii
    partition: Dict[Point, Tuple[Point, ...]]
    owner_of: Dict[Point, Point]
    complete_owners: FrozenSet[Point]
    clipped_owners: FrozenSet[Point]
    k_n: int

    def patch(self, owner: Point) -> Tuple[Point, ...]:
        return self.partition[owner]


def assign_owners(
    points: List[Point],
    owners: List[Point],
    covering_radius: float,
) -> Dict[Point, Point]:
    """Nearest-owner assignment with exact distances and lexicographic
    tie-breaking.  A point farther than the covering bound from every
    owner signals a truncation problem."""
    if not owners:
        raise WindowTooSmallError("no owners available for the partition")
    arr = np.array(owners, dtype=np.int64)
    tree = cKDTree(arr)
    if not points:
        return {}
    pts = np.array(points, dtype=np.int64)
    dists, _ = tree.query(pts)
    worst = float(dists.max())
    if worst > covering_radius * (1 + 1e-9):
        bad = points[int(dists.argmax())]
        raise WindowTooSmallError(
            f"interior point {bad} is {worst:.3f} away from every owner, "
            f"beyond the covering bound {covering_radius:.3f}"
        )
    candidate_lists = tree.query_ball_point(pts, dists * (1 + 1e-9) + 1e-9)
    out: Dict[Point, Point] = {}
    for p, idxs in zip(points, candidate_lists):
        best_sq = None
        best: List[Point] = []
        for i in idxs:
            m = tuple(int(v) for v in arr[i])
            s = norm_sq(sub(p, m))
            if best_sq is None or s < best_sq:
                best_sq, best = s, [m]
            elif s == best_sq:
                best.append(m)
        out[p] = min(best)
    return out


def build_level(
    returns: ReturnSet,
    next_returns: ReturnSet,
    label: Optional[int] = None,
) -> Level:
    """Construct the patch partition and k constant for one level pair."""
    if not set(next_returns.points) <= set(returns.points):
        raise InvariantViolation(
            "owner set must be a subset of the finer return set"
        )
    radii = packing_covering_radii(returns.base)
    next_radii = packing_covering_radii(next_returns.base)
    graph = voronoi_neighbors(returns.base, radii)
    first = first_return_vectors(returns.base, graph)

    margin = 2 * next_radii.R
    window = returns.base.window
    interior = returns.base.interior_points(margin)
    owners = next_returns.base.sorted_points()
    owner_of = assign_owners(interior, owners, next_radii.R)

    partition: Dict[Point, List[Point]] = {}
    for p, m in owner_of.items():
        partition.setdefault(m, []).append(p)
    patches = {m: tuple(sorted(ps)) for m, ps in partition.items()}

    complete, clipped = set(), set()
    for m in patches:
        if window.boundary_distance(m) >= 3 * next_radii.R:
            complete.add(m)
        else:
            clipped.add(m)

    # postcondition (i) on complete patches: the owner is the only
    # next-level point inside its patch
    next_pts = set(next_returns.points)
    for m in complete:
        inside = set(patches[m]) & next_pts
        if inside != {m}:
            raise InvariantViolation(
                f"patch of {m} meets the next level in {sorted(inside)}"
            )

    k_n = 0
    dist_cache: Dict[Point, int] = {}
    for m in sorted(complete):
        pts = patches[m]
        for i, p in enumerate(pts):
            for q in pts[i + 1:]:
                diff = sub(q, p)
                d = dist_cache.get(diff)
                if d is None:
                    d = f_distance(diff, first)
                    dist_cache[diff] = d
                if d > k_n:
                    k_n = d

    return Level(
        n=returns.level if label is None else label,
        returns=returns,
        next_returns=next_returns,
        first_returns=first,
        graph=graph,
        radii=radii,
        next_radii=next_radii,
        partition=patches,
        owner_of=owner_of,
        complete_owners=frozenset(complete),
        clipped_owners=frozenset(clipped),
        k_n=k_n,
    )


@dataclass
class CombinatorialData:
    """Per-level stack of return sets, partitions and first-return sets."""

    return_sets: List[ReturnSet]
    levels: List[Level]
    _composite_cache: dict = field(default_factory=dict, repr=False)

    @property
    def depth(self) -> int:
        return len(self.return_sets)

    @property
    def k_values(self) -> List[int]:
        return [lv.k_n for lv in self.levels]

    def level_labels(self) -> List[int]:
        return [rs.level for rs in self.return_sets]


def build_combinatorial_data(return_sets: List[ReturnSet]) -> CombinatorialData:
    if len(return_sets) < 2:
        raise WindowTooSmallError("need at least 2 levels")
    levels = [
        build_level(a, b) for a, b in zip(return_sets, return_sets[1:])
    ]
    return CombinatorialData(return_sets=return_sets, levels=levels)


@dataclass
class PairCheck:
    n: int
    holds: bool
    violating_owners: List[Point]
    checked_owners: int


@dataclass
class TripleCheck:
    n: int
    holds: bool
    violating_owners: List[Point]
    checked_owners: int


@dataclass
class WellDistributedReport:
    condition_iii: List[PairCheck]
    condition_iv: List[TripleCheck]
    strict: bool

    @property
    def holds(self) -> bool:
        return all(c.holds for c in self.condition_iii) and all(
            c.holds for c in self.condition_iv
        )


def _check_iii(level: Level) -> PairCheck:
    bad = []
    for m in sorted(level.complete_owners):
        patch = level.partition[m]
        diffs = {
            sub(q, p) for p in patch for q in patch if p != q
        }
        if not set(level.first_returns.vectors) <= diffs:
            bad.append(m)
    return PairCheck(
        n=level.n,
        holds=not bad,
        violating_owners=bad,
        checked_owners=len(level.complete_owners),
    )


def _check_iv(level: Level, deeper_points: FrozenSet[Point]) -> TripleCheck:
    owners = [
        m for m in sorted(level.complete_owners) if m in deeper_points
    ]
    shapes = {}
    for m in owners:
        normalized = frozenset(sub(p, m) for p in level.partition[m])
        shapes.setdefault(normalized, []).append(m)
    if len(shapes) <= 1:
        return TripleCheck(
            n=level.n, holds=True, violating_owners=[],
            checked_owners=len(owners),
        )
    # the most frequent shape is the model; the rest violate
    model = max(shapes.values(), key=len)
    bad = sorted(m for ms in shapes.values() if ms is not model for m in ms)
    return TripleCheck(
        n=level.n, holds=False, violating_owners=bad,
        checked_owners=len(owners),
    )


def check_well_distributed(
    data: CombinatorialData, strict: bool = False
) -> WellDistributedReport:
    """Empirical conditions (iii) and (iv) on complete patches.

    (iv) ranges over owners in R_{n+2} as in the source construction;
    strict=True widens the index set to all owners in R_{n+1}.
    """
    if data.depth < 3:
        raise WindowTooSmallError("well-distributedness needs >= 3 levels")
    cond3 = [_check_iii(lv) for lv in data.levels]
    cond4 = []
    for i, lv in enumerate(data.levels):
        if strict:
            deeper = frozenset(lv.next_returns.points)
        else:
            if i + 2 >= len(data.return_sets):
                break
            deeper = frozenset(data.return_sets[i + 2].points)
        cond4.append(_check_iv(lv, deeper))
    return WellDistributedReport(
        condition_iii=cond3, condition_iv=cond4, strict=strict
    )


@dataclass
class ThinningResult:
    data: CombinatorialData
    kept_labels: List[int]
    dropped_labels: List[int]
    succeeded: bool
    notes: str = ""


def thin_to_well_distributed(
    data: CombinatorialData, strict: bool = False
) -> ThinningResult:
    """Greedy increasing subsequence of levels on which every consecutive
    pair passes (iii) and every triple passes (iv).

    Mirrors the construction that forgets some cylinder sets.  If no
    subsequence of length >= 3 exists, returns the best prefix found,
    flagged as unsuccessful.
    """
    sets = data.return_sets
    pair_cache: Dict[Tuple[int, int], Level] = {}

    def pair_level(i: int, j: int) -> Level:
        key = (i, j)
        if key not in pair_cache:
            pair_cache[key] = build_level(sets[i], sets[j], label=sets[i].level)
        return pair_cache[key]

    def pair_ok(i: int, j: int) -> bool:
        try:
            return _check_iii(pair_level(i, j)).holds
        except WindowTooSmallError:
            return False

    def triple_ok(i: int, j: int, l: int) -> bool:
        try:
            deeper = frozenset(sets[l].points)
            return _check_iv(pair_level(i, j), deeper).holds
        except WindowTooSmallError:
            return False

    chosen = [0]
    for j in range(1, len(sets)):
        i = chosen[-1]
        if not pair_ok(i, j):
            continue
        if len(chosen) >= 2 and not triple_ok(chosen[-2], i, j):
            continue
        chosen.append(j)

    kept = [sets[i].level for i in chosen]
    dropped = [rs.level for rs in sets if rs.level not in kept]
    if chosen == list(range(len(sets))):
        return ThinningResult(
            data=data, kept_labels=kept, dropped_labels=[],
            succeeded=True, notes="already well distributed",
        )
    levels = [
        pair_level(i, j) for i, j in zip(chosen, chosen[1:])
    ]
    thinned = CombinatorialData(
        return_sets=[sets[i] for i in chosen], levels=levels
    )
    return ThinningResult(
        data=thinned,
        kept_labels=kept,
        dropped_labels=dropped,
        succeeded=len(chosen) >= 3,
        notes="" if len(chosen) >= 3 else "no subsequence of length >= 3",
    )


@dataclass
class LinearRecurrenceReport:
    k_values: List[int]
    bound: int  # L-hat = max k(n)
    flagged: bool  # evidence of linear recurrence
    flat: bool  # k constant over the last half of computed levels


def linear_recurrence_report(data: CombinatorialData) -> LinearRecurrenceReport:
    ks = data.k_values
    if len(ks) < 1:
        raise WindowTooSmallError("need >= 2 levels for a recurrence report")
    last_half = ks[len(ks) // 2:]
    flat = len(set(last_half)) == 1
    return LinearRecurrenceReport(
        k_values=ks, bound=max(ks), flagged=flat, flat=flat
    )


def composite_patch(
    data: CombinatorialData, n: int, m: int, p: Point
) -> FrozenSet[Point]:
    """The recursive union patch P_n^m(p): {p} when n = m, else the union
    of level-n patches over the composite patch one level up."""
    labels = data.level_labels()
    if n > m:
        raise ValueError("composite patch needs n <= m")
    if m not in labels or n not in labels:
        raise ValueError(f"levels {n}..{m} not computed (have {labels})")
    p = tuple(p)
    key = (n, m, p)
    cached = data._composite_cache.get(key)
    if cached is not None:
        return cached
    if n == m:
        result = frozenset([p])
    else:
        i = labels.index(n)
        level = data.levels[i]
        upper = composite_patch(data, labels[i + 1], m, p)
        pts = set()
        for q in upper:
            patch = level.partition.get(q)
            if patch is None:
                raise WindowTooSmallError(
                    f"point {q} has no complete patch at level {level.n}; "
                    "enlarge the window"
                )
            pts.update(patch)
        result = frozenset(pts)
    data._composite_cache[key] = result
    return result


def address(
    data: CombinatorialData, p: Point, n0: int
) -> Tuple[int, List[Point]]:
    """Hierarchical address of p in R_{n0}: the minimal level m0 whose
    composite patch at 0 contains p, and the owner chain from 0 down to p.
    """
    labels = data.level_labels()
    if n0 not in labels:
        raise ValueError(f"level {n0} not computed")
    p = tuple(p)
    zero = (0,) * len(p)
    if p not in data.return_sets[labels.index(n0)].points:
        raise ValueError(f"{p} is not in the level-{n0} return set")
    chain = [p]
    i = labels.index(n0)
    anc = p
    while anc != zero:
        if i >= len(data.levels):
            raise WindowTooSmallError(
                f"address of {p} needs levels beyond {labels[-1]}; "
                "raise max_level"
            )
        level = data.levels[i]
        nxt = level.owner_of.get(anc)
        if nxt is None:
            raise WindowTooSmallError(
                f"point {anc} is not interior at level {level.n}; "
                "raise max_level or enlarge the window"
            )
        chain.append(nxt)
        anc = nxt
        i += 1
    m0 = labels[i]
    path = list(reversed(chain))
    _verify_address(data, p, n0, m0, path)
    return m0, path


def _verify_address(
    data: CombinatorialData, p: Point, n0: int, m0: int, path: List[Point]
) -> None:
    labels = data.level_labels()
    zero = path[0]
    if any(v != 0 for v in zero):
        raise InvariantViolation("address path must start at 0")
    if path[-1] != p:
        raise InvariantViolation("address path must end at the point")
    steps = labels[labels.index(n0): labels.index(m0) + 1]
    # p in P^{m0-l}_{n0}(p_l) for each l, and p_l in P_{m0-l}(p_{l-1})
    for l in range(1, len(path)):
        lower = steps[len(steps) - 1 - l]
        if path[l] not in composite_patch(data, lower, lower, path[l]):
            raise InvariantViolation("unreachable")  # trivial, keeps symmetry
        level = data.levels[labels.index(lower)]
        if path[l] not in level.partition.get(path[l - 1], ()):
            raise InvariantViolation(
                f"address step {path[l]} not in the patch of {path[l-1]}"
            )
        if p not in composite_patch(data, n0, lower, path[l]):
            raise InvariantViolation(
                f"{p} escapes the composite patch of {path[l]}"
            )
    # minimality of m0: composite patches of distinct owners are disjoint,
    # so p cannot lie in P^m_{n0}(0) for any m < m0
    for m in steps[:-1]:
        if m == n0 and p == zero:
            continue
        if p in composite_patch(data, n0, m, zero):
            raise InvariantViolation(f"m0 = {m0} is not minimal for {p}")
