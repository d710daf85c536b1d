"""Independent brute-force recomputations used for oracle cross-checks.

Everything here deliberately avoids the main code paths: neighbor graphs
come from an exhaustive half-integer cell scan with exact tie
verification, word distances from a plain unbounded BFS, partitions from
exhaustive nearest-owner assignment over all owners, and addresses from
exhaustive path enumeration.

The half-integer scan is exact exactly when Voronoi-cell intersections
meet the (1/2)Z^d lattice, which holds for the inputs oracle checks are
restricted to: diagonal sublattices (lattice models) and d = 1 sets,
whose cell vertices are midpoints of integer pairs.
"""

from __future__ import annotations

import itertools
from collections import deque
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from .geometry import FirstReturnSet, PointSet, Window, add, norm_sq, sub
from .hierarchy import CombinatorialData

Point = Tuple[int, ...]


def brute_voronoi_neighbors(
    ps: PointSet, eligible: Set[Point], scan_margin: float
) -> Set[Tuple[Point, Point]]:
    """Neighbor pairs via exhaustive scan of the half-integer lattice.

    For every half-integer site in the window eroded by scan_margin, the
    set of exactly-nearest points of D is computed with integer
    arithmetic (coordinates scaled by 2); every pair of co-nearest points
    is a neighbor pair.
    """
    pts2 = [tuple(2 * c for c in p) for p in sorted(ps.points)]
    win = ps.window
    lo2 = tuple(2 * (a + int(scan_margin)) for a in win.lo)
    hi2 = tuple(2 * (b - int(scan_margin)) for b in win.hi)
    pairs: Set[Tuple[Point, Point]] = set()
    for y in itertools.product(
        *(range(a, b + 1) for a, b in zip(lo2, hi2))
    ):
        best_sq: Optional[int] = None
        best: List[Point] = []
        for p2 in pts2:
            s = norm_sq(sub(y, p2))
            if best_sq is None or s < best_sq:
                best_sq, best = s, [p2]
            elif s == best_sq:
                best.append(p2)
        if len(best) < 2:
            continue
        halved = [tuple(c // 2 for c in p2) for p2 in best]
        for a, b in itertools.combinations(sorted(halved), 2):
            if a in eligible and b in eligible:
                pairs.add((a, b))
    return pairs


def brute_f_distance(
    u: Point, F: FirstReturnSet, max_steps: int = 64
) -> Optional[int]:
    """Plain breadth-first search without the ball restriction; None when
    u is unreachable within max_steps moves."""
    u = tuple(u)
    origin = tuple(0 for _ in u)
    if u == origin:
        return 0
    frontier = {origin}
    seen = {origin}
    for step in range(1, max_steps + 1):
        nxt = set()
        for p in frontier:
            for v in F.vectors:
                q = add(p, v)
                if q == u:
                    return step
                if q not in seen:
                    seen.add(q)
                    nxt.add(q)
        frontier = nxt
        if not frontier:
            break
    return None


def brute_partition(
    points: List[Point], owners: List[Point]
) -> Dict[Point, Point]:
    """Exhaustive nearest-owner assignment over all owners with
    lexicographic tie-breaking."""
    out: Dict[Point, Point] = {}
    for p in points:
        best_sq: Optional[int] = None
        best: List[Point] = []
        for m in owners:
            s = norm_sq(sub(p, m))
            if best_sq is None or s < best_sq:
                best_sq, best = s, [m]
            elif s == best_sq:
                best.append(m)
        out[p] = min(best)
    return out


def brute_occurrences_1d(word: List, pattern: List) -> List[int]:
    """Positions where pattern occurs in word, by naive letter-by-letter
    comparison (no vectorized scanning)."""
    k = len(pattern)
    out = []
    for i in range(len(word) - k + 1):
        if all(word[i + j] == pattern[j] for j in range(k)):
            out.append(i)
    return out


def brute_first_returns_1d(word: List, pattern_len: int) -> FrozenSet[int]:
    """First-return vectors of the level pattern word[:pattern_len],
    recomputed from scratch: naive occurrence scan, covering radius by
    direct maximization, gaps between consecutive eligible occurrences.
    """
    occs = brute_occurrences_1d(word, list(word[:pattern_len]))
    if len(occs) < 2:
        raise ValueError("fewer than 2 occurrences")
    domain = len(word) - pattern_len  # last scannable position
    # covering radius on the eroded domain (one fixpoint pass, as in the
    # main path: a first full-domain estimate erodes the domain)
    def covering(lo: int, hi: int) -> float:
        worst = 0.0
        for y2 in range(2 * lo, 2 * hi + 1):  # half-integer sites, scaled
            d = min(abs(y2 - 2 * o) for o in occs) / 2
            worst = max(worst, d)
        return worst
    first = covering(0, domain)
    R = covering(int(first), domain - int(first))
    eligible = {
        o for o in occs if o - 0 >= 2 * R and domain - o >= 2 * R
    }
    vectors = set()
    for a, b in zip(occs, occs[1:]):
        if a in eligible and b in eligible:
            vectors.add(b - a)
            vectors.add(a - b)
    return frozenset(vectors)


def brute_address_paths(
    data: CombinatorialData, p: Point, n0: int
) -> Tuple[Optional[int], List[List[Point]]]:
    """All owner chains from 0 to p consistent with the partitions, found
    by exhaustive enumeration; returns (minimal m0, valid paths for it).

    A chain p_0 = 0, ..., p_{m0-n0} = p must step through patches:
    p_l in P_{m0-l}(p_{l-1}), and p must stay in the composite patch of
    every p_l.  Composite membership is recomputed here by direct
    recursive expansion, independent of the main addressing code.
    """
    labels = data.level_labels()
    zero = tuple(0 for _ in p)
    p = tuple(p)

    def comp_members(level_label: int, m_label: int, q: Point) -> FrozenSet[Point]:
        # direct recursive expansion of the composite patch
        if level_label == m_label:
            return frozenset([q])
        i = labels.index(level_label)
        level = data.levels[i]
        members: Set[Point] = set()
        for r in comp_members(labels[i + 1], m_label, q):
            patch = level.partition.get(r)
            if patch is None:
                raise KeyError(r)
            members.update(patch)
        return frozenset(members)

    i0 = labels.index(n0)
    for i_m in range(i0, len(labels)):
        m_label = labels[i_m]
        try:
            if p not in comp_members(n0, m_label, zero):
                continue
        except KeyError:
            break
        # enumerate chains of length m_label - n0 starting at 0
        paths: List[List[Point]] = []

        def extend(chain: List[Point], depth: int):
            if depth == i_m - i0:
                if chain[-1] == p:
                    paths.append(list(chain))
                return
            level = data.levels[i_m - 1 - depth]
            prev = chain[-1]
            patch = level.partition.get(prev)
            if patch is None:
                return
            for q in patch:
                try:
                    ok = p in comp_members(n0, level.n, q)
                except KeyError:
                    ok = False
                if ok:
                    extend(chain + [q], depth + 1)

        extend([zero], 0)
        return m_label, paths
    return None, []
