"""Plain-text external interfaces.

PointSet files: a window header line followed by one point per line,
space-separated integers.  Neighbor graphs export as edge lists, patch
memberships as CSV, hierarchies as JSON documents.
"""

from __future__ import annotations

import csv
import json
from typing import Iterable, List, TextIO, Tuple

from .errors import ConfigError
from .geometry import NeighborGraph, PointSet, Window
from .hierarchy import CombinatorialData

Point = Tuple[int, ...]


def write_pointset(ps: PointSet, fh: TextIO) -> None:
    fh.write(
        "window "
        + " ".join(map(str, ps.window.lo))
        + " "
        + " ".join(map(str, ps.window.hi))
        + "\n"
    )
    for p in ps.sorted_points():
        fh.write(" ".join(map(str, p)) + "\n")


def read_pointset(fh: TextIO) -> PointSet:
    header = fh.readline().split()
    if not header or header[0] != "window" or len(header) % 2 != 1:
        raise ConfigError(
            "point set file must start with 'window lo... hi...'"
        )
    vals = [int(v) for v in header[1:]]
    d = len(vals) // 2
    window = Window(tuple(vals[:d]), tuple(vals[d:]))
    points = set()
    for line in fh:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        p = tuple(int(v) for v in line.split())
        if len(p) != d:
            raise ConfigError(f"point {p} has dimension != {d}")
        points.add(p)
    return PointSet(frozenset(points), window)


def write_edge_list(graph: NeighborGraph, fh: TextIO) -> None:
    """One neighbor pair per line: the two points, space-separated."""
    for a, b in sorted(graph.pairs):
        fh.write(" ".join(map(str, a + b)) + "\n")


def write_patch_csv(data: CombinatorialData, fh: TextIO) -> None:
    """Patch membership dump: point, owner, level."""
    writer = csv.writer(fh)
    writer.writerow(["point", "owner", "level"])
    for level in data.levels:
        for p, m in sorted(level.owner_of.items()):
            writer.writerow([
                " ".join(map(str, p)),
                " ".join(map(str, m)),
                level.n,
            ])


def hierarchy_document(data: CombinatorialData) -> dict:
    """JSON-ready summary: per-level point counts, F_n, k(n), flags."""
    levels = []
    for level in data.levels:
        levels.append({
            "level": level.n,
            "points": len(level.returns.points),
            "owner_points": len(level.next_returns.points),
            "first_returns": [list(v) for v in level.first_returns.sorted_vectors()],
            "k": level.k_n,
            "complete_owners": len(level.complete_owners),
            "clipped_owners": len(level.clipped_owners),
            "packing_radius_sq4": level.radii.r_sq4,
            "covering_radius_sq4": level.radii.R_sq4,
        })
    return {
        "levels": levels,
        "k_values": data.k_values,
        "level_labels": data.level_labels(),
    }


def write_hierarchy_json(data: CombinatorialData, fh: TextIO) -> None:
    json.dump(hierarchy_document(data), fh, indent=2, sort_keys=True)
    fh.write("\n")
