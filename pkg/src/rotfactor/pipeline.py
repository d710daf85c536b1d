"""Pipeline orchestration: config -> hierarchy -> analysis -> report,
plus the brute-force oracle cross-checks.

Reports are deterministic: identical inputs yield byte-identical JSON
(modulo the timestamp field, which can be disabled).
"""

from __future__ import annotations

import datetime
import json
import math
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .analysis import (
    ConditionReport,
    LengthSeries,
    necessary_condition_check,
    sufficient_condition_check,
    theta_scan,
)
from .bruteforce import (
    brute_address_paths,
    brute_f_distance,
    brute_partition,
    brute_voronoi_neighbors,
)
from .config import RunConfig, build_system
from .errors import ConfigError, InvariantViolation, WindowTooSmallError
from .generators import (
    LatticeSystem,
    ProductSystem,
    ReturnSet,
    SubstitutionSystem,
    System,
)
from .geometry import PointSet, Window, sub
from .hierarchy import (
    CombinatorialData,
    address,
    build_combinatorial_data,
    check_well_distributed,
    linear_recurrence_report,
    thin_to_well_distributed,
)
from .torus import scalar_to_str

Point = Tuple[int, ...]

ORACLE_SITE_BUDGET = 2_000_000  # site*point products per neighbor check


@dataclass
class RunReport:
    document: dict

    def to_json(self) -> str:
        return json.dumps(self.document, indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        """CSV projection for plotting: n, l_n, partial_sum per analysis."""
        lines = ["theta,k,n,l_n,partial_sum"]
        for entry in self.document.get("analyses", []):
            theta = "(" + " ".join(entry["theta"]) + ")"
            k = entry["k"]
            series = entry["series"]
            for row in series["lengths"]:
                lines.append(
                    f"{theta},{k},{row['level']},{row['value']!r},"
                    f"{row['partial_sum']!r}"
                )
        return "\n".join(lines) + "\n"


def _series_doc(series: LengthSeries) -> dict:
    sums = series.partial_sums()
    exact_sums = series.partial_sums_sq_exact()
    rows = []
    for i, l in enumerate(series.lengths):
        row = {
            "level": series.level_labels[i],
            "value": l.value,
            "witness": list(l.witness),
            "partial_sum": sums[i],
        }
        if l.exact:
            row["value_sq"] = str(l.value_sq)
        if exact_sums is not None:
            row["partial_sum_exact"] = str(exact_sums[i])
        rows.append(row)
    return {
        "k": series.k,
        "theta": [scalar_to_str(t) for t in series.theta],
        "exact": series.exact,
        "lengths": rows,
    }


def _verdict_doc(v) -> dict:
    return {
        "classification": v.classification,
        "rate": v.rate,
        "tail_bound": v.tail_bound,
        "notes": v.notes,
        "levels_used": v.levels_used,
    }


def _condition_doc(report: ConditionReport, which: str) -> dict:
    doc = {
        "check": which,
        "conclusion": report.conclusion,
        "conditional": report.conditional,
        "verdict": _verdict_doc(report.verdict),
    }
    if report.well_distributed is not None:
        doc["well_distributed"] = report.well_distributed
    if report.diagnostics is not None:
        doc["epsilon_table"] = {
            str(n): v for n, v in report.diagnostics.epsilon_table.items()
        }
        doc["lr_bound_table"] = {
            str(n): v for n, v in report.diagnostics.lr_bound_table.items()
        }
        doc["subsampled_levels"] = report.diagnostics.subsampled_levels
    return doc


def _expansion_base(system: System) -> Optional[Tuple[int, ...]]:
    """Per-axis expansion factors for scan candidates, when constant."""
    if isinstance(system, LatticeSystem):
        return system.qs
    if isinstance(system, SubstitutionSystem):
        sub_rule = system.sub_rule
        if sub_rule.dim >= 2:
            return sub_rule.shape
        lengths = {len(sub_rule.rule[s]) for s in sub_rule.alphabet}
        if len(lengths) == 1:
            return (next(iter(lengths)),)
        return None
    if isinstance(system, ProductSystem):
        bases = [_expansion_base(f) for f in system.factors]
        if any(b is None for b in bases):
            return None
        return tuple(b[0] for b in bases)
    return None


def _apply_margin(sets: List[ReturnSet], margin: float) -> None:
    if margin > 0:
        for rs in sets:
            rs.base.interior_margin = max(rs.base.interior_margin, margin)


def run_pipeline(config: RunConfig) -> RunReport:
    system = build_system(config)
    return_sets = system.return_sets(config.levels)
    _apply_margin(return_sets, config.window_margin)
    data = build_combinatorial_data(return_sets)

    warnings: List[str] = []
    doc: dict = {"config": config.echo(), "system": system.describe()}
    if config.timestamp:
        doc["generated"] = datetime.datetime.now(
            datetime.timezone.utc
        ).isoformat()

    hierarchy = {
        "level_labels": data.level_labels(),
        "levels": [],
        "k_values": data.k_values,
    }
    for level in data.levels:
        hierarchy["levels"].append({
            "level": level.n,
            "points": len(level.returns.points),
            "first_returns": [
                list(v) for v in level.first_returns.sorted_vectors()
            ],
            "k": level.k_n,
            "complete_owners": len(level.complete_owners),
            "clipped_owners": len(level.clipped_owners),
        })
        if level.clipped_owners:
            warnings.append(
                f"level {level.n}: {len(level.clipped_owners)} owner(s) "
                "clipped by the window, excluded from k and (iii)/(iv)"
            )

    lr = linear_recurrence_report(data)
    hierarchy["linear_recurrence"] = {
        "k_values": lr.k_values,
        "bound": lr.bound,
        "flagged": lr.flagged,
    }

    wd_report = None
    if data.depth >= 3:
        wd_report = check_well_distributed(
            data, strict=config.strict_well_distributed
        )
        hierarchy["well_distributed"] = {
            "holds": wd_report.holds,
            "condition_iii": [
                {"level": c.n, "holds": c.holds,
                 "violations": len(c.violating_owners)}
                for c in wd_report.condition_iii
            ],
            "condition_iv": [
                {"level": c.n, "holds": c.holds,
                 "violations": len(c.violating_owners)}
                for c in wd_report.condition_iv
            ],
        }
    else:
        warnings.append("fewer than 3 levels: well-distributedness skipped")

    if config.thin:
        thin = thin_to_well_distributed(
            data, strict=config.strict_well_distributed
        )
        hierarchy["thinning"] = {
            "succeeded": thin.succeeded,
            "kept": thin.kept_labels,
            "dropped": thin.dropped_labels,
            "notes": thin.notes,
        }
    doc["hierarchy"] = hierarchy

    analyses = []
    for theta in config.thetas:
        for k in config.k_list():
            nec = necessary_condition_check(
                data, theta, k,
                wd_report=wd_report,
                strict=config.strict_well_distributed,
            ) if wd_report is not None else None
            suf = sufficient_condition_check(data, theta, k, lr=lr)
            entry = {
                "theta": [scalar_to_str(t) for t in theta],
                "k": k,
                "series": _series_doc(suf.series),
                "sufficient": _condition_doc(suf, "sufficient"),
            }
            if nec is not None:
                entry["necessary"] = _condition_doc(nec, "necessary")
            if suf.diagnostics and suf.diagnostics.subsampled_levels:
                warnings.append(
                    f"theta {entry['theta']}: continuity modulus subsampled "
                    f"on levels {suf.diagnostics.subsampled_levels}"
                )
            analyses.append(entry)
    doc["analyses"] = analyses

    if config.scan:
        candidates = theta_scan(
            data,
            k=1 if config.k_mode != "d" else config.dimension,
            qmax=config.scan_qmax,
            expansion_base=_expansion_base(system),
            expansion_max_power=config.scan_max_power,
            real_targets=config.scan_real_targets,
        )
        doc["scan"] = [
            {
                "theta": [scalar_to_str(t) for t in c.theta],
                "score": c.score,
                "denominator": c.denominator,
                "source": c.source,
            }
            for c in candidates[:256]
        ]

    doc["warnings"] = warnings
    return RunReport(document=doc)


# ---------------------------------------------------------------------------
# oracle cross-checks


@dataclass
class OracleReport:
    rows: List[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r["status"] != "fail" for r in self.rows)

    def first_mismatch(self) -> Optional[dict]:
        for r in self.rows:
            if r["status"] == "fail":
                return r
        return None


def _crop_pointset(ps: PointSet, half: int) -> PointSet:
    lo = tuple(max(a, -half) for a in ps.window.lo)
    hi = tuple(min(b, half) for b in ps.window.hi)
    win = Window(lo, hi)
    pts = frozenset(p for p in ps.points if win.contains(p))
    return PointSet(pts, win)


def _corrupt_tie_break(data: CombinatorialData) -> bool:
    """Test hook: reassign one multiply-owned point to the lex-largest
    tied owner instead of the smallest.  Returns whether a tie was found."""
    from .geometry import norm_sq

    for level in data.levels:
        owners = level.next_returns.base.sorted_points()
        for p, m in sorted(level.owner_of.items()):
            best_sq = norm_sq(sub(p, m))
            tied = [
                o for o in owners if norm_sq(sub(p, o)) == best_sq
            ]
            if len(tied) > 1 and p != max(tied):
                wrong = max(tied)
                level.owner_of[p] = wrong
                rebuilt: Dict[Point, List[Point]] = {}
                for q, o in level.owner_of.items():
                    rebuilt.setdefault(o, []).append(q)
                level.partition = {
                    o: tuple(sorted(qs)) for o, qs in rebuilt.items()
                }
                data._composite_cache.clear()
                return True
    return False


def oracle_check(
    config: RunConfig,
    corrupt_tie_break: bool = False,
    address_limit: int = 40,
) -> OracleReport:
    """Diff the pipeline against independent brute-force recomputations.

    Restricted to lattice models and d = 1 substitutions (where the
    half-integer neighbor scan is exact) with windows of at most 10^4
    points per level.
    """
    system = build_system(config)
    if config.kind not in ("lattice_model", "block_substitution"):
        raise ConfigError(
            "oracle_check supports lattice_model and block_substitution only"
        )
    if config.kind == "block_substitution" and config.dimension != 1:
        raise ConfigError("substitution oracle checks require d = 1")

    return_sets = system.return_sets(config.levels)
    for rs in return_sets:
        if len(rs.points) > 10 ** 4:
            raise ConfigError(
                f"level {rs.level} has {len(rs.points)} points; oracle "
                "checks are capped at 10^4 per level"
            )
    data = build_combinatorial_data(return_sets)
    if corrupt_tie_break and not _corrupt_tie_break(data):
        raise InvariantViolation("no tie available to corrupt")
    report = OracleReport()
    rng = random.Random(20260824)

    for level in data.levels:
        ps = level.returns.base
        R = level.radii.R
        crop_half = math.ceil(6 * R) + 2
        sites = 1
        for lo, hi in zip(ps.window.lo, ps.window.hi):
            sites *= min(hi, crop_half) - max(lo, -crop_half) + 1
        sites *= 2 ** ps.dim
        cropped = _crop_pointset(ps, crop_half)
        cost = sites * len(cropped.points)
        if cost > ORACLE_SITE_BUDGET:
            report.rows.append({
                "check": "neighbor_graph", "level": level.n,
                "status": "skipped", "detail": f"cost {cost} over budget",
            })
        else:
            eligible = {
                p for p in cropped.points
                if cropped.window.boundary_distance(p) >= 2 * R
            }
            # scan erosion floor(R): keeps every cell witness (cells of
            # eligible points stay >= R from the boundary) while outside
            # points remain strictly farther than any in-window nearest
            brute = brute_voronoi_neighbors(cropped, eligible, math.floor(R))
            main = {
                pair for pair in level.graph.pairs
                if pair[0] in eligible and pair[1] in eligible
            }
            if brute == main:
                report.rows.append({
                    "check": "neighbor_graph", "level": level.n,
                    "status": "pass", "detail": f"{len(main)} pairs",
                })
            else:
                diff = sorted(brute ^ main)[:3]
                report.rows.append({
                    "check": "neighbor_graph", "level": level.n,
                    "status": "fail", "detail": f"differing pairs {diff}",
                })
                return report

        # f-distance spot checks on patch-point differences
        from .geometry import f_distance

        diffs = set()
        for m in sorted(level.complete_owners)[:8]:
            patch = level.partition[m]
            for i in range(len(patch)):
                for j in range(i + 1, len(patch)):
                    diffs.add(sub(patch[j], patch[i]))
        diffs = sorted(diffs)
        rng.shuffle(diffs)
        for u in diffs[:20]:
            got = f_distance(u, level.first_returns)
            want = brute_f_distance(u, level.first_returns)
            if got != want:
                report.rows.append({
                    "check": "f_distance", "level": level.n,
                    "status": "fail", "detail": f"{u}: {got} != {want}",
                })
                return report
        report.rows.append({
            "check": "f_distance", "level": level.n,
            "status": "pass", "detail": f"{min(20, len(diffs))} samples",
        })

        # partition vs exhaustive nearest-owner assignment
        interior = sorted(level.owner_of)
        owners = level.next_returns.base.sorted_points()
        brute_own = brute_partition(interior, owners)
        mism = [p for p in interior if brute_own[p] != level.owner_of[p]]
        if mism:
            p = mism[0]
            report.rows.append({
                "check": "partition", "level": level.n, "status": "fail",
                "detail": (
                    f"{p}: owner {level.owner_of[p]} != {brute_own[p]}"
                ),
            })
            return report
        report.rows.append({
            "check": "partition", "level": level.n,
            "status": "pass", "detail": f"{len(interior)} points",
        })

    # addressing vs exhaustive path enumeration
    n0 = data.level_labels()[0]
    candidates = sorted(data.return_sets[0].points)
    rng.shuffle(candidates)
    checked = 0
    for p in candidates:
        if checked >= address_limit:
            break
        try:
            m0, path = address(data, p, n0)
        except WindowTooSmallError:
            m0, path = None, None
        want_m0, want_paths = brute_address_paths(data, p, n0)
        if m0 is None and want_m0 is None:
            checked += 1
            continue
        ok = (
            m0 == want_m0
            and want_paths is not None
            and path in want_paths
            and len(want_paths) == 1
        )
        if not ok:
            report.rows.append({
                "check": "address", "level": n0, "status": "fail",
                "detail": (
                    f"{p}: got ({m0}, {path}), oracle ({want_m0}, "
                    f"{len(want_paths or [])} path(s))"
                ),
            })
            return report
        checked += 1
    report.rows.append({
        "check": "address", "level": n0,
        "status": "pass", "detail": f"{checked} points",
    })
    return report
