"""Theta-lengths, series verdicts, rotation-factor condition checks,
factor-map evaluation, continuity diagnostics, and candidate search.

Verdicts are labeled evidence, never conclusions: finite windows cannot
certify convergence of a series.  Everything computed with rational theta
is exact; irrational theta falls back to binary64 with tolerance 1e-12.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import WindowTooSmallError
from .geometry import FirstReturnSet, first_return_vectors, sub
from .hierarchy import (
    CombinatorialData,
    LinearRecurrenceReport,
    WellDistributedReport,
    check_well_distributed,
    linear_recurrence_report,
)
from .torus import (
    FLOAT_TOL,
    Scalar,
    TorusPoint,
    c_map,
    is_exact,
    scalar_to_str,
    torus_distance,
    torus_distance_sq,
)

# classifier thresholds: generous margins around the geometric/constant
# fixtures the suite is calibrated on
LOG_SLOPE_DELTA = 0.05
DIVERGENCE_FLOOR = 0.01
MAX_MODULUS_PAIRS = 100_000

Point = Tuple[int, ...]
Theta = Tuple[Scalar, ...]


def theta_is_exact(theta: Theta) -> bool:
    return all(is_exact(t) for t in theta)


def theta_to_strings(theta: Theta) -> List[str]:
    return [scalar_to_str(t) for t in theta]


@dataclass
class ThetaLength:
    """One level's theta-length: max torus distance over F_n, with the
    witness vector attaining it."""

    value: float
    value_sq: Scalar  # exact rational when theta is rational
    witness: Point
    exact: bool

    def is_zero(self) -> bool:
        if self.exact:
            return self.value_sq == 0
        return self.value <= FLOAT_TOL


def theta_length(
    F: FirstReturnSet, theta: Theta, k: int
) -> ThetaLength:
    """l^k_{n,theta} = max over v in F_n of the torus distance of the
    c-map image of v."""
    if not F.vectors:
        raise ValueError("empty first-return set")
    exact = theta_is_exact(theta)
    best_sq: Optional[Scalar] = None
    witness: Optional[Point] = None
    for v in F.sorted_vectors():
        s = torus_distance_sq(c_map(theta, v, k))
        if best_sq is None or s > best_sq:
            best_sq, witness = s, v
    return ThetaLength(
        value=math.sqrt(best_sq),
        value_sq=best_sq,
        witness=witness,
        exact=exact,
    )


@dataclass
class LengthSeries:
    k: int
    theta: Theta
    level_labels: List[int]
    lengths: List[ThetaLength]

    @property
    def exact(self) -> bool:
        return theta_is_exact(self.theta)

    def values(self) -> List[float]:
        return [l.value for l in self.lengths]

    def partial_sums(self) -> List[float]:
        out, acc = [], 0.0
        for l in self.lengths:
            acc += l.value
            out.append(acc)
        return out

    def partial_sums_sq_exact(self) -> Optional[List[Fraction]]:
        """Running sums of sqrt(value_sq) are irrational in general; on
        the rational path each term's square is exact, and for k = 1 the
        distances themselves are rational, so the sums are exact."""
        if not self.exact or self.k != 1:
            return None
        out, acc = [], Fraction(0)
        for l in self.lengths:
            # k = 1: distance = min(t, 1-t) is rational, square root of
            # value_sq is exact
            root = _sqrt_fraction(l.value_sq)
            if root is None:
                return None
            acc += root
            out.append(acc)
        return out


def _sqrt_fraction(x: Scalar) -> Optional[Fraction]:
    if not isinstance(x, (int, Fraction)):
        return None
    x = Fraction(x)
    num = math.isqrt(x.numerator)
    den = math.isqrt(x.denominator)
    if num * num == x.numerator and den * den == x.denominator:
        return Fraction(num, den)
    return None


def first_return_sets_of(data: CombinatorialData) -> Tuple[List[int], List[FirstReturnSet]]:
    """F_n for every computed level: the pair levels carry F_n of their
    lower member; the deepest return set gets its own computation when
    the window still permits one."""
    labels = [lv.n for lv in data.levels]
    fs = [lv.first_returns for lv in data.levels]
    tail = data.return_sets[-1]
    try:
        fs.append(first_return_vectors(tail.base))
        labels.append(tail.level)
    except WindowTooSmallError:
        pass
    return labels, fs


def length_series(
    data: CombinatorialData, theta: Theta, k: int
) -> LengthSeries:
    if data.depth < 2:
        raise WindowTooSmallError("length series needs >= 2 levels")
    dim = data.return_sets[0].base.dim
    if len(theta) != dim:
        raise ValueError(
            f"theta has {len(theta)} components, the action is {dim}-dimensional"
        )
    labels, fs = first_return_sets_of(data)
    lengths = [theta_length(F, theta, k) for F in fs]
    return LengthSeries(k=k, theta=theta, level_labels=labels, lengths=lengths)


@dataclass
class Verdict:
    classification: str  # ConvergentEvidence | DivergentEvidence | Inconclusive
    rate: Optional[float] = None
    tail_bound: Optional[float] = None
    notes: str = ""
    levels_used: List[int] = field(default_factory=list)


def series_verdict(series: LengthSeries) -> Verdict:
    """Finite-scale surrogate for convergence of the length series.

    Exact-zero tail: convergent with tail bound 0.  Otherwise a
    least-squares fit of log lengths on the last half decides geometric
    decay; a last-half floor above the divergence threshold is divergent
    evidence; anything else is inconclusive.
    """
    n = len(series.lengths)
    if n < 4:
        raise WindowTooSmallError("series verdict needs >= 4 levels")
    vals = series.values()
    zero = [l.is_zero() for l in series.lengths]
    trailing = 0
    for z in reversed(zero):
        if not z:
            break
        trailing += 1
    if trailing >= 2:
        return Verdict(
            classification="ConvergentEvidence",
            tail_bound=0.0,
            notes=f"lengths vanish exactly from level {series.level_labels[n - trailing]}",
            levels_used=series.level_labels,
        )
    half = vals[n // 2:]
    half_labels = series.level_labels[n // 2:]
    if all(v > 0 for v in half):
        xs = list(range(len(half)))
        ys = [math.log(v) for v in half]
        mean_x = sum(xs) / len(xs)
        mean_y = sum(ys) / len(ys)
        denom = sum((x - mean_x) ** 2 for x in xs)
        slope = (
            sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys)) / denom
            if denom
            else 0.0
        )
        if slope <= -LOG_SLOPE_DELTA:
            rate = math.exp(slope)
            tail = half[-1] * rate / (1 - rate)
            return Verdict(
                classification="ConvergentEvidence",
                rate=rate,
                tail_bound=tail,
                notes=f"fitted geometric decay on levels {half_labels}",
                levels_used=half_labels,
            )
    if min(half) >= DIVERGENCE_FLOOR:
        return Verdict(
            classification="DivergentEvidence",
            notes=(
                f"last-half lengths stay above the floor "
                f"{DIVERGENCE_FLOOR} on levels {half_labels}"
            ),
            levels_used=half_labels,
        )
    return Verdict(
        classification="Inconclusive",
        notes="no exact-zero tail, no geometric decay, no stable floor",
        levels_used=half_labels,
    )


@dataclass
class ConditionReport:
    theta: Theta
    k: int
    verdict: Verdict
    conditional: bool
    conclusion: str
    series: LengthSeries
    well_distributed: Optional[bool] = None
    linear_recurrence: Optional[LinearRecurrenceReport] = None
    diagnostics: Optional["FactorDiagnostics"] = None


def necessary_condition_check(
    data: CombinatorialData,
    theta: Theta,
    k: int,
    wd_report: Optional[WellDistributedReport] = None,
    strict: bool = False,
) -> ConditionReport:
    """If the data is well distributed and the series shows divergent
    evidence, an extension onto the k-torus rotation is ruled out at this
    scale; everything else is 'not ruled out'."""
    if wd_report is None:
        wd_report = check_well_distributed(data, strict=strict)
    series = length_series(data, theta, k)
    verdict = series_verdict(series)
    wd = wd_report.holds
    ruled_out = verdict.classification == "DivergentEvidence" and wd
    if ruled_out:
        conclusion = "extension ruled out at this scale"
    else:
        conclusion = "not ruled out"
    return ConditionReport(
        theta=theta,
        k=k,
        verdict=verdict,
        conditional=not wd,
        conclusion=conclusion,
        series=series,
        well_distributed=wd,
    )


@dataclass
class FactorDiagnostics:
    """Continuity diagnostics mirroring the factor-map construction:
    epsilon_table[N] bounds the torus spread of level-N return points,
    lr_bound_table[n0] is L-hat times the truncated tail sum from n0."""

    epsilon_table: Dict[int, float]
    lr_bound_table: Dict[int, float]
    subsampled_levels: List[int] = field(default_factory=list)


def sufficient_condition_check(
    data: CombinatorialData,
    theta: Theta,
    k: int,
    lr: Optional[LinearRecurrenceReport] = None,
    with_epsilon_table: bool = True,
) -> ConditionReport:
    """Convergent evidence plus linear-recurrence evidence indicates an
    extension; the diagnostics table carries the truncated continuity
    bounds L-hat * sum of tail lengths."""
    if lr is None:
        lr = linear_recurrence_report(data)
    series = length_series(data, theta, k)
    verdict = series_verdict(series)
    indicated = verdict.classification == "ConvergentEvidence"
    conditional = not lr.flagged or not lr.flat
    vals = series.values()
    lr_bounds: Dict[int, float] = {}
    for i, n0 in enumerate(series.level_labels):
        tail = sum(vals[i:])
        if verdict.rate is not None:
            # geometric tail estimate past the computed levels
            tail += vals[-1] * verdict.rate / (1 - verdict.rate)
        lr_bounds[n0] = lr.bound * tail
    eps: Dict[int, float] = {}
    subsampled: List[int] = []
    if with_epsilon_table and indicated:
        for i in range(data.depth):
            label = data.return_sets[i].level
            value, was_subsampled = continuity_modulus(data, theta, k, label)
            eps[label] = value
            if was_subsampled:
                subsampled.append(label)
    diagnostics = FactorDiagnostics(
        epsilon_table=eps,
        lr_bound_table=lr_bounds,
        subsampled_levels=subsampled,
    )
    return ConditionReport(
        theta=theta,
        k=k,
        verdict=verdict,
        conditional=conditional,
        conclusion="extension indicated" if indicated else "not indicated",
        series=series,
        linear_recurrence=lr,
        diagnostics=diagnostics,
    )


def factor_map_eval(theta: Theta, n: Point, k: int) -> TorusPoint:
    """The factor map on the orbit of the base point: h(A(n, x)) is the
    c-map image of n (h(x) = 0)."""
    return c_map(theta, n, k)


def continuity_modulus(
    data: CombinatorialData, theta: Theta, k: int, level: int
) -> Tuple[float, bool]:
    """Max torus distance between factor-map images over interior pairs
    of the level-N return set.

    Deterministic stride subsampling caps the work at MAX_MODULUS_PAIRS
    pairs; the flag reports whether subsampling happened.
    """
    labels = [rs.level for rs in data.return_sets]
    rs = data.return_sets[labels.index(level)]
    margin = rs.base.interior_margin
    pts = rs.base.interior_points(margin)
    n = len(pts)
    total = n * (n - 1) // 2
    if total == 0:
        return 0.0, False
    stride = max(1, -(-total // MAX_MODULUS_PAIRS))
    best = 0.0
    for t in range(0, total, stride):
        i, j = _unrank_pair(t, n)
        d = torus_distance(c_map(theta, sub(pts[j], pts[i]), k))
        if d > best:
            best = d
    return best, stride > 1


def _unrank_pair(t: int, n: int) -> Tuple[int, int]:
    """Pair (i, j), i < j < n, at position t in lexicographic order."""
    # position of the first pair with left index i is i*n - i*(i+1)/2 - i
    i = 0
    # solve smallest i with cumulative count > t via the quadratic bound
    # cum(i) = i*(2n - i - 1)/2
    lo, hi = 0, n - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid * (2 * n - mid - 1) // 2 <= t:
            lo = mid
        else:
            hi = mid - 1
    i = lo
    before = i * (2 * n - i - 1) // 2
    j = i + 1 + (t - before)
    return i, j


@dataclass
class ScanCandidate:
    theta: Theta
    score: float
    denominator: int
    source: str


def _farey_fractions(qmax: int) -> List[Fraction]:
    out = {Fraction(0)}
    for q in range(1, qmax + 1):
        for p in range(q):
            out.add(Fraction(p, q))
    return sorted(out)


def _convergents(value: float, qmax: int) -> List[Fraction]:
    """Continued-fraction convergents p/q of value with q <= qmax."""
    out = []
    a = math.floor(value)
    h0, k0, h1, k1 = 1, 0, a, 1
    x = value - a
    out.append(Fraction(h1, k1))
    for _ in range(64):
        if x == 0:
            break
        x = 1.0 / x
        a = math.floor(x)
        x -= a
        h0, k0, h1, k1 = h1, k1, h0 + a * h1, k0 + a * k1
        if k1 > qmax:
            break
        out.append(Fraction(h1, k1))
    return out


def theta_scan(
    data: CombinatorialData,
    k: int,
    qmax: int = 8,
    expansion_base: Optional[Sequence[int]] = None,
    expansion_max_power: int = 6,
    real_targets: Sequence[float] = (),
    max_levels: Optional[int] = None,
) -> List[ScanCandidate]:
    """Rank candidate rotation vectors by their summed theta-lengths.

    Candidates come from rational grids per coordinate (denominators up
    to qmax), expansion-adapted denominators q_i^m for substitution
    systems, and continued-fraction convergents of user-supplied reals.
    Ties break toward smaller denominators.
    """
    dim = data.return_sets[0].base.dim
    per_coord: List[List[Tuple[Fraction, str]]] = []
    for axis in range(dim):
        cands: Dict[Fraction, str] = {}
        for f in _farey_fractions(qmax):
            cands[f] = "grid"
        if expansion_base is not None:
            q = expansion_base[axis]
            for mpow in range(1, expansion_max_power + 1):
                den = q ** mpow
                if den > 4096:
                    break
                for p in range(den):
                    f = Fraction(p, den)
                    cands.setdefault(f, "expansion")
        for target in real_targets:
            for f in _convergents(target, 10 ** 6):
                cands.setdefault(f % 1, "convergent")
        per_coord.append(sorted(cands.items()))
    if not per_coord or not per_coord[0]:
        raise ValueError("empty candidate set")

    labels, fs = first_return_sets_of(data)
    if max_levels is not None:
        fs = fs[:max_levels]

    results: List[ScanCandidate] = []

    def score_theta(theta: Theta) -> float:
        return sum(theta_length(F, theta, k).value for F in fs)

    def rec(axis: int, chosen: List, sources: List[str]):
        if axis == dim:
            theta = tuple(chosen)
            den = math.lcm(*(f.denominator for f in theta))
            src = "+".join(sorted(set(sources)))
            results.append(
                ScanCandidate(
                    theta=theta,
                    score=score_theta(theta),
                    denominator=den,
                    source=src,
                )
            )
            return
        for f, src in per_coord[axis]:
            rec(axis + 1, chosen + [f], sources + [src])

    rec(0, [], [])
    results.sort(key=lambda c: (c.score, c.denominator, c.theta))
    return results
