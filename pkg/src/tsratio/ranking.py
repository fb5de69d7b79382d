"""University league tables and their comparison.

Two metrics are ranked per scope: the TS ratio and FSS_U. The comparison
reports per-university rank, percentile and quartile shifts plus summary
statistics, and the module carries the correlation and outlier helpers used
for the figure datasets.
"""

from __future__ import annotations

import enum
import logging
import math
import statistics
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ComputationError
from .scoring import Scope, UniversityScore, competition_ranks, percentile_rank

log = logging.getLogger(__name__)


class Metric(enum.Enum):
    TS_RATIO = "ts_ratio"
    FSS_U = "fss_u"


DEFAULT_MIN_STAFF = {"SDS": 3, "UDA": 10, "ALL": 10}


@dataclass(frozen=True)
class RankingRow:
    university_id: str
    value: float
    rank: int
    percentile: float
    staff: int | None = None


@dataclass(frozen=True)
class RankingList:
    scope: Scope
    metric: Metric
    rows: tuple[RankingRow, ...]

    @property
    def population(self) -> int:
        return len(self.rows)

    @classmethod
    def from_ranks(cls, scope, metric, entries) -> "RankingList":
        """Build from precomputed ``(university_id, value, rank[, staff])`` tuples."""
        entries = list(entries)
        n = len(entries)
        if n < 2:
            raise ComputationError("a ranking needs at least two universities")
        rows = [
            RankingRow(e[0], e[1], e[2], percentile_rank(e[2], n), e[3] if len(e) > 3 else None)
            for e in entries
        ]
        rows.sort(key=lambda r: (r.rank, r.university_id))
        return cls(scope, metric, tuple(rows))


def build_ranking(
    metric: Metric,
    scope: Scope,
    university_scores: Iterable[UniversityScore],
    min_staff: int | None = None,
) -> RankingList:
    if min_staff is None:
        min_staff = DEFAULT_MIN_STAFF[scope.kind]
    picked = []
    for s in university_scores:
        if s.scope != scope or s.staff_count < min_staff:
            continue
        value = s.ts_ratio if metric is Metric.TS_RATIO else s.fss_u
        if value is None:
            log.warning("%s has no defined %s in %s; left out", s.university_id, metric.value, scope)
            continue
        picked.append((s.university_id, value, s.staff_count))
    if len(picked) < 2:
        raise ComputationError(
            f"{len(picked)} qualifying universit{'y' if len(picked) == 1 else 'ies'} in {scope} "
            f"(min staff {min_staff}); need at least 2"
        )
    picked.sort(key=lambda e: e[0])
    ranks = competition_ranks([v for _, v, _ in picked])
    return RankingList.from_ranks(scope, metric, [(u, v, r, st) for (u, v, st), r in zip(picked, ranks)])


def quartile_of(percentile: float) -> int:
    if percentile >= 75:
        return 1
    if percentile >= 50:
        return 2
    if percentile >= 25:
        return 3
    return 4


@dataclass(frozen=True)
class ShiftRow:
    university_id: str
    rank_a: int
    rank_b: int
    rank_shift: int
    percentile_shift: float
    quartile_a: int
    quartile_b: int
    quartile_shift: int


@dataclass(frozen=True)
class ComparisonSummary:
    n: int
    share_shifting_rank: float
    avg_percentile_shift: float
    max_percentile_shift: float
    share_shifting_quartile: float
    max_quartile_shift: int
    spearman: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "share_shifting_rank": self.share_shifting_rank,
            "avg_percentile_shift": self.avg_percentile_shift,
            "max_percentile_shift": self.max_percentile_shift,
            "share_shifting_quartile": self.share_shifting_quartile,
            "max_quartile_shift": self.max_quartile_shift,
            "spearman": self.spearman,
        }


@dataclass(frozen=True)
class RankComparison:
    rows: tuple[ShiftRow, ...]
    summary: ComparisonSummary


def compare_rankings(a: RankingList, b: RankingList) -> RankComparison:
    rows_a = {r.university_id: r for r in a.rows}
    rows_b = {r.university_id: r for r in b.rows}
    common = sorted(rows_a.keys() & rows_b.keys())
    dropped = sorted(rows_a.keys() ^ rows_b.keys())
    if dropped:
        log.warning("rankings cover different universities; comparing the %d in common, dropping %s",
                    len(common), ", ".join(dropped))
    n = len(common)
    if n < 2:
        raise ComputationError(f"only {n} universities in common; need at least 2")
    shifts = []
    for u in common:
        ra, rb = rows_a[u], rows_b[u]
        d = abs(ra.rank - rb.rank)
        qa, qb = quartile_of(ra.percentile), quartile_of(rb.percentile)
        shifts.append(ShiftRow(u, ra.rank, rb.rank, d, 100 * d / (n - 1), qa, qb, abs(qa - qb)))
    shifts.sort(key=lambda s: (s.rank_a, s.university_id))
    summary = ComparisonSummary(
        n=n,
        share_shifting_rank=sum(s.rank_shift > 0 for s in shifts) / n,
        avg_percentile_shift=math.fsum(s.percentile_shift for s in shifts) / n,
        max_percentile_shift=max(s.percentile_shift for s in shifts),
        share_shifting_quartile=sum(s.quartile_shift > 0 for s in shifts) / n,
        max_quartile_shift=max(s.quartile_shift for s in shifts),
        spearman=spearman([(s.rank_a, s.rank_b) for s in shifts]),
    )
    return RankComparison(tuple(shifts), summary)


def mid_ranks(values: Sequence[float]) -> list[float]:
    """Ascending ranks with ties replaced by the mean of the positions they span."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    out = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        mid = (i + j) / 2 + 1
        for k in range(i, j + 1):
            out[order[k]] = mid
        i = j + 1
    return out


def pearson(points: Sequence[tuple[float, float]]) -> float:
    n = len(points)
    if n < 2:
        raise ComputationError("correlation needs at least two points")
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    mx, my = math.fsum(xs) / n, math.fsum(ys) / n
    sxx = math.fsum((x - mx) ** 2 for x in xs)
    syy = math.fsum((y - my) ** 2 for y in ys)
    if sxx == 0 or syy == 0:
        raise ComputationError("correlation undefined for a constant coordinate")
    sxy = math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    r = sxy / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def spearman(rank_pairs: Sequence[tuple[float, float]]) -> float:
    """Tie-corrected Spearman: Pearson correlation of the mid-rank vectors.

    For competition ranks a tied group at rank r of size k maps to
    r + (k - 1) / 2, which is what mid-ranking the ranks themselves yields.
    """
    a = mid_ranks([p[0] for p in rank_pairs])
    b = mid_ranks([p[1] for p in rank_pairs])
    return pearson(list(zip(a, b)))


def flag_outliers(values: Sequence[tuple[str, float]], method: str = "tukey", k: float = 1.5) -> set[str]:
    """Tukey fences with linearly interpolated quartiles.

    This is a heuristic outlier rule; it is labelled as such in report metadata.
    """
    if method.lower() != "tukey":
        raise ValueError(f"unknown outlier method {method!r}")
    if len(values) < 4:
        raise ComputationError("outlier fences need at least four values")
    q1, _, q3 = statistics.quantiles([v for _, v in values], n=4, method="inclusive")
    iqr = q3 - q1
    lo, hi = q1 - k * iqr, q3 + k * iqr
    return {u for u, v in values if v > hi or v < lo}


def flag_large_shifts(comparison: RankComparison, min_percentile_shift: float) -> set[str]:
    """Universities whose percentile shift reaches the threshold."""
    return {s.university_id for s in comparison.rows if s.percentile_shift >= min_percentile_shift}


def consecutive_gaps(values: Sequence[float]) -> list[float]:
    """Differences between neighbouring values sorted in descending order."""
    s = sorted(values, reverse=True)
    return [s[i] - s[i + 1] for i in range(len(s) - 1)]
