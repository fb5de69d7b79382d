"""Professor productivity (FSS), national per-SDS rankings, top-scientist flags,
and university-level aggregates.
"""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from datetime import date
from typing import Iterable, Mapping, Sequence

from .corpus import Corpus, FieldTaxonomy, Professor, years_active
from .credit import DEFAULT_WEIGHTS, CreditWeights, author_fraction
from .errors import ComputationError, NotActiveError, UnknownReferenceError
from .impact import normalized_citations

log = logging.getLogger(__name__)

DEFAULT_TOP_PERCENTILE = 90.0


@dataclass(frozen=True, order=True)
class Scope:
    """Aggregation scope: one SDS, one UDA, or the whole taxonomy."""

    kind: str
    code: str = ""

    def __post_init__(self):
        if self.kind not in ("SDS", "UDA", "ALL"):
            raise ValueError(f"unknown scope kind {self.kind!r}")
        if (self.kind == "ALL") != (self.code == ""):
            raise ValueError("ALL takes no code; SDS and UDA scopes need one")

    @classmethod
    def parse(cls, text: str) -> "Scope":
        kind, _, code = text.partition(":")
        return cls(kind.strip().upper(), code.strip())

    def __str__(self):
        return self.kind if self.kind == "ALL" else f"{self.kind}:{self.code}"

    def contains(self, sds_code: str, taxonomy: FieldTaxonomy) -> bool:
        if self.kind == "ALL":
            return True
        if self.kind == "SDS":
            return sds_code == self.code
        return taxonomy.uda_of(sds_code) == self.code


ALL = Scope("ALL")


@dataclass(frozen=True)
class ScoreCard:
    professor_id: str
    sds_code: str
    university_id: str
    fss: float
    rank: int
    population: int
    percentile: float | None
    is_top: bool

    @property
    def is_productive(self) -> bool:
        return self.fss > 0


@dataclass(frozen=True)
class UniversityScore:
    university_id: str
    scope: Scope
    staff_count: int
    ts_count: int
    fss_u: float | None

    @property
    def ts_ratio(self) -> float:
        return self.ts_count / self.staff_count


# --- professor level ---------------------------------------------------------


def in_window(year: int, window: tuple[date, date]) -> bool:
    return window[0].year <= year <= window[1].year


def fss_terms(prof: Professor, corpus: Corpus, baselines: Mapping, window, weights=DEFAULT_WEIGHTS) -> list[float]:
    """Per-publication terms (normalized citations x author share), ordered by pub_id."""
    return [
        normalized_citations(pub, baselines) * author_fraction(pub, prof, corpus.taxonomy, weights)
        for pub in corpus.publications_of(prof.professor_id)
        if in_window(pub.year, window)
    ]


def fss_professor(
    prof: Professor,
    corpus: Corpus,
    baselines: Mapping,
    window: tuple[date, date],
    weights: CreditWeights = DEFAULT_WEIGHTS,
) -> float:
    t = years_active(prof, window)
    return math.fsum(fss_terms(prof, corpus, baselines, window, weights)) / t


def competition_ranks(values: Sequence[float]) -> list[int]:
    """Descending competition ranks: ties share the best rank, the next rank skips."""
    order = sorted(range(len(values)), key=lambda i: -values[i])
    ranks = [0] * len(values)
    for pos, i in enumerate(order):
        if pos and values[i] == values[order[pos - 1]]:
            ranks[i] = ranks[order[pos - 1]]
        else:
            ranks[i] = pos + 1
    return ranks


def percentile_rank(rank: int, population: int) -> float:
    """100 (N - rank) / (N - 1); full precision, round only for display."""
    if population < 2:
        raise ComputationError(f"percentile undefined for a population of {population}")
    if not 1 <= rank <= population:
        raise ValueError(f"rank {rank} outside 1..{population}")
    return 100 * (population - rank) / (population - 1)


def _rank_group(cards, threshold):
    """Rank one SDS's cards; ``cards`` hold (professor, fss) pairs."""
    values = [fss for _, fss in cards]
    ranks = competition_ranks(values)
    n = len(cards)
    out = []
    for (prof, fss), rank in zip(cards, ranks):
        pct = percentile_rank(rank, n) if n >= 2 else None
        top = pct is not None and pct >= threshold and fss > 0
        out.append(ScoreCard(prof.professor_id, prof.sds_code, prof.university_id, fss, rank, n, pct, top))
    out.sort(key=lambda c: (c.rank, c.professor_id))
    return out


def score_professors(
    corpus: Corpus,
    baselines: Mapping,
    window: tuple[date, date],
    weights: CreditWeights = DEFAULT_WEIGHTS,
    threshold: float = DEFAULT_TOP_PERCENTILE,
) -> list[ScoreCard]:
    """Score every professor active in the window and rank them nationally within their SDS.

    Returned cards are ordered by SDS code, then rank, then professor_id.
    """
    groups = defaultdict(list)
    for prof in sorted(corpus.roster, key=lambda p: p.professor_id):
        try:
            fss = fss_professor(prof, corpus, baselines, window, weights)
        except NotActiveError:
            log.warning("professor %s not active in window; skipped", prof.professor_id)
            continue
        groups[prof.sds_code].append((prof, fss))
    cards = []
    for sds in sorted(groups):
        cards.extend(_rank_group(groups[sds], threshold))
    return cards


def sds_rank_list(sds_code: str, scorecards: Iterable[ScoreCard]) -> list[ScoreCard]:
    cards = [c for c in scorecards if c.sds_code == sds_code]
    if not cards:
        raise UnknownReferenceError(f"no scored professors in sds {sds_code!r}")
    return sorted(cards, key=lambda c: (c.rank, c.professor_id))


def flag_top_scientists(rank_list: Sequence[ScoreCard], threshold: float = DEFAULT_TOP_PERCENTILE) -> set[str]:
    """Professors at or above the threshold percentile, boundary ties included."""
    n = len(rank_list)
    if n < 2:
        return set()
    return {
        c.professor_id
        for c in rank_list
        if c.fss > 0 and percentile_rank(c.rank, n) >= threshold
    }


def mean_productive_fss(sds_code: str, scorecards: Iterable[ScoreCard]) -> float:
    values = sorted(c.fss for c in scorecards if c.sds_code == sds_code and c.fss > 0)
    if not values:
        raise ComputationError(f"no productive professor in sds {sds_code!r}")
    return math.fsum(values) / len(values)


def productive_means(scorecards: Iterable[ScoreCard]) -> dict[str, float]:
    """National productive mean per SDS; SDSs without productive staff are absent."""
    acc = defaultdict(list)
    for c in scorecards:
        if c.fss > 0:
            acc[c.sds_code].append(c.fss)
    return {k: math.fsum(v) / len(v) for k, v in acc.items()}


# --- university level --------------------------------------------------------


def _scope_cards(university_id, scope, scorecards, taxonomy):
    return sorted(
        (c for c in scorecards if c.university_id == university_id and scope.contains(c.sds_code, taxonomy)),
        key=lambda c: c.professor_id,
    )


def fss_university(university_id: str, scope: Scope, scorecards: Sequence[ScoreCard], taxonomy: FieldTaxonomy) -> float:
    """Mean over the university's staff in scope of fss / national productive mean of their SDS."""
    cards = _scope_cards(university_id, scope, scorecards, taxonomy)
    if not cards:
        raise ComputationError(f"university {university_id!r} has no staff in scope {scope}")
    means = productive_means(scorecards)
    terms = [c.fss / means[c.sds_code] for c in cards if c.sds_code in means]
    if not terms:
        raise ComputationError(f"university {university_id!r}: no SDS in scope {scope} has productive staff")
    return math.fsum(terms) / len(terms)


def ts_ratio(university_id: str, scope: Scope, scorecards: Sequence[ScoreCard], taxonomy: FieldTaxonomy) -> float:
    cards = _scope_cards(university_id, scope, scorecards, taxonomy)
    if not cards:
        raise ComputationError(f"university {university_id!r} has no staff in scope {scope}")
    return sum(c.is_top for c in cards) / len(cards)


def scopes_for(taxonomy: FieldTaxonomy) -> list[Scope]:
    return (
        [ALL]
        + [Scope("UDA", u) for u in taxonomy.uda_codes]
        + [Scope("SDS", e.sds_code) for e in taxonomy.sds_entries]
    )


def university_scores(
    scorecards: Sequence[ScoreCard],
    taxonomy: FieldTaxonomy,
    scopes: Iterable[Scope] | None = None,
) -> list[UniversityScore]:
    """Staff, TS count and FSS_U for every (scope, university) pair with staff.

    Staff in SDSs with no productive professor nationally are left out of the
    FSS_U average; fss_u is None if that leaves nobody.
    """
    wanted = set(scopes_for(taxonomy) if scopes is None else scopes)
    means = productive_means(scorecards)
    skipped = sorted({c.sds_code for c in scorecards} - set(means))
    for sds in skipped:
        log.warning("sds %s has no productive professor; excluded from FSS_U", sds)

    acc = defaultdict(lambda: [0, 0, []])
    for c in sorted(scorecards, key=lambda c: c.professor_id):
        uda = taxonomy.uda_of(c.sds_code)
        for scope in (ALL, Scope("UDA", uda), Scope("SDS", c.sds_code)):
            if scope not in wanted:
                continue
            slot = acc[(scope, c.university_id)]
            slot[0] += 1
            slot[1] += c.is_top
            if c.sds_code in means:
                slot[2].append(c.fss / means[c.sds_code])

    out = []
    for (scope, uni), (staff, ts, terms) in sorted(acc.items()):
        fss_u = math.fsum(terms) / len(terms) if terms else None
        out.append(UniversityScore(uni, scope, staff, ts, fss_u))
    return out
