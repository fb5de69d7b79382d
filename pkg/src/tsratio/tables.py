"""Reading comparison tables (ranks already assigned) into ranking lists.

The package ships two such tables from a published national study: the
Agricultural and veterinary sciences discipline (29 universities) and the
all-discipline national list (64 universities). Columns::

    university_id,staff,ts_ratio,rank_ts,fss_u,rank_fss[,rank_shift,percentile_shift,quartile_shift]

``ts_ratio`` is a percentage. The trailing columns are the published shifts,
kept for cross-checking only.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import CorpusError
from .ranking import Metric, RankingList
from .scoring import ALL, Scope

REQUIRED = ("university_id", "staff", "ts_ratio", "rank_ts", "fss_u", "rank_fss")

BUNDLED = {
    "uda7": ("uda7_comparison.csv", Scope("UDA", "7")),
    "national": ("national_comparison.csv", ALL),
}


@dataclass(frozen=True)
class ComparisonTable:
    scope: Scope
    rows: tuple[dict, ...]

    @property
    def staff(self) -> dict[str, int]:
        return {r["university_id"]: r["staff"] for r in self.rows}

    @property
    def ts_ratio(self) -> dict[str, float]:
        """TS ratio as a fraction."""
        return {r["university_id"]: r["ts_ratio"] / 100 for r in self.rows}

    def ts_ranking(self) -> RankingList:
        return RankingList.from_ranks(
            self.scope, Metric.TS_RATIO,
            [(r["university_id"], r["ts_ratio"] / 100, r["rank_ts"], r["staff"]) for r in self.rows],
        )

    def fss_ranking(self) -> RankingList:
        return RankingList.from_ranks(
            self.scope, Metric.FSS_U,
            [(r["university_id"], r["fss_u"], r["rank_fss"], r["staff"]) for r in self.rows],
        )


def read_comparison_table(path, scope: Scope = ALL) -> ComparisonTable:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"missing table: {path}")
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in REQUIRED if c not in (reader.fieldnames or [])]
        if missing:
            raise CorpusError(f"missing column(s) {', '.join(missing)}", path)
        for raw in reader:
            try:
                row = {
                    "university_id": raw["university_id"].strip(),
                    "staff": int(raw["staff"]),
                    "ts_ratio": float(raw["ts_ratio"].rstrip("%")),
                    "rank_ts": int(raw["rank_ts"]),
                    "fss_u": float(raw["fss_u"]),
                    "rank_fss": int(raw["rank_fss"]),
                }
                for col, conv in (("rank_shift", int), ("percentile_shift", float), ("quartile_shift", int)):
                    if raw.get(col):
                        row[col] = conv(raw[col])
            except (TypeError, ValueError):
                raise CorpusError("malformed table row", path, reader.line_num) from None
            rows.append(row)
    return ComparisonTable(scope, tuple(rows))


def bundled_table(name: str) -> ComparisonTable:
    """``"uda7"`` or ``"national"``."""
    filename, scope = BUNDLED[name]
    with resources.as_file(resources.files("tsratio") / "data" / filename) as p:
        return read_comparison_table(p, scope)


def open_table(source: str, scope: Scope | None = None) -> ComparisonTable:
    """A file path, or a bundled table name (which brings its own scope)."""
    if source in BUNDLED and not Path(source).exists():
        table = bundled_table(source)
        return table if scope is None else ComparisonTable(scope, table.rows)
    return read_comparison_table(source, ALL if scope is None else scope)
