"""Field-normalized citation impact.

A publication's impact is its citation count divided by the mean citation
count of *cited* publications from the same year and subject category.
"""

from __future__ import annotations

import csv
import math
from collections import defaultdict
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .corpus import Publication
from .errors import CorpusError, DuplicateKeyError, MissingBaselineError

BASELINE_COLUMNS = ("year", "category", "mean_cited_citations")


class CitationBaseline(Mapping):
    """Read-only map ``(year, category) -> mean citations of cited publications``."""

    def __init__(self, entries=None):
        entries = dict(entries or {})
        for key, value in entries.items():
            if not value > 0:
                raise ValueError(f"baseline {key} must be positive, got {value}")
        self._entries = dict(sorted(entries.items()))

    def __getitem__(self, key):
        return self._entries[key]

    def __iter__(self) -> Iterator:
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)

    def __repr__(self):
        return f"CitationBaseline({len(self)} cells)"

    def overridden_by(self, other: "CitationBaseline") -> "CitationBaseline":
        """Union of both maps; ``other`` wins on overlapping cells."""
        merged = dict(self._entries)
        merged.update(other._entries)
        return CitationBaseline(merged)


def build_baselines(publications: Iterable[Publication]) -> CitationBaseline:
    cells = defaultdict(list)
    for pub in publications:
        if pub.citations > 0:
            for cat in pub.categories:
                cells[(pub.year, cat)].append(pub.citations)
    # fsum is exact-rounded, so the mean does not depend on input order
    return CitationBaseline({k: math.fsum(v) / len(v) for k, v in cells.items()})


def load_external_baselines(path) -> CitationBaseline:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"missing baselines file: {path}")
    entries = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in BASELINE_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise CorpusError(f"missing column(s) {', '.join(missing)}", path)
        for row in reader:
            line = reader.line_num
            try:
                key = (int(row["year"]), row["category"].strip())
                value = float(row["mean_cited_citations"])
            except (TypeError, ValueError):
                raise CorpusError("malformed baseline row", path, line) from None
            if not (value > 0 and math.isfinite(value)):
                raise CorpusError(f"non-positive baseline {value} for {key}", path, line)
            if key in entries:
                raise DuplicateKeyError(f"duplicate baseline cell {key}", path, line)
            entries[key] = value
    return CitationBaseline(entries)


def expected_citations(pub: Publication, baselines: Mapping) -> float:
    """Mean of the baselines of the publication's categories."""
    try:
        values = [baselines[(pub.year, cat)] for cat in pub.categories]
    except KeyError as exc:
        raise MissingBaselineError(f"publication {pub.pub_id!r}: no baseline for cell {exc.args[0]}") from None
    return math.fsum(values) / len(values)


def normalized_citations(pub: Publication, baselines: Mapping) -> float:
    if pub.citations == 0:
        return 0.0
    return pub.citations / expected_citations(pub, baselines)
