"""Fractional author credit.

Two schemes exist. EQUAL gives every author 1/n. POSITIONAL weights authors by
byline role, with an intra-mural table (first and last author share a
university) and an extra-mural table (everything else, unknown affiliations
included).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from .corpus import CreditScheme, FieldTaxonomy, Professor, Publication
from .errors import CorpusError

INTRA = "intra_mural"
EXTRA = "extra_mural"

# role -> author index, in assignment priority order
_ROLES = {
    INTRA: ("first", "last"),
    EXTRA: ("first", "last", "second", "penultimate"),
}


@dataclass(frozen=True)
class CreditWeights:
    """Positional weight table. Each variant must sum to 1."""

    intra_first: float = 0.40
    intra_last: float = 0.40
    intra_others: float = 0.20
    extra_first: float = 0.30
    extra_last: float = 0.30
    extra_second: float = 0.15
    extra_penultimate: float = 0.15
    extra_others: float = 0.10

    def __post_init__(self):
        for variant in (INTRA, EXTRA):
            table = self.table(variant)
            if any(w < 0 for w in table.values()):
                raise ValueError(f"negative weight in {variant} table")
            if abs(sum(table.values()) - 1.0) > 1e-9:
                raise ValueError(f"{variant} weights sum to {sum(table.values())}, not 1")

    def table(self, variant: str) -> dict[str, float]:
        prefix = "intra_" if variant == INTRA else "extra_"
        return {
            name[len(prefix):]: getattr(self, name)
            for name in self.__dataclass_fields__
            if name.startswith(prefix)
        }


DEFAULT_WEIGHTS = CreditWeights()


def load_credit_config(path) -> CreditWeights:
    """Read ``scheme,role,weight`` rows overriding the default weight table."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"missing credit config: {path}")
    valid = set(CreditWeights.__dataclass_fields__)
    overrides = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            scheme = (row.get("scheme") or "").strip().lower()
            role = (row.get("role") or "").strip().lower()
            prefix = {"intra_mural": "intra", "intra": "intra", "extra_mural": "extra", "extra": "extra"}.get(scheme)
            key = f"{prefix}_{role}"
            if prefix is None or key not in valid:
                raise CorpusError(f"unknown scheme/role {scheme!r}/{role!r}", path, reader.line_num)
            try:
                overrides[key] = float(row["weight"])
            except (TypeError, ValueError):
                raise CorpusError("malformed weight", path, reader.line_num) from None
    try:
        return CreditWeights(**overrides)
    except ValueError as exc:
        raise CorpusError(str(exc), path) from None


def equal_fraction(n_authors: int) -> float:
    if n_authors < 1:
        raise ValueError("a publication needs at least one author")
    return 1.0 / n_authors


def is_intra_mural(pub: Publication) -> bool:
    first, last = pub.authors[0].university_id, pub.authors[-1].university_id
    return first is not None and first == last


def _role_index(role, n):
    return {"first": 0, "last": n - 1, "second": 1, "penultimate": n - 2}[role]


def positional_weights(n: int, intra: bool, weights: CreditWeights = DEFAULT_WEIGHTS) -> list[float]:
    """Weight per byline index for an ``n``-author publication."""
    if n < 1:
        raise ValueError("a publication needs at least one author")
    variant = INTRA if intra else EXTRA
    table = weights.table(variant)
    out = [0.0] * n
    taken = set()
    for role in _ROLES[variant]:
        i = _role_index(role, n)
        if 0 <= i < n and i not in taken:
            taken.add(i)
            out[i] = table[role]
    rest = [i for i in range(n) if i not in taken]
    if rest:
        share = table["others"] / len(rest)
        for i in rest:
            out[i] = share
    else:
        total = sum(out)
        out = [w / total for w in out]
    return out


def positional_credit(pub: Publication, weights: CreditWeights = DEFAULT_WEIGHTS) -> list[tuple[int, float]]:
    ws = positional_weights(pub.n_authors, is_intra_mural(pub), weights)
    return [(slot.position, w) for slot, w in zip(pub.authors, ws)]


def credit_vector(pub: Publication, scheme: CreditScheme, weights: CreditWeights = DEFAULT_WEIGHTS) -> list[tuple[int, float]]:
    if scheme is CreditScheme.EQUAL:
        f = equal_fraction(pub.n_authors)
        return [(slot.position, f) for slot in pub.authors]
    return positional_credit(pub, weights)


def author_fraction(
    pub: Publication,
    professor: Professor,
    taxonomy: FieldTaxonomy,
    weights: CreditWeights = DEFAULT_WEIGHTS,
) -> float:
    """The professor's share of ``pub`` under their SDS's credit scheme."""
    slot = pub.slot_of(professor.professor_id)
    if slot is None:
        raise ValueError(f"{professor.professor_id!r} is not an author of {pub.pub_id!r}")
    scheme = taxonomy.scheme_of(professor.sds_code)
    if scheme is CreditScheme.EQUAL:
        return equal_fraction(pub.n_authors)
    return positional_weights(pub.n_authors, is_intra_mural(pub), weights)[slot.position - 1]
