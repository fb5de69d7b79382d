"""Loading, validation and indexing of the taxonomy, roster and publications.

All four inputs are UTF-8 CSV files with a header row; list-valued fields use
``|`` as separator and dates are ISO-8601::

    taxonomy.csv      sds_code,sds_name,uda_code,uda_name,credit_scheme
    roster.csv        professor_id,university_id,sds_code,start_date,end_date
    publications.csv  pub_id,year,citations,categories
    authorships.csv   pub_id,position,professor_id,university_id

Everything returned here is immutable; downstream modules share it freely.
"""

from __future__ import annotations

import csv
import enum
import io
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import CorpusError, DuplicateKeyError, NotActiveError, UnknownReferenceError

TAXONOMY_COLUMNS = ("sds_code", "sds_name", "uda_code", "uda_name", "credit_scheme")
ROSTER_COLUMNS = ("professor_id", "university_id", "sds_code", "start_date", "end_date")
PUBLICATION_COLUMNS = ("pub_id", "year", "citations", "categories")
AUTHORSHIP_COLUMNS = ("pub_id", "position", "professor_id", "university_id")

LIST_SEP = "|"
DAYS_PER_YEAR = 365.25


class CreditScheme(enum.Enum):
    EQUAL = "EQUAL"
    POSITIONAL = "POSITIONAL"


@dataclass(frozen=True)
class SdsEntry:
    sds_code: str
    sds_name: str
    uda_code: str
    credit_scheme: CreditScheme


@dataclass(frozen=True)
class UdaEntry:
    uda_code: str
    uda_name: str


def _code_key(code: str):
    # numeric codes sort as numbers ("2" before "10")
    return (0, int(code), "") if code.isdigit() else (1, 0, code)


@dataclass(frozen=True)
class FieldTaxonomy:
    sds_entries: tuple[SdsEntry, ...]
    uda_entries: tuple[UdaEntry, ...]
    _sds: Mapping[str, SdsEntry] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        # canonical order, so outputs never depend on file row order
        object.__setattr__(self, "sds_entries", tuple(sorted(self.sds_entries, key=lambda e: _code_key(e.sds_code))))
        object.__setattr__(self, "uda_entries", tuple(sorted(self.uda_entries, key=lambda u: _code_key(u.uda_code))))
        sds = {}
        for e in self.sds_entries:
            if e.sds_code in sds:
                raise DuplicateKeyError(f"duplicate sds_code {e.sds_code!r}")
            sds[e.sds_code] = e
        udas = {u.uda_code for u in self.uda_entries}
        if len(udas) != len(self.uda_entries):
            raise DuplicateKeyError("duplicate uda_code")
        for e in self.sds_entries:
            if e.uda_code not in udas:
                raise UnknownReferenceError(
                    f"sds_code {e.sds_code!r} references unknown uda_code {e.uda_code!r}"
                )
        object.__setattr__(self, "_sds", sds)

    def __contains__(self, sds_code):
        return sds_code in self._sds

    def sds(self, sds_code: str) -> SdsEntry:
        try:
            return self._sds[sds_code]
        except KeyError:
            raise UnknownReferenceError(f"unknown sds_code {sds_code!r}") from None

    def uda_of(self, sds_code: str) -> str:
        return self.sds(sds_code).uda_code

    def scheme_of(self, sds_code: str) -> CreditScheme:
        return self.sds(sds_code).credit_scheme

    @property
    def uda_codes(self) -> list[str]:
        return [u.uda_code for u in self.uda_entries]

    def sds_in_uda(self, uda_code: str) -> list[str]:
        return [e.sds_code for e in self.sds_entries if e.uda_code == uda_code]


@dataclass(frozen=True)
class Professor:
    professor_id: str
    university_id: str
    sds_code: str
    start_date: date
    end_date: date | None = None

    def __post_init__(self):
        if self.end_date is not None and self.end_date < self.start_date:
            raise CorpusError(
                f"professor {self.professor_id!r}: start_date {self.start_date} after end_date {self.end_date}"
            )


@dataclass(frozen=True)
class AuthorSlot:
    position: int
    professor_id: str | None = None
    university_id: str | None = None

    @property
    def is_internal(self) -> bool:
        return self.professor_id is not None


@dataclass(frozen=True)
class Publication:
    pub_id: str
    year: int
    citations: int
    categories: tuple[str, ...]
    authors: tuple[AuthorSlot, ...]

    def __post_init__(self):
        if self.citations < 0:
            raise CorpusError(f"publication {self.pub_id!r}: negative citations")
        if not self.categories:
            raise CorpusError(f"publication {self.pub_id!r}: no subject category")
        if len(set(self.categories)) != len(self.categories):
            raise CorpusError(f"publication {self.pub_id!r}: repeated subject category")
        if not self.authors:
            raise CorpusError(f"publication {self.pub_id!r}: no authors")
        positions = [a.position for a in self.authors]
        if positions != list(range(1, len(positions) + 1)):
            raise CorpusError(
                f"publication {self.pub_id!r}: author positions {positions} are not contiguous from 1"
            )
        internal = [a.professor_id for a in self.authors if a.professor_id is not None]
        if len(set(internal)) != len(internal):
            raise DuplicateKeyError(f"publication {self.pub_id!r}: professor listed twice")

    @property
    def n_authors(self) -> int:
        return len(self.authors)

    def slot_of(self, professor_id: str) -> AuthorSlot | None:
        for a in self.authors:
            if a.professor_id == professor_id:
                return a
        return None


@dataclass(frozen=True)
class Corpus:
    """The three loaded inputs plus lookup indexes."""

    taxonomy: FieldTaxonomy
    roster: tuple[Professor, ...]
    publications: tuple[Publication, ...]
    _by_id: Mapping[str, Professor] = field(init=False, repr=False, compare=False)
    _pubs_by_prof: Mapping[str, tuple[Publication, ...]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_by_id", {p.professor_id: p for p in self.roster})
        acc = defaultdict(list)
        for pub in sorted(self.publications, key=lambda p: p.pub_id):
            for slot in pub.authors:
                if slot.professor_id is not None:
                    acc[slot.professor_id].append(pub)
        object.__setattr__(self, "_pubs_by_prof", {k: tuple(v) for k, v in acc.items()})

    def professor(self, professor_id: str) -> Professor:
        return self._by_id[professor_id]

    def publications_of(self, professor_id: str) -> tuple[Publication, ...]:
        """Publications with the professor on the byline, ordered by pub_id."""
        return self._pubs_by_prof.get(professor_id, ())


@dataclass
class ValidationReport:
    n_universities: int
    n_professors: int
    n_publications: int
    n_sds_staffed: int
    unproductive: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_dict(self) -> dict:
        return {
            "counts": {
                "universities": self.n_universities,
                "professors": self.n_professors,
                "publications": self.n_publications,
                "sds_with_staff": self.n_sds_staffed,
                "unproductive_professors": len(self.unproductive),
            },
            "errors": list(self.errors),
            "warnings": list(self.warnings),
        }


# --- reading helpers ---------------------------------------------------------


def _read_rows(path, columns):
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"missing input file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in columns if c not in header]
        if missing:
            raise CorpusError(f"missing column(s) {', '.join(missing)}", path)
        for row in reader:
            if None in row or any(row[c] is None for c in columns):
                raise CorpusError("wrong number of fields", path, reader.line_num)
            yield reader.line_num, {c: row[c].strip() for c in columns}


def _parse_date(text, path, line, what):
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise CorpusError(f"invalid {what} {text!r}", path, line) from None


def _parse_int(text, path, line, what):
    try:
        return int(text)
    except ValueError:
        raise CorpusError(f"invalid {what} {text!r}", path, line) from None


def _split_list(text):
    return tuple(x.strip() for x in text.split(LIST_SEP) if x.strip())


# --- loaders -----------------------------------------------------------------


def load_taxonomy(path) -> FieldTaxonomy:
    sds_entries = []
    udas: dict[str, str] = {}
    seen = set()
    for line, row in _read_rows(path, TAXONOMY_COLUMNS):
        code = row["sds_code"]
        if not code or not row["uda_code"]:
            raise CorpusError("empty sds_code or uda_code", path, line)
        if code in seen:
            raise DuplicateKeyError(f"duplicate sds_code {code!r}", path, line)
        seen.add(code)
        try:
            scheme = CreditScheme(row["credit_scheme"].upper())
        except ValueError:
            raise CorpusError(f"unknown credit_scheme {row['credit_scheme']!r}", path, line) from None
        uda, uda_name = row["uda_code"], row["uda_name"]
        if uda in udas and udas[uda] != uda_name:
            raise CorpusError(f"uda_code {uda!r} has conflicting names", path, line)
        udas.setdefault(uda, uda_name)
        sds_entries.append(SdsEntry(code, row["sds_name"], uda, scheme))
    return FieldTaxonomy(tuple(sds_entries), tuple(UdaEntry(c, n) for c, n in udas.items()))


def load_roster(path, taxonomy: FieldTaxonomy) -> list[Professor]:
    roster = []
    seen = set()
    for line, row in _read_rows(path, ROSTER_COLUMNS):
        pid = row["professor_id"]
        if not pid or not row["university_id"]:
            raise CorpusError("empty professor_id or university_id", path, line)
        if pid in seen:
            raise DuplicateKeyError(f"duplicate professor_id {pid!r}", path, line)
        seen.add(pid)
        if row["sds_code"] not in taxonomy:
            raise UnknownReferenceError(f"unknown sds_code {row['sds_code']!r}", path, line)
        start = _parse_date(row["start_date"], path, line, "start_date")
        end = _parse_date(row["end_date"], path, line, "end_date") if row["end_date"] else None
        if end is not None and end < start:
            raise CorpusError(f"start_date {start} after end_date {end}", path, line)
        roster.append(Professor(pid, row["university_id"], row["sds_code"], start, end))
    return roster


def university_index(roster: Iterable[Professor]) -> dict[str, int]:
    """Staff count per university_id."""
    return dict(Counter(p.university_id for p in roster))


def load_publications(path_pubs, path_authorships, roster: Sequence[Professor]) -> list[Publication]:
    known = {p.professor_id for p in roster}
    headers = {}
    for line, row in _read_rows(path_pubs, PUBLICATION_COLUMNS):
        pid = row["pub_id"]
        if not pid:
            raise CorpusError("empty pub_id", path_pubs, line)
        if pid in headers:
            raise DuplicateKeyError(f"duplicate pub_id {pid!r}", path_pubs, line)
        year = _parse_int(row["year"], path_pubs, line, "year")
        cites = _parse_int(row["citations"], path_pubs, line, "citations")
        if cites < 0:
            raise CorpusError(f"negative citations for {pid!r}", path_pubs, line)
        cats = _split_list(row["categories"])
        if not cats:
            raise CorpusError(f"no categories for {pid!r}", path_pubs, line)
        headers[pid] = (year, cites, cats)

    slots: dict[str, dict[int, AuthorSlot]] = defaultdict(dict)
    for line, row in _read_rows(path_authorships, AUTHORSHIP_COLUMNS):
        pid = row["pub_id"]
        if pid not in headers:
            raise UnknownReferenceError(f"authorship references unknown pub_id {pid!r}", path_authorships, line)
        pos = _parse_int(row["position"], path_authorships, line, "position")
        if pos < 1:
            raise CorpusError(f"position {pos} < 1 in {pid!r}", path_authorships, line)
        if pos in slots[pid]:
            raise DuplicateKeyError(f"duplicate position {pos} in {pid!r}", path_authorships, line)
        prof = row["professor_id"] or None
        if prof is not None and prof not in known:
            raise UnknownReferenceError(
                f"professor_id {prof!r} in {pid!r} is not in the roster", path_authorships, line
            )
        slots[pid][pos] = AuthorSlot(pos, prof, row["university_id"] or None)

    pubs = []
    for pid, (year, cites, cats) in headers.items():
        by_pos = slots.get(pid)
        if not by_pos:
            raise CorpusError(f"publication {pid!r} has no authorship rows", path_authorships)
        positions = sorted(by_pos)
        if positions != list(range(1, len(positions) + 1)):
            raise CorpusError(
                f"publication {pid!r}: author positions {positions} are not contiguous from 1",
                path_authorships,
            )
        try:
            pubs.append(Publication(pid, year, cites, cats, tuple(by_pos[p] for p in positions)))
        except CorpusError as exc:
            raise CorpusError(str(exc), path_authorships) from None
    return pubs


def load_corpus(directory) -> Corpus:
    """Load taxonomy.csv, roster.csv, publications.csv and authorships.csv from one directory."""
    d = Path(directory)
    taxonomy = load_taxonomy(d / "taxonomy.csv")
    roster = load_roster(d / "roster.csv", taxonomy)
    pubs = load_publications(d / "publications.csv", d / "authorships.csv", roster)
    return Corpus(taxonomy, tuple(roster), tuple(pubs))


def validate_corpus(taxonomy, roster, publications, window=None) -> ValidationReport:
    roster = list(roster)
    counts = Counter()
    for pub in publications:
        for slot in pub.authors:
            if slot.professor_id is not None:
                counts[slot.professor_id] += 1
    report = ValidationReport(
        n_universities=len({p.university_id for p in roster}),
        n_professors=len(roster),
        n_publications=len(publications),
        n_sds_staffed=len({p.sds_code for p in roster}),
    )
    known = {p.professor_id for p in roster}
    for prof in sorted(roster, key=lambda p: p.professor_id):
        if prof.sds_code not in taxonomy:
            report.errors.append(f"professor {prof.professor_id}: unknown sds_code {prof.sds_code}")
        if counts[prof.professor_id] == 0:
            report.unproductive.append(prof.professor_id)
            report.warnings.append(f"professor {prof.professor_id} has no publications")
        if window is not None:
            try:
                years_active(prof, window)
            except NotActiveError:
                report.warnings.append(f"professor {prof.professor_id} not active in window")
    for pub in sorted(publications, key=lambda p: p.pub_id):
        for slot in pub.authors:
            if slot.professor_id is not None and slot.professor_id not in known:
                report.errors.append(f"publication {pub.pub_id}: unknown professor_id {slot.professor_id}")
        if window is not None and pub.year > window[1].year:
            report.warnings.append(f"publication {pub.pub_id}: year {pub.year} after window end")
    return report


def years_active(professor: Professor, window: tuple[date, date]) -> float:
    """Years of employment inside the window: inclusive day count / 365.25, 2 decimals.

    Intersections shorter than a rounding step still count as 0.01 years so
    that t stays positive.
    """
    w_start, w_end = window
    start = max(professor.start_date, w_start)
    end = w_end if professor.end_date is None else min(professor.end_date, w_end)
    if end < start:
        raise NotActiveError(f"professor {professor.professor_id!r} not active in {w_start}..{w_end}")
    days = (end - start).days + 1
    return max(round(days / DAYS_PER_YEAR, 2), 0.01)


def window_years(window: tuple[date, date]) -> float:
    days = (window[1] - window[0]).days + 1
    return round(days / DAYS_PER_YEAR, 2)


# --- canonical serialization -------------------------------------------------


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()


def serialize_corpus(corpus: Corpus) -> dict[str, str]:
    """Canonical CSV text for each input file, rows sorted by id."""
    tax = corpus.taxonomy
    uda_names = {u.uda_code: u.uda_name for u in tax.uda_entries}
    taxonomy = _csv_text(
        TAXONOMY_COLUMNS,
        [
            (e.sds_code, e.sds_name, e.uda_code, uda_names[e.uda_code], e.credit_scheme.value)
            for e in sorted(tax.sds_entries, key=lambda e: e.sds_code)
        ],
    )
    roster = _csv_text(
        ROSTER_COLUMNS,
        [
            (p.professor_id, p.university_id, p.sds_code, p.start_date.isoformat(),
             p.end_date.isoformat() if p.end_date else "")
            for p in sorted(corpus.roster, key=lambda p: p.professor_id)
        ],
    )
    pubs = sorted(corpus.publications, key=lambda p: p.pub_id)
    publications = _csv_text(
        PUBLICATION_COLUMNS,
        [(p.pub_id, p.year, p.citations, LIST_SEP.join(p.categories)) for p in pubs],
    )
    authorships = _csv_text(
        AUTHORSHIP_COLUMNS,
        [
            (p.pub_id, a.position, a.professor_id or "", a.university_id or "")
            for p in pubs
            for a in p.authors
        ],
    )
    return {
        "taxonomy.csv": taxonomy,
        "roster.csv": roster,
        "publications.csv": publications,
        "authorships.csv": authorships,
    }


def write_corpus(corpus: Corpus, directory) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    for name, text in serialize_corpus(corpus).items():
        with open(d / name, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
