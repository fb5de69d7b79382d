from __future__ import annotations

from datetime import date

import pytest

from tsratio.corpus import AuthorSlot, Corpus, CreditScheme, FieldTaxonomy, Professor, Publication, SdsEntry, UdaEntry
from tsratio.scoring import ScoreCard

WINDOW = (date(2009, 1, 1), date(2013, 12, 31))

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


def taxonomy(*sds, scheme=CreditScheme.EQUAL):
    """``taxonomy(("A/01", "1"), ("B/01", "2"))``; an optional third item sets the scheme."""
    entries = []
    udas = {}
    for item in sds:
        code, uda = item[0], item[1]
        entries.append(SdsEntry(code, code, uda, item[2] if len(item) > 2 else scheme))
        udas.setdefault(uda, UdaEntry(uda, f"UDA {uda}"))
    return FieldTaxonomy(tuple(entries), tuple(udas.values()))


def prof(pid, uni="U1", sds="A/01", start=date(2005, 1, 1), end=None):
    return Professor(pid, uni, sds, start, end)


def pub(pid, year=2010, citations=1, categories=("C",), authors=("p",)):
    """``authors`` items: professor id, ``None`` (external) or (professor id | None, university)."""
    slots = []
    for i, a in enumerate(authors, start=1):
        if isinstance(a, tuple):
            slots.append(AuthorSlot(i, a[0], a[1]))
        else:
            slots.append(AuthorSlot(i, a, None))
    return Publication(pid, year, citations, tuple(categories), tuple(slots))


def card(pid, fss, sds="A/01", uni="U1", rank=1, population=1, percentile=None, is_top=False):
    return ScoreCard(pid, sds, uni, fss, rank, population, percentile, is_top)


@pytest.fixture
def toy_corpus():
    tax = taxonomy(("A/01", "1"), ("B/01", "2", CreditScheme.POSITIONAL))
    roster = (
        prof("p1", "U1", "A/01"),
        prof("p2", "U1", "A/01"),
        prof("p3", "U2", "B/01", start=date(2011, 1, 1)),
        prof("p4", "U2", "B/01"),
    )
    pubs = (
        pub("w1", 2010, 10, ("C",), [("p1", "U1"), ("p2", "U1")]),
        pub("w2", 2010, 0, ("C",), [("p1", "U1")]),
        pub("w3", 2011, 6, ("C", "D"), [("p3", "U2"), (None, "X"), (None, None), (None, "Y"), ("p4", "U2")]),
        pub("w4", 2011, 2, ("D",), [(None, "X"), ("p4", "U2")]),
    )
    return Corpus(tax, roster, pubs)


def sole_author_corpus(citations_by_sds, universities=("U1", "U2")):
    """One professor per citation count, each sole author of one 2010 publication in category C.

    All professors share a full-window employment, so fss is proportional to citations.
    """
    sds_codes = sorted(citations_by_sds)
    tax = taxonomy(*[(code, str(i + 1)) for i, code in enumerate(sds_codes)])
    roster, pubs = [], []
    k = 0
    for code in sds_codes:
        for cites in citations_by_sds[code]:
            pid = f"p{k:04d}"
            uni = universities[k % len(universities)]
            roster.append(prof(pid, uni, code))
            if cites is not None:
                pubs.append(pub(f"w{k:04d}", 2010, cites, ("C",), [(pid, uni)]))
            k += 1
    return Corpus(tax, tuple(roster), tuple(pubs))
