"""Seeded synthetic corpora for tests and demos.

``python -m tsratio.synthetic OUTDIR [--seed N]`` writes the bundled demo corpus.
"""

from __future__ import annotations

import argparse
import random
from datetime import date

from .corpus import AuthorSlot, Corpus, CreditScheme, FieldTaxonomy, Professor, Publication, SdsEntry, UdaEntry, write_corpus


def make_taxonomy(n_udas: int = 3, sds_per_uda: int = 3) -> FieldTaxonomy:
    udas = tuple(UdaEntry(str(i + 1), f"Discipline {i + 1}") for i in range(n_udas))
    sds = []
    for i, uda in enumerate(udas):
        for j in range(sds_per_uda):
            # alternate schemes so both credit rules get exercised
            scheme = CreditScheme.POSITIONAL if (i + j) % 2 else CreditScheme.EQUAL
            sds.append(SdsEntry(f"F{i + 1}/{j + 1:02d}", f"Field {i + 1}.{j + 1}", uda.uda_code, scheme))
    return FieldTaxonomy(tuple(sds), udas)


def make_corpus(
    n_professors: int = 30,
    n_publications: int = 100,
    n_universities: int = 4,
    n_udas: int = 2,
    sds_per_uda: int = 2,
    seed: int = 0,
    first_year: int = 2009,
    last_year: int = 2013,
) -> Corpus:
    rng = random.Random(seed)
    taxonomy = make_taxonomy(n_udas, sds_per_uda)
    codes = [e.sds_code for e in taxonomy.sds_entries]
    unis = [f"U{k + 1:02d}" for k in range(n_universities)]
    # uneven university sizes
    uni_weights = [1 + 3 * rng.random() for _ in unis]
    roster = []
    for k in range(n_professors):
        start = date(rng.choice([2001, 2005, 2008, 2010, 2011, 2012]), rng.choice([1, 4, 9]), 1)
        end = date(2013, 3, 31) if rng.random() < 0.1 else None
        roster.append(Professor(f"P{k + 1:04d}", rng.choices(unis, uni_weights)[0], rng.choice(codes), start, end))

    categories = [f"CAT{c}" for c in range(max(3, len(codes)))]
    # a few professors never publish
    active = [p for p in roster if rng.random() > 0.1] or roster[:1]
    by_sds = {}
    for p in active:
        by_sds.setdefault(p.sds_code, []).append(p)
    pubs = []
    for k in range(n_publications):
        lead = rng.choice(active)
        pool = by_sds[lead.sds_code]
        n = rng.choice([1, 2, 3, 4, 5, 6, 8])
        internal = [lead] + rng.sample(pool, min(len(pool), rng.randint(0, 2)))
        internal = list(dict.fromkeys(internal))[:n]
        slots = [None] * n
        positions = rng.sample(range(n), len(internal))
        for prof, pos in zip(internal, positions):
            slots[pos] = AuthorSlot(pos + 1, prof.professor_id, prof.university_id)
        for pos in range(n):
            if slots[pos] is None:
                aff = rng.choice(unis + ["EXT1", "EXT2", None])
                slots[pos] = AuthorSlot(pos + 1, None, aff)
        cites = 0 if rng.random() < 0.15 else int(rng.paretovariate(1.5) * 3)
        cats = tuple(rng.sample(categories, rng.choice([1, 1, 2])))
        pubs.append(Publication(f"W{k + 1:05d}", rng.randint(first_year, last_year), cites, cats, tuple(slots)))
    return Corpus(taxonomy, tuple(roster), tuple(pubs))


def demo_corpus() -> Corpus:
    """The corpus shipped under ``data/synthetic``."""
    return make_corpus(n_professors=400, n_publications=2000, n_universities=10, n_udas=3, sds_per_uda=3, seed=2016)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("outdir")
    p.add_argument("--seed", type=int)
    args = p.parse_args(argv)
    corpus = demo_corpus() if args.seed is None else make_corpus(400, 2000, 10, 3, 3, seed=args.seed)
    write_corpus(corpus, args.outdir)


if __name__ == "__main__":
    main()
