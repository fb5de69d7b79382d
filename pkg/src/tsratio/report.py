"""Pipeline driver and report writers.

All outputs are plain CSV/JSON with ``\\n`` line endings, sorted keys and a
fixed row order, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .config import RunConfig
from .corpus import Corpus, load_corpus
from .credit import DEFAULT_WEIGHTS, load_credit_config
from .errors import ComputationError
from .impact import CitationBaseline, build_baselines, load_external_baselines
from .ranking import (
    Metric,
    RankComparison,
    RankingList,
    compare_rankings,
    consecutive_gaps,
    flag_large_shifts,
    flag_outliers,
    pearson,
)
from .scoring import ALL, Scope, ScoreCard, UniversityScore, score_professors, university_scores

log = logging.getLogger(__name__)

SCORE_COLUMNS = ("professor_id", "university_id", "sds_code", "fss", "rank", "population", "percentile", "is_top")
RANKING_COLUMNS = ("scope", "metric", "university_id", "staff", "value", "rank", "population", "percentile")
COMPARISON_COLUMNS = (
    "scope", "university_id", "staff", "ts_ratio", "rank_ts", "fss_u", "rank_fss",
    "rank_shift", "percentile_shift", "quartile_shift",
)
OUTLIER_NOTE = "heuristic: Tukey fences on linearly interpolated quartiles"
TOO_FEW_NOTE = "not computed: fewer than four ranked universities"


def _outliers(ts: RankingList, k: float) -> tuple[set[str], str]:
    try:
        return flag_outliers([(r.university_id, r.value) for r in ts.rows], k=k), OUTLIER_NOTE
    except ComputationError:
        log.warning("outlier fences skipped: only %d ranked universities", len(ts.rows))
        return set(), TOO_FEW_NOTE


def pct(x: float) -> str:
    """Fraction as a percentage with one decimal."""
    return f"{100 * x:.1f}"


def dec1(x: float) -> str:
    return f"{x:.1f}"


def dec3(x: float) -> str:
    return f"{x:.3f}"


@dataclass
class Results:
    corpus: Corpus
    baselines: CitationBaseline
    scorecards: list[ScoreCard]
    university_scores: list[UniversityScore]


def run_pipeline(config: RunConfig, corpus: Corpus | None = None) -> Results:
    if corpus is None:
        corpus = load_corpus(config.data_dir)
    if config.baselines_path is None:
        baselines = build_baselines(corpus.publications)
    else:
        baselines = load_external_baselines(config.baselines_path)
        if config.merge_baselines:
            baselines = build_baselines(corpus.publications).overridden_by(baselines)
    weights = DEFAULT_WEIGHTS
    if config.credit_config_path is not None:
        weights = load_credit_config(config.credit_config_path)
    cards = score_professors(corpus, baselines, config.window, weights, config.top_percentile)
    return Results(corpus, baselines, cards, university_scores(cards, corpus.taxonomy))


# --- serialization -----------------------------------------------------------


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def scores_csv(cards: Sequence[ScoreCard]) -> str:
    # fss at full precision so ranks can be re-derived from the file
    return csv_text(SCORE_COLUMNS, [
        (c.professor_id, c.university_id, c.sds_code, repr(c.fss), c.rank, c.population,
         "" if c.percentile is None else dec1(c.percentile), int(c.is_top))
        for c in cards
    ])


def ranking_rows(ranking: RankingList) -> list[tuple]:
    fmt = pct if ranking.metric is Metric.TS_RATIO else dec3
    return [
        (str(ranking.scope), ranking.metric.value, r.university_id, "" if r.staff is None else r.staff,
         fmt(r.value), r.rank, ranking.population, dec1(r.percentile))
        for r in ranking.rows
    ]


def comparison_rows(ts: RankingList, fss: RankingList, cmp: RankComparison) -> list[tuple]:
    ts_rows = {r.university_id: r for r in ts.rows}
    fss_rows = {r.university_id: r for r in fss.rows}
    out = []
    for s in cmp.rows:
        a, b = ts_rows[s.university_id], fss_rows[s.university_id]
        out.append((
            str(ts.scope), s.university_id, "" if a.staff is None else a.staff, pct(a.value), s.rank_a,
            dec3(b.value), s.rank_b, s.rank_shift, dec1(s.percentile_shift), s.quartile_shift,
        ))
    return out


def summary_entry(cmp: RankComparison) -> dict:
    d = cmp.summary.to_dict()
    d["display"] = {
        "share_shifting_rank": f"{round(100 * cmp.summary.share_shifting_rank)}%",
        "avg_percentile_shift": dec1(cmp.summary.avg_percentile_shift),
        "max_percentile_shift": dec1(cmp.summary.max_percentile_shift),
        "share_shifting_quartile": f"{round(100 * cmp.summary.share_shifting_quartile)}%",
        "spearman": f"{cmp.summary.spearman:.3f}",
    }
    return d


# --- dataset summary ---------------------------------------------------------


def dataset_summary_rows(results: Results, config: RunConfig) -> list[tuple]:
    tax = results.corpus.taxonomy
    rows = []
    by_scope = {}
    for s in results.university_scores:
        by_scope.setdefault(s.scope, []).append(s)
    for uda in tax.uda_entries:
        scores = by_scope.get(Scope("UDA", uda.uda_code), [])
        rows.append((
            uda.uda_code, uda.uda_name,
            sum(s.staff_count >= config.min_staff_uda for s in scores),
            sum(s.staff_count for s in scores),
            sum(s.ts_count for s in scores),
        ))
    scores = by_scope.get(ALL, [])
    rows.append((
        "Total", "",
        sum(s.staff_count >= config.min_staff_uda for s in scores),
        sum(s.staff_count for s in scores),
        sum(s.ts_count for s in scores),
    ))
    return rows


# --- figure datasets ---------------------------------------------------------


def gap_statistics(values: Sequence[float], from_position: int = 6) -> dict:
    """Gaps between neighbouring positions of a descending list, in the input's units."""
    gaps = consecutive_gaps(values)
    tail = gaps[from_position - 1:]
    return {
        "gaps": gaps,
        "largest_gap_positions": sorted(range(1, len(gaps) + 1), key=lambda i: (-gaps[i - 1], i))[:3],
        "mean_gap_from_position": from_position,
        "mean_gap": statistics.fmean(tail) if tail else None,
    }


def trimmed_pearson(points: dict[str, tuple[float, float]], drop_top_y: int, drop_top_x: int) -> float:
    """Pearson after removing the ``drop_top_y`` highest-y and ``drop_top_x`` highest-x points."""
    ids = sorted(points)
    drop = set(sorted(ids, key=lambda u: (-points[u][1], u))[:drop_top_y])
    drop |= set(sorted(ids, key=lambda u: (-points[u][0], u))[:drop_top_x])
    return pearson([points[u] for u in ids if u not in drop])


def _maybe(fn, *args):
    # a degenerate scatter (e.g. equal staff everywhere) has no correlation
    try:
        return fn(*args)
    except ComputationError as exc:
        log.warning("%s", exc)
        return None


def figure_datasets(ts: RankingList, fss: RankingList, outlier_k: float = 1.5,
                    shift_threshold: float = 30.0) -> dict[str, str]:
    """Figure 1-3 style scatter data and JSON metadata, keyed by file name."""
    ts_values = [(r.university_id, r.value) for r in ts.rows]
    outliers, note = _outliers(ts, outlier_k)
    files = {}

    files["figure1_rank_vs_ts_ratio.csv"] = csv_text(
        ("rank", "university_id", "ts_ratio", "outlier"),
        [(r.rank, r.university_id, pct(r.value), int(r.university_id in outliers)) for r in ts.rows],
    )
    gaps = gap_statistics([100 * v for _, v in ts_values])
    files["figure1_rank_vs_ts_ratio.json"] = json_text({
        "scope": str(ts.scope),
        "outlier_method": note, "outlier_k": outlier_k, "outliers": sorted(outliers),
        "gaps_percentage_points": [round(g, 6) for g in gaps["gaps"]],
        "largest_gap_positions": gaps["largest_gap_positions"],
        "mean_gap_from_position": gaps["mean_gap_from_position"],
        "mean_gap_percentage_points": gaps["mean_gap"],
    })

    meta2 = {"scope": str(ts.scope), "outlier_method": note, "outlier_k": outlier_k,
             "outliers": sorted(outliers)}
    staffed = {r.university_id: (r.staff, r.value) for r in ts.rows if r.staff is not None}
    if len(staffed) >= 2:
        files["figure2_staff_vs_ts_ratio.csv"] = csv_text(
            ("university_id", "staff", "ts_ratio", "outlier"),
            [(u, st, pct(v), int(u in outliers)) for u, (st, v) in sorted(staffed.items(), key=lambda kv: (-kv[1][0], kv[0]))],
        )
        meta2["pearson"] = _maybe(pearson, list(staffed.values()))
        med = statistics.median(v for _, v in staffed.values())
        n_high = sum(1 for u in outliers if u in staffed and staffed[u][1] > med)
        if len(staffed) - n_high - 1 >= 2:
            meta2["pearson_trimmed"] = _maybe(trimmed_pearson, staffed, n_high, 1)
            meta2["trimmed"] = f"top {n_high} by ts_ratio (high outliers) and largest by staff removed"
    files["figure2_staff_vs_ts_ratio.json"] = json_text(meta2)

    try:
        cmp = compare_rankings(ts, fss)
    except ComputationError as exc:
        log.warning("figure 3 skipped: %s", exc)
        files["figure3_percentiles.json"] = json_text({"scope": str(ts.scope), "skipped": str(exc)})
        return files
    flagged = flag_large_shifts(cmp, shift_threshold)
    pct_ts = {r.university_id: r.percentile for r in ts.rows}
    pct_fss = {r.university_id: r.percentile for r in fss.rows}
    files["figure3_percentiles.csv"] = csv_text(
        ("university_id", "percentile_fss_u", "percentile_ts_ratio", "percentile_shift", "flagged"),
        [(s.university_id, dec1(pct_fss[s.university_id]), dec1(pct_ts[s.university_id]),
          dec1(s.percentile_shift), int(s.university_id in flagged)) for s in cmp.rows],
    )
    files["figure3_percentiles.json"] = json_text({
        "scope": str(ts.scope),
        "median_percentile_fss_u": statistics.median(pct_fss[s.university_id] for s in cmp.rows),
        "median_percentile_ts_ratio": statistics.median(pct_ts[s.university_id] for s in cmp.rows),
        "shift_threshold": shift_threshold,
        "flagged": sorted(flagged),
        "flag_method": "heuristic: percentile shift at or above threshold",
    })
    return files


def scatter_svg(points: Sequence[tuple[float, float, bool]], x_label: str, y_label: str,
                width: int = 480, height: int = 360) -> str:
    """Minimal SVG scatter; flagged points drawn as triangles."""
    pad = 40
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    sx = (width - 2 * pad) / ((x1 - x0) or 1)
    sy = (height - 2 * pad) / ((y1 - y0) or 1)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<text x="{width / 2:.0f}" y="{height - 8}" text-anchor="middle" font-size="12">{x_label}</text>',
        f'<text x="12" y="{height / 2:.0f}" font-size="12" transform="rotate(-90 12 {height / 2:.0f})" '
        f'text-anchor="middle">{y_label}</text>',
    ]
    for x, y, flag in points:
        cx = pad + (x - x0) * sx
        cy = height - pad - (y - y0) * sy
        if flag:
            parts.append(f'<polygon points="{cx:.1f},{cy - 5:.1f} {cx - 4:.1f},{cy + 3:.1f} {cx + 4:.1f},{cy + 3:.1f}" fill="black"/>')
        else:
            parts.append(f'<circle cx="{cx:.1f}" cy="{cy:.1f}" r="3" fill="none" stroke="black"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def figure_svgs(ts: RankingList, fss: RankingList, outlier_k: float = 1.5) -> dict[str, str]:
    outliers, _ = _outliers(ts, outlier_k)
    files = {
        "figure1_rank_vs_ts_ratio.svg": scatter_svg(
            [(r.rank, 100 * r.value, r.university_id in outliers) for r in ts.rows], "rank", "TS ratio (%)"),
    }
    staffed = [(r.staff, 100 * r.value, r.university_id in outliers) for r in ts.rows if r.staff is not None]
    if staffed:
        files["figure2_staff_vs_ts_ratio.svg"] = scatter_svg(staffed, "staff", "TS ratio (%)")
    pct_fss = {r.university_id: r.percentile for r in fss.rows}
    files["figure3_percentiles.svg"] = scatter_svg(
        [(r.percentile, pct_fss[r.university_id], False) for r in ts.rows if r.university_id in pct_fss],
        "percentile by TS ratio", "percentile by FSS_U")
    return files
