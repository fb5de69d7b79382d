"""Command-line entry point: ``tsratio validate|score|rank|compare|report``.

Exit codes: 0 success, 1 validation error, 2 I/O error, 3 computation error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import RunConfig, load_config, parse_window
from .corpus import load_corpus, validate_corpus
from .errors import ComputationError, CorpusError
from .ranking import Metric, build_ranking, compare_rankings
from .report import (
    COMPARISON_COLUMNS,
    RANKING_COLUMNS,
    Results,
    comparison_rows,
    csv_text,
    dataset_summary_rows,
    figure_datasets,
    figure_svgs,
    json_text,
    ranking_rows,
    run_pipeline,
    scores_csv,
    summary_entry,
    write_text,
)
from .scoring import ALL, Scope
from .tables import open_table

log = logging.getLogger("tsratio")

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_COMPUTE = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--data", help="directory holding taxonomy.csv, roster.csv, publications.csv, authorships.csv")
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--window", type=parse_window, help="observation window, e.g. 2009-01-01..2013-12-31")
    common.add_argument("--census-date", help="date citation counts were taken (ISO)")
    common.add_argument("--top-percentile", type=float)
    common.add_argument("--min-staff-uda", type=int)
    common.add_argument("--min-staff-sds", type=int)
    common.add_argument("--baselines", help="external baselines CSV used instead of corpus-derived cells")
    common.add_argument("--merge-baselines", action="store_true", default=None,
                        help="fill cells missing from --baselines with corpus-derived values")
    common.add_argument("--credit-config", help="positional weight overrides CSV")
    common.add_argument("--out", help="output directory (default: out)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="tsratio", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check the input corpus")
    sub.add_parser("score", parents=[common], help="write per-professor scores.csv")
    r = sub.add_parser("rank", parents=[common], help="write a university ranking list")
    r.add_argument("--metric", choices=[m.value for m in Metric], default=Metric.TS_RATIO.value)
    r.add_argument("--scope", default="ALL", help="ALL, UDA:<code> or SDS:<code>")
    c = sub.add_parser("compare", parents=[common], help="compare TS-ratio and FSS_U rankings")
    c.add_argument("--from-table", help="comparison-shaped CSV with ranks already assigned, or uda7/national")
    c.add_argument("--scope", help="scope label for --from-table input (default ALL)")
    rep = sub.add_parser("report", parents=[common], help="dataset summary and figure datasets")
    rep.add_argument("--from-table", help="build figure datasets from a comparison-shaped CSV, or uda7/national")
    rep.add_argument("--scope", help="scope label for --from-table input (default ALL)")
    rep.add_argument("--outlier-k", type=float, default=1.5)
    rep.add_argument("--shift-threshold", type=float, default=30.0)
    rep.add_argument("--svg", action="store_true", help="also emit flat SVG scatter plots")
    return p


def resolve_config(args) -> RunConfig:
    config = load_config(args.config) if args.config else RunConfig()
    return config.with_overrides(
        data_dir=args.data,
        window=args.window,
        census_date=args.census_date,
        top_percentile=args.top_percentile,
        min_staff_uda=args.min_staff_uda,
        min_staff_sds=args.min_staff_sds,
        baselines_path=args.baselines,
        merge_baselines=args.merge_baselines,
        credit_config_path=args.credit_config,
        output_dir=args.out,
    )


def _need_data(config):
    if config.data_dir is None:
        raise CorpusError("no input directory given (--data or 'data' in --config)")


def cmd_validate(config: RunConfig) -> int:
    _need_data(config)
    out = config.output_dir / "validation_report.json"
    try:
        corpus = load_corpus(config.data_dir)
    except CorpusError as exc:
        write_text(out, json_text({"counts": None, "errors": [str(exc)], "warnings": []}))
        raise
    report = validate_corpus(corpus.taxonomy, corpus.roster, corpus.publications, config.window)
    write_text(out, json_text(report.to_dict()))
    counts = report.to_dict()["counts"]
    print(", ".join(f"{k}={v}" for k, v in counts.items()))
    print(f"{len(report.errors)} error(s), {len(report.warnings)} warning(s)")
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_score(config: RunConfig, results: Results | None = None) -> int:
    _need_data(config)
    results = results or run_pipeline(config)
    path = write_text(config.output_dir / "scores.csv", scores_csv(results.scorecards))
    print(f"wrote {path} ({len(results.scorecards)} professors, "
          f"{sum(c.is_top for c in results.scorecards)} top scientists)")
    return EXIT_OK


def cmd_rank(config: RunConfig, metric: Metric, scope: Scope) -> int:
    _need_data(config)
    results = run_pipeline(config)
    ranking = build_ranking(metric, scope, results.university_scores, config.min_staff(scope.kind))
    path = write_text(config.output_dir / "rankings.csv", csv_text(RANKING_COLUMNS, ranking_rows(ranking)))
    print(f"wrote {path} ({ranking.population} universities in {scope})")
    return EXIT_OK


def _comparison_scopes(results: Results):
    return [Scope("UDA", u) for u in results.corpus.taxonomy.uda_codes] + [ALL]


def cmd_compare(config: RunConfig, from_table: str | None = None, table_scope: Scope | None = None) -> int:
    rows, summary = [], {}
    if from_table:
        table = open_table(from_table, table_scope)
        pairs = [(table.ts_ranking(), table.fss_ranking())]
    else:
        _need_data(config)
        results = run_pipeline(config)
        pairs = []
        for scope in _comparison_scopes(results):
            try:
                ts = build_ranking(Metric.TS_RATIO, scope, results.university_scores, config.min_staff(scope.kind))
                fss = build_ranking(Metric.FSS_U, scope, results.university_scores, config.min_staff(scope.kind))
            except ComputationError as exc:
                summary[str(scope)] = {"skipped": str(exc)}
                continue
            pairs.append((ts, fss))
    for ts, fss in pairs:
        cmp = compare_rankings(ts, fss)
        rows.extend(comparison_rows(ts, fss, cmp))
        summary[str(ts.scope)] = summary_entry(cmp)
    if not rows:
        raise ComputationError("no scope had enough qualifying universities to compare")
    write_text(config.output_dir / "comparison.csv", csv_text(COMPARISON_COLUMNS, rows))
    write_text(config.output_dir / "summary.json", json_text(summary))
    for scope, s in summary.items():
        if "display" in s:
            d = s["display"]
            print(f"{scope}: n={s['n']} shifting rank {d['share_shifting_rank']}, avg pct shift "
                  f"{d['avg_percentile_shift']}, max {d['max_percentile_shift']}, shifting quartile "
                  f"{d['share_shifting_quartile']}, max quartile shift {s['max_quartile_shift']}, "
                  f"spearman {d['spearman']}")
    return EXIT_OK


def cmd_report(config: RunConfig, from_table: str | None = None, outlier_k: float = 1.5,
               shift_threshold: float = 30.0, svg: bool = False, table_scope: Scope | None = None) -> int:
    out = config.output_dir
    if from_table:
        table = open_table(from_table, table_scope)
        ts, fss = table.ts_ranking(), table.fss_ranking()
    else:
        _need_data(config)
        results = run_pipeline(config)
        rows = dataset_summary_rows(results, config)
        write_text(out / "dataset_summary.csv",
                   csv_text(("uda_code", "uda_name", "universities", "faculty", "top_scientists"), rows))
        total = rows[-1]
        print(f"Total: {total[2]} universities, {total[3]} faculty, {total[4]} top scientists")
        ts = build_ranking(Metric.TS_RATIO, ALL, results.university_scores, config.min_staff("ALL"))
        fss = build_ranking(Metric.FSS_U, ALL, results.university_scores, config.min_staff("ALL"))
    for name, text in figure_datasets(ts, fss, outlier_k, shift_threshold).items():
        write_text(out / name, text)
    if svg:
        for name, text in figure_svgs(ts, fss, outlier_k).items():
            write_text(out / name, text)
    print(f"wrote figure datasets to {out}")
    return EXIT_OK


def _scope(text):
    return None if text is None else Scope.parse(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = resolve_config(args)
        if args.command == "validate":
            return cmd_validate(config)
        if args.command == "score":
            return cmd_score(config)
        if args.command == "rank":
            return cmd_rank(config, Metric(args.metric), Scope.parse(args.scope))
        if args.command == "compare":
            return cmd_compare(config, args.from_table, _scope(args.scope))
        return cmd_report(config, args.from_table, args.outlier_k, args.shift_threshold, args.svg,
                          _scope(args.scope))
    except CorpusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ComputationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
