import csv
import json

import pytest

from tsratio.cli import main
from tsratio.corpus import write_corpus
from tsratio.ranking import quartile_of
from tsratio.scoring import percentile_rank
from tsratio.synthetic import make_corpus
from tsratio.tables import BUNDLED

from conftest import sole_author_corpus


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def synth_dir(tmp_path):
    d = tmp_path / "data"
    write_corpus(make_corpus(n_professors=120, n_publications=500, n_universities=5, seed=9), d)
    return d


def table_path(name):
    from importlib import resources
    return str(resources.files("tsratio") / "data" / BUNDLED[name][0])


def test_validate_ok(synth_dir, tmp_path, capsys):
    assert main(["validate", "--data", str(synth_dir), "--out", str(tmp_path / "o")]) == 0
    report = json.loads((tmp_path / "o" / "validation_report.json").read_text())
    assert report["counts"]["professors"] == 120
    assert report["errors"] == []
    assert "professors=120" in capsys.readouterr().out


def test_validate_missing_roster(synth_dir, tmp_path, capsys):
    (synth_dir / "roster.csv").unlink()
    assert main(["validate", "--data", str(synth_dir), "--out", str(tmp_path / "o")]) == 2
    assert "roster.csv" in capsys.readouterr().err


def test_validate_dangling_authorship(synth_dir, tmp_path, capsys):
    with open(synth_dir / "authorships.csv", "a") as fh:
        fh.write("W99999,1,,\n")
    assert main(["validate", "--data", str(synth_dir), "--out", str(tmp_path / "o")]) == 1
    assert "W99999" in capsys.readouterr().err
    report = json.loads((tmp_path / "o" / "validation_report.json").read_text())
    assert "W99999" in report["errors"][0]


def test_score_two_tops_per_twenty(tmp_path):
    corpus = sole_author_corpus({"A/01": list(range(20, 0, -1)), "B/01": list(range(40, 0, -2))})
    write_corpus(corpus, tmp_path / "d")
    assert main(["score", "--data", str(tmp_path / "d"), "--out", str(tmp_path / "o")]) == 0
    scores = rows(tmp_path / "o" / "scores.csv")
    for sds in ("A/01", "B/01"):
        assert sum(r["is_top"] == "1" for r in scores if r["sds_code"] == sds) == 2


def test_score_unpublished_professor(tmp_path):
    corpus = sole_author_corpus({"A/01": [5, 4, 3, None]})
    write_corpus(corpus, tmp_path / "d")
    main(["score", "--data", str(tmp_path / "d"), "--out", str(tmp_path / "o")])
    (row,) = [r for r in rows(tmp_path / "o" / "scores.csv") if r["professor_id"] == "p0003"]
    assert float(row["fss"]) == 0.0
    assert row["is_top"] == "0"


def test_score_rerun_identical(synth_dir, tmp_path):
    main(["score", "--data", str(synth_dir), "--out", str(tmp_path / "a")])
    main(["score", "--data", str(synth_dir), "--out", str(tmp_path / "b")])
    assert (tmp_path / "a" / "scores.csv").read_bytes() == (tmp_path / "b" / "scores.csv").read_bytes()


def test_scores_revalidate(synth_dir, tmp_path):
    main(["score", "--data", str(synth_dir), "--out", str(tmp_path / "o")])
    by_sds = {}
    for r in rows(tmp_path / "o" / "scores.csv"):
        by_sds.setdefault(r["sds_code"], []).append(r)
    for group in by_sds.values():
        values = [float(r["fss"]) for r in group]
        for r in group:
            assert int(r["rank"]) == 1 + sum(v > float(r["fss"]) for v in values)
            n = int(r["population"])
            assert r["percentile"] == f"{percentile_rank(int(r['rank']), n):.1f}"


def test_rank_writes_consistent_rows(synth_dir, tmp_path):
    assert main(["rank", "--data", str(synth_dir), "--out", str(tmp_path / "o"), "--metric", "fss_u"]) == 0
    out = rows(tmp_path / "o" / "rankings.csv")
    assert out[0]["scope"] == "ALL"
    for r in out:
        assert r["percentile"] == f"{percentile_rank(int(r['rank']), int(r['population'])):.1f}"


def test_rank_sds_filter(tmp_path, capsys):
    # SDS B has two professors per university: below the 3-staff minimum
    corpus = sole_author_corpus({"A/01": list(range(1, 13)), "B/01": [1, 2, 3, 4]})
    write_corpus(corpus, tmp_path / "d")
    args = ["rank", "--data", str(tmp_path / "d"), "--out", str(tmp_path / "o")]
    assert main(args + ["--scope", "SDS:A/01"]) == 0
    assert main(args + ["--scope", "SDS:B/01"]) == 3
    assert "need at least 2" in capsys.readouterr().err


def test_rank_single_university(tmp_path):
    corpus = sole_author_corpus({"A/01": list(range(1, 13))}, universities=("U1",))
    write_corpus(corpus, tmp_path / "d")
    assert main(["rank", "--data", str(tmp_path / "d"), "--out", str(tmp_path / "o")]) == 3


def test_compare_corpus(synth_dir, tmp_path):
    assert main(["compare", "--data", str(synth_dir), "--out", str(tmp_path / "o"), "--min-staff-uda", "5"]) == 0
    summary = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert "ALL" in summary
    for r in rows(tmp_path / "o" / "comparison.csv"):
        assert int(r["rank_shift"]) == abs(int(r["rank_ts"]) - int(r["rank_fss"]))
        n = summary[r["scope"]]["n"]
        qa = quartile_of(percentile_rank(int(r["rank_ts"]), n))
        qb = quartile_of(percentile_rank(int(r["rank_fss"]), n))
        assert int(r["quartile_shift"]) == abs(qa - qb)


def test_compare_from_table(tmp_path):
    assert main(["compare", "--from-table", table_path("uda7"), "--scope", "UDA:7",
                 "--out", str(tmp_path / "o")]) == 0
    s = json.loads((tmp_path / "o" / "summary.json").read_text())["UDA:7"]
    assert s["n"] == 29
    assert s["display"]["share_shifting_rank"] == "97%"


def test_compare_self(tmp_path):
    src = rows(table_path("national"))
    p = tmp_path / "self.csv"
    with open(p, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=["university_id", "staff", "ts_ratio", "rank_ts", "fss_u", "rank_fss"])
        w.writeheader()
        for r in src:
            w.writerow({**{k: r[k] for k in w.fieldnames}, "rank_fss": r["rank_ts"]})
    assert main(["compare", "--from-table", str(p), "--out", str(tmp_path / "o")]) == 0
    s = json.loads((tmp_path / "o" / "summary.json").read_text())["ALL"]
    assert s["share_shifting_rank"] == 0 and s["share_shifting_quartile"] == 0
    assert s["spearman"] == pytest.approx(1.0)


def test_report_corpus(synth_dir, tmp_path):
    assert main(["report", "--data", str(synth_dir), "--out", str(tmp_path / "o"), "--svg"]) == 0
    summary = rows(tmp_path / "o" / "dataset_summary.csv")
    total = summary[-1]
    assert total["uda_code"] == "Total"
    assert int(total["faculty"]) == 120
    assert int(total["top_scientists"]) == sum(int(r["top_scientists"]) for r in summary[:-1])
    meta = json.loads((tmp_path / "o" / "figure2_staff_vs_ts_ratio.json").read_text())
    assert -1 <= meta["pearson"] <= 1
    assert (tmp_path / "o" / "figure3_percentiles.svg").read_text().startswith("<svg")


def test_config_file_and_override(synth_dir, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"# demo\ndata = {synth_dir}\nwindow = 2010-01-01..2012-12-31\ncensus_date = 2015-05-31\n"
                   f"top_percentile = 80\nout = {tmp_path / 'o'}\n")
    assert main(["score", "--config", str(cfg)]) == 0
    low = sum(r["is_top"] == "1" for r in rows(tmp_path / "o" / "scores.csv"))
    assert main(["score", "--config", str(cfg), "--top-percentile", "95"]) == 0
    high = sum(r["is_top"] == "1" for r in rows(tmp_path / "o" / "scores.csv"))
    assert high < low


def test_bad_config_value(synth_dir, tmp_path):
    assert main(["score", "--data", str(synth_dir), "--census-date", "2010-01-01"]) == 1


def test_external_baselines_mode(tmp_path, capsys):
    corpus = sole_author_corpus({"A/01": [3, 2, 1]})
    write_corpus(corpus, tmp_path / "d")
    b = tmp_path / "b.csv"
    args = ["score", "--data", str(tmp_path / "d"), "--baselines", str(b), "--out", str(tmp_path / "o")]
    b.write_text("year,category,mean_cited_citations\n2011,C,2.0\n")
    assert main(args) == 3
    assert "no baseline" in capsys.readouterr().err
    assert main(args + ["--merge-baselines"]) == 0
    b.write_text("year,category,mean_cited_citations\n2010,C,4.0\n")
    assert main(args) == 0
    fss = {r["professor_id"]: float(r["fss"]) for r in rows(tmp_path / "o" / "scores.csv")}
    assert fss["p0000"] == pytest.approx(3 / 4 / 5)


def test_report_degenerate_rankings(tmp_path):
    # two universities tied on TS ratio with equal staff: no fences, no correlations
    write_corpus(sole_author_corpus({"A/01": list(range(20, 0, -1))}), tmp_path / "d")
    assert main(["report", "--data", str(tmp_path / "d"), "--out", str(tmp_path / "o"), "--svg"]) == 0
    fig1 = json.loads((tmp_path / "o" / "figure1_rank_vs_ts_ratio.json").read_text())
    assert fig1["outliers"] == [] and fig1["outlier_method"].startswith("not computed")
    assert json.loads((tmp_path / "o" / "figure2_staff_vs_ts_ratio.json").read_text())["pearson"] is None
    assert "skipped" in json.loads((tmp_path / "o" / "figure3_percentiles.json").read_text())


def test_bundled_table_by_name(tmp_path, capsys):
    assert main(["compare", "--from-table", "uda7", "--out", str(tmp_path / "o")]) == 0
    s = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert list(s) == ["UDA:7"]
    assert s["UDA:7"]["display"]["share_shifting_quartile"] == "45%"
    assert main(["report", "--from-table", "national", "--out", str(tmp_path / "r")]) == 0
    fig1 = json.loads((tmp_path / "r" / "figure1_rank_vs_ts_ratio.json").read_text())
    assert fig1["outliers"] == ["UNIV_6", "UNIV_64", "UNIV_7", "UNIV_8"]


def test_outputs_ignore_input_row_order(synth_dir, tmp_path):
    import filecmp
    import random
    import shutil

    shuffled = tmp_path / "shuffled"
    shutil.copytree(synth_dir, shuffled)
    rng = random.Random(3)
    for f in sorted(shuffled.glob("*.csv")):
        head, *body = f.read_text().splitlines(keepends=True)
        rng.shuffle(body)
        f.write_text(head + "".join(body))
    for d, out in ((synth_dir, tmp_path / "a"), (shuffled, tmp_path / "b")):
        for cmd in ("validate", "score", "compare", "report"):
            assert main([cmd, "--data", str(d), "--out", str(out)]) == 0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == sorted(p.name for p in (tmp_path / "b").iterdir())
    _, mismatch, errors = filecmp.cmpfiles(tmp_path / "a", tmp_path / "b", names, shallow=False)
    assert mismatch == [] and errors == []
