import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from scholarqa import evaluation
from scholarqa.evaluation import (
    AnnotationRecord,
    DomainScoreTable,
    CitationRow,
    EvalReport,
    InsufficientDataError,
    QualityRow,
    compute_agreement,
    correlation_suite,
    domain_means,
    export_report,
    load_annotations_csv,
    load_reference_agreement,
    load_reference_tables,
    pearson_r,
    quadratic_weighted_kappa,
    rank_relevance_curve,
)


def kappa_oracle(a, b, categories=11):
    """Confusion-matrix reference, written as plain loops on purpose."""
    n = len(a)
    observed = [[0.0] * categories for _ in range(categories)]
    for x, y in zip(a, b):
        observed[x][y] += 1
    row = [sum(observed[i][j] for j in range(categories)) for i in range(categories)]
    col = [sum(observed[i][j] for i in range(categories)) for j in range(categories)]
    num = 0.0
    den = 0.0
    for i in range(categories):
        for j in range(categories):
            w = (i - j) ** 2 / (categories - 1) ** 2
            num += w * observed[i][j]
            den += w * row[i] * col[j] / n
    return 1.0 - num / den


class TestKappa:
    def test_perfect_agreement(self):
        assert quadratic_weighted_kappa([0, 3, 7, 10], [0, 3, 7, 10]) == 1.0

    def test_maximal_disagreement_frozen_value(self):
        # Hand-built 11x11 confusion matrix: all mass at (0,10) and
        # (10,0); the weighted observed sum equals the expected sum
        # exactly twice over, giving kappa = -1.
        assert quadratic_weighted_kappa([0, 0, 10, 10], [10, 10, 0, 0]) == -1.0

    def test_matches_oracle_on_random_pairs(self):
        rng = random.Random(20230615)
        for _ in range(50):
            a = [rng.randint(0, 10) for _ in range(50)]
            b = [rng.randint(0, 10) for _ in range(50)]
            assert quadratic_weighted_kappa(a, b) == pytest.approx(
                kappa_oracle(a, b), abs=1e-12
            )

    def test_symmetry(self):
        rng = random.Random(7)
        a = [rng.randint(0, 10) for _ in range(40)]
        b = [rng.randint(0, 10) for _ in range(40)]
        assert quadratic_weighted_kappa(a, b) == pytest.approx(
            quadratic_weighted_kappa(b, a), abs=1e-12
        )

    @given(
        data=st.lists(
            st.tuples(st.integers(0, 8), st.integers(0, 8)), min_size=2, max_size=40
        ),
        shift=st.integers(0, 2),
    )
    def test_shift_invariance(self, data, shift):
        # Adding a constant to both raters preserves pairwise distances.
        a = [x for x, _ in data]
        b = [y for _, y in data]
        base = quadratic_weighted_kappa(a, b)
        shifted = quadratic_weighted_kappa(
            [x + shift for x in a], [y + shift for y in b]
        )
        assert shifted == pytest.approx(base, abs=1e-9)

    def test_degenerate_constant_equal_returns_one_with_warning(self):
        with pytest.warns(RuntimeWarning, match="degenerate"):
            assert quadratic_weighted_kappa([5, 5, 5], [5, 5, 5]) == 1.0

    def test_constant_but_different_is_zero(self):
        assert quadratic_weighted_kappa([4, 4], [6, 6]) == 0.0

    def test_validation_errors(self):
        with pytest.raises(ValueError):
            quadratic_weighted_kappa([1, 2], [1])
        with pytest.raises(ValueError):
            quadratic_weighted_kappa([1, 11], [0, 2])
        with pytest.raises(ValueError):
            quadratic_weighted_kappa([1], [1])


class TestPearson:
    def test_identity_and_negation(self):
        xs = [1.0, 2.0, 5.0, 7.0]
        assert pearson_r(xs, xs) == pytest.approx(1.0)
        assert pearson_r(xs, [-x for x in xs]) == pytest.approx(-1.0)

    def test_constant_input_is_an_error(self):
        with pytest.raises(ValueError):
            pearson_r([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
        with pytest.raises(ValueError):
            pearson_r([1.0, 2.0], [1.0, 2.0])

    @given(
        pairs=st.lists(
            st.tuples(st.integers(-50, 50), st.integers(-50, 50)),
            min_size=3,
            max_size=30,
        ),
        scale=st.floats(0.5, 4.0),
        offset=st.floats(-10.0, 10.0),
    )
    def test_positive_affine_invariance(self, pairs, scale, offset):
        xs = [float(x) for x, _ in pairs]
        ys = [float(y) for _, y in pairs]
        if len(set(xs)) < 2 or len(set(ys)) < 2:
            return
        base = pearson_r(xs, ys)
        transformed = pearson_r([scale * x + offset for x in xs], ys)
        assert transformed == pytest.approx(base, abs=1e-9)
        assert pearson_r([-x for x in xs], ys) == pytest.approx(-base, abs=1e-9)

    def test_reference_tables_reproduce_published_r(self):
        table = load_reference_tables()
        quality = table.quality_by_domain()
        relevance = [row.mean for row in table.citation_rows]
        comp = [quality[row.domain].comprehensiveness for row in table.citation_rows]
        assert pearson_r(relevance, comp) == pytest.approx(0.77, abs=0.05)


def make_annotation(qid, annotator, domain, base):
    return AnnotationRecord(
        question_id=qid,
        annotator_id=annotator,
        domain=domain,
        comprehensiveness=base,
        trust=min(10, base + 1),
        utility=max(0, base - 1),
        cite_relevance=(base,) * 5,
    )


class TestDomainMeans:
    def test_single_record_means_equal_scores(self):
        record = AnnotationRecord("q1", "a", "physics", 7, 7, 7, (7, 7, 7, 7, 7))
        table = domain_means([record])
        row = table.quality_by_domain()["physics"]
        assert (row.comprehensiveness, row.trust, row.utility, row.mean) == (7, 7, 7, 7)
        assert table.citations_by_domain()["physics"].cites == (7.0,) * 5

    def test_two_annotators_average(self):
        records = [
            AnnotationRecord("q1", "a", "art", 6, 6, 6, (6,) * 5),
            AnnotationRecord("q1", "b", "art", 8, 8, 8, (8,) * 5),
        ]
        row = domain_means(records).quality_by_domain()["art"]
        assert row.comprehensiveness == 7.0

    def test_permutation_invariance_and_bounds(self):
        rng = random.Random(11)
        records = [
            make_annotation(f"q{i}", f"ann{i % 2}", f"dom{i % 3}", rng.randint(1, 9))
            for i in range(30)
        ]
        shuffled = records[:]
        rng.shuffle(shuffled)
        assert domain_means(records) == domain_means(shuffled)
        for row in domain_means(records).quality_rows:
            assert 0 <= row.comprehensiveness <= 10
            assert 0 <= row.mean <= 10

    def test_mean_column_is_mean_of_components(self):
        records = [make_annotation("q1", "a", "geo", 5), make_annotation("q2", "b", "geo", 8)]
        for row in domain_means(records).quality_rows:
            assert row.mean == pytest.approx(
                (row.comprehensiveness + row.trust + row.utility) / 3
            )

    def test_empty_input_rejected(self):
        with pytest.raises(InsufficientDataError):
            domain_means([])

    def test_score_range_validated(self):
        with pytest.raises(ValueError):
            AnnotationRecord("q", "a", "d", 11, 5, 5, (5,) * 5)
        with pytest.raises(ValueError):
            AnnotationRecord("q", "a", "d", 5, 5, 5, (5,) * 4)


class TestRankRelevanceCurve:
    def test_reference_table_returns_published_aggregate(self):
        curve = rank_relevance_curve(load_reference_tables())
        assert curve.means == (7.68, 7.54, 7.06, 6.79, 6.78)
        assert curve.non_increasing is True

    def test_single_domain_table_returns_that_row(self):
        table = DomainScoreTable(
            quality_rows=(),
            citation_rows=(CitationRow("solo", (9.0, 8.0, 7.0, 6.0, 5.0), 7.0),),
        )
        curve = rank_relevance_curve(table)
        assert curve.means == (9.0, 8.0, 7.0, 6.0, 5.0)
        assert curve.non_increasing

    def test_synthetic_table_matches_independent_averaging(self):
        rng = random.Random(2)
        rows = tuple(
            CitationRow(
                f"d{i}",
                tuple(round(rng.uniform(0, 10), 1) for _ in range(5)),
                0.0,
            )
            for i in range(12)
        )
        table = DomainScoreTable(quality_rows=(), citation_rows=rows)
        curve = rank_relevance_curve(table)
        for position in range(5):
            expected = sum(r.cites[position] for r in rows) / len(rows)
            assert curve.means[position] == pytest.approx(expected, abs=1e-12)


class TestAgreement:
    def test_matches_kappa_oracle(self):
        rng = random.Random(21)
        records = []
        for q in range(20):
            for annotator in ("a", "b"):
                records.append(
                    AnnotationRecord(
                        f"q{q:02d}", annotator, "physics",
                        rng.randint(0, 10), rng.randint(0, 10), rng.randint(0, 10),
                        tuple(rng.randint(0, 10) for _ in range(5)),
                    )
                )
        report = compute_agreement(records)
        by_q = {}
        for r in records:
            by_q.setdefault(r.annotator_id, {})[r.question_id] = r
        qs = sorted(by_q["a"])
        comp_a = [by_q["a"][q].comprehensiveness for q in qs]
        comp_b = [by_q["b"][q].comprehensiveness for q in qs]
        assert report.kappas["comprehensiveness"] == pytest.approx(
            kappa_oracle(comp_a, comp_b), abs=1e-12
        )
        cite3_a = [by_q["a"][q].cite_relevance[2] for q in qs]
        cite3_b = [by_q["b"][q].cite_relevance[2] for q in qs]
        assert report.kappas["cite3"] == pytest.approx(
            kappa_oracle(cite3_a, cite3_b), abs=1e-12
        )
        assert report.n_pairs == 20
        assert report.annotators == ("a", "b")

    def test_single_annotator_rejected(self):
        records = [make_annotation(f"q{i}", "only", "art", 5 + i % 3) for i in range(4)]
        with pytest.raises(InsufficientDataError, match="2 annotators"):
            compute_agreement(records)

    def test_sample_annotations_file(self, fixtures_dir):
        records = load_annotations_csv(fixtures_dir / "annotations_sample.csv")
        assert len(records) == 12
        report = compute_agreement(records)
        assert set(report.kappas) == set(evaluation.AGREEMENT_METRICS)
        assert all(-1.0 <= k <= 1.0 for k in report.kappas.values())


class TestCorrelationSuite:
    def test_reference_tables_reproduce_published_correlations(self):
        report = correlation_suite(load_reference_tables())
        by_name = report.by_name()
        assert by_name["comprehensiveness_vs_citation_relevance"].r == pytest.approx(0.77, abs=0.05)
        assert by_name["trust_vs_citation_relevance"].r == pytest.approx(0.83, abs=0.05)
        assert by_name["utility_vs_citation_relevance"].r == pytest.approx(0.80, abs=0.05)
        assert all(e.n == 20 for e in report.entries)
        assert any("corpus stats" in s for s in report.skipped)

    def test_self_correlation_is_one(self):
        # a table whose citation means equal its comprehensiveness column
        rows_q = tuple(QualityRow(f"d{i}", float(i), 5.0, 5.0, 5.0) for i in range(1, 6))
        rows_c = tuple(CitationRow(f"d{i}", (float(i),) * 5, float(i)) for i in range(1, 6))
        table = DomainScoreTable(rows_q, rows_c)
        entry = correlation_suite(table).by_name()["comprehensiveness_vs_citation_relevance"]
        assert entry.r == pytest.approx(1.0)

    def test_uncorrelated_columns_stay_small_usually(self):
        # 50 domains: sampling std of r is ~1/7, so |r| < 0.3 lands in
        # roughly 96% of draws; the fixed seed keeps the count stable.
        rng = random.Random(424242)
        small = 0
        trials = 200
        for _ in range(trials):
            rows_q = tuple(
                QualityRow(f"d{i}", rng.uniform(0, 10), 5.0, 5.0, 5.0) for i in range(50)
            )
            rows_c = tuple(
                CitationRow(f"d{i}", (0.0,) * 5, rng.uniform(0, 10)) for i in range(50)
            )
            entry = correlation_suite(DomainScoreTable(rows_q, rows_c)).by_name()[
                "comprehensiveness_vs_citation_relevance"
            ]
            if abs(entry.r) < 0.3:
                small += 1
        assert small / trials >= 0.90

    def test_missing_domains_reported_and_dropped(self):
        rows_q = tuple(QualityRow(f"d{i}", float(i), 5.0, 5.0, 5.0) for i in range(5))
        rows_c = tuple(CitationRow(f"d{i}", (float(i),) * 5, float(i)) for i in range(4))
        report = correlation_suite(DomainScoreTable(rows_q, rows_c))
        assert any("missing" in s for s in report.skipped)
        assert report.by_name()["comprehensiveness_vs_citation_relevance"].n == 4

    def test_with_corpus_stats(self):
        from scholarqa.corpus import DomainStats

        rng = random.Random(3)
        domains = [f"dom{i}" for i in range(12)]
        stats = {
            d: DomainStats(document_count=10 + 7 * i, mean_abstract_words=120.0 + 9 * i)
            for i, d in enumerate(domains)
        }
        rows_q = tuple(
            QualityRow(d, rng.uniform(5, 10), 7.0, 7.0, rng.uniform(5, 10)) for d in domains
        )
        rows_c = tuple(CitationRow(d, (5.0,) * 5, rng.uniform(3, 9)) for d in domains)
        report = correlation_suite(DomainScoreTable(rows_q, rows_c), stats)
        names = set(report.by_name())
        assert "quality_vs_corpus_size" in names
        assert "quality_vs_abstract_length" in names
        assert report.by_name()["quality_vs_corpus_size"].n == 12

    def test_constant_column_skipped_with_reason(self, corpus_index):
        # every fixture domain holds exactly 3 documents, so the size
        # correlation is undefined and must be skipped, not raised
        stats = corpus_index.domain_stats()
        rng = random.Random(4)
        rows_q = tuple(QualityRow(d, rng.uniform(5, 10), 7.0, 7.0, rng.uniform(5, 10)) for d in stats)
        rows_c = tuple(CitationRow(d, (5.0,) * 5, rng.uniform(3, 9)) for d in stats)
        report = correlation_suite(DomainScoreTable(rows_q, rows_c), stats)
        assert "quality_vs_corpus_size" not in report.by_name()
        assert any("quality_vs_corpus_size" in s for s in report.skipped)


class TestExport:
    def test_reference_export_matches_golden(self, tmp_path, golden_dir):
        table = load_reference_tables()
        report = EvalReport(
            table=table,
            agreement=load_reference_agreement(),
            curve=rank_relevance_curve(table),
            correlations=correlation_suite(table),
        )
        written = export_report(report, tmp_path)
        assert set(written) == {
            "domain_quality.csv",
            "citation_relevance.csv",
            "agreement.csv",
            "correlations.csv",
            "quality_by_domain_plotdata.csv",
            "relevance_by_domain_plotdata.csv",
        }
        for name, path in written.items():
            golden = (golden_dir / "reference_export" / name).read_text(encoding="utf-8")
            assert path.read_text(encoding="utf-8") == golden, name

    def test_reference_quality_table_round_trips_byte_for_byte(self, tmp_path):
        # the bundled table, re-exported, equals the bundled file minus comments
        written = export_report(EvalReport(table=load_reference_tables()), tmp_path)
        exported = written["domain_quality.csv"].read_text(encoding="utf-8")
        from importlib import resources

        bundled = resources.files("scholarqa.data.reference").joinpath(
            "domain_quality.csv"
        ).read_text("utf-8")
        bundled_body = "".join(
            line + "\n" for line in bundled.splitlines() if not line.startswith("#")
        )
        assert exported == bundled_body

    def test_empty_report_writes_headers_only(self, tmp_path):
        written = export_report(EvalReport(), tmp_path)
        for name, path in written.items():
            lines = path.read_text(encoding="utf-8").splitlines()
            assert len(lines) == 1, name

    def test_fig_style_plotdata_sorted_by_first_column(self, tmp_path):
        table = load_reference_tables()
        written = export_report(EvalReport(table=table), tmp_path)
        quality_lines = written["quality_by_domain_plotdata.csv"].read_text().splitlines()[1:]
        comp = [float(line.split(",")[1]) for line in quality_lines]
        assert comp == sorted(comp, reverse=True)
        assert len(quality_lines) == 20
        relevance_lines = written["relevance_by_domain_plotdata.csv"].read_text().splitlines()[1:]
        cite1 = [float(line.split(",")[1]) for line in relevance_lines]
        assert cite1 == sorted(cite1, reverse=True)


class TestReferenceData:
    def test_tables_have_20_domains_and_consistent_means(self):
        table = load_reference_tables()
        assert len(table.quality_rows) == 20
        assert len(table.citation_rows) == 20
        for row in table.quality_rows:
            assert row.mean == pytest.approx(
                (row.comprehensiveness + row.trust + row.utility) / 3, abs=0.05
            )
        for row in table.citation_rows:
            assert row.mean == pytest.approx(float(np.mean(row.cites)), abs=0.05)

    def test_agreement_reference_values(self):
        report = load_reference_agreement()
        assert report.kappas["comprehensiveness"] == 0.792
        assert report.kappas["trust"] == 0.760
        assert report.kappas["cite1"] == 0.808
        assert all(-1.0 <= k <= 1.0 for k in report.kappas.values())


def test_annotations_csv_rejects_bad_rows(tmp_path):
    path = tmp_path / "ann.csv"
    path.write_text(
        "question_id,annotator_id,domain,comprehensiveness,trust,utility,"
        "cite1,cite2,cite3,cite4,cite5\nq1,a,art,11,5,5,5,5,5,5,5\n"
    )
    with pytest.raises(ValueError, match="line 2"):
        load_annotations_csv(path)
