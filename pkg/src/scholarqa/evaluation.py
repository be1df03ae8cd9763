"""Agreement statistics, per-domain score tables, and correlation reports.

Covers everything the human evaluation produces: quadratic-weighted
Cohen's kappa between two annotators, per-domain mean score tables for
answer quality (comprehensiveness / trust / utility) and per-position
citation relevance, the rank-relevance curve, and the Pearson
correlation suite relating answer quality to corpus size, abstract
length, and citation relevance.

Published evaluation results ship as bundled reference tables (the raw
two-annotator data is not distributable); the computations themselves
are validated against synthetic oracles in the test suite.
"""

import csv
import io
import warnings
from collections import defaultdict
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import DomainStats

SCORE_CATEGORIES = 11  # integer scores 0..10
CITE_POSITIONS = 5

AGREEMENT_METRICS = (
    "comprehensiveness",
    "trust",
    "utility",
    "cite1",
    "cite2",
    "cite3",
    "cite4",
    "cite5",
)


class InsufficientDataError(ValueError):
    """A statistic's precondition is not met; explains which one."""


@dataclass(frozen=True)
class AnnotationRecord:
    question_id: str
    annotator_id: str
    domain: str
    comprehensiveness: int
    trust: int
    utility: int
    cite_relevance: tuple[int, ...]

    def __post_init__(self):
        scores = (self.comprehensiveness, self.trust, self.utility) + tuple(
            self.cite_relevance
        )
        if len(self.cite_relevance) != CITE_POSITIONS:
            raise ValueError(
                f"expected {CITE_POSITIONS} citation scores, got {len(self.cite_relevance)}"
            )
        for s in scores:
            if not 0 <= s <= 10:
                raise ValueError(f"score {s} outside 0..10")


@dataclass(frozen=True)
class QualityRow:
    domain: str
    comprehensiveness: float
    trust: float
    utility: float
    mean: float


@dataclass(frozen=True)
class CitationRow:
    domain: str
    cites: tuple[float, ...]
    mean: float


@dataclass(frozen=True)
class DomainScoreTable:
    quality_rows: tuple[QualityRow, ...]
    citation_rows: tuple[CitationRow, ...]
    # Pre-aggregated per-position means, when the table carries one
    # (published tables do; recomputing from rounded cells drifts).
    position_means: tuple[float, ...] | None = None

    def quality_by_domain(self) -> dict[str, QualityRow]:
        return {r.domain: r for r in self.quality_rows}

    def citations_by_domain(self) -> dict[str, CitationRow]:
        return {r.domain: r for r in self.citation_rows}


@dataclass(frozen=True)
class AgreementReport:
    kappas: dict[str, float]
    n_pairs: int
    annotators: tuple[str, str] | None = None
    degenerate: tuple[str, ...] = ()


@dataclass(frozen=True)
class RankRelevanceCurve:
    means: tuple[float, ...]
    non_increasing: bool


@dataclass(frozen=True)
class CorrelationEntry:
    name: str
    n: int
    r: float


@dataclass(frozen=True)
class CorrelationReport:
    entries: tuple[CorrelationEntry, ...]
    skipped: tuple[str, ...] = ()

    def by_name(self) -> dict[str, CorrelationEntry]:
        return {e.name: e for e in self.entries}


@dataclass
class EvalReport:
    """Everything one evaluation run produces, ready for export."""

    table: DomainScoreTable | None = None
    agreement: AgreementReport | None = None
    curve: RankRelevanceCurve | None = None
    correlations: CorrelationReport | None = None
    notes: list[str] = field(default_factory=list)


def quadratic_weighted_kappa(
    ratings_a: Sequence[int],
    ratings_b: Sequence[int],
    num_categories: int = SCORE_CATEGORIES,
) -> float:
    """Cohen's kappa with quadratic weights over a fixed category range.

    kappa = 1 - sum(w * O) / sum(w * E), where O is the observed
    confusion matrix, E the outer product of the marginals scaled to the
    same total, and w[i][j] = (i - j)^2 / (C - 1)^2. The expected matrix
    is built over the full category range even when some categories are
    unobserved, so results stay comparable across samples.

    Identical ratings give exactly 1.0. When both raters are constant
    and equal, sum(w * E) is zero and the statistic is undefined; this
    degenerate case returns 1.0 and emits a RuntimeWarning.
    """
    if len(ratings_a) != len(ratings_b):
        raise ValueError(
            f"rating lists differ in length: {len(ratings_a)} vs {len(ratings_b)}"
        )
    if len(ratings_a) < 2:
        raise ValueError("need at least 2 paired ratings")
    c = num_categories
    for value in (*ratings_a, *ratings_b):
        if not 0 <= value < c:
            raise ValueError(f"rating {value} outside 0..{c - 1}")
    if list(ratings_a) == list(ratings_b):
        samesame = len(set(ratings_a)) == 1
        if samesame:
            warnings.warn(
                "degenerate kappa: both raters constant and equal", RuntimeWarning
            )
        return 1.0

    observed = np.zeros((c, c))
    for a, b in zip(ratings_a, ratings_b):
        observed[a][b] += 1
    expected = np.outer(observed.sum(axis=1), observed.sum(axis=0)) / len(ratings_a)
    idx = np.arange(c)
    weights = (idx[:, None] - idx[None, :]) ** 2 / (c - 1) ** 2
    denominator = float((weights * expected).sum())
    if denominator == 0.0:
        warnings.warn(
            "degenerate kappa: both raters constant and equal", RuntimeWarning
        )
        return 1.0
    return 1.0 - float((weights * observed).sum()) / denominator


def pearson_r(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Sample Pearson correlation; constant input is an explicit error."""
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} vs {len(ys)}")
    if len(xs) < 3:
        raise ValueError("need at least 3 points")
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise ValueError("pearson_r is undefined for constant input")
    return float(np.corrcoef(x, y)[0, 1])


def domain_means(annotations: Iterable[AnnotationRecord]) -> DomainScoreTable:
    """Per-domain arithmetic means pooled across annotators and questions."""
    records = list(annotations)
    if not records:
        raise InsufficientDataError("no annotation records")
    grouped: dict[str, list[AnnotationRecord]] = defaultdict(list)
    for record in records:
        if not record.domain:
            raise InsufficientDataError(
                f"annotation for {record.question_id} has no domain"
            )
        grouped[record.domain].append(record)

    quality_rows = []
    citation_rows = []
    for domain in sorted(grouped):
        rows = grouped[domain]
        comp = float(np.mean([r.comprehensiveness for r in rows]))
        trust = float(np.mean([r.trust for r in rows]))
        utility = float(np.mean([r.utility for r in rows]))
        quality_rows.append(
            QualityRow(domain, comp, trust, utility, (comp + trust + utility) / 3)
        )
        cites = tuple(
            float(np.mean([r.cite_relevance[i] for r in rows]))
            for i in range(CITE_POSITIONS)
        )
        citation_rows.append(CitationRow(domain, cites, float(np.mean(cites))))
    return DomainScoreTable(tuple(quality_rows), tuple(citation_rows))


def rank_relevance_curve(table: DomainScoreTable) -> RankRelevanceCurve:
    """Mean relevance per citation position across domains.

    A table that carries a pre-aggregated means row reports that row;
    otherwise the column means are computed from the per-domain rows.
    """
    if table.position_means is not None:
        means = table.position_means
    else:
        if not table.citation_rows:
            raise InsufficientDataError("table has no citation rows")
        means = tuple(
            float(np.mean([row.cites[i] for row in table.citation_rows]))
            for i in range(CITE_POSITIONS)
        )
    non_increasing = all(a >= b for a, b in zip(means, means[1:]))
    return RankRelevanceCurve(means=means, non_increasing=non_increasing)


def compute_agreement(annotations: Iterable[AnnotationRecord]) -> AgreementReport:
    """Per-metric quadratic-weighted kappa between the first two annotators.

    Pairs are formed over questions both annotators scored, ordered by
    question id for reproducibility.
    """
    records = list(annotations)
    by_annotator: dict[str, dict[str, AnnotationRecord]] = defaultdict(dict)
    for record in records:
        by_annotator[record.annotator_id][record.question_id] = record
    if len(by_annotator) < 2:
        raise InsufficientDataError(
            f"agreement needs at least 2 annotators, got {len(by_annotator)}"
        )
    first, second = sorted(by_annotator)[:2]
    common = sorted(set(by_annotator[first]) & set(by_annotator[second]))
    if len(common) < 2:
        raise InsufficientDataError(
            f"annotators {first!r} and {second!r} share only {len(common)} "
            "scored questions; need at least 2"
        )

    def metric_values(record: AnnotationRecord, metric: str) -> int:
        if metric.startswith("cite"):
            return record.cite_relevance[int(metric[4:]) - 1]
        return getattr(record, metric)

    kappas = {}
    degenerate = []
    for metric in AGREEMENT_METRICS:
        a = [metric_values(by_annotator[first][q], metric) for q in common]
        b = [metric_values(by_annotator[second][q], metric) for q in common]
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            kappas[metric] = quadratic_weighted_kappa(a, b)
        if caught:
            degenerate.append(metric)
    return AgreementReport(
        kappas=kappas,
        n_pairs=len(common),
        annotators=(first, second),
        degenerate=tuple(degenerate),
    )


QUALITY_VS_SIZE = "quality_vs_corpus_size"
QUALITY_VS_ABSTRACT_LENGTH = "quality_vs_abstract_length"
RELEVANCE_CORRELATIONS = (
    ("comprehensiveness_vs_citation_relevance", "comprehensiveness"),
    ("trust_vs_citation_relevance", "trust"),
    ("utility_vs_citation_relevance", "utility"),
)


def correlation_suite(
    table: DomainScoreTable,
    corpus_stats: Mapping[str, DomainStats] | None = None,
) -> CorrelationReport:
    """The four correlation analyses over per-domain aggregates.

    Quality-vs-corpus-size and quality-vs-abstract-length need per-domain
    corpus statistics and are skipped (and reported) without them. The
    three quality-vs-citation-relevance correlations need both score
    tables; domains missing from either side are dropped pairwise.
    """
    entries: list[CorrelationEntry] = []
    skipped: list[str] = []
    quality = table.quality_by_domain()
    citations = table.citations_by_domain()

    def run(name: str, xs: list[float], ys: list[float]) -> None:
        try:
            entries.append(CorrelationEntry(name, len(xs), pearson_r(xs, ys)))
        except ValueError as exc:
            skipped.append(f"{name}: {exc}")

    if corpus_stats:
        domains = sorted(set(quality) & set(corpus_stats))
        missing = sorted(set(quality) ^ set(corpus_stats))
        if missing:
            skipped.append(f"domains missing corpus stats: {', '.join(missing)}")
        overall = [quality[d].mean for d in domains]
        run(QUALITY_VS_SIZE, [float(corpus_stats[d].document_count) for d in domains], overall)
        run(QUALITY_VS_ABSTRACT_LENGTH,
            [corpus_stats[d].mean_abstract_words for d in domains], overall)
    else:
        skipped.append(f"{QUALITY_VS_SIZE}: no per-domain corpus stats supplied")
        skipped.append(f"{QUALITY_VS_ABSTRACT_LENGTH}: no per-domain corpus stats supplied")

    shared = sorted(set(quality) & set(citations))
    dropped = sorted(set(quality) ^ set(citations))
    if dropped:
        skipped.append(f"domains missing a score table: {', '.join(dropped)}")
    relevance = [citations[d].mean for d in shared]
    for name, attr in RELEVANCE_CORRELATIONS:
        run(name, relevance, [getattr(quality[d], attr) for d in shared])
    return CorrelationReport(entries=tuple(entries), skipped=tuple(skipped))


# ---------------------------------------------------------------------------
# Input / output


def load_annotations_csv(path: str | Path) -> list[AnnotationRecord]:
    """Evaluation-platform export: one row per (question, annotator)."""
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(line for line in fh if not line.startswith("#"))
        for i, row in enumerate(reader, 2):
            try:
                records.append(
                    AnnotationRecord(
                        question_id=row["question_id"].strip(),
                        annotator_id=row["annotator_id"].strip(),
                        domain=row["domain"].strip(),
                        comprehensiveness=int(row["comprehensiveness"]),
                        trust=int(row["trust"]),
                        utility=int(row["utility"]),
                        cite_relevance=tuple(
                            int(row[f"cite{j}"]) for j in range(1, CITE_POSITIONS + 1)
                        ),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"annotations line {i}: {exc}") from exc
    return records


def _fmt(value: float, places: int) -> str:
    return f"{value:.{places}f}"


def export_report(report: EvalReport, out_dir: str | Path) -> dict[str, Path]:
    """Write CSV tables and plot-data files for the report's contents.

    Emits the quality and citation-relevance tables, the agreement
    table, the correlation list, and plot data for the two per-domain
    charts (quality sorted by comprehensiveness, relevance sorted by
    first-citation score). Sections absent from the report produce
    header-only files so downstream tooling sees a stable layout.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: dict[str, Path] = {}

    def write(name: str, header: list[str], rows: list[list[str]]) -> None:
        path = out / name
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        path.write_text(buffer.getvalue(), encoding="utf-8")
        written[name] = path

    quality_rows = list(report.table.quality_rows) if report.table else []
    citation_rows = list(report.table.citation_rows) if report.table else []

    write(
        "domain_quality.csv",
        ["domain", "comprehensiveness", "trust", "utility", "mean"],
        [
            [r.domain, _fmt(r.comprehensiveness, 1), _fmt(r.trust, 1), _fmt(r.utility, 1), _fmt(r.mean, 2)]
            for r in quality_rows
        ],
    )
    citation_table_rows = [
        [r.domain, *(_fmt(c, 1) for c in r.cites), _fmt(r.mean, 2)]
        for r in citation_rows
    ]
    if report.table and report.table.position_means:
        citation_table_rows.append(
            ["Mean", *(_fmt(c, 2) for c in report.table.position_means), ""]
        )
    write(
        "citation_relevance.csv",
        ["domain", "cite1", "cite2", "cite3", "cite4", "cite5", "mean"],
        citation_table_rows,
    )
    write(
        "agreement.csv",
        ["metric", "kappa"],
        [
            [metric, _fmt(report.agreement.kappas[metric], 3)]
            for metric in AGREEMENT_METRICS
        ]
        if report.agreement
        else [],
    )
    write(
        "correlations.csv",
        ["analysis", "n", "r"],
        [
            [e.name, str(e.n), _fmt(e.r, 2)]
            for e in (report.correlations.entries if report.correlations else ())
        ],
    )
    write(
        "quality_by_domain_plotdata.csv",
        ["domain", "comprehensiveness", "trust", "utility"],
        [
            [r.domain, _fmt(r.comprehensiveness, 1), _fmt(r.trust, 1), _fmt(r.utility, 1)]
            for r in sorted(
                quality_rows, key=lambda r: (-r.comprehensiveness, r.domain)
            )
        ],
    )
    write(
        "relevance_by_domain_plotdata.csv",
        ["domain", "cite1", "cite2", "cite3", "cite4", "cite5"],
        [
            [r.domain, *(_fmt(c, 1) for c in r.cites)]
            for r in sorted(citation_rows, key=lambda r: (-r.cites[0], r.domain))
        ],
    )
    return written


# ---------------------------------------------------------------------------
# Bundled reference tables (published evaluation results)


def _reference_text(name: str) -> str:
    return resources.files("scholarqa.data.reference").joinpath(name).read_text("utf-8")


def _reference_rows(name: str) -> list[dict]:
    lines = [l for l in _reference_text(name).splitlines() if not l.startswith("#")]
    return list(csv.DictReader(lines))


def load_reference_tables() -> DomainScoreTable:
    """The published per-domain mean score tables (20 domains)."""
    quality_rows = tuple(
        QualityRow(
            domain=row["domain"],
            comprehensiveness=float(row["comprehensiveness"]),
            trust=float(row["trust"]),
            utility=float(row["utility"]),
            mean=float(row["mean"]),
        )
        for row in _reference_rows("domain_quality.csv")
    )
    citation_rows = []
    position_means = None
    for row in _reference_rows("citation_relevance.csv"):
        cites = tuple(float(row[f"cite{i}"]) for i in range(1, CITE_POSITIONS + 1))
        if row["domain"] == "Mean":
            position_means = cites
        else:
            citation_rows.append(
                CitationRow(domain=row["domain"], cites=cites, mean=float(row["mean"]))
            )
    return DomainScoreTable(
        quality_rows=quality_rows,
        citation_rows=tuple(citation_rows),
        position_means=position_means,
    )


def load_reference_agreement() -> AgreementReport:
    """The published inter-annotator agreement values."""
    kappas = {
        row["metric"]: float(row["kappa"]) for row in _reference_rows("agreement.csv")
    }
    return AgreementReport(kappas=kappas, n_pairs=100, annotators=None)
