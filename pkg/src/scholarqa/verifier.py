"""Classify claimed citations as factual, conflated, or fictional.

A claim is checked against a metadata index on three signals: fuzzy
title similarity, author-surname overlap, and where its link resolves.
A factual citation matches a real paper on title plus a corroborating
signal; a conflated one mixes real elements (true title with wrong
authors, borrowed author names, or a link to a different real paper);
a fictional one matches nothing.
"""

import json
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .corpus import CorpusIndex
from .text import author_overlap, normalize_title, normalized_similarity


class Verdict(str, Enum):
    FACTUAL = "factual"
    CONFLATED = "conflated"
    FICTIONAL = "fictional"


class UrlStatus(str, Enum):
    RESOLVES_TO_MATCH = "resolves_to_match"
    RESOLVES_ELSEWHERE = "resolves_elsewhere"
    DEAD = "dead"
    ABSENT = "absent"


GRID_CHARS = {Verdict.FACTUAL: "G", Verdict.CONFLATED: "Y", Verdict.FICTIONAL: "R"}
MISSING_CELL_CHAR = "."

ROW_WIDTH = 5


@dataclass(frozen=True)
class Thresholds:
    """Signal cutoffs; similarity values live in [0, 1]."""

    title_match: float = 0.90
    title_partial: float = 0.60
    author_match: float = 0.50


DEFAULT_THRESHOLDS = Thresholds()


@dataclass(frozen=True)
class ClaimedCitation:
    answer_id: str
    position: int
    claimed_title: str
    claimed_authors: tuple[str, ...] = ()
    claimed_url: str | None = None
    source_model: str = "unknown"

    def __post_init__(self):
        if not 1 <= self.position <= ROW_WIDTH:
            raise ValueError(f"position must be in 1..{ROW_WIDTH}, got {self.position}")
        if not self.claimed_title.strip():
            raise ValueError("claimed_title must be non-empty")


@dataclass(frozen=True)
class CitationVerdict:
    verdict: Verdict
    matched_paper_id: str | None
    title_similarity: float
    author_overlap: float
    url_status: UrlStatus


@dataclass(frozen=True)
class AuditRow:
    answer_id: str
    cells: tuple[CitationVerdict | None, ...]


@dataclass(frozen=True)
class AuditReport:
    rows: tuple[AuditRow, ...]
    rates: dict[str, float]
    total_claims: int
    issues: tuple[str, ...] = ()


def classify(
    title_sim: float,
    matched_author_overlap: float,
    best_author_overlap: float,
    url_status: UrlStatus,
    thresholds: Thresholds = DEFAULT_THRESHOLDS,
) -> Verdict:
    """Pure verdict rule over the extracted signals.

    Verdicts are mutually exclusive and exhaustive, and raising either
    similarity signal can only promote a claim along
    fictional -> conflated -> factual.
    """
    if title_sim >= thresholds.title_match and (
        url_status is UrlStatus.RESOLVES_TO_MATCH
        or matched_author_overlap >= thresholds.author_match
    ):
        return Verdict.FACTUAL
    if (
        title_sim >= thresholds.title_partial
        or best_author_overlap >= thresholds.author_match
        or url_status in (UrlStatus.RESOLVES_TO_MATCH, UrlStatus.RESOLVES_ELSEWHERE)
    ):
        return Verdict.CONFLATED
    return Verdict.FICTIONAL


def verify_citation(
    claim: ClaimedCitation,
    index: CorpusIndex,
    thresholds: Thresholds = DEFAULT_THRESHOLDS,
) -> CitationVerdict:
    """Check one claim against the index.

    Link resolution is an id/url table lookup against the index; a url
    matching no record degrades to ``dead`` and classification proceeds
    on the text signals.
    """
    claim_norm = normalize_title(claim.claimed_title)
    best_id = None
    best_sim = 0.0
    for paper_id, norm_title in index.normalized_titles().items():
        if claim_norm and norm_title:
            # Length gap bounds the similarity; skip hopeless candidates.
            bound = 1.0 - abs(len(claim_norm) - len(norm_title)) / max(
                len(claim_norm), len(norm_title)
            )
            if bound < best_sim:
                continue
        sim = normalized_similarity(claim_norm, norm_title)
        if sim > best_sim or (sim == best_sim and best_id and paper_id < best_id):
            best_id, best_sim = paper_id, sim
    best_record = index.get(best_id) if best_id else None

    best_overlap = 0.0
    if claim.claimed_authors:
        claimed = list(claim.claimed_authors)
        for record in index.records():
            best_overlap = max(
                best_overlap, author_overlap(claimed, list(record.authors))
            )

    matched_overlap = (
        author_overlap(list(claim.claimed_authors), list(best_record.authors))
        if best_record and claim.claimed_authors
        else 0.0
    )

    url_record = None
    if not claim.claimed_url:
        url_status = UrlStatus.ABSENT
    else:
        url_record = index.record_by_url(claim.claimed_url)
        if url_record is None:
            url_status = UrlStatus.DEAD
        elif best_record is not None and url_record.id == best_record.id:
            url_status = UrlStatus.RESOLVES_TO_MATCH
        else:
            url_status = UrlStatus.RESOLVES_ELSEWHERE

    verdict = classify(best_sim, matched_overlap, best_overlap, url_status, thresholds)

    matched_id = None
    if verdict is Verdict.FACTUAL:
        matched_id = best_record.id
    elif verdict is Verdict.CONFLATED:
        if best_sim >= thresholds.title_partial and best_record:
            matched_id = best_record.id
        elif url_record is not None:
            matched_id = url_record.id

    return CitationVerdict(
        verdict=verdict,
        matched_paper_id=matched_id,
        title_similarity=best_sim,
        author_overlap=best_overlap,
        url_status=url_status,
    )


def audit_answers(
    claims: list[ClaimedCitation],
    index: CorpusIndex,
    thresholds: Thresholds = DEFAULT_THRESHOLDS,
) -> AuditReport:
    """Verify every claim and aggregate a per-answer verdict grid.

    Answers missing positions get absent cells and a reported issue; the
    rates are percentages over all verified claims.
    """
    verdicts = [verify_citation(c, index, thresholds) for c in claims]
    by_answer: dict[str, dict[int, CitationVerdict]] = {}
    issues: list[str] = []
    for claim, verdict in zip(claims, verdicts):
        row = by_answer.setdefault(claim.answer_id, {})
        if claim.position in row:
            issues.append(
                f"answer {claim.answer_id}: duplicate position {claim.position}"
            )
            continue
        row[claim.position] = verdict

    rows = []
    for answer_id in sorted(by_answer):
        row = by_answer[answer_id]
        if len(row) != ROW_WIDTH:
            issues.append(
                f"answer {answer_id}: expected {ROW_WIDTH} claims, got {len(row)}"
            )
        rows.append(
            AuditRow(
                answer_id=answer_id,
                cells=tuple(row.get(p) for p in range(1, ROW_WIDTH + 1)),
            )
        )

    counts = Counter(v.verdict for v in verdicts)
    total = len(verdicts)
    rates = {
        "factual_pct": 100.0 * counts[Verdict.FACTUAL] / total if total else 0.0,
        "conflated_pct": 100.0 * counts[Verdict.CONFLATED] / total if total else 0.0,
        "fictional_pct": 100.0 * counts[Verdict.FICTIONAL] / total if total else 0.0,
    }
    return AuditReport(
        rows=tuple(rows), rates=rates, total_claims=total, issues=tuple(issues)
    )


@dataclass(frozen=True)
class DotGrid:
    text: str
    plot_rows: tuple[dict, ...]


def render_dot_grid(report: AuditReport) -> DotGrid:
    """Text grid (one G/Y/R row per answer) plus flat plot-data rows."""
    lines = []
    plot_rows = []
    for row in report.rows:
        chars = []
        for position, cell in enumerate(row.cells, 1):
            chars.append(GRID_CHARS[cell.verdict] if cell else MISSING_CELL_CHAR)
            plot_rows.append(
                {
                    "answer_id": row.answer_id,
                    "position": position,
                    "verdict": cell.verdict.value if cell else "absent",
                }
            )
        lines.append("".join(chars))
    return DotGrid(text="\n".join(lines), plot_rows=tuple(plot_rows))


def load_claims(path: str | Path) -> list[ClaimedCitation]:
    """Read line-delimited claim records; unknown fields are ignored."""
    claims = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                claims.append(
                    ClaimedCitation(
                        answer_id=str(obj["answer_id"]),
                        position=int(obj["position"]),
                        claimed_title=str(obj["claimed_title"]),
                        claimed_authors=tuple(
                            str(a) for a in obj.get("claimed_authors", [])
                        ),
                        claimed_url=obj.get("claimed_url") or None,
                        source_model=str(obj.get("source_model", "unknown")),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"claims line {lineno}: {exc}") from exc
    return claims
