"""Three-stage question answering: reformulate, retrieve, generate.

Stage 1 rewrites the question into a search query, Stage 2 retrieves the
top full-text papers, Stage 3 prompts for an answer grounded solely in
the retrieved abstracts. Answers are validated (word cap, citation
groundedness) before they leave the pipeline, and questions the corpus
cannot support come back flagged ``insufficient_evidence``.
"""

import hashlib
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .corpus import FormattedQuery, PaperRecord, RetrievalBackend, RetrievalResult
from .gateway import (
    CompletionProvider,
    CompletionRequest,
    ProviderError,
    build_grounded_answer_prompt,
    build_reformulation_prompt,
)
from .text import URL_RE, sentences, word_count

ANSWER_WORD_CAP = 160
RETRIEVAL_SCORE_FLOOR = 1.0
RETRIEVAL_K = 5

DEFAULT_INSUFFICIENCY_PATTERNS = (
    "do not offer specific information",
    "does not offer specific information",
    "further research on this topic would be necessary",
    "not enough relevant content",
    "unable to answer",
)

INSUFFICIENT_ANSWER_TEMPLATE = (
    "The available results do not offer specific information on the question: "
    "{question} To obtain a comprehensive answer, further research on this "
    "topic would be necessary."
)


class PipelineError(Exception):
    """Failure inside one pipeline stage; carries the stage label."""

    def __init__(self, stage: str, message: str, cause: Exception | None = None):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class Citation:
    paper_id: str
    url: str
    title: str


@dataclass(frozen=True)
class GroundedAnswer:
    question_id: str
    question: str
    answer_text: str
    citations: tuple[Citation, ...]
    insufficient_evidence: bool
    retrieval: RetrievalResult
    created_at: str
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "question_id": self.question_id,
            "question": self.question,
            "answer_text": self.answer_text,
            "citations": [
                {"paper_id": c.paper_id, "url": c.url, "title": c.title}
                for c in self.citations
            ],
            "insufficient_evidence": self.insufficient_evidence,
            "retrieval": {
                "query": self.retrieval.query.text,
                "hits": [[h.paper_id, h.score] for h in self.retrieval.hits],
            },
            "created_at": self.created_at,
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "GroundedAnswer":
        from .corpus import Hit

        return cls(
            question_id=obj["question_id"],
            question=obj["question"],
            answer_text=obj["answer_text"],
            citations=tuple(
                Citation(c["paper_id"], c["url"], c["title"]) for c in obj["citations"]
            ),
            insufficient_evidence=obj["insufficient_evidence"],
            retrieval=RetrievalResult(
                query=FormattedQuery(obj["retrieval"]["query"]),
                hits=tuple(Hit(pid, score) for pid, score in obj["retrieval"]["hits"]),
            ),
            created_at=obj["created_at"],
            notes=tuple(obj.get("notes", ())),
        )


@dataclass
class ValidatedAnswer:
    answer_text: str
    citations: tuple[Citation, ...]
    violations: list[str] = field(default_factory=list)


def question_digest(question: str) -> str:
    """Stable opaque id for a question."""
    return hashlib.sha1(question.strip().encode("utf-8")).hexdigest()[:12]


def detect_insufficiency(
    answer_text: str,
    patterns: tuple[str, ...] = DEFAULT_INSUFFICIENCY_PATTERNS,
) -> bool:
    """True when the answer hedges. An empty answer is never sufficient."""
    if not answer_text.strip():
        return True
    lowered = answer_text.lower()
    return any(p.lower() in lowered for p in patterns)


def _split_body_and_links(raw: str) -> tuple[list[str], list[str]]:
    """Separate prose lines from bare-link lines (the citation block)."""
    body_lines, link_lines = [], []
    for line in raw.splitlines():
        if URL_RE.fullmatch(line.strip()):
            link_lines.append(line.strip())
        else:
            body_lines.append(line)
    return body_lines, link_lines


def validate_answer(
    raw: str,
    retrieval: RetrievalResult,
    evidence: list[PaperRecord],
    word_cap: int = ANSWER_WORD_CAP,
) -> ValidatedAnswer:
    """Enforce the word cap and strip citations outside the retrieval set.

    Violations are recorded as data, not raised: over-long answers are
    truncated at the last sentence boundary that fits, and any cited url
    not present in the evidence is removed with a groundedness note.
    """
    violations: list[str] = []
    by_url = {record.url: record for record in evidence if record.url}
    retrieved_ids = {hit.paper_id for hit in retrieval.hits}

    text = raw.strip()
    cited: list[PaperRecord] = []
    for url in URL_RE.findall(text):
        record = by_url.get(url.rstrip(".,;"))
        if record is None or record.id not in retrieved_ids:
            violations.append(f"removed citation outside retrieval set: {url}")
            text = text.replace(url, "").strip()
        elif all(c.id != record.id for c in cited):
            cited.append(record)

    if word_count(text) > word_cap:
        body_lines, link_lines = _split_body_and_links(text)
        budget = word_cap - len(link_lines)
        kept: list[str] = []
        used = 0
        for sentence in sentences(" ".join(body_lines)):
            cost = len(sentence.split())
            if used + cost > budget:
                break
            kept.append(sentence)
            used += cost
        if not kept:
            # No sentence boundary fits; cut on a word boundary instead.
            kept = [" ".join(" ".join(body_lines).split()[:budget])]
        text = " ".join(kept)
        if link_lines:
            text += "\n" + "\n".join(link_lines)
        violations.append(f"truncated answer to {word_cap} words")

    citations = tuple(Citation(r.id, r.url, r.title) for r in cited)
    return ValidatedAnswer(answer_text=text, citations=citations, violations=violations)


def _insufficient_answer(
    question: str, retrieval: RetrievalResult, note: str
) -> GroundedAnswer:
    text = INSUFFICIENT_ANSWER_TEMPLATE.format(question=_terminated(question))
    return GroundedAnswer(
        question_id=question_digest(question),
        question=question,
        answer_text=text,
        citations=(),
        insufficient_evidence=True,
        retrieval=retrieval,
        created_at=_now(),
        notes=(note,),
    )


def _terminated(question: str) -> str:
    return question if re.search(r"[.!?]$", question) else question + "?"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def answer_question(
    question: str,
    backend: RetrievalBackend,
    provider: CompletionProvider,
    *,
    k: int = RETRIEVAL_K,
    score_floor: float = RETRIEVAL_SCORE_FLOOR,
    insufficiency_patterns: tuple[str, ...] = DEFAULT_INSUFFICIENCY_PATTERNS,
) -> GroundedAnswer:
    """Run the full three-stage workflow for one question."""
    question = question.strip()
    if not question:
        raise ValueError("question must be non-empty")

    reformulation = build_reformulation_prompt(question)
    try:
        stage1 = provider.complete(
            CompletionRequest(prompt=reformulation.render(), provider=provider.name)
        )
    except ProviderError as exc:
        raise PipelineError("reformulate", str(exc), exc) from exc
    query = FormattedQuery(" ".join(stage1.text.split()))

    try:
        retrieval = backend.search(query, k=k, require_full_text=True)
    except Exception as exc:
        raise PipelineError("retrieve", str(exc), exc) from exc

    if not retrieval.hits or retrieval.hits[0].score < score_floor:
        reason = "no results" if not retrieval.hits else "retrieval score below floor"
        return _insufficient_answer(question, retrieval, reason)

    evidence: list[PaperRecord] = []
    for hit in retrieval.hits:
        record = backend.get(hit.paper_id)
        if record is None:
            raise PipelineError("retrieve", f"hit {hit.paper_id!r} has no record")
        evidence.append(record)

    validated = _generate_and_validate(question, evidence, retrieval, provider, seed=None)
    if _needs_regeneration(validated, insufficiency_patterns):
        validated = _generate_and_validate(
            question, evidence, retrieval, provider, seed=1
        )
        if _needs_regeneration(validated, insufficiency_patterns):
            raise PipelineError(
                "validate",
                "answer failed validation after one regeneration: "
                + "; ".join(validated.violations),
            )

    insufficient = detect_insufficiency(validated.answer_text, insufficiency_patterns)
    return GroundedAnswer(
        question_id=question_digest(question),
        question=question,
        answer_text=validated.answer_text,
        citations=validated.citations,
        insufficient_evidence=insufficient,
        retrieval=retrieval,
        created_at=_now(),
        notes=tuple(validated.violations),
    )


def _generate_and_validate(
    question: str,
    evidence: list[PaperRecord],
    retrieval: RetrievalResult,
    provider: CompletionProvider,
    seed: int | None,
) -> ValidatedAnswer:
    prompt = build_grounded_answer_prompt(
        question, [(r.title, r.abstract, r.url) for r in evidence]
    )
    try:
        response = provider.complete(
            CompletionRequest(prompt=prompt.render(), provider=provider.name, seed=seed)
        )
    except ProviderError as exc:
        raise PipelineError("generate", str(exc), exc) from exc
    return validate_answer(response.text, retrieval, evidence)


def _needs_regeneration(
    validated: ValidatedAnswer, patterns: tuple[str, ...]
) -> bool:
    """A hard failure: empty text, or a confident answer with no citations."""
    if not validated.answer_text.strip():
        return True
    hedged = detect_insufficiency(validated.answer_text, patterns)
    return not hedged and not validated.citations
