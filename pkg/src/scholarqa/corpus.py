"""Scholarly corpus ingest and ranked full-text search.

The index is built once from a stream of records and is immutable
afterwards, so concurrent readers need no coordination. Ranking is BM25
(k1=1.2, b=0.75) over title+abstract with title tokens counted twice;
IDF uses the smoothed ``ln(1 + (N - df + 0.5) / (df + 0.5))`` form so
scores are always non-negative. Ties break on ascending paper id.

Queries are flat search strings in which uppercase ``OR`` joins
interchangeable alternatives ("developing countries OR low-income OR
underdeveloped"): a document matching any member of an OR group scores
that group once, using its best-scoring member.
"""

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Protocol

from .text import normalize_title, normalized_similarity, tokenize

BM25_K1 = 1.2
BM25_B = 0.75
TITLE_WEIGHT = 2
LOOKUP_SIMILARITY_THRESHOLD = 0.90


class CorpusError(Exception):
    """Base class for corpus ingest problems."""


class MalformedRecordError(CorpusError):
    def __init__(self, position: int, reason: str):
        super().__init__(f"record {position}: {reason}")
        self.position = position
        self.reason = reason


class DuplicateIdError(CorpusError):
    def __init__(self, record_id: str, position: int):
        super().__init__(f"record {position}: duplicate id {record_id!r}")
        self.record_id = record_id
        self.position = position


@dataclass(frozen=True)
class PaperRecord:
    id: str
    title: str
    authors: tuple[str, ...]
    abstract: str
    full_text_available: bool
    url: str
    year: int
    domain: str

    @classmethod
    def from_json(cls, obj: dict, position: int = 0) -> "PaperRecord":
        """Build a record from a parsed corpus line; unknown keys ignored.

        Newlines inside text fields are collapsed to spaces so records
        stay line-atomic when re-serialized.
        """
        try:
            record = cls(
                id=str(obj["id"]).strip(),
                title=" ".join(str(obj["title"]).split()),
                authors=tuple(str(a) for a in obj.get("authors", [])),
                abstract=" ".join(str(obj.get("abstract", "")).split()),
                full_text_available=bool(obj["full_text_available"]),
                url=str(obj.get("url", "")).strip(),
                year=int(obj.get("year", 0)),
                domain=str(obj.get("domain", "")).strip(),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedRecordError(position, f"bad or missing field: {exc}") from exc
        record.validate(position)
        return record

    def validate(self, position: int = 0) -> None:
        if not self.id:
            raise MalformedRecordError(position, "empty id")
        if not self.title:
            raise MalformedRecordError(position, "empty title")
        if self.full_text_available and not self.url:
            raise MalformedRecordError(
                position, f"record {self.id!r} has full text but no url"
            )

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "authors": list(self.authors),
            "abstract": self.abstract,
            "full_text_available": self.full_text_available,
            "url": self.url,
            "year": self.year,
            "domain": self.domain,
        }


@dataclass(frozen=True)
class IndexStats:
    document_count: int
    full_text_count: int
    mean_abstract_words: float


@dataclass(frozen=True)
class DomainStats:
    document_count: int
    mean_abstract_words: float


@dataclass(frozen=True)
class FormattedQuery:
    """A flat search string; uppercase OR joins alternative terms."""

    text: str

    @cached_property
    def groups(self) -> tuple[tuple[str, ...], ...]:
        groups: list[list[str]] = []
        pending_or = False
        for token in self.text.split():
            if token == "OR":
                pending_or = bool(groups)
                continue
            if pending_or:
                groups[-1].append(token)
                pending_or = False
            else:
                groups.append([token])
        return tuple(tuple(g) for g in groups)


@dataclass(frozen=True)
class Hit:
    paper_id: str
    score: float


@dataclass(frozen=True)
class RetrievalResult:
    query: FormattedQuery
    hits: tuple[Hit, ...]

    def __post_init__(self):
        ids = [h.paper_id for h in self.hits]
        if len(ids) != len(set(ids)):
            raise ValueError("duplicate paper_id in hits")
        scores = [h.score for h in self.hits]
        if any(s < 0 for s in scores):
            raise ValueError("negative hit score")
        if any(a < b for a, b in zip(scores, scores[1:])):
            raise ValueError("hit scores must be non-increasing")


class RetrievalBackend(Protocol):
    """The contract shared by the local index and the remote client."""

    def search(
        self, query: "FormattedQuery | str", k: int = 5, require_full_text: bool = True
    ) -> RetrievalResult: ...

    def get(self, paper_id: str) -> PaperRecord | None: ...


@dataclass
class CorpusIndex:
    """Immutable in-memory inverted index over paper records."""

    _records: dict[str, PaperRecord] = field(default_factory=dict)
    _tf: dict[str, Counter] = field(default_factory=dict)
    _dl: dict[str, int] = field(default_factory=dict)
    _df: Counter = field(default_factory=Counter)
    _avgdl: float = 0.0
    _by_url: dict[str, str] = field(default_factory=dict)
    _by_norm_title: dict[str, str] = field(default_factory=dict)
    _norm_titles: dict[str, str] = field(default_factory=dict)

    @classmethod
    def ingest(cls, records: Iterable[PaperRecord]) -> "CorpusIndex":
        """Build an index from a record stream; duplicate ids are rejected."""
        index = cls()
        for position, record in enumerate(records, 1):
            record.validate(position)
            if record.id in index._records:
                raise DuplicateIdError(record.id, position)
            index._records[record.id] = record
            counts = Counter()
            for _ in range(TITLE_WEIGHT):
                counts.update(tokenize(record.title))
            counts.update(tokenize(record.abstract))
            index._tf[record.id] = counts
            index._dl[record.id] = sum(counts.values())
            for term in counts:
                index._df[term] += 1
            if record.url:
                index._by_url.setdefault(record.url.strip(), record.id)
            norm = normalize_title(record.title)
            index._norm_titles[record.id] = norm
            index._by_norm_title.setdefault(norm, record.id)
        if index._records:
            index._avgdl = sum(index._dl.values()) / len(index._records)
        return index

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, paper_id: str) -> bool:
        return paper_id in self._records

    def records(self) -> Iterator[PaperRecord]:
        return iter(self._records.values())

    def get(self, paper_id: str) -> PaperRecord | None:
        return self._records.get(paper_id)

    def record_by_url(self, url: str) -> PaperRecord | None:
        paper_id = self._by_url.get(url.strip())
        return self._records.get(paper_id) if paper_id else None

    def normalized_titles(self) -> dict[str, str]:
        """Paper id to pre-normalized title, for fuzzy-match scans."""
        return self._norm_titles

    @property
    def stats(self) -> IndexStats:
        n = len(self._records)
        total_words = sum(len(r.abstract.split()) for r in self._records.values())
        return IndexStats(
            document_count=n,
            full_text_count=sum(
                1 for r in self._records.values() if r.full_text_available
            ),
            mean_abstract_words=total_words / n if n else 0.0,
        )

    def domain_stats(self) -> dict[str, DomainStats]:
        """Per-domain document counts and mean abstract lengths."""
        counts: dict[str, int] = {}
        word_sums: dict[str, int] = {}
        for r in self._records.values():
            counts[r.domain] = counts.get(r.domain, 0) + 1
            word_sums[r.domain] = word_sums.get(r.domain, 0) + len(r.abstract.split())
        return {
            d: DomainStats(counts[d], word_sums[d] / counts[d]) for d in sorted(counts)
        }

    def _idf(self, term: str) -> float:
        df = self._df.get(term, 0)
        return math.log(1.0 + (len(self._records) - df + 0.5) / (df + 0.5))

    def _term_score(self, term: str, paper_id: str) -> float:
        tf = self._tf[paper_id].get(term, 0)
        if tf == 0:
            return 0.0
        norm = BM25_K1 * (1 - BM25_B + BM25_B * self._dl[paper_id] / self._avgdl)
        return self._idf(term) * tf * (BM25_K1 + 1) / (tf + norm)

    def score(self, query: "FormattedQuery | str", paper_id: str) -> float:
        """BM25 score of one document; OR groups use their best member."""
        fq = query if isinstance(query, FormattedQuery) else FormattedQuery(query)
        total = 0.0
        for group in fq.groups:
            best = 0.0
            for member in group:
                member_score = sum(
                    self._term_score(t, paper_id) for t in tokenize(member)
                )
                best = max(best, member_score)
            total += best
        return total

    def search(
        self, query: "FormattedQuery | str", k: int = 5, require_full_text: bool = True
    ) -> RetrievalResult:
        fq = query if isinstance(query, FormattedQuery) else FormattedQuery(query)
        if k < 1:
            raise ValueError("k must be >= 1")
        scored = []
        for record in self._records.values():
            if require_full_text and not record.full_text_available:
                continue
            s = self.score(fq, record.id)
            if s > 0.0:
                scored.append(Hit(record.id, s))
        scored.sort(key=lambda h: (-h.score, h.paper_id))
        return RetrievalResult(query=fq, hits=tuple(scored[:k]))

    def lookup(self, title_or_id: str) -> PaperRecord | None:
        """Exact-id match, else best normalized-title match above 0.90."""
        key = title_or_id.strip()
        if key in self._records:
            return self._records[key]
        norm = normalize_title(key)
        exact = self._by_norm_title.get(norm)
        if exact:
            return self._records[exact]
        best_id, best_sim = None, 0.0
        for paper_id, norm_title in self._norm_titles.items():
            sim = normalized_similarity(norm, norm_title)
            if sim > best_sim or (sim == best_sim and best_id and paper_id < best_id):
                best_id, best_sim = paper_id, sim
        if best_id and best_sim >= LOOKUP_SIMILARITY_THRESHOLD:
            return self._records[best_id]
        return None


def read_records(path: str | Path) -> Iterator[PaperRecord]:
    """Stream records from a UTF-8 line-delimited JSON corpus file.

    Reports the 1-based line number of any malformed line.
    """
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecordError(lineno, f"invalid JSON: {exc}") from exc
            if not isinstance(obj, dict):
                raise MalformedRecordError(lineno, "record is not an object")
            yield PaperRecord.from_json(obj, position=lineno)


def load_index(path: str | Path) -> CorpusIndex:
    """Read a corpus file and build the queryable index in one step."""
    return CorpusIndex.ingest(read_records(path))
