"""Deterministic offline completion provider.

Every output is a pure function of (rendered prompt, seed). Grounded
answers are extractive: the stub only ever emits sentences copied
verbatim from the supplied abstracts and cites only supplied links,
which makes pipeline groundedness testable without a real model.
"""

import json
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from ..text import sentences, tokenize, words
from .prompts import (
    GROUNDED_ANSWER_WORD_CAP,
    GROUNDING_INSTRUCTIONS,
    QUESTION_GENERATION_INSTRUCTIONS,
    REFORMULATION_INSTRUCTIONS,
)
from .providers import CompletionRequest, CompletionResponse

HEDGE_ANSWER = (
    "The provided results do not offer specific information on this question. "
    "To obtain a comprehensive answer, further research on this topic would be necessary."
)

QUESTION_FORMS = (
    "What are the current research challenges in {domain}?",
    "How have recent methodological advances shaped research in {domain}?",
    "Which factors limit the reproducibility of findings in {domain}?",
    "How can interdisciplinary approaches improve outcomes in {domain} research?",
    "What role does data availability play in advancing {domain}?",
)

_QUESTION_LINE_RE = re.compile(r"^Question: (.*)$", re.MULTILINE)
_EVIDENCE_BLOCK_RE = re.compile(
    r"^\d+\. Title: (?P<title>.*)\n(?:Abstract: (?P<abstract>.*)\n)?Link: (?P<url>.*)$",
    re.MULTILINE,
)


@lru_cache(maxsize=1)
def stopwords() -> frozenset[str]:
    raw = resources.files("scholarqa.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(
        line.strip() for line in raw.splitlines() if line.strip() and not line.startswith("#")
    )


@lru_cache(maxsize=1)
def thesaurus() -> dict[str, tuple[str, ...]]:
    raw = resources.files("scholarqa.data").joinpath("thesaurus.json").read_text("utf-8")
    entries = json.loads(raw)
    return {
        term: tuple(syns)
        for term, syns in entries.items()
        if not term.startswith("_")
    }


def content_terms(text: str) -> list[str]:
    """Hyphen-preserving lowercase words with stopwords removed."""
    return [w for w in words(text) if w not in stopwords()]


@dataclass(frozen=True)
class _EvidenceBlock:
    title: str
    abstract: str
    url: str


class StubProvider:
    name = "stub"

    def complete(self, request: CompletionRequest) -> CompletionResponse:
        seed = request.effective_seed()
        prompt = request.prompt
        if prompt.startswith(GROUNDING_INSTRUCTIONS):
            text = self._grounded_answer(prompt)
        elif prompt.startswith(QUESTION_GENERATION_INSTRUCTIONS):
            text = self._generated_question(prompt, seed)
        elif prompt.startswith(REFORMULATION_INSTRUCTIONS):
            text = self._reformulated_query(prompt)
        else:
            # Unknown template: acknowledge deterministically.
            text = f"stub:{seed % 10**8:08d}"
        return CompletionResponse(
            text=text, provider=self.name, metadata={"seed": seed}
        )

    def _question_payload(self, prompt: str) -> str:
        match = _QUESTION_LINE_RE.search(prompt)
        return match.group(1).strip() if match else ""

    def _reformulated_query(self, prompt: str) -> str:
        question = self._question_payload(prompt)
        expansions = thesaurus()
        parts: list[str] = []
        for term in content_terms(question):
            parts.append(term)
            for synonym in expansions.get(term, ()):
                parts.extend(["OR", synonym])
        return " ".join(parts)

    def _generated_question(self, prompt: str, seed: int) -> str:
        domain = prompt.removeprefix(QUESTION_GENERATION_INSTRUCTIONS).strip()
        form = QUESTION_FORMS[seed % len(QUESTION_FORMS)]
        return form.format(domain=domain)

    def _grounded_answer(self, prompt: str) -> str:
        question = self._question_payload(prompt)
        blocks = [
            _EvidenceBlock(
                title=m.group("title"),
                abstract=m.group("abstract") or "",
                url=m.group("url"),
            )
            for m in _EVIDENCE_BLOCK_RE.finditer(prompt)
        ]
        terms = set(content_terms(question))

        # Candidate sentences per document, best overlap first. Sentences
        # without terminal punctuation are skipped so the emitted answer
        # re-splits on the same boundaries.
        queues: list[list[str]] = []
        for block in blocks:
            candidates = []
            for position, sentence in enumerate(sentences(block.abstract)):
                if sentence[-1] not in ".!?":
                    continue
                overlap = len(terms.intersection(tokenize(sentence)))
                if overlap > 0:
                    candidates.append((-overlap, position, sentence))
            candidates.sort()
            queues.append([sentence for _, _, sentence in candidates])

        if not any(queues):
            return HEDGE_ANSWER

        chosen: list[str] = []
        cited: list[int] = []
        budget = GROUNDED_ANSWER_WORD_CAP
        used_words = 0
        while any(queues):
            for doc, queue in enumerate(queues):
                if not queue:
                    continue
                sentence = queue.pop(0)
                cost = len(sentence.split()) + (0 if doc in cited else 1)
                if used_words + cost <= budget:
                    chosen.append(sentence)
                    used_words += cost
                    if doc not in cited:
                        cited.append(doc)
        if not chosen:
            return HEDGE_ANSWER
        links = "\n".join(blocks[doc].url for doc in sorted(cited))
        return " ".join(chosen) + "\n" + links
