"""Shared text primitives: tokenization, sentence splitting, fuzzy matching.

Tokenization is deliberately simple (lowercase, alphanumeric runs, no
stemming) so that ranking scores stay reproducible by hand.
"""

import re
from functools import lru_cache

import numpy as np

_TOKEN_RE = re.compile(r"[a-z0-9]+")
_WORD_RE = re.compile(r"[a-z0-9]+(?:-[a-z0-9]+)*")
_SENTENCE_BOUNDARY_RE = re.compile(r"(?<=[.!?])\s+")
URL_RE = re.compile(r"https?://[^\s<>\")\]]+")


def tokenize(text: str) -> list[str]:
    """Lowercase alphanumeric tokens; hyphens and punctuation split."""
    return _TOKEN_RE.findall(text.lower())


def words(text: str) -> list[str]:
    """Like :func:`tokenize` but keeps internal hyphens (``low-income``)."""
    return _WORD_RE.findall(text.lower())


def word_count(text: str) -> int:
    """Whitespace-separated token count. A URL counts as one word."""
    return len(text.split())


def sentences(text: str) -> list[str]:
    """Split text into sentences on ``.``, ``!`` or ``?`` boundaries."""
    return [s for s in _SENTENCE_BOUNDARY_RE.split(text.strip()) if s]


def normalize_title(title: str) -> str:
    """Lowercase a title and collapse punctuation/whitespace to single spaces."""
    return " ".join(_TOKEN_RE.findall(title.lower()))


@lru_cache(maxsize=131072)
def levenshtein(a: str, b: str) -> int:
    """Edit distance with unit costs.

    Short strings use a plain two-row DP; longer ones vectorize the row
    update with numpy (the insertion dependency folds into a running
    minimum of ``candidate[j] - j``). Verifying a claims file recomputes
    the same pairs across reports, hence the cache.
    """
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if max(len(a), len(b)) <= 24:
        prev = list(range(len(b) + 1))
        for i, ca in enumerate(a, 1):
            cur = [i]
            for j, cb in enumerate(b, 1):
                cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
            prev = cur
        return prev[-1]
    b_codes = np.frombuffer(b.encode("utf-32-le"), dtype=np.uint32)
    positions = np.arange(len(b) + 1)
    prev = positions.copy()
    for i, ca in enumerate(a, 1):
        substitution = prev[:-1] + (b_codes != ord(ca))
        candidate = np.minimum(prev[1:] + 1, substitution)
        seq = np.concatenate(([i], candidate))
        prev = np.minimum.accumulate(seq - positions) + positions
    return int(prev[-1])


def normalized_similarity(na: str, nb: str) -> float:
    """Edit similarity of two already-normalized strings, in [0, 1]."""
    if not na and not nb:
        return 1.0
    if not na or not nb:
        return 0.0
    return 1.0 - levenshtein(na, nb) / max(len(na), len(nb))


def title_similarity(a: str, b: str) -> float:
    """Normalized edit similarity between two titles, in [0, 1].

    Both titles are normalized first; 1.0 means identical up to case and
    punctuation. Two empty titles compare equal; one empty side scores 0.
    """
    return normalized_similarity(normalize_title(a), normalize_title(b))


def surname(name: str) -> str:
    """Family name of a personal name, lowercased.

    "Smith, J." puts the family name before the comma; "J. Smith" and
    "Jane Smith" put it last. Initials are dropped.
    """
    head = name.split(",", 1)[0] if "," in name else name
    parts = [p for p in _TOKEN_RE.findall(head.lower()) if len(p) > 1]
    if parts:
        return parts[-1]
    short = _TOKEN_RE.findall(head.lower())
    return short[-1] if short else ""


def author_overlap(authors_a: list[str], authors_b: list[str]) -> float:
    """Jaccard overlap of surname sets; 0.0 when either side is empty."""
    sa = {s for s in (surname(a) for a in authors_a) if s}
    sb = {s for s in (surname(b) for b in authors_b) if s}
    if not sa or not sb:
        return 0.0
    return len(sa & sb) / len(sa | sb)
