"""Append-only persistence for answers and annotations.

Each entity lives in one line-delimited JSON log with an in-memory
index rebuilt at startup. Records are line-atomic: a half-written tail
(no trailing newline, or invalid JSON) is detected and skipped at load,
which is all the crash recovery desk-scale volumes need. Writes to one
log are serialized through a lock; stored answers are never mutated.
"""

import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path

from ..pipeline import GroundedAnswer


class RecordLog:
    """Single-writer append-only JSONL file."""

    def __init__(self, path: Path):
        self.path = path
        self._lock = threading.Lock()
        self.skipped_lines = 0
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def load(self) -> list[dict]:
        if not self.path.exists():
            return []
        records = []
        *body, tail = self.path.read_bytes().split(b"\n")
        if tail:
            # No trailing newline: a half-written record. Skip it.
            self.skipped_lines += 1
        for line in body:
            if not line.strip():
                continue
            try:
                records.append(json.loads(line.decode("utf-8")))
            except (json.JSONDecodeError, UnicodeDecodeError):
                self.skipped_lines += 1
        return records

    def append(self, record: dict) -> None:
        line = json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n"
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line)
                fh.flush()
                os.fsync(fh.fileno())


@dataclass(frozen=True)
class StoredAnswer:
    answer_id: str
    domain: str
    answer: GroundedAnswer

    def to_dict(self) -> dict:
        return {"answer_id": self.answer_id, "domain": self.domain, **self.answer.to_dict()}

    @classmethod
    def from_dict(cls, obj: dict) -> "StoredAnswer":
        return cls(
            answer_id=obj["answer_id"],
            domain=obj.get("domain", ""),
            answer=GroundedAnswer.from_dict(obj),
        )


class AnswerStore:
    def __init__(self, path: Path):
        self._log = RecordLog(path)
        self._answers: dict[str, StoredAnswer] = {}
        self._lock = threading.Lock()
        for obj in self._log.load():
            stored = StoredAnswer.from_dict(obj)
            self._answers.setdefault(stored.answer_id, stored)

    def __len__(self) -> int:
        return len(self._answers)

    def get(self, answer_id: str) -> StoredAnswer | None:
        return self._answers.get(answer_id)

    def add(self, stored: StoredAnswer) -> StoredAnswer:
        """Idempotent: an already-stored answer id is returned unchanged."""
        with self._lock:
            existing = self._answers.get(stored.answer_id)
            if existing is not None:
                return existing
            self._log.append(stored.to_dict())
            self._answers[stored.answer_id] = stored
            return stored

    def all(self) -> list[StoredAnswer]:
        return [self._answers[k] for k in sorted(self._answers)]


class AnnotationStore:
    """Keeps every submission; the latest per (answer, annotator) wins."""

    def __init__(self, path: Path):
        self._log = RecordLog(path)
        self._latest: dict[tuple[str, str], dict] = {}
        self._lock = threading.Lock()
        for obj in self._log.load():
            self._latest[(obj["answer_id"], obj["annotator_id"])] = obj

    def add(self, record: dict) -> dict:
        key = (record["answer_id"], record["annotator_id"])
        with self._lock:
            if key in self._latest:
                record = {**record, "replaces_prior": True}
            self._log.append(record)
            self._latest[key] = record
            return record

    def all_latest(self) -> list[dict]:
        return [self._latest[k] for k in sorted(self._latest)]

    def annotator_count(self) -> int:
        return len({k[1] for k in self._latest})
