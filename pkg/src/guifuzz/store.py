"""Example dataset of crash-triggering inputs and similarity-based few-shot
selection."""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .model import WidgetContext

EMBED_DIM = 300
# similarity is rounded before ranking so that equal scores tie exactly and
# fall through to the record_id tie-break regardless of summation order
SCORE_DECIMALS = 12
SOURCES = ("seed", "runtime")

_TOKEN_RE = re.compile(r"[^\W_]+")


class MalformedRecord(ValueError):
    def __init__(self, index: int, reason: str) -> None:
        self.index = index
        super().__init__(f"record {index}: {reason}")


class StorageFailure(OSError):
    pass


@dataclass(frozen=True)
class ExampleRecord:
    record_id: int
    context: WidgetContext
    mutation_rule: str | None
    buggy_input: str
    source: str = "seed"

    def to_dict(self) -> dict:
        return {
            "record_id": self.record_id,
            "source": self.source,
            "context": self.context.to_dict(),
            "mutation_rule": self.mutation_rule,
            "buggy_input": self.buggy_input,
        }


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def _bucket(token: str) -> tuple[int, float]:
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
    h = int.from_bytes(digest, "little")
    return h % EMBED_DIM, (1.0 if (h >> 63) & 1 else -1.0)


def embed(context_text: str) -> np.ndarray:
    """Hashed bag-of-words embedding, L2-normalized unless all-zero."""
    vec = np.zeros(EMBED_DIM)
    for token in tokenize(context_text):
        idx, sign = _bucket(token)
        vec[idx] += sign
    norm = np.linalg.norm(vec)
    if norm > 0:
        vec /= norm
    return vec


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def _context_from(obj, index: int) -> WidgetContext:
    if not isinstance(obj, dict):
        raise MalformedRecord(index, "context must be an object")
    fields = {}
    for key in ("app_name", "page_name", "input_widget", "nearby_widgets", "dynamic_hint"):
        value = obj.get(key, "")
        if value is None:
            value = ""
        if not isinstance(value, str):
            raise MalformedRecord(index, f"context.{key} must be a string")
        fields[key] = value
    return WidgetContext(**fields)


def record_from_dict(obj, index: int) -> ExampleRecord:
    if not isinstance(obj, dict):
        raise MalformedRecord(index, "record must be an object")
    buggy = obj.get("buggy_input")
    if not isinstance(buggy, str) or not buggy:
        raise MalformedRecord(index, "buggy_input must be a non-empty string")
    rule = obj.get("mutation_rule")
    if rule is not None and not isinstance(rule, str):
        raise MalformedRecord(index, "mutation_rule must be a string or null")
    source = obj.get("source", "seed")
    if source not in SOURCES:
        raise MalformedRecord(index, f"source must be one of {SOURCES}")
    if "context" not in obj:
        raise MalformedRecord(index, "missing context")
    record_id = obj.get("record_id", index)
    if record_id != index:
        raise MalformedRecord(index, f"record_id {record_id!r} out of sequence")
    return ExampleRecord(
        record_id=index,
        context=_context_from(obj["context"], index),
        mutation_rule=rule,
        buggy_input=buggy,
        source=source,
    )


class ExampleStore:
    """Append-only example dataset, optionally backed by a JSON-lines file.

    Writes go through a lock; readers work on the record list snapshot taken
    at call time.
    """

    def __init__(
        self,
        path: str | os.PathLike | None = None,
        embedder: Callable[[str], np.ndarray] = embed,
    ) -> None:
        self.path = Path(path) if path is not None else None
        self.embedder = embedder
        self._records: list[ExampleRecord] = []
        self._vectors: list[np.ndarray] = []
        self._matrix: np.ndarray | None = None
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._records)

    @property
    def records(self) -> list[ExampleRecord]:
        return list(self._records)

    def _index(self, record: ExampleRecord) -> None:
        self._records.append(record)
        self._vectors.append(np.asarray(self.embedder(record.context.text()), dtype=float))
        self._matrix = None

    def add_record(self, context: WidgetContext, mutation_rule: str | None, buggy_input: str) -> int:
        if not buggy_input:
            raise ValueError("buggy_input must be non-empty")
        with self._lock:
            record = ExampleRecord(
                record_id=len(self._records) + 1,
                context=context,
                mutation_rule=mutation_rule,
                buggy_input=buggy_input,
                source="runtime",
            )
            if self.path is not None:
                if not self.path.exists():
                    raise StorageFailure(f"store file {self.path} disappeared")
                try:
                    with open(self.path, "a", encoding="utf-8") as fh:
                        fh.write(json.dumps(record.to_dict(), ensure_ascii=False) + "\n")
                        fh.flush()
                        os.fsync(fh.fileno())
                except OSError as exc:
                    raise StorageFailure(str(exc)) from exc
            self._index(record)
            return record.record_id

    def _score_matrix(self) -> np.ndarray:
        if self._matrix is None:
            self._matrix = np.vstack(self._vectors) if self._vectors else np.zeros((0, EMBED_DIM))
        return self._matrix

    def scores(self, query_text: str) -> np.ndarray:
        matrix = self._score_matrix()
        q = np.asarray(self.embedder(query_text), dtype=float)
        qn = np.linalg.norm(q)
        if qn == 0 or len(matrix) == 0:
            return np.zeros(len(matrix))
        norms = np.linalg.norm(matrix, axis=1)
        safe = np.where(norms == 0, 1.0, norms)
        sims = matrix @ q / (safe * qn)
        sims[norms == 0] = 0.0
        return np.round(sims, SCORE_DECIMALS)

    def query_text(self, query_text: str, k: int) -> list[tuple[ExampleRecord, float]]:
        if k < 1:
            raise ValueError("k must be >= 1")
        records = self._records
        if not records:
            return []
        sims = self.scores(query_text)
        ids = np.array([r.record_id for r in records])
        order = np.lexsort((ids, -sims))[:k]
        return [(records[i], float(sims[i])) for i in order]

    def retrieve_top_k(self, query: WidgetContext, k: int) -> list[ExampleRecord]:
        return [r for r, _ in self.query_text(query.text(), k)]


def load_records(lines: Iterable[str]) -> list[ExampleRecord]:
    records = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        index = len(records) + 1
        try:
            obj = json.loads(line)
        except ValueError as exc:
            raise MalformedRecord(index, f"line {lineno} is not JSON ({exc})") from None
        records.append(record_from_dict(obj, index))
    return records


def load_seed_dataset(path: str | os.PathLike, persist: bool = True) -> ExampleStore:
    """Load a record file; with ``persist`` new records are appended to it."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        records = load_records(fh)
    store = ExampleStore(path if persist else None)
    for record in records:
        store._index(record)
    return store
