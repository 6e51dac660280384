"""Editor feedback log: an append-only file of JSON lines.

Each accept/reject verdict on a proposed key phrase or class becomes one
record. Records are durable (flushed and fsynced) before the append call
returns, and verdicts are never mutated; downstream consumers treat the
file as a write-once stream.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Iterator

from mathnlp.errors import InvalidFeedback, StorageFailure

ITEM_KINDS = frozenset({"keyphrase", "class"})
VERDICTS = frozenset({"accept", "reject"})


@dataclass(frozen=True)
class FeedbackRecord:
    timestamp: int  # UTC seconds
    doc_id: str
    item_kind: str
    item_value: str
    verdict: str
    editor_id: str

    def __post_init__(self):
        if self.item_kind not in ITEM_KINDS:
            raise InvalidFeedback(f"item_kind must be one of {sorted(ITEM_KINDS)}, got {self.item_kind!r}")
        if self.verdict not in VERDICTS:
            raise InvalidFeedback(f"verdict must be one of {sorted(VERDICTS)}, got {self.verdict!r}")
        for name in ("doc_id", "item_value", "editor_id"):
            value = getattr(self, name)
            if not isinstance(value, str) or not value:
                raise InvalidFeedback(f"{name} must be a non-empty string")
        if not isinstance(self.timestamp, int) or self.timestamp < 0:
            raise InvalidFeedback("timestamp must be a non-negative integer")

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, ensure_ascii=False)


class FeedbackLog:
    """Serialized appends to a JSON-lines file, durable before return.

    Concurrent submitters are ordered by an internal lock; readers may run
    alongside appends and see a prefix of the records.
    """

    def __init__(self, path: str | Path, clock: Callable[[], int] | None = None):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._clock = clock if clock is not None else lambda: int(time.time())

    def record(
        self, doc_id: str, item_kind: str, item_value: str, verdict: str, editor_id: str
    ) -> FeedbackRecord:
        record = FeedbackRecord(
            timestamp=self._clock(),
            doc_id=doc_id,
            item_kind=item_kind,
            item_value=item_value,
            verdict=verdict,
            editor_id=editor_id,
        )
        self.append(record)
        return record

    def append(self, record: FeedbackRecord) -> None:
        line = record.to_json() + "\n"
        with self._lock:
            try:
                with open(self.path, "a", encoding="utf-8") as handle:
                    handle.write(line)
                    handle.flush()
                    os.fsync(handle.fileno())
            except OSError as exc:
                raise StorageFailure(str(exc)) from exc

    def __iter__(self) -> Iterator[FeedbackRecord]:
        try:
            with open(self.path, encoding="utf-8") as handle:
                lines = handle.readlines()
        except FileNotFoundError:
            return iter(())
        except OSError as exc:
            raise StorageFailure(str(exc)) from exc
        records = []
        for line in lines:
            if line.strip():
                records.append(FeedbackRecord(**json.loads(line)))
        return iter(records)

    def __len__(self) -> int:
        return sum(1 for _ in self)
