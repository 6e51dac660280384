"""Feedback records and the append-only JSON-lines log."""

from __future__ import annotations

import json
import threading

import pytest

from mathnlp.errors import InvalidFeedback, StorageFailure
from mathnlp.feedback import FeedbackLog, FeedbackRecord


def make_record(**overrides) -> FeedbackRecord:
    fields = dict(
        timestamp=1700000000,
        doc_id="d1",
        item_kind="keyphrase",
        item_value="paper",
        verdict="reject",
        editor_id="ed7",
    )
    fields.update(overrides)
    return FeedbackRecord(**fields)


class TestFeedbackRecord:
    def test_json_form_is_one_object(self):
        record = make_record()
        data = json.loads(record.to_json())
        assert data == {
            "timestamp": 1700000000,
            "doc_id": "d1",
            "item_kind": "keyphrase",
            "item_value": "paper",
            "verdict": "reject",
            "editor_id": "ed7",
        }

    def test_class_verdicts_allowed(self):
        record = make_record(item_kind="class", item_value="05", verdict="accept")
        assert record.item_kind == "class"

    @pytest.mark.parametrize(
        "overrides",
        [
            {"verdict": "maybe"},
            {"item_kind": "entity"},
            {"doc_id": ""},
            {"item_value": ""},
            {"editor_id": ""},
            {"timestamp": -5},
            {"timestamp": 1.5},
        ],
    )
    def test_invalid_fields_rejected(self, overrides):
        with pytest.raises(InvalidFeedback):
            make_record(**overrides)

    def test_non_ascii_survives(self):
        record = make_record(item_value="erdős number")
        assert json.loads(record.to_json())["item_value"] == "erdős number"


class TestFeedbackLog:
    def test_append_adds_one_line(self, tmp_path):
        log = FeedbackLog(tmp_path / "fb.jsonl")
        log.append(make_record())
        lines = (tmp_path / "fb.jsonl").read_text(encoding="utf-8").splitlines()
        assert len(lines) == 1
        assert json.loads(lines[0])["item_value"] == "paper"

    def test_record_uses_injected_clock(self, tmp_path):
        log = FeedbackLog(tmp_path / "fb.jsonl", clock=lambda: 42)
        record = log.record("d1", "class", "05", "accept", "ed1")
        assert record.timestamp == 42

    def test_round_trip_through_iteration(self, tmp_path):
        log = FeedbackLog(tmp_path / "fb.jsonl")
        records = [make_record(doc_id=f"d{i}") for i in range(5)]
        for record in records:
            log.append(record)
        assert list(log) == records

    def test_missing_file_reads_empty(self, tmp_path):
        log = FeedbackLog(tmp_path / "absent.jsonl")
        assert list(log) == []
        assert len(log) == 0

    def test_validation_happens_before_write(self, tmp_path):
        path = tmp_path / "fb.jsonl"
        log = FeedbackLog(path)
        with pytest.raises(InvalidFeedback):
            log.record("d1", "keyphrase", "x", "maybe", "ed1")
        assert not path.exists()

    def test_unwritable_path_raises_storage_failure(self, tmp_path):
        log = FeedbackLog(tmp_path / "no" / "such" / "dir" / "fb.jsonl")
        with pytest.raises(StorageFailure):
            log.append(make_record())

    def test_concurrent_writers_lose_nothing(self, tmp_path):
        log = FeedbackLog(tmp_path / "fb.jsonl")
        n_threads, per_thread = 8, 25

        def writer(worker: int):
            for i in range(per_thread):
                log.record(f"d{worker}-{i}", "keyphrase", "phrase", "reject", f"ed{worker}")

        threads = [threading.Thread(target=writer, args=(w,)) for w in range(n_threads)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()

        records = list(log)
        assert len(records) == n_threads * per_thread
        assert {r.doc_id for r in records} == {
            f"d{w}-{i}" for w in range(n_threads) for i in range(per_thread)
        }
        # every line parses on its own: no interleaved partial writes
        for line in (tmp_path / "fb.jsonl").read_text(encoding="utf-8").splitlines():
            json.loads(line)

    def test_reader_sees_prefix_of_appends(self, tmp_path):
        log = FeedbackLog(tmp_path / "fb.jsonl")
        seen = []
        for i in range(10):
            log.append(make_record(doc_id=f"d{i}"))
            snapshot = [r.doc_id for r in log]
            assert snapshot == [f"d{j}" for j in range(i + 1)]
            seen.append(len(snapshot))
        assert seen == list(range(1, 11))
