"""Label unification, dedup, splits, and JSONL round-trips."""

from __future__ import annotations

import json
import random

import pytest

from sevkit.corpus import (
    Corpus,
    MethodRecord,
    SplitSpec,
    build_corpus,
    deduplicate,
    ingest,
    read_records,
    split,
    unify_severity,
    write_records,
)
from sevkit.errors import (
    CorpusTooSmall,
    MalformedRecord,
    UnknownSeverityLabel,
)

TABLE_LABELS = {
    "Critical": 0, "Blocker": 0,
    "Major": 1, "High": 1,
    "Medium": 2,
    "Low": 3, "Trivial": 3, "Minor": 3,
}


def make_record(i: int, severity_raw="Major", severity_class=None, source=None) -> MethodRecord:
    return MethodRecord(
        id=f"r{i:04d}",
        project="Lang",
        dataset_origin="defects4j",
        issue_id=f"LANG-{i}",
        severity_raw=severity_raw,
        severity_class=severity_class,
        source=source or f"void m{i}() {{ g({i}); }}",
    )


class TestUnifySeverity:
    def test_all_table_labels(self):
        for label, expected in TABLE_LABELS.items():
            assert unify_severity(label) == expected

    def test_case_and_whitespace_folding(self):
        assert unify_severity("Blocker") == 0
        assert unify_severity("minor") == 3
        assert unify_severity("  CRITICAL  ") == 0

    def test_unknown_label(self):
        with pytest.raises(UnknownSeverityLabel):
            unify_severity("P1")


class TestDeduplicate:
    def test_identical_sources_collapse(self):
        a = make_record(1, source="void f() { g(); }")
        b = make_record(2, source="void f() { g(); }")
        kept = deduplicate([a, b])
        assert [r.id for r in kept] == ["r0001"]

    def test_indentation_only_difference_collapses(self):
        a = make_record(1, source="void f() {\n    g();\n}")
        b = make_record(2, source="void f() {\n\tg();\n}")
        assert len(deduplicate([a, b])) == 1

    def test_comment_only_difference_collapses(self):
        a = make_record(1, source="void f() { g(); }")
        b = make_record(2, source="void f() { g(); } // note")
        assert len(deduplicate([a, b])) == 1

    def test_one_token_difference_kept(self):
        a = make_record(1, source="void f() { g(); }")
        b = make_record(2, source="void f() { h(); }")
        assert len(deduplicate([a, b])) == 2

    def test_idempotent(self):
        records = [make_record(i, source=f"void f() {{ g({i % 3}); }}") for i in range(9)]
        once = deduplicate(records)
        assert deduplicate(once) == once


class TestSplit:
    def _corpus(self, n: int) -> Corpus:
        return Corpus(records=tuple(make_record(i, severity_class=i % 4) for i in range(n)))

    def test_sizes_3342(self):
        result = split(self._corpus(3342), SplitSpec(seed=11))
        sizes = result.report["sizes"]
        assert (sizes["train"], sizes["valid"], sizes["test"]) == (2339, 501, 502)

    def test_sizes_10(self):
        result = split(self._corpus(10), SplitSpec(seed=11))
        sizes = result.report["sizes"]
        assert (sizes["train"], sizes["valid"], sizes["test"]) == (7, 1, 2)

    def test_partition(self):
        corpus = self._corpus(101)
        result = split(corpus, SplitSpec(seed=5))
        ids = [r.id for part in (result.train, result.valid, result.test) for r in part]
        assert sorted(ids) == sorted(r.id for r in corpus.records)
        assert len(set(ids)) == len(ids)

    def test_deterministic(self):
        corpus = self._corpus(57)
        a = split(corpus, SplitSpec(seed=99))
        b = split(corpus, SplitSpec(seed=99))
        assert a.train == b.train and a.valid == b.valid and a.test == b.test

    def test_different_seed_shuffles(self):
        corpus = self._corpus(57)
        a = split(corpus, SplitSpec(seed=1))
        b = split(corpus, SplitSpec(seed=2))
        assert a.train != b.train

    def test_class_counts_sum(self):
        corpus = self._corpus(200)
        result = split(corpus, SplitSpec(seed=3))
        counts = result.report["class_counts"]
        summed = [sum(col) for col in zip(counts["train"], counts["valid"], counts["test"])]
        assert summed == counts["all"]

    def test_too_small(self):
        with pytest.raises(CorpusTooSmall):
            split(self._corpus(9), SplitSpec(seed=0))


class TestIngest:
    def _write(self, tmp_path, rows):
        path = tmp_path / "raw.jsonl"
        with open(path, "w") as handle:
            for row in rows:
                handle.write(json.dumps(row) + "\n")
        return path

    def test_round_trip(self, tmp_path):
        records = [make_record(i, severity_class=i % 4) for i in range(5)]
        path = tmp_path / "corpus.jsonl"
        write_records(records, path)
        assert read_records(path) == records

    def test_ingest_unifies_and_strips(self, tmp_path):
        row = make_record(0, severity_raw="Blocker").to_dict()
        row["source"] = "void f() { g(); } // fix"
        path = self._write(tmp_path, [row])
        corpus = ingest(path)
        assert corpus.records[0].severity_class == 0
        assert "//" not in corpus.records[0].source

    def test_ingest_reports_record_id_on_bad_label(self, tmp_path):
        row = make_record(0, severity_raw="P1").to_dict()
        path = self._write(tmp_path, [row])
        with pytest.raises(UnknownSeverityLabel, match="r0000"):
            ingest(path)

    def test_malformed_json_line_number(self, tmp_path):
        good = make_record(0).to_dict()
        path = tmp_path / "raw.jsonl"
        path.write_text(json.dumps(good) + "\n{broken\n")
        with pytest.raises(MalformedRecord, match="line 2"):
            ingest(path)

    def test_missing_field(self, tmp_path):
        row = make_record(0).to_dict()
        del row["issue_id"]
        path = self._write(tmp_path, [row])
        with pytest.raises(MalformedRecord, match="issue_id"):
            ingest(path)

    def test_bad_origin(self, tmp_path):
        row = make_record(0).to_dict()
        row["dataset_origin"] = "github"
        path = self._write(tmp_path, [row])
        with pytest.raises(MalformedRecord, match="dataset_origin"):
            ingest(path)

    def test_build_corpus_dedups(self, tmp_path):
        rows = [make_record(0).to_dict(), make_record(1).to_dict()]
        rows[1]["source"] = rows[0]["source"]
        path = self._write(tmp_path, rows)
        corpus = build_corpus(path)
        assert len(corpus) == 1

    def test_every_record_labeled_after_ingest(self, tmp_path):
        rng = random.Random(0)
        labels = list(TABLE_LABELS)
        rows = [make_record(i, severity_raw=rng.choice(labels)).to_dict() for i in range(20)]
        path = self._write(tmp_path, rows)
        corpus = ingest(path)
        assert all(r.severity_class in (0, 1, 2, 3) for r in corpus.records)
