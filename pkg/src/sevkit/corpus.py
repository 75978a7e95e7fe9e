"""Labeled method corpus: ingestion, label unification, dedup, splits.

Corpus files are JSONL with one record per line and exactly the fields
`id, project, dataset_origin, issue_id, severity_raw, severity_class,
source`. `severity_class` may be null in raw exports; ingestion fills it
from `severity_raw`.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from .errors import CorpusTooSmall, MalformedRecord, UnknownSeverityLabel
from .java_methods import strip_comments

DATASET_ORIGINS = ("defects4j", "bugsjar", "other")

N_CLASSES = 4

# Raw tracker label -> unified class, matched case-insensitively after trim.
SEVERITY_CLASSES = {
    "critical": 0,
    "blocker": 0,
    "major": 1,
    "high": 1,
    "medium": 2,
    "low": 3,
    "trivial": 3,
    "minor": 3,
}

RECORD_FIELDS = ("id", "project", "dataset_origin", "issue_id",
                 "severity_raw", "severity_class", "source")


@dataclass(frozen=True)
class MethodRecord:
    id: str
    project: str
    dataset_origin: str
    issue_id: str
    severity_raw: str
    severity_class: int | None
    source: str

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in RECORD_FIELDS}


@dataclass(frozen=True)
class Corpus:
    records: tuple[MethodRecord, ...]

    def __len__(self) -> int:
        return len(self.records)

    def class_counts(self) -> list[int]:
        counts = [0] * N_CLASSES
        for rec in self.records:
            if rec.severity_class is not None:
                counts[rec.severity_class] += 1
        return counts


@dataclass(frozen=True)
class SplitSpec:
    seed: int
    ratios: tuple[float, float, float] = (0.70, 0.15, 0.15)


def unify_severity(raw: str) -> int:
    """Map a tracker label onto the 0 (most severe) .. 3 (least) scale."""
    key = raw.strip().lower()
    if key not in SEVERITY_CLASSES:
        raise UnknownSeverityLabel(raw)
    return SEVERITY_CLASSES[key]


def normalized_source(source: str) -> str:
    """Dedup key: comment-free text with whitespace runs collapsed."""
    return " ".join(strip_comments(source).split())


def deduplicate(records: Sequence[MethodRecord]) -> list[MethodRecord]:
    """Keep the first record per normalized source, preserving order."""
    seen: set[str] = set()
    kept: list[MethodRecord] = []
    for rec in records:
        key = normalized_source(rec.source)
        if key in seen:
            continue
        seen.add(key)
        kept.append(rec)
    return kept


def record_from_dict(data: dict, line_no: int = 0) -> MethodRecord:
    if not isinstance(data, dict):
        raise MalformedRecord(f"line {line_no}: not a JSON object")
    missing = [name for name in RECORD_FIELDS if name not in data]
    if missing:
        raise MalformedRecord(f"line {line_no}: missing fields {missing}")
    if data["dataset_origin"] not in DATASET_ORIGINS:
        raise MalformedRecord(
            f"line {line_no}: dataset_origin {data['dataset_origin']!r} "
            f"not one of {DATASET_ORIGINS}"
        )
    severity = data["severity_class"]
    if severity is not None and severity not in (0, 1, 2, 3):
        raise MalformedRecord(f"line {line_no}: severity_class {severity!r} out of range")
    return MethodRecord(
        id=str(data["id"]),
        project=str(data["project"]),
        dataset_origin=data["dataset_origin"],
        issue_id=str(data["issue_id"]),
        severity_raw=str(data["severity_raw"]),
        severity_class=severity,
        source=str(data["source"]),
    )


def read_records(path: str | Path) -> list[MethodRecord]:
    """Parse a corpus JSONL file without any normalization."""
    records: list[MethodRecord] = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(f"line {line_no}: {exc}") from exc
            records.append(record_from_dict(data, line_no))
    return records


def write_records(records: Iterable[MethodRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for rec in records:
            handle.write(json.dumps(rec.to_dict(), sort_keys=True) + "\n")


def ingest(path: str | Path) -> Corpus:
    """Read raw records, strip comments, and fill unified severity labels."""
    out: list[MethodRecord] = []
    for rec in read_records(path):
        severity = rec.severity_class
        if severity is None:
            try:
                severity = unify_severity(rec.severity_raw)
            except UnknownSeverityLabel as exc:
                raise UnknownSeverityLabel(
                    f"record {rec.id}: unknown severity label {rec.severity_raw!r}"
                ) from exc
        out.append(replace(rec, severity_class=severity,
                           source=strip_comments(rec.source)))
    return Corpus(records=tuple(out))


def build_corpus(path: str | Path) -> Corpus:
    """ingest + deduplicate: the canonical corpus-building step."""
    corpus = ingest(path)
    return Corpus(records=tuple(deduplicate(corpus.records)))


@dataclass(frozen=True)
class SplitResult:
    train: tuple[MethodRecord, ...]
    valid: tuple[MethodRecord, ...]
    test: tuple[MethodRecord, ...]
    report: dict = field(default_factory=dict)


def split(corpus: Corpus, spec: SplitSpec) -> SplitResult:
    """Seeded shuffle, then a contiguous 70/15/15 cut.

    Train and validation sizes are the floors of their quotas; the test
    split absorbs the remainder, which keeps every size within one record
    of its exact ratio share.
    """
    n = len(corpus)
    if n < 10:
        raise CorpusTooSmall(f"{n} records; need at least 10 to split")
    order = list(range(n))
    random.Random(spec.seed).shuffle(order)
    shuffled = [corpus.records[i] for i in order]

    n_train = int(n * spec.ratios[0])
    n_valid = int(n * spec.ratios[1])
    train = tuple(shuffled[:n_train])
    valid = tuple(shuffled[n_train:n_train + n_valid])
    test = tuple(shuffled[n_train + n_valid:])

    def counts(part: tuple[MethodRecord, ...]) -> list[int]:
        out = [0] * N_CLASSES
        for rec in part:
            if rec.severity_class is not None:
                out[rec.severity_class] += 1
        return out

    report = {
        "seed": spec.seed,
        "ratios": list(spec.ratios),
        "sizes": {"train": len(train), "valid": len(valid), "test": len(test)},
        "class_counts": {
            "train": counts(train),
            "valid": counts(valid),
            "test": counts(test),
            "all": corpus.class_counts(),
        },
    }
    return SplitResult(train=train, valid=valid, test=test, report=report)
