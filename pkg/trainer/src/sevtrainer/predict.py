"""Prediction bridge: checkpoint + fusion JSONL -> {id, proba} rows."""

from __future__ import annotations

import json
from pathlib import Path

from .data import encode_rows, read_jsonl
from .training import evaluate_model, load_checkpoint


def predict_file(checkpoint_path: str | Path, data_path: str | Path,
                 out_path: str | Path) -> int:
    """Write one `{id, proba: [p0..p3]}` line per record; returns row count."""
    model, config, vocab, _ = load_checkpoint(checkpoint_path)
    rows = read_jsonl(data_path)
    data = encode_rows(rows, config.mode, vocab)
    _, _, proba = evaluate_model(model, data, config.batch_size)
    with open(out_path, "w", encoding="utf-8") as handle:
        for record_id, row in zip(data.record_ids, proba):
            total = float(row.sum())
            handle.write(json.dumps(
                {"id": record_id, "proba": [float(p) / total for p in row]}) + "\n")
    return len(data.record_ids)
