"""Fusion JSONL loading and the exact-tokenizer truncation policy.

Model inputs are always exactly MAX_TOKENS long: `[CLS] nl [SEP] pl [EOS]`
plus padding. The NL segment is never cut; the PL segment loses tokens from
its end until the sequence fits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from . import MAX_TOKENS, METRICS_WIDTH, NLTooLarge, TrainerError
from .vocab import Vocab

MODE_PREFIX = {"plain": "plain", "concat_inline": "inline", "concat_cls": "cls"}

N_SPECIALS = 3  # [CLS], [SEP], [EOS]


def read_jsonl(path: str | Path) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                rows.append(json.loads(line))
    return rows


def split_path(data_dir: str | Path, mode: str, split: str) -> Path:
    if mode not in MODE_PREFIX:
        raise TrainerError(f"unknown mode {mode!r}")
    return Path(data_dir) / f"{MODE_PREFIX[mode]}_{split}.jsonl"


def tokenize_and_truncate(row: dict, mode: str, vocab: Vocab,
                          max_tokens: int = MAX_TOKENS) -> tuple[list[int], list[int]]:
    """Token ids and attention mask, both exactly max_tokens long."""
    nl_ids = vocab.encode(row.get("nl_text", "")) if mode != "concat_cls" else []
    pl_ids = vocab.encode(row["pl_text"])
    budget = max_tokens - N_SPECIALS - len(nl_ids)
    if budget < 0:
        raise NLTooLarge(f"NL segment needs {len(nl_ids)} of {max_tokens} tokens")
    pl_ids = pl_ids[:budget]  # tail cut only
    ids = [vocab.cls_id] + nl_ids + [vocab.sep_id] + pl_ids + [vocab.eos_id]
    mask = [1] * len(ids)
    pad = max_tokens - len(ids)
    ids += [vocab.pad_id] * pad
    mask += [0] * pad
    return ids, mask


@dataclass
class EncodedDataset:
    ids: torch.Tensor        # (n, MAX_TOKENS) int64
    mask: torch.Tensor       # (n, MAX_TOKENS) uint8
    labels: torch.Tensor     # (n,) int64, -1 when unlabeled
    metrics: torch.Tensor    # (n, 10) float32; zeros unless concat_cls
    record_ids: list[str]

    def __len__(self) -> int:
        return self.ids.shape[0]


def encode_rows(rows: list[dict], mode: str, vocab: Vocab) -> EncodedDataset:
    ids, masks, labels, metrics, record_ids = [], [], [], [], []
    for row in rows:
        row_ids, row_mask = tokenize_and_truncate(row, mode, vocab)
        ids.append(row_ids)
        masks.append(row_mask)
        labels.append(row["label"] if row.get("label") is not None else -1)
        if mode == "concat_cls":
            vec = row.get("metrics")
            if vec is None or len(vec) != METRICS_WIDTH:
                raise TrainerError(f"record {row.get('id')}: expected 10 metrics")
            metrics.append([float(v) for v in vec])
        else:
            metrics.append([0.0] * METRICS_WIDTH)
        record_ids.append(str(row["id"]))
    return EncodedDataset(
        ids=torch.tensor(ids, dtype=torch.int64),
        mask=torch.tensor(masks, dtype=torch.uint8),
        labels=torch.tensor(labels, dtype=torch.int64),
        metrics=torch.tensor(metrics, dtype=torch.float32),
        record_ids=record_ids,
    )


def load_split(data_dir: str | Path, mode: str, split: str, vocab: Vocab) -> EncodedDataset:
    return encode_rows(read_jsonl(split_path(data_dir, mode, split)), mode, vocab)


def vocab_from_train(data_dir: str | Path, mode: str, max_size: int = 8000) -> Vocab:
    rows = read_jsonl(split_path(data_dir, mode, "train"))
    texts = []
    for row in rows:
        if mode != "concat_cls":
            texts.append(row.get("nl_text", ""))
        texts.append(row["pl_text"])
    return Vocab.build(texts, max_size=max_size)


def trim_batch(ids: torch.Tensor, mask: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
    """Drop all-padding trailing columns (identical model output, less work).

    Padded positions are excluded from attention, so removing columns that
    are padding in every row of the batch cannot change any kept position's
    representation.
    """
    lengths = mask.sum(dim=1)
    keep = int(lengths.max().item())
    keep = min(ids.shape[1], ((keep + 7) // 8) * 8)
    return ids[:, :keep], mask[:, :keep]


def batch_indices(n: int, batch_size: int, rng: np.random.RandomState | None = None):
    order = np.arange(n) if rng is None else rng.permutation(n)
    for start in range(0, n, batch_size):
        yield order[start : start + batch_size]
