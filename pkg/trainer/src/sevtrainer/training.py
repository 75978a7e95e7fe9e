"""Two-phase fine-tuning.

Phase 1 freezes the encoder and trains the head for up to 40 epochs with
early stopping on validation loss (patience 3). Phase 2 unfreezes
everything for 5 epochs at a smaller learning rate. The checkpoint kept is
the one with the best validation weighted F1 seen at any epoch of either
phase. Cross-entropy loss throughout, gradients clipped at 1.0.
"""

from __future__ import annotations

import copy
import json
import math
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import torch
import torch.nn as nn

from . import N_CLASSES, DivergedTraining, MAX_TOKENS
from .data import EncodedDataset, batch_indices, trim_batch
from .model import SeverityModel, encoder_weight_hash
from .vocab import Vocab


@dataclass
class TrainConfig:
    mode: str = "plain"
    seed: int = 0
    phase1_epochs: int = 40
    phase1_patience: int = 3
    phase2_epochs: int = 5
    phase1_lr: float = 1e-4
    phase2_lr: float = 2e-5
    batch_size: int = 16
    grad_clip: float = 1.0
    max_tokens: int = MAX_TOKENS
    encoder_layers: int = 1
    encoder_feedforward: int = 1024
    dropout: float = 0.1
    vocab_size: int = 8000

    def __post_init__(self):
        if self.phase2_lr >= self.phase1_lr:
            raise ValueError("phase 2 must use a smaller learning rate than phase 1")


@dataclass
class FineTuneResult:
    model: SeverityModel
    best_val_f1w: float
    log: list[dict] = field(default_factory=list)
    encoder_hash_start: str = ""
    encoder_hash_after_phase1: str = ""


def f1_weighted(y_true, y_pred) -> float:
    """Support-weighted F1 over the four classes (0 on zero denominators)."""
    y_true = list(y_true)
    y_pred = list(y_pred)
    n = len(y_true)
    total = 0.0
    for c in range(N_CLASSES):
        tp = sum(1 for t, p in zip(y_true, y_pred) if t == c and p == c)
        fp = sum(1 for t, p in zip(y_true, y_pred) if t != c and p == c)
        fn = sum(1 for t, p in zip(y_true, y_pred) if t == c and p != c)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        total += (tp + fn) / n * f1
    return total


def _batch_forward(model: SeverityModel, data: EncodedDataset, idx) -> torch.Tensor:
    ids, mask = trim_batch(data.ids[idx], data.mask[idx])
    metrics = data.metrics[idx] if model.mode == "concat_cls" else None
    return model(ids, mask, metrics=metrics)


def _run_epoch(model, data, optimizer, loss_fn, config, rng) -> float:
    model.train()
    total, count = 0.0, 0
    for idx in batch_indices(len(data), config.batch_size, rng):
        optimizer.zero_grad()
        logits = _batch_forward(model, data, idx)
        loss = loss_fn(logits, data.labels[idx])
        if not torch.isfinite(loss):
            raise DivergedTraining(f"non-finite training loss {loss.item()!r}")
        loss.backward()
        nn.utils.clip_grad_norm_(
            [p for p in model.parameters() if p.requires_grad], config.grad_clip)
        optimizer.step()
        total += float(loss.item()) * len(idx)
        count += len(idx)
    return total / max(count, 1)


@torch.no_grad()
def evaluate_model(model: SeverityModel, data: EncodedDataset,
                   batch_size: int = 16) -> tuple[float, float, np.ndarray]:
    """(mean loss, weighted F1, probability rows) on a labeled dataset."""
    model.eval()
    loss_fn = nn.CrossEntropyLoss()
    probas = []
    total, count = 0.0, 0
    for idx in batch_indices(len(data), batch_size):
        logits = _batch_forward(model, data, idx)
        labels = data.labels[idx]
        if (labels >= 0).all():
            total += float(loss_fn(logits, labels).item()) * len(idx)
            count += len(idx)
        probas.append(torch.softmax(logits, dim=1).cpu().numpy())
    proba = np.vstack(probas)
    preds = proba.argmax(axis=1)
    mean_loss = total / count if count else math.nan
    f1w = f1_weighted(data.labels.numpy().tolist(), preds.tolist())
    return mean_loss, f1w, proba


def fine_tune(config: TrainConfig, train: EncodedDataset,
              valid: EncodedDataset, vocab: Vocab,
              log_path: str | Path | None = None) -> FineTuneResult:
    torch.manual_seed(config.seed)
    rng = np.random.RandomState(config.seed % (2**32))
    model = SeverityModel(config.mode, len(vocab), layers=config.encoder_layers,
                          feedforward=config.encoder_feedforward,
                          dropout=config.dropout)
    loss_fn = nn.CrossEntropyLoss()
    result = FineTuneResult(model=model, best_val_f1w=-1.0)
    result.encoder_hash_start = encoder_weight_hash(model)
    best_state = None

    def consider_checkpoint(val_f1w: float) -> None:
        nonlocal best_state
        if val_f1w > result.best_val_f1w:
            result.best_val_f1w = val_f1w
            best_state = copy.deepcopy(model.state_dict())

    # phase 1: encoder frozen, head only, early stopping on validation loss
    model.set_encoder_frozen(True)
    optimizer = torch.optim.Adam(
        (p for p in model.parameters() if p.requires_grad), lr=config.phase1_lr)
    best_val_loss = math.inf
    stale = 0
    for epoch in range(config.phase1_epochs):
        train_loss = _run_epoch(model, train, optimizer, loss_fn, config, rng)
        val_loss, val_f1w, _ = evaluate_model(model, valid, config.batch_size)
        result.log.append({"phase": 1, "epoch": epoch, "train_loss": train_loss,
                           "val_loss": val_loss, "val_f1w": val_f1w})
        consider_checkpoint(val_f1w)
        if val_loss < best_val_loss - 1e-12:
            best_val_loss = val_loss
            stale = 0
        else:
            stale += 1
            if stale >= config.phase1_patience:
                break
    result.encoder_hash_after_phase1 = encoder_weight_hash(model)

    # phase 2: everything trainable at the smaller learning rate
    model.set_encoder_frozen(False)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.phase2_lr)
    for epoch in range(config.phase2_epochs):
        train_loss = _run_epoch(model, train, optimizer, loss_fn, config, rng)
        val_loss, val_f1w, _ = evaluate_model(model, valid, config.batch_size)
        result.log.append({"phase": 2, "epoch": epoch, "train_loss": train_loss,
                           "val_loss": val_loss, "val_f1w": val_f1w})
        consider_checkpoint(val_f1w)

    if best_state is not None:
        model.load_state_dict(best_state)
    if log_path is not None:
        with open(log_path, "w", encoding="utf-8") as handle:
            for row in result.log:
                handle.write(json.dumps(row) + "\n")
    return result


def save_checkpoint(path: str | Path, result: FineTuneResult,
                    config: TrainConfig, vocab: Vocab) -> None:
    payload = {
        "format": "sevtrainer-checkpoint",
        "version": 1,
        "config": asdict(config),
        "vocab": vocab.tokens,
        "best_val_f1w": result.best_val_f1w,
        "encoder_hash_start": result.encoder_hash_start,
        "encoder_hash_after_phase1": result.encoder_hash_after_phase1,
        "model_state": result.model.state_dict(),
        "log": result.log,
    }
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    torch.save(payload, tmp)
    os.replace(tmp, path)


def load_checkpoint(path: str | Path) -> tuple[SeverityModel, TrainConfig, Vocab, dict]:
    payload = torch.load(path, map_location="cpu", weights_only=False)
    config = TrainConfig(**payload["config"])
    vocab = Vocab(payload["vocab"])
    model = SeverityModel(config.mode, len(vocab), layers=config.encoder_layers,
                          feedforward=config.encoder_feedforward,
                          dropout=config.dropout)
    model.load_state_dict(payload["model_state"])
    model.eval()
    return model, config, vocab, payload
