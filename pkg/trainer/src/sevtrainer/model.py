"""Encoder and classification heads.

The encoder is RoBERTa-shaped (learned token + position embeddings, a
stack of bidirectional transformer layers, 768-wide hidden states) but
randomly initialized: this sandbox has no model-hub access, so depth is
kept small and configurable instead of loading pretrained weights. The
classification contracts live in the heads: the plain/inline head reads
the 768-wide aggregate position, the fusion head reads that vector
concatenated with the 10 metric values (778 inputs exactly).
"""

from __future__ import annotations

import hashlib

import torch
import torch.nn as nn

from . import CLS_WIDTH, FUSED_WIDTH, METRICS_WIDTH, N_CLASSES


class CodeEncoder(nn.Module):
    def __init__(self, vocab_size: int, hidden: int = CLS_WIDTH, layers: int = 1,
                 heads: int = 8, feedforward: int = 1024, max_positions: int = 512,
                 dropout: float = 0.1):
        super().__init__()
        self.hidden = hidden
        self.token_embedding = nn.Embedding(vocab_size, hidden)
        self.position_embedding = nn.Embedding(max_positions, hidden)
        self.norm = nn.LayerNorm(hidden)
        self.dropout = nn.Dropout(dropout)
        layer = nn.TransformerEncoderLayer(
            d_model=hidden, nhead=heads, dim_feedforward=feedforward,
            dropout=dropout, activation="gelu", batch_first=True,
        )
        self.layers = nn.TransformerEncoder(layer, num_layers=layers)

    def forward(self, ids: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        positions = torch.arange(ids.shape[1], device=ids.device)
        states = self.token_embedding(ids) + self.position_embedding(positions)[None]
        states = self.dropout(self.norm(states))
        padding = mask == 0
        return self.layers(states, src_key_padding_mask=padding)

    def cls_vector(self, ids: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        return self.forward(ids, mask)[:, 0]


class ClassificationHead(nn.Module):
    """Dense + tanh pooling over the aggregate vector, then 4 logits."""

    def __init__(self, hidden: int = CLS_WIDTH, dropout: float = 0.1):
        super().__init__()
        self.dense = nn.Linear(hidden, hidden)
        self.dropout = nn.Dropout(dropout)
        self.out = nn.Linear(hidden, N_CLASSES)

    def forward(self, cls_vector: torch.Tensor) -> torch.Tensor:
        pooled = torch.tanh(self.dense(self.dropout(cls_vector)))
        return self.out(self.dropout(pooled))


class FusionHead(nn.Module):
    """Dense layer over [CLS(768) ++ metrics(10)] = 778 inputs."""

    def __init__(self, hidden: int = CLS_WIDTH, dropout: float = 0.1):
        super().__init__()
        self.fused_width = hidden + METRICS_WIDTH
        self.dropout = nn.Dropout(dropout)
        self.out = nn.Linear(self.fused_width, N_CLASSES)

    def forward(self, cls_vector: torch.Tensor, metrics: torch.Tensor) -> torch.Tensor:
        fused = torch.cat([cls_vector, metrics], dim=1)
        return self.out(self.dropout(fused))


class SeverityModel(nn.Module):
    def __init__(self, mode: str, vocab_size: int, layers: int = 1,
                 feedforward: int = 1024, dropout: float = 0.1):
        super().__init__()
        if mode not in ("plain", "concat_inline", "concat_cls"):
            raise ValueError(f"unknown mode {mode!r}")
        self.mode = mode
        self.encoder = CodeEncoder(vocab_size, layers=layers,
                                   feedforward=feedforward, dropout=dropout)
        if mode == "concat_cls":
            self.head = FusionHead(dropout=dropout)
            assert self.head.fused_width == FUSED_WIDTH
        else:
            self.head = ClassificationHead(dropout=dropout)

    def forward(self, ids: torch.Tensor, mask: torch.Tensor,
                metrics: torch.Tensor | None = None) -> torch.Tensor:
        cls_vector = self.encoder.cls_vector(ids, mask)
        if self.mode == "concat_cls":
            if metrics is None:
                raise ValueError("concat_cls forward needs the metric vectors")
            return self.head(cls_vector, metrics)
        return self.head(cls_vector)

    def set_encoder_frozen(self, frozen: bool) -> None:
        for param in self.encoder.parameters():
            param.requires_grad = not frozen


def encoder_weight_hash(model: SeverityModel) -> str:
    """Order-stable digest of every encoder tensor (freeze-contract probe)."""
    sha = hashlib.sha256()
    state = model.encoder.state_dict()
    for name in sorted(state):
        sha.update(name.encode())
        sha.update(state[name].detach().cpu().numpy().tobytes())
    return sha.hexdigest()
