"""Fusion inputs for encoder fine-tuning: metric paragraphs and payloads.

Two export shapes: the inline record carries a natural-language paragraph
of the raw metric values next to the method source, the cls record pairs
the source with its 10-dim scaled metric vector. Payload assembly enforces
the 512-token budget with a surrogate estimator (whitespace/punctuation
tokens times a 1.3 safety factor); the trainer re-applies the same
keep-NL / cut-PL-tail policy with its real tokenizer.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import MethodRecord
from .errors import NLTooLarge, WrongArity
from .metrics import MetricsVector

TOKEN_BUDGET = 512
SPECIAL_TOKENS = 3  # [CLS], [SEP], [EOS]
SAFETY_FACTOR = 1.3

PARAGRAPH_TEMPLATE = (
    "The code contains {lc} lines and its complexity metrics values are "
    "{pi}, {ma} and {nbd}. The nested block depth is {ml}, and the "
    "difficulty of this code is {d}. The maintainability score is {mi} and "
    "this method calls {fo} number of methods while its readability and "
    "effort metrics values are {r}, {e}"
)

_RAW_TOKEN_RE = re.compile(r"\w+|[^\w\s]")


def format_value(value) -> str:
    """Integers print bare; reals keep two decimals."""
    if isinstance(value, bool):
        raise WrongArity("metric values must be numbers")
    if isinstance(value, int):
        return str(value)
    return f"{value:.2f}"


def render_metric_paragraph(values: Sequence | MetricsVector) -> str:
    """Fill the metric paragraph template in LC..E order."""
    if isinstance(values, MetricsVector):
        values = values.as_list()
    values = list(values)
    if len(values) != 10:
        raise WrongArity(f"expected 10 metric values, got {len(values)}")
    lc, pi, ma, nbd, ml, d, mi, fo, r, e = (format_value(v) for v in values)
    return PARAGRAPH_TEMPLATE.format(lc=lc, pi=pi, ma=ma, nbd=nbd, ml=ml,
                                     d=d, mi=mi, fo=fo, r=r, e=e)


def estimate_tokens(text: str) -> int:
    """Surrogate subword count: raw word/punct tokens times 1.3, rounded up.

    Computed as ceil(raw * 13 / 10) in integer arithmetic so budgets are
    exact.
    """
    raw = len(_RAW_TOKEN_RE.findall(text))
    return (raw * 13 + 9) // 10


@dataclass(frozen=True)
class FusionPayload:
    nl_text: str
    pl_text: str
    needs_padding: bool
    truncated: bool
    estimated_tokens: int
    token_budget: int = TOKEN_BUDGET

    @property
    def layout(self) -> tuple[str, ...]:
        return ("[CLS]", self.nl_text, "[SEP]", self.pl_text, "[EOS]")


def build_payload(nl: str, pl: str, budget: int = TOKEN_BUDGET) -> FusionPayload:
    """Fit [CLS] nl [SEP] pl [EOS] into the budget.

    The NL segment is never touched; the PL segment loses raw tokens from
    its end until the estimate fits. Raises NLTooLarge when the NL segment
    plus specials cannot fit on its own.
    """
    nl_cost = estimate_tokens(nl)
    cap = budget - SPECIAL_TOKENS - nl_cost
    if cap < 0:
        raise NLTooLarge(f"NL segment needs {nl_cost} tokens of a {budget} budget")

    matches = list(_RAW_TOKEN_RE.finditer(pl))
    # largest raw-token count whose estimate fits: ceil(k*13/10) <= cap
    keep = min(len(matches), cap * 10 // 13)
    truncated = keep < len(matches)
    kept_pl = pl[: matches[keep - 1].end()] if keep > 0 else ""
    if not truncated:
        kept_pl = pl

    estimate = SPECIAL_TOKENS + nl_cost + estimate_tokens(kept_pl)
    return FusionPayload(
        nl_text=nl,
        pl_text=kept_pl,
        needs_padding=estimate < budget,
        truncated=truncated,
        estimated_tokens=estimate,
        token_budget=budget,
    )


def inline_record(record: MethodRecord, vector: MetricsVector) -> dict:
    return {
        "id": record.id,
        "nl_text": render_metric_paragraph(vector),
        "pl_text": record.source,
        "label": record.severity_class,
    }


def plain_record(record: MethodRecord) -> dict:
    return {
        "id": record.id,
        "nl_text": "",
        "pl_text": record.source,
        "label": record.severity_class,
    }


def cls_record(record: MethodRecord, scaled_row: Sequence[float]) -> dict:
    metrics = [float(v) for v in scaled_row]
    if len(metrics) != 10:
        raise WrongArity(f"expected 10 scaled metrics, got {len(metrics)}")
    return {
        "id": record.id,
        "pl_text": record.source,
        "metrics": metrics,
        "label": record.severity_class,
    }


def export_concat_inline(records: Sequence[MethodRecord],
                         vectors: Sequence[MetricsVector],
                         path: str | Path) -> None:
    """One {id, nl_text, pl_text, label} row per method, paragraph from the
    raw (unscaled) metric values."""
    _write_jsonl((inline_record(rec, vec) for rec, vec in zip(records, vectors)), path)


def export_plain(records: Sequence[MethodRecord], path: str | Path) -> None:
    """Inline schema with an empty NL segment (code-only fine-tuning)."""
    _write_jsonl((plain_record(rec) for rec in records), path)


def export_concat_cls(records: Sequence[MethodRecord],
                      scaled_rows,
                      path: str | Path) -> None:
    """One {id, pl_text, metrics, label} row per method with scaled vectors."""
    _write_jsonl((cls_record(rec, row) for rec, row in zip(records, scaled_rows)), path)


def _write_jsonl(rows: Iterable[dict], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(row, sort_keys=True) + "\n")


def read_jsonl(path: str | Path) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                rows.append(json.loads(line))
    return rows
