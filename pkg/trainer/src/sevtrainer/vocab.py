"""Deterministic word-level tokenizer built from the training split.

No pretrained subword vocabulary is available offline, so the tokenizer
splits on word/punctuation boundaries and maps unseen lexemes to [UNK].
Token ids are stable for a given training corpus: ordered by descending
frequency with lexicographic tie-break.
"""

from __future__ import annotations

import re
from collections import Counter
from typing import Iterable

PAD, CLS, SEP, EOS, UNK = "[PAD]", "[CLS]", "[SEP]", "[EOS]", "[UNK]"
SPECIALS = (PAD, CLS, SEP, EOS, UNK)

_TOKEN_RE = re.compile(r"\w+|[^\w\s]")


def split_text(text: str) -> list[str]:
    return _TOKEN_RE.findall(text)


class Vocab:
    def __init__(self, tokens: list[str]):
        self.tokens = list(tokens)
        self.index = {tok: i for i, tok in enumerate(self.tokens)}
        self.pad_id = self.index[PAD]
        self.cls_id = self.index[CLS]
        self.sep_id = self.index[SEP]
        self.eos_id = self.index[EOS]
        self.unk_id = self.index[UNK]

    def __len__(self) -> int:
        return len(self.tokens)

    def encode(self, text: str) -> list[int]:
        unk = self.unk_id
        return [self.index.get(tok, unk) for tok in split_text(text)]

    @classmethod
    def build(cls, texts: Iterable[str], max_size: int = 8000) -> "Vocab":
        counts: Counter = Counter()
        for text in texts:
            counts.update(split_text(text))
        ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        body = [tok for tok, _ in ordered[: max_size - len(SPECIALS)]]
        return cls(list(SPECIALS) + body)
