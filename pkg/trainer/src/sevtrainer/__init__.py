"""Two-phase encoder fine-tuning for 4-class bug severity prediction.

Consumes the metric toolkit's fusion JSONL exports (plain, inline, cls) and
emits predictions in its bridge schema: one `{id, proba: [p0..p3]}` row per
method.
"""

__version__ = "0.1.0"

N_CLASSES = 4
MAX_TOKENS = 512
CLS_WIDTH = 768
METRICS_WIDTH = 10
FUSED_WIDTH = CLS_WIDTH + METRICS_WIDTH


class TrainerError(Exception):
    """Base for data/configuration errors raised by this package."""


class NLTooLarge(TrainerError):
    """The NL segment alone exceeds the token budget."""


class DivergedTraining(TrainerError):
    """Loss became non-finite during fine-tuning."""
