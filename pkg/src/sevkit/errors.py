"""Exception taxonomy.

Everything raised on bad input data derives from SevkitError so the CLI can
map it to the data-error exit code; genuine bugs surface as ordinary Python
exceptions.
"""


class SevkitError(Exception):
    """Base class for all input/data errors raised by this package."""


# --- method text parsing ---

class UnterminatedLiteral(SevkitError):
    """A string or character literal never closes before end of line/input."""


class UnterminatedComment(SevkitError):
    """A block comment is still open at end of input."""


class UnbalancedBraces(SevkitError):
    """Brace nesting of the method body does not balance."""


class EmptyMethod(SevkitError):
    """No `{...}` body block was found in the method text."""


# --- corpus handling ---

class UnknownSeverityLabel(SevkitError):
    """A raw severity label is outside the unification table."""


class MalformedRecord(SevkitError):
    """A corpus JSONL line could not be parsed into a method record."""


class CorpusTooSmall(SevkitError):
    """Too few records to produce the requested split."""


# --- metrics / scaling ---

class EmptyFit(SevkitError):
    """Robust scaling needs at least two rows to fit."""


# --- classifiers ---

class DimensionMismatch(SevkitError):
    """Feature matrix and label vector shapes disagree."""


class NonFiniteFeature(SevkitError):
    """Feature matrix contains NaN or infinity."""


class UnfittedModel(SevkitError):
    """Prediction requested from a model without fitted state."""


# --- evaluation ---

class LabelOutOfRange(SevkitError):
    """A label falls outside the fixed class set 0..3."""


class EmptyInput(SevkitError):
    """An evaluation metric received no samples."""


# --- fusion ---

class WrongArity(SevkitError):
    """The metric paragraph needs exactly ten values."""


class NLTooLarge(SevkitError):
    """The natural-language segment alone exceeds the token budget."""
