"""The ten method-level metrics and robust feature scaling.

Vector order is fixed everywhere: [LC, PI, MA, NBD, ML, D, MI, FO, R, E].
LC, MA, NBD, ML and FO are integers; PI, D, MI, R and E are reals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import EmptyFit
from .java_methods import MethodShape

METRIC_NAMES = ("lc", "pi", "ma", "nbd", "ml", "d", "mi", "fo", "r", "e")

# Hand-set readability surrogate weights. Only the [0,1] range, determinism
# and the short-simple-beats-long-nested ordering are contractual; the
# blank-line term is frozen at 0 so inserting blank lines cannot move any
# metric.
READABILITY_BIAS = 3.0
READABILITY_WEIGHTS = {
    "avg_line_length": -0.04,
    "max_line_length": -0.012,
    "identifiers_per_line": -0.30,
    "mean_indent_units": -0.45,
    "blank_line_ratio": 0.0,
    "parens_per_line": -0.50,
}


class HalsteadMeasures(NamedTuple):
    n1: int
    n2: int
    N1: int
    N2: int
    volume: float
    difficulty: float
    effort: float


@dataclass(frozen=True)
class MetricsVector:
    lc: int
    pi: float
    ma: int
    nbd: int
    ml: int
    d: float
    mi: float
    fo: int
    r: float
    e: float

    def as_list(self) -> list[float]:
        return [self.lc, self.pi, self.ma, self.nbd, self.ml,
                self.d, self.mi, self.fo, self.r, self.e]

    def as_array(self) -> np.ndarray:
        return np.array(self.as_list(), dtype=np.float64)


@dataclass(frozen=True)
class ScaledMatrix:
    """Robust-scaled metric rows plus the parameters that produced them."""

    rows: np.ndarray
    per_column_median: np.ndarray
    per_column_iqr: np.ndarray


def lines_of_code(shape: MethodShape) -> int:
    """Non-blank, non-comment source lines."""
    return shape.logical_lines


def mccabe(shape: MethodShape) -> int:
    """Cyclomatic complexity: 1 + decision points."""
    return 1 + shape.decision_points


def mcclure(shape: MethodShape) -> int:
    """Total comparisons plus distinct control variables across predicates."""
    comparisons = sum(p.comparison_count for p in shape.predicates)
    variables: set[str] = set()
    for p in shape.predicates:
        variables.update(p.control_variables)
    return comparisons + len(variables)


def nested_block_depth(shape: MethodShape) -> int:
    return shape.max_nesting_depth


def proxy_indentation(shape: MethodShape) -> float:
    """Mean indentation in detected units; 0 for single-line methods."""
    profile = shape.indent_per_line
    if not profile:
        return 0.0
    return sum(profile) / len(profile)


def fan_out(shape: MethodShape) -> int:
    """Total call sites (repeated callees counted every time)."""
    return sum(shape.call_sites.values())


def halstead(shape: MethodShape) -> HalsteadMeasures:
    """Volume, difficulty and effort from the operator/operand counts.

    Degenerate token streams do not raise: with no operands D = E = 0 and V
    is kept as defined while n > 0; with no tokens at all everything is 0.
    """
    n1, n2, N1, N2 = shape.halstead_counts
    n = n1 + n2
    N = N1 + N2
    volume = N * math.log2(n) if n > 0 else 0.0
    difficulty = (n1 / 2.0) * (N2 / n2) if n2 > 0 else 0.0
    effort = difficulty * volume
    return HalsteadMeasures(n1, n2, N1, N2, volume, difficulty, effort)


def maintainability_index(volume: float, ma: int, lc: int) -> float:
    """171 - 5.2 ln(V) - 0.23 MA - 16.2 ln(LC), unclamped.

    When V <= 0 (degenerate methods) the volume term is dropped.
    """
    mi = 171.0 - 0.23 * ma - 16.2 * math.log(lc)
    if volume > 0:
        mi -= 5.2 * math.log(volume)
    return mi


def readability(shape: MethodShape) -> float:
    """Logistic surrogate score in [0, 1]; higher reads easier."""
    stats = shape.line_stats
    z = READABILITY_BIAS
    for name, weight in READABILITY_WEIGHTS.items():
        z += weight * getattr(stats, name)
    return 1.0 / (1.0 + math.exp(-z))


def metrics_vector(shape: MethodShape) -> MetricsVector:
    """All ten metrics in the fixed [LC, PI, MA, NBD, ML, D, MI, FO, R, E] order."""
    lc = lines_of_code(shape)
    ma = mccabe(shape)
    h = halstead(shape)
    return MetricsVector(
        lc=lc,
        pi=proxy_indentation(shape),
        ma=ma,
        nbd=nested_block_depth(shape),
        ml=mcclure(shape),
        d=h.difficulty,
        mi=maintainability_index(h.volume, ma, lc),
        fo=fan_out(shape),
        r=readability(shape),
        e=h.effort,
    )


def _to_matrix(rows: Iterable[MetricsVector] | Sequence[Sequence[float]] | np.ndarray) -> np.ndarray:
    data = [row.as_list() if isinstance(row, MetricsVector) else list(row) for row in rows]
    return np.asarray(data, dtype=np.float64)


def robust_scale_fit(rows) -> tuple[np.ndarray, np.ndarray]:
    """Per-column median and interquartile range (linear-interpolated quartiles)."""
    matrix = _to_matrix(rows)
    if matrix.shape[0] < 2:
        raise EmptyFit("robust scaling needs at least 2 rows")
    median = np.median(matrix, axis=0)
    q1 = np.percentile(matrix, 25, axis=0)
    q3 = np.percentile(matrix, 75, axis=0)
    return median, q3 - q1


def robust_scale_transform(rows, params: tuple[np.ndarray, np.ndarray]) -> ScaledMatrix:
    """(x - median) / IQR per cell; columns with zero IQR are only centered."""
    matrix = _to_matrix(rows)
    median, iqr = params
    divisor = np.where(iqr == 0, 1.0, iqr)
    scaled = (matrix - median) / divisor
    return ScaledMatrix(rows=scaled, per_column_median=np.asarray(median),
                        per_column_iqr=np.asarray(iqr))
