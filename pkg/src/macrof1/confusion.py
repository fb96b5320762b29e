"""Confusion matrices and per-class precision, recall and F1.

Orientation is fixed: ``cells[i, j]`` counts samples *predicted* as class ``i``
whose *gold* label is ``j``. Rows are predictions, columns are gold labels.
Precision of class ``i`` therefore divides by row ``i`` and recall by column
``i``. Any ratio with a zero denominator is defined as 0.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class ConfusionMatrix:
    """Immutable n x n matrix of nonnegative integer counts (rows = predicted)."""

    __slots__ = ("_cells", "_diag", "_row_sums", "_col_sums")

    def __init__(self, cells):
        rows = [[_as_count(v) for v in row] for row in cells]
        n = len(rows)
        if n < 1 or any(len(row) != n for row in rows):
            raise ValueError(f"confusion matrix must be square and non-empty, got {n} rows")
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                if v < 0:
                    raise ValueError(f"negative count {v} at cell ({i}, {j})")
        self._cells = tuple(tuple(row) for row in rows)
        self._diag = tuple(rows[i][i] for i in range(n))
        self._row_sums = tuple(sum(row) for row in rows)
        self._col_sums = tuple(sum(rows[i][j] for i in range(n)) for j in range(n))

    @classmethod
    def zeros(cls, n: int) -> "ConfusionMatrix":
        return cls([[0] * n for _ in range(n)])

    @classmethod
    def from_arrays(cls, predicted, gold, n: int) -> "ConfusionMatrix":
        """Vectorised counting of aligned prediction / gold index arrays."""
        predicted = np.asarray(predicted, dtype=np.int64)
        gold = np.asarray(gold, dtype=np.int64)
        if predicted.shape != gold.shape or predicted.ndim != 1:
            raise ValueError("predicted and gold must be 1-d arrays of equal length")
        for name, arr in (("predicted", predicted), ("gold", gold)):
            bad = np.flatnonzero((arr < 0) | (arr >= n))
            if bad.size:
                k = int(bad[0])
                raise ValueError(
                    f"{name} index out of range [0, {n}) at position {k}: "
                    f"pair ({int(predicted[k])}, {int(gold[k])})"
                )
        counts = np.bincount(predicted * n + gold, minlength=n * n)
        return cls(counts.reshape(n, n))

    @property
    def n(self) -> int:
        return len(self._cells)

    @property
    def cells(self) -> np.ndarray:
        arr = np.array(self._cells)
        arr.setflags(write=False)
        return arr

    @property
    def diagonal(self) -> tuple[int, ...]:
        return self._diag

    @property
    def row_sums(self) -> tuple[int, ...]:
        return self._row_sums

    @property
    def col_sums(self) -> tuple[int, ...]:
        return self._col_sums

    @property
    def total(self) -> int:
        return sum(self._row_sums)

    def __getitem__(self, idx: tuple[int, int]) -> int:
        i, j = idx
        return self._cells[i][j]

    def tolist(self) -> list[list[int]]:
        return [list(row) for row in self._cells]

    def transpose(self) -> "ConfusionMatrix":
        return ConfusionMatrix([list(col) for col in zip(*self._cells)])

    def permute(self, perm: Sequence[int]) -> "ConfusionMatrix":
        """Relabel classes: new class ``k`` is old class ``perm[k]``."""
        if sorted(perm) != list(range(self.n)):
            raise ValueError(f"not a permutation of range({self.n}): {list(perm)}")
        return ConfusionMatrix([[self._cells[a][b] for b in perm] for a in perm])

    def scale(self, c: int) -> "ConfusionMatrix":
        if c < 1:
            raise ValueError("scale factor must be a positive integer")
        return ConfusionMatrix([[c * v for v in row] for row in self._cells])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConfusionMatrix):
            return NotImplemented
        return self._cells == other._cells

    def __hash__(self) -> int:
        return hash(self._cells)

    def __repr__(self) -> str:
        return f"ConfusionMatrix({self.tolist()})"


def _as_count(v) -> int:
    if isinstance(v, (bool, np.bool_)):
        raise TypeError("confusion matrix cells must be integers, not booleans")
    if isinstance(v, numbers.Integral):
        return int(v)
    if isinstance(v, numbers.Real) and float(v).is_integer():
        return int(v)
    raise TypeError(f"confusion matrix cells must be integers, got {v!r}")


def from_pairs(pairs: Iterable[tuple[int, int]], n: int) -> ConfusionMatrix:
    """Count ``(predicted, gold)`` pairs into an n x n matrix."""
    if n < 1:
        raise ValueError("class count must be at least 1")
    counts = [[0] * n for _ in range(n)]
    for k, pair in enumerate(pairs):
        p, g = pair
        if not (0 <= p < n and 0 <= g < n):
            raise ValueError(f"pair #{k} {tuple(pair)!r} has a class index outside [0, {n})")
        counts[p][g] += 1
    return ConfusionMatrix(counts)


@dataclass(frozen=True)
class ClassMetrics:
    class_index: int
    precision: float
    recall: float
    f1: float


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def harmonic_mean(x: float, y: float) -> float:
    """2xy/(x+y), with H(0, 0) = 0 and H(x, x) = x exactly."""
    if x + y == 0:
        return 0.0
    if x == y:
        return x
    return (x * y / (x + y)) * 2


def _check_index(cm: ConfusionMatrix, i: int) -> None:
    if not 0 <= i < cm.n:
        raise IndexError(f"class index {i} out of range [0, {cm.n})")


def precision(cm: ConfusionMatrix, i: int) -> float:
    _check_index(cm, i)
    return _ratio(cm.diagonal[i], cm.row_sums[i])


def recall(cm: ConfusionMatrix, i: int) -> float:
    _check_index(cm, i)
    return _ratio(cm.diagonal[i], cm.col_sums[i])


def f1_class(cm: ConfusionMatrix, i: int) -> float:
    return harmonic_mean(precision(cm, i), recall(cm, i))


def precisions(cm: ConfusionMatrix) -> list[float]:
    return [_ratio(d, r) for d, r in zip(cm.diagonal, cm.row_sums)]


def recalls(cm: ConfusionMatrix) -> list[float]:
    return [_ratio(d, c) for d, c in zip(cm.diagonal, cm.col_sums)]


def per_class_metrics(cm: ConfusionMatrix) -> list[ClassMetrics]:
    return [
        ClassMetrics(i, p, r, harmonic_mean(p, r))
        for i, (p, r) in enumerate(zip(precisions(cm), recalls(cm)))
    ]


def label_index(labels: Iterable[str]) -> dict[str, int]:
    """Map string labels to class indices in sorted order."""
    return {lab: k for k, lab in enumerate(sorted(set(labels)))}
