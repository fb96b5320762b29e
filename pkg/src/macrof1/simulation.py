"""Seeded random-classifier experiments.

Every trial draws its own generator: PCG64 seeded by
``numpy.random.SeedSequence(seed, spawn_key=key)`` where ``key`` is the trial
index (or ``(ix, iy, t)`` for a sweep cell). Trials never share a stream, so
running them on any number of worker threads gives bit-identical output as
long as results are reduced in index order, which they are.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence, TextIO, Union

import numpy as np
from scipy.stats import rankdata

from .confusion import ConfusionMatrix
from .macro import MacroReport, macro_report

LABEL_SKEW = "label_skew"
ERROR_SKEW = "error_skew"

_PROB_TOL = 1e-9
_X_TOL = 1e-12


def trial_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


@dataclass(frozen=True)
class UniformRandom:
    """Predicts every class with equal probability, ignoring the gold label."""


@dataclass(frozen=True)
class AccuracyBiased:
    """Correct with probability ``accuracy``; ``error_skew`` shapes the errors."""

    accuracy: float
    error_skew: float = 0.0


Classifier = Union[UniformRandom, AccuracyBiased]


def _check_distribution(dist) -> np.ndarray:
    p = np.asarray(dist, dtype=float)
    if p.ndim != 1 or p.size < 1:
        raise ValueError("class distribution must be a non-empty vector")
    if np.any(~np.isfinite(p)) or np.any(p < 0):
        raise ValueError(f"class distribution has negative or non-finite entries: {p.tolist()}")
    if abs(p.sum() - 1.0) > _PROB_TOL:
        raise ValueError(f"class distribution sums to {p.sum()!r}, not 1")
    return p


def _check_biased(n: int, x: float, y: float) -> None:
    if not (1.0 / n - _X_TOL <= x <= 1.0):
        raise ValueError(f"accuracy {x} outside [1/{n}, 1]")
    if not (0.0 <= y <= 1.0):
        raise ValueError(f"error skew {y} outside [0, 1]")


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    dataset_size: int
    trials: int
    class_distribution: tuple[float, ...]
    classifier: Classifier = field(default_factory=UniformRandom)
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("class count must be at least 1")
        if self.dataset_size < 0 or self.trials < 1:
            raise ValueError("dataset_size must be >= 0 and trials >= 1")
        p = _check_distribution(self.class_distribution)
        if p.size != self.n:
            raise ValueError(f"class distribution has {p.size} entries for {self.n} classes")
        object.__setattr__(self, "class_distribution", tuple(float(v) for v in p))
        if isinstance(self.classifier, AccuracyBiased):
            _check_biased(self.n, self.classifier.accuracy, self.classifier.error_skew)
        elif not isinstance(self.classifier, UniformRandom):
            raise TypeError(f"unknown classifier {self.classifier!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")


def sample_gold_labels(dist, size: int, rng: np.random.Generator) -> np.ndarray:
    p = _check_distribution(dist)
    return rng.choice(p.size, size=size, p=p / p.sum())


def uniform_random_classifier(gold, n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, n, size=len(gold))


def skewed_label_distribution(n: int, y: float) -> np.ndarray:
    """Blend of the uniform distribution (y=0) and p_i proportional to i (y=1).

    Class weights use 1-based numbering, so at y=1 class ``k`` (0-based) has
    probability ``(k + 1) / (n (n + 1) / 2)``.
    """
    if not 0.0 <= y <= 1.0:
        raise ValueError(f"skew {y} outside [0, 1]")
    ranks = np.arange(1, n + 1, dtype=float)
    return (1 - y) / n + y * ranks / (n * (n + 1) / 2)


def prediction_distribution(gold: int, n: int, x: float, y: float) -> np.ndarray:
    """Probability of each predicted class for one gold label.

    The gold class gets ``x``. The remaining ``1 - x`` is split over the other
    classes, moving linearly from an even split at ``y=0`` to weights
    proportional to the 1-based class number ``j`` at ``y=1``, i.e.
    ``j (1 - x) / (n (n + 1) / 2 - i)`` with ``i`` the 1-based gold class.
    """
    _check_biased(n, x, y)
    if not 0 <= gold < n:
        raise ValueError(f"gold class {gold} outside [0, {n})")
    if n == 1:
        return np.ones(1)
    ranks = np.arange(1, n + 1, dtype=float)
    prop = ranks * (1 - x) / (n * (n + 1) / 2 - (gold + 1))
    even = np.full(n, (1 - x) / (n - 1))
    probs = (1 - y) * even + y * prop
    probs[gold] = x
    return probs


def _transition_cdf(n: int, x: float, y: float) -> np.ndarray:
    cdf = np.cumsum([prediction_distribution(g, n, x, y) for g in range(n)], axis=1)
    cdf[:, -1] = 1.0
    return cdf


def accuracy_biased_predictions(gold, n: int, x: float, y: float, rng: np.random.Generator) -> np.ndarray:
    """Vectorised form of :func:`accuracy_biased_classifier` over a label array."""
    gold = np.asarray(gold, dtype=np.int64)
    cdf = _transition_cdf(n, x, y)
    u = rng.random(gold.size)
    pred = (u[:, None] >= cdf[gold]).sum(axis=1)
    return np.minimum(pred, n - 1)


def accuracy_biased_classifier(gold: int, n: int, x: float, y: float, rng: np.random.Generator) -> int:
    probs = prediction_distribution(gold, n, x, y)
    return int(rng.choice(n, p=probs / probs.sum()))


def _predict(classifier: Classifier, gold: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    if isinstance(classifier, UniformRandom):
        return uniform_random_classifier(gold, n, rng)
    return accuracy_biased_predictions(gold, n, classifier.accuracy, classifier.error_skew, rng)


def simulate_matrix(n: int, size: int, dist, classifier: Classifier, rng: np.random.Generator) -> ConfusionMatrix:
    gold = sample_gold_labels(dist, size, rng)
    pred = _predict(classifier, gold, n, rng)
    return ConfusionMatrix.from_arrays(pred, gold, n)


# statistics --------------------------------------------------------------


def rmsd(pairs: Sequence[tuple[float, float]]) -> float:
    arr = np.asarray(pairs, dtype=float)
    if arr.size == 0:
        raise ValueError("rmsd of an empty sequence is undefined")
    arr = arr.reshape(-1, 2)
    diff = arr[:, 0] - arr[:, 1]
    return float(np.sqrt(np.mean(diff * diff)))


def pearson(xs, ys) -> float:
    """Product-moment correlation; NaN when either input has zero variance."""
    a = np.asarray(xs, dtype=float)
    b = np.asarray(ys, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("pearson needs two 1-d sequences of equal length")
    if a.size < 2:
        raise ValueError("pearson needs at least two observations")
    da = a - a.mean()
    db = b - b.mean()
    va = float(np.dot(da, da))
    vb = float(np.dot(db, db))
    if va == 0.0 or vb == 0.0:
        return math.nan
    rho = float(np.dot(da, db)) / math.sqrt(va * vb)
    return min(1.0, max(-1.0, rho))


def spearman(xs, ys) -> float:
    """Pearson correlation of average ranks (ties share their mean rank)."""
    a = np.asarray(xs, dtype=float)
    b = np.asarray(ys, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("spearman needs two 1-d sequences of equal length")
    return pearson(rankdata(a, method="average"), rankdata(b, method="average"))


# experiments --------------------------------------------------------------


@dataclass(frozen=True)
class TrialStats:
    reports: tuple[MacroReport, ...]
    rmsd: float
    pearson: float
    spearman: float

    @property
    def averaged_f1(self) -> np.ndarray:
        return np.array([r.averaged_f1 for r in self.reports])

    @property
    def f1_of_averages(self) -> np.ndarray:
        return np.array([r.f1_of_averages for r in self.reports])

    @property
    def deltas(self) -> np.ndarray:
        return np.array([r.delta_direct for r in self.reports])


def _ordered_map(fn: Callable, items: Sequence, workers: int) -> list:
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def run_trials(cfg: ExperimentConfig, workers: int = 1) -> TrialStats:
    def one(k: int) -> MacroReport:
        rng = trial_rng(cfg.seed, k)
        cm = simulate_matrix(cfg.n, cfg.dataset_size, cfg.class_distribution, cfg.classifier, rng)
        return macro_report(cm)

    reports = tuple(_ordered_map(one, range(cfg.trials), workers))
    big = [r.f1_of_averages for r in reports]
    small = [r.averaged_f1 for r in reports]
    if len(reports) >= 2:
        rho, srho = pearson(big, small), spearman(big, small)
    else:
        rho = srho = math.nan
    return TrialStats(reports, rmsd(list(zip(big, small))), rho, srho)


@dataclass(frozen=True)
class SweepResult:
    """Cell means indexed ``[ix, iy]`` over ``x_values`` x ``y_values``."""

    x_values: np.ndarray
    y_values: np.ndarray
    mean_delta: np.ndarray
    mean_averaged_f1: np.ndarray
    mean_f1_of_averages: np.ndarray

    def max_delta_off_perfect(self) -> float:
        mask = self.x_values < 1.0
        if not mask.any():
            return 0.0
        return float(self.mean_delta[mask, :].max())


def default_grid(n: int, points: int = 21) -> tuple[np.ndarray, np.ndarray]:
    return np.linspace(1.0 / n, 1.0, points), np.linspace(0.0, 1.0, points)


def sweep_grid(
    n: int,
    dataset_size: int,
    x_grid,
    y_grid,
    mode: str,
    trials_per_cell: int = 5,
    seed: int = 0,
    workers: int = 1,
) -> SweepResult:
    """Mean gap over an accuracy x skew grid.

    ``label_skew``: labels follow ``skewed_label_distribution(n, y)`` and
    errors are spread evenly. ``error_skew``: labels are uniform and errors
    follow ``prediction_distribution`` with skew ``y``.
    """
    if mode not in (LABEL_SKEW, ERROR_SKEW):
        raise ValueError(f"unknown sweep mode {mode!r}")
    xs = np.asarray(x_grid, dtype=float)
    ys = np.asarray(y_grid, dtype=float)
    if xs.ndim != 1 or ys.ndim != 1 or xs.size == 0 or ys.size == 0:
        raise ValueError("grids must be non-empty 1-d sequences")
    for x in xs:
        for y in ys:
            _check_biased(n, float(x), float(y))
    if trials_per_cell < 1:
        raise ValueError("trials_per_cell must be >= 1")

    uniform = np.full(n, 1.0 / n)

    def cell(idx: tuple[int, int]) -> tuple[float, float, float]:
        ix, iy = idx
        x, y = float(xs[ix]), float(ys[iy])
        if mode == LABEL_SKEW:
            dist, clf = skewed_label_distribution(n, y), AccuracyBiased(x, 0.0)
        else:
            dist, clf = uniform, AccuracyBiased(x, y)
        reps = [
            macro_report(simulate_matrix(n, dataset_size, dist, clf, trial_rng(seed, ix, iy, t)))
            for t in range(trials_per_cell)
        ]
        return (
            sum(r.delta_direct for r in reps) / trials_per_cell,
            sum(r.averaged_f1 for r in reps) / trials_per_cell,
            sum(r.f1_of_averages for r in reps) / trials_per_cell,
        )

    idx = [(ix, iy) for ix in range(xs.size) for iy in range(ys.size)]
    out = np.array(_ordered_map(cell, idx, workers)).reshape(xs.size, ys.size, 3)
    return SweepResult(xs, ys, out[..., 0], out[..., 1], out[..., 2])


# CSV output ----------------------------------------------------------------

TRIAL_COLUMNS = ("trial_id", "averaged_f1", "f1_of_averages", "delta")
CELL_COLUMNS = ("x", "y", "mean_delta", "mean_averaged_f1", "mean_f1_of_averages")


def fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_trials_csv(stats: TrialStats, fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(TRIAL_COLUMNS)
    for k, r in enumerate(stats.reports):
        w.writerow([k, fmt(r.averaged_f1), fmt(r.f1_of_averages), fmt(r.delta_direct)])


def write_sweep_csv(result: SweepResult, fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CELL_COLUMNS)
    for ix, x in enumerate(result.x_values):
        for iy, y in enumerate(result.y_values):
            w.writerow([
                fmt(x),
                fmt(y),
                fmt(result.mean_delta[ix, iy]),
                fmt(result.mean_averaged_f1[ix, iy]),
                fmt(result.mean_f1_of_averages[ix, iy]),
            ])
