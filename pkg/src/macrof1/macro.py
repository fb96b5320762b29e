"""The two macro F1 aggregations and the gap between them.

``averaged_f1`` is the arithmetic mean of per-class F1 scores (the
"non-benevolent" formula). ``f1_of_averages`` is the harmonic mean of the
mean precision and the mean recall (the "benevolent" formula). Their
difference ``f1_of_averages - averaged_f1`` is never negative and is computed
here twice: directly, and through a pairwise closed form that depends only on
the per-class precision/recall profile.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .confusion import ConfusionMatrix, harmonic_mean, precisions, recalls

DIVERGENCE_TOL = 1e-12


@dataclass(frozen=True)
class MacroReport:
    averaged_f1: float
    f1_of_averages: float
    delta_direct: float
    delta_closed_form: float
    diverges: bool

    def as_dict(self) -> dict:
        return {
            "f1_of_averages": self.f1_of_averages,
            "averaged_f1": self.averaged_f1,
            "delta": self.delta_direct,
            "delta_closed_form": self.delta_closed_form,
            "diverges": self.diverges,
        }


@dataclass(frozen=True)
class ExtremalConfig:
    """Profile with ``r`` classes at (P, R) = (0, 1) and ``s`` at (1, 0)."""

    r: int
    s: int
    n: int

    def __post_init__(self):
        if self.r < 0 or self.s < 0:
            raise ValueError("r and s must be nonnegative")
        if self.r + self.s != self.n:
            raise ValueError(f"r + s must equal n, got {self.r} + {self.s} != {self.n}")
        if self.n < 2:
            raise ValueError("extremal configurations need n >= 2")


def _averaged_f1(p: list[float], r: list[float]) -> float:
    return sum(harmonic_mean(a, b) for a, b in zip(p, r)) / len(p)


def _f1_of_averages(p: list[float], r: list[float]) -> float:
    n = len(p)
    return harmonic_mean(sum(p) / n, sum(r) / n)


def _closed_form(p: list[float], r: list[float]) -> float:
    n = len(p)
    total = sum(a + b for a, b in zip(p, r))
    if total == 0:
        return 0.0
    # ordered-pair sum == 2 * unordered-pair sum; the x == y term vanishes
    acc = 0.0
    for x in range(n):
        sx = p[x] + r[x]
        if sx == 0:
            continue
        for y in range(x + 1, n):
            sy = p[y] + r[y]
            if sy == 0:
                continue
            d = p[x] * r[y] - p[y] * r[x]
            acc += (2 * (d * d)) / (n * sx * sy * total)
    return acc


def averaged_f1(cm: ConfusionMatrix) -> float:
    return _averaged_f1(precisions(cm), recalls(cm))


def f1_of_averages(cm: ConfusionMatrix) -> float:
    return _f1_of_averages(precisions(cm), recalls(cm))


def delta_direct(cm: ConfusionMatrix) -> float:
    p, r = precisions(cm), recalls(cm)
    return _f1_of_averages(p, r) - _averaged_f1(p, r)


def delta_closed_form(cm: ConfusionMatrix) -> float:
    """Pairwise closed form of the gap.

    Sums ``(P_x R_y - P_y R_x)^2 / ((P_x + R_x)(P_y + R_y))`` over ordered
    class pairs with nonzero ``P + R`` and divides by ``n * sum(P + R)``.
    Returns 0 when every class has ``P + R = 0`` (all-zero diagonal).
    """
    return _closed_form(precisions(cm), recalls(cm))


def precision_recall_order(cm: ConfusionMatrix, i: int) -> int:
    """Exact sign of ``P_i - R_i`` as -1, 0 or 1 (no floating point)."""
    d = cm.diagonal[i]
    p = Fraction(d, cm.row_sums[i]) if cm.row_sums[i] else Fraction(0)
    r = Fraction(d, cm.col_sums[i]) if cm.col_sums[i] else Fraction(0)
    return (p > r) - (p < r)


def divergence_condition(cm: ConfusionMatrix) -> bool:
    """True iff some class has precision different from recall.

    This equals ``gap_is_positive`` whenever every diagonal entry is
    positive. A class with an empty diagonal has P = R = 0 by convention and
    drops out of the gap, so e.g. ``[[0, 0], [1, 1]]`` has P_1 != R_1 but a
    gap of exactly 0.
    """
    return any(precision_recall_order(cm, i) != 0 for i in range(cm.n))


def gap_is_positive(cm: ConfusionMatrix) -> bool:
    """Exact test for a strictly positive gap.

    The gap is positive iff two classes with nonzero P + R have
    ``P_x R_y != P_y R_x``, which is checked in rational arithmetic.
    """
    live = [
        (Fraction(d, rs), Fraction(d, cs))
        for d, rs, cs in zip(cm.diagonal, cm.row_sums, cm.col_sums)
        if d
    ]
    return any(px * ry != py * rx for (px, rx), (py, ry) in zip(live, live[1:]))


def opposing_skew(cm: ConfusionMatrix) -> bool:
    """True iff some class has P < R and another has P > R."""
    signs = {precision_recall_order(cm, i) for i in range(cm.n)}
    return -1 in signs and 1 in signs


def supremum_bound(n: int) -> float:
    """Least upper bound of the gap over all n x n confusion matrices."""
    if n < 2:
        raise ValueError("the gap is identically zero for fewer than two classes")
    if n % 2 == 0:
        return 0.5
    return 0.5 - 1 / (2 * n * n)


def extremal_delta(cfg: ExtremalConfig) -> float:
    return 2 * cfg.r * cfg.s / cfg.n**2


def extremal_matrix(n: int, z: int) -> ConfusionMatrix:
    """Matrix whose gap approaches ``supremum_bound(n)`` as ``z`` grows.

    Even n: diagonal blocks ``[[1, 0], [z, 1]]``, giving per-class
    (P, R) = (1, 1/(1+z)), (1/(1+z), 1), ... For odd n the last three
    classes form ``[[1, 0, 0], [z, 1, z], [0, 0, 1]]`` with profile
    (1, 1/(1+z)), (1/(1+2z), 1), (1, 1/(1+z)).
    """
    if n < 2:
        raise ValueError("extremal matrices need n >= 2")
    if z < 0:
        raise ValueError("skew parameter z must be nonnegative")
    cells = [[0] * n for _ in range(n)]
    for k in range(n):
        cells[k][k] = 1
    pairs = n // 2 if n % 2 == 0 else (n - 3) // 2
    for b in range(pairs):
        cells[2 * b + 1][2 * b] = z
    if n % 2 == 1:
        a = n - 3
        cells[a + 1][a] = z
        cells[a + 1][a + 2] = z
    return ConfusionMatrix(cells)


def macro_report(cm: ConfusionMatrix) -> MacroReport:
    p, r = precisions(cm), recalls(cm)
    big = _f1_of_averages(p, r)
    small = _averaged_f1(p, r)
    delta = big - small
    return MacroReport(
        averaged_f1=small,
        f1_of_averages=big,
        delta_direct=delta,
        delta_closed_form=_closed_form(p, r),
        diverges=delta > DIVERGENCE_TOL,
    )
