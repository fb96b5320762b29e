"""Averaged F1 versus F1 of averages: both macro F1 formulas and their gap."""

from .confusion import (
    ClassMetrics,
    ConfusionMatrix,
    f1_class,
    from_pairs,
    harmonic_mean,
    per_class_metrics,
    precision,
    recall,
)
from .macro import (
    ExtremalConfig,
    MacroReport,
    averaged_f1,
    delta_closed_form,
    delta_direct,
    divergence_condition,
    extremal_delta,
    extremal_matrix,
    f1_of_averages,
    macro_report,
    supremum_bound,
)

__all__ = [
    "ClassMetrics",
    "ConfusionMatrix",
    "ExtremalConfig",
    "MacroReport",
    "averaged_f1",
    "delta_closed_form",
    "delta_direct",
    "divergence_condition",
    "extremal_delta",
    "extremal_matrix",
    "f1_class",
    "f1_of_averages",
    "from_pairs",
    "harmonic_mean",
    "macro_report",
    "per_class_metrics",
    "precision",
    "recall",
    "supremum_bound",
]
