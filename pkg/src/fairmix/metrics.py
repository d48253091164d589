"""Group fairness measures for deterministic prediction vectors.

Five per-group benefit rates are supported: acceptance rate into the
positive class, true positive rate, true negative rate, and positive /
negative predictive value. A rate whose conditioning set is empty is
*undefined* and reported as ``None``: an expectation over an empty group
has no value, and silently substituting 0 would fabricate gaps.

The inter-group gap convention is ``value(z=0) - value(z=1)`` and is
stated in every serialized report.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .dataset import CounterfactualPair, Dataset

DEFAULT_TOLERANCE = 1e-9


class MetricKind(enum.Enum):
    ACCEPTANCE_RATE = "acceptance_rate"
    TPR = "tpr"
    TNR = "tnr"
    PPV = "ppv"
    NPV = "npv"

    def __str__(self) -> str:
        return self.value


#: Kinds whose ensemble value is linear in the mixture weights.
LINEAR_KINDS = frozenset(
    {MetricKind.ACCEPTANCE_RATE, MetricKind.TPR, MetricKind.TNR}
)

#: Kinds that are ratios of linear forms, hence non-linear in the weights.
RATIO_KINDS = frozenset({MetricKind.PPV, MetricKind.NPV})


def _check_length(predictions: np.ndarray, dataset: Dataset) -> np.ndarray:
    predictions = np.asarray(predictions)
    if predictions.shape != (len(dataset),):
        raise ValueError(
            f"prediction vector of length {predictions.shape} does not match "
            f"dataset size {len(dataset)}"
        )
    return predictions


def accuracy(predictions, dataset: Dataset) -> float:
    """Fraction of instances whose prediction equals the true label."""
    predictions = _check_length(predictions, dataset)
    return int(np.sum(predictions == dataset.labels)) / len(dataset)


def rate_counts(
    kind: MetricKind, predictions, dataset: Dataset, z: int
) -> tuple[int, int]:
    """Integer (numerator, denominator) of a group rate.

    The rate itself is ``numerator / denominator``; a zero denominator
    means the rate is undefined. Exposing the counts keeps exact
    rational arithmetic available to oracles and to the weighted-ratio
    ensemble formulas.
    """
    predictions = _check_length(predictions, dataset)
    in_group = dataset.sensitive == z
    pos_label = dataset.labels == 1
    accepted = predictions == 1
    if kind is MetricKind.ACCEPTANCE_RATE:
        cond = in_group
        hit = accepted
    elif kind is MetricKind.TPR:
        cond = in_group & pos_label
        hit = accepted
    elif kind is MetricKind.TNR:
        cond = in_group & ~pos_label
        hit = ~accepted
    elif kind is MetricKind.PPV:
        cond = in_group & accepted
        hit = pos_label
    elif kind is MetricKind.NPV:
        cond = in_group & ~accepted
        hit = ~pos_label
    else:  # pragma: no cover - enum is closed
        raise ValueError(f"unknown metric kind {kind!r}")
    return int(np.sum(cond & hit)), int(np.sum(cond))


def group_rate(kind: MetricKind, predictions, dataset: Dataset, z: int) -> Optional[float]:
    """Per-group benefit rate, or ``None`` when the conditioning set is empty."""
    if z not in (0, 1):
        raise ValueError(f"sensitive value must be 0 or 1, got {z!r}")
    num, den = rate_counts(kind, predictions, dataset, z)
    if den == 0:
        return None
    return num / den


def fairness_gap(kind: MetricKind, predictions, dataset: Dataset) -> Optional[float]:
    """``group_rate(z=0) - group_rate(z=1)``; ``None`` if either side is undefined."""
    r0 = group_rate(kind, predictions, dataset, 0)
    r1 = group_rate(kind, predictions, dataset, 1)
    if r0 is None or r1 is None:
        return None
    return r0 - r1


def treatment_violations(
    benefit_profile,
    pairs: Sequence[CounterfactualPair],
    tolerance: float = DEFAULT_TOLERANCE,
) -> list[CounterfactualPair]:
    """Pairs whose two sides receive different benefit probabilities.

    ``benefit_profile`` holds, per instance, the probability of the
    positive outcome: 0/1 indicators for a deterministic classifier, the
    ensemble's per-instance acceptance probabilities otherwise. A pair
    violates equal treatment when the two probabilities differ by more
    than ``tolerance`` (so deterministic disagreement, a difference of
    1, is always a violation).
    """
    q = np.asarray(benefit_profile, dtype=float)
    return [p for p in pairs if abs(q[p.left] - q[p.right]) > tolerance]


def indicator_profile(predictions) -> np.ndarray:
    """0/1 benefit profile of a deterministic prediction vector."""
    return (np.asarray(predictions) == 1).astype(float)


@dataclass(frozen=True)
class GroupMetric:
    """One metric kind evaluated on both groups, with its gap.

    ``None`` values mean the rate (or the gap, when either rate is
    missing) is undefined; ``passed`` is then ``None`` too, i.e. the
    check is not assessable rather than failed.
    """

    kind: MetricKind
    value_z0: Optional[float]
    value_z1: Optional[float]
    gap: Optional[float]
    passed: Optional[bool]

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "value_z0": self.value_z0,
            "value_z1": self.value_z1,
            "gap": self.gap,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class FairnessReport:
    """Accuracy, all five group metrics, and treatment-test results."""

    accuracy: float
    metrics: tuple[GroupMetric, ...]
    treatment_pairs_checked: int
    treatment_violations: tuple[CounterfactualPair, ...]
    tolerance: float
    #: optional intra-group dispersion section (anything with to_json_dict)
    distributional: Optional[object] = None

    def metric(self, kind: MetricKind) -> GroupMetric:
        for m in self.metrics:
            if m.kind is kind:
                return m
        raise KeyError(kind)

    def to_json_dict(self) -> dict:
        doc = {
            "accuracy": self.accuracy,
            "gap_convention": "value_z0 - value_z1",
            "tolerance": self.tolerance,
            "metrics": [m.to_json_dict() for m in self.metrics],
            "treatment": {
                "pairs_checked": self.treatment_pairs_checked,
                "violations": len(self.treatment_violations),
                # 1-based indices for human readability
                "pairs": [[p.left + 1, p.right + 1] for p in self.treatment_violations],
            },
        }
        if self.distributional is not None:
            dist = self.distributional
            doc["distributional"] = (
                dist.to_json_dict() if hasattr(dist, "to_json_dict") else dist
            )
        return doc


def _group_metric(
    kind: MetricKind, rate0: Optional[float], rate1: Optional[float], tolerance: float
) -> GroupMetric:
    if rate0 is None or rate1 is None:
        return GroupMetric(kind, rate0, rate1, None, None)
    gap = rate0 - rate1
    return GroupMetric(kind, rate0, rate1, gap, abs(gap) <= tolerance)


def classifier_report(
    predictions,
    dataset: Dataset,
    pairs: Sequence[CounterfactualPair] = (),
    tolerance: float = DEFAULT_TOLERANCE,
) -> FairnessReport:
    """Full fairness report for one deterministic prediction vector."""
    predictions = _check_length(predictions, dataset)
    entries = []
    for kind in MetricKind:
        r0 = group_rate(kind, predictions, dataset, 0)
        r1 = group_rate(kind, predictions, dataset, 1)
        entries.append(_group_metric(kind, r0, r1, tolerance))
    violations = treatment_violations(indicator_profile(predictions), pairs, tolerance)
    return FairnessReport(
        accuracy=accuracy(predictions, dataset),
        metrics=tuple(entries),
        treatment_pairs_checked=len(pairs),
        treatment_violations=tuple(violations),
        tolerance=tolerance,
    )
