"""Mixture-weight search: LP optimization, grid oracle, threshold sweep.

The central solver answers: over all probability vectors p on a fixed
member list, maximize ensemble accuracy subject to per-metric fairness
gaps bounded by a tolerance. For the linear metric kinds both the
objective and the gaps are linear in p, so the search is a small dense
LP over the probability simplex.

Two independent verifiers accompany it: an exhaustive lattice
enumeration over the simplex (the grid oracle) and a sweep over all
single-feature threshold rules, which bounds what any one deterministic
rule of that family can achieve. A randomized-constructive search for
PPV non-closure witnesses rounds out the module: it manufactures
instances where every member has a zero PPV gap yet their uniform
mixture does not.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

import numpy as np

from . import metrics
from .classifiers import Classifier, LinearClassifier, TableClassifier
from .dataset import Dataset
from .ensemble import Ensemble, ensemble_gap, mixture_accuracy
from .errors import FairmixError
from .metrics import LINEAR_KINDS, MetricKind
from .simplex import LinearProgram, SimplexResult, SolveStatus, simplex_solve

VALIDATION_TOLERANCE = 1e-9


class Objective(enum.Enum):
    MAX_ACCURACY = "max_accuracy"
    FEASIBILITY_ONLY = "feasibility_only"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class MixtureSolution:
    """Outcome of a fair-mixture solve.

    ``weights``/``accuracy``/``gaps`` are populated only when ``status``
    is optimal. ``gaps`` covers the constrained kinds; ``post_hoc_gaps``
    reports the ratio kinds (PPV/NPV), which the LP cannot constrain and
    which may be undefined (None) on the solution.
    """

    status: SolveStatus
    weights: Optional[np.ndarray]
    accuracy: Optional[float]
    gaps: dict
    post_hoc_gaps: dict
    objective: Objective
    tolerance: float
    iterations: int

    def to_json_dict(self) -> dict:
        return {
            "status": self.status.value,
            "weights": None if self.weights is None else list(self.weights),
            "accuracy": self.accuracy,
            "gaps": {k.value: v for k, v in self.gaps.items()},
            "post_hoc_gaps": {k.value: v for k, v in self.post_hoc_gaps.items()},
            "objective": self.objective.value,
            "tolerance": self.tolerance,
            "iterations": self.iterations,
        }


def _member_gap_table(
    members: Sequence[Classifier],
    dataset: Dataset,
    constrained: Sequence[MetricKind],
) -> dict:
    table = {}
    for kind in constrained:
        gaps = []
        for j, member in enumerate(members):
            g = metrics.fairness_gap(kind, member.predict_all(dataset), dataset)
            if g is None:
                raise FairmixError(
                    f"{kind} is undefined for member {j + 1}; cannot constrain it"
                )
            gaps.append(g)
        table[kind] = np.asarray(gaps)
    return table


def build_mixture_program(
    members: Sequence[Classifier],
    dataset: Dataset,
    constrained: Sequence[MetricKind],
    tolerance: float,
    objective: Objective,
) -> LinearProgram:
    """LP over mixture weights: the simplex row plus two-sided gap bounds.

    Every program built here includes the row sum(p) = 1; each
    constrained kind contributes the pair +/- (sum_j p_j gap_j) <= tol.
    A tolerance of infinity drops the gap rows entirely.
    """
    m = len(members)
    if objective is Objective.MAX_ACCURACY:
        c = np.array(
            [metrics.accuracy(mem.predict_all(dataset), dataset) for mem in members]
        )
    else:
        c = np.zeros(m)
    a_ub_rows = []
    b_ub = []
    if math.isfinite(tolerance):
        for kind, gaps in _member_gap_table(members, dataset, constrained).items():
            a_ub_rows.append(gaps)
            a_ub_rows.append(-gaps)
            b_ub.extend([tolerance, tolerance])
    else:
        _member_gap_table(members, dataset, constrained)  # still reject undefined
    a_ub = np.asarray(a_ub_rows) if a_ub_rows else None
    b_ub_arr = np.asarray(b_ub) if b_ub else None
    return LinearProgram(
        c, a_ub=a_ub, b_ub=b_ub_arr, a_eq=np.ones((1, m)), b_eq=np.array([1.0])
    )


def solve_fair_mixture(
    members: Sequence[Classifier],
    dataset: Dataset,
    constrained,
    tolerance: float,
    objective: Objective = Objective.MAX_ACCURACY,
) -> MixtureSolution:
    """Solve for fair mixture weights and re-verify the result analytically.

    The solution is never reported straight from the tableau: the
    returned weights are pushed back through the ensemble module and the
    recomputed accuracy and gaps must agree with the LP's view within
    1e-9, otherwise this raises rather than returning a bad certificate.
    """
    constrained = sorted(set(constrained), key=lambda k: k.value)
    bad = [k for k in constrained if k not in LINEAR_KINDS]
    if bad:
        raise FairmixError(
            f"cannot constrain {', '.join(str(k) for k in bad)}: only kinds "
            "linear in the weights are supported"
        )
    if tolerance < 0:
        raise FairmixError(f"tolerance must be >= 0, got {tolerance!r}")
    program = build_mixture_program(members, dataset, constrained, tolerance, objective)
    result: SimplexResult = simplex_solve(program)
    if result.status is not SolveStatus.OPTIMAL:
        return MixtureSolution(
            status=result.status,
            weights=None,
            accuracy=None,
            gaps={},
            post_hoc_gaps={},
            objective=objective,
            tolerance=tolerance,
            iterations=result.iterations,
        )
    weights = np.asarray(result.x, dtype=float)
    weights = weights / weights.sum()  # simplex row holds within 1e-9; make it exact
    ens = Ensemble(members, weights)
    accuracy = mixture_accuracy(ens, dataset)
    gaps = {}
    for kind in constrained:
        g = ensemble_gap(ens, kind, dataset)
        if g is None or abs(g) > tolerance + VALIDATION_TOLERANCE:
            raise FairmixError(
                f"solver returned weights violating the {kind} constraint: "
                f"gap {g!r} vs tolerance {tolerance!r}"
            )
        gaps[kind] = g
    if objective is Objective.MAX_ACCURACY and abs(accuracy - result.objective) > (
        VALIDATION_TOLERANCE
    ):
        raise FairmixError(
            f"LP objective {result.objective!r} disagrees with recomputed "
            f"mixture accuracy {accuracy!r}"
        )
    post_hoc = {
        kind: ensemble_gap(ens, kind, dataset)
        for kind in (MetricKind.PPV, MetricKind.NPV)
    }
    return MixtureSolution(
        status=SolveStatus.OPTIMAL,
        weights=weights,
        accuracy=accuracy,
        gaps=gaps,
        post_hoc_gaps=post_hoc,
        objective=objective,
        tolerance=tolerance,
        iterations=result.iterations,
    )


GRID_MAX_MEMBERS = 4
GRID_MIN_RESOLUTION = 10


@dataclass(frozen=True)
class GridOracleResult:
    """Best feasible lattice point, or None fields when nothing is feasible."""

    weights: Optional[np.ndarray]
    accuracy: Optional[float]
    feasible_count: int
    resolution: int

    def to_json_dict(self) -> dict:
        return {
            "weights": None if self.weights is None else list(self.weights),
            "accuracy": self.accuracy,
            "feasible_count": self.feasible_count,
            "resolution": self.resolution,
        }


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All integer compositions of ``total`` into ``parts``, lexicographic."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def grid_oracle(
    members: Sequence[Classifier],
    dataset: Dataset,
    constrained,
    tolerance: float,
    resolution: int,
) -> GridOracleResult:
    """Exhaustive search over the weight lattice {k/r} on the simplex.

    Completely independent of the LP machinery: enumerate every lattice
    point, check the gap constraints, take the feasible point of maximum
    accuracy. Ties go to the lexicographically smallest weight vector,
    which makes the result independent of any enumeration partitioning.
    """
    m = len(members)
    if m > GRID_MAX_MEMBERS:
        raise FairmixError(
            f"grid oracle supports at most {GRID_MAX_MEMBERS} members, got {m}"
        )
    if resolution < GRID_MIN_RESOLUTION:
        raise FairmixError(
            f"grid resolution must be >= {GRID_MIN_RESOLUTION}, got {resolution}"
        )
    constrained = sorted(set(constrained), key=lambda k: k.value)
    gap_table = _member_gap_table(members, dataset, constrained)
    acc = np.array(
        [metrics.accuracy(mem.predict_all(dataset), dataset) for mem in members]
    )
    lattice = np.asarray(list(_compositions(resolution, m)), dtype=float) / resolution
    feasible = np.ones(lattice.shape[0], dtype=bool)
    for gaps in gap_table.values():
        mixed = lattice @ gaps
        feasible &= np.abs(mixed) <= tolerance + 1e-12
    count = int(np.sum(feasible))
    if count == 0:
        return GridOracleResult(None, None, 0, resolution)
    values = lattice @ acc
    values[~feasible] = -np.inf
    best = int(np.argmax(values))  # first max = lexicographically smallest
    return GridOracleResult(
        lattice[best].copy(), float(values[best]), count, resolution
    )


@dataclass(frozen=True)
class ThresholdRule:
    """A single-feature threshold classifier found by the sweep."""

    threshold: float
    direction: str  # "+" accepts feature >= threshold, "-" accepts <=
    accuracy: float
    gap: float
    classifier: LinearClassifier

    def to_json_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "direction": self.direction,
            "accuracy": self.accuracy,
            "gap": self.gap,
        }


def _threshold_classifier(
    dimension: int, feature_index: int, threshold: float, direction: str
) -> LinearClassifier:
    weights = [0.0] * dimension
    if direction == "+":
        weights[feature_index] = 1.0
        return LinearClassifier(tuple(weights), 0.0, -threshold)
    weights[feature_index] = -1.0
    return LinearClassifier(tuple(weights), 0.0, threshold)


def best_fair_single_threshold(
    dataset: Dataset, feature_index: int, tolerance: float
) -> Optional[ThresholdRule]:
    """Most accurate fair threshold rule on one feature, by exhaustion.

    Candidate thresholds are every observed value of the feature plus a
    sentinel on each side, crossed with both directions; that realizes
    every achievable accept-set of the family. A rule qualifies when its
    acceptance-rate gap is defined and within ``tolerance``. Ties break
    to the smallest threshold, then to direction "+". Returns None when
    no rule of the family is fair (possible only if a group is empty).
    """
    if not 0 <= feature_index < dataset.dimension:
        raise FairmixError(
            f"feature index {feature_index} out of range for dimension "
            f"{dataset.dimension}"
        )
    values = np.unique(dataset.features[:, feature_index])
    candidates = [float(values[0]) - 1.0, *map(float, values), float(values[-1]) + 1.0]
    best: Optional[ThresholdRule] = None
    for threshold in candidates:
        for direction in ("+", "-"):
            rule = _threshold_classifier(
                dataset.dimension, feature_index, threshold, direction
            )
            predictions = rule.predict_all(dataset)
            gap = metrics.fairness_gap(MetricKind.ACCEPTANCE_RATE, predictions, dataset)
            if gap is None or abs(gap) > tolerance:
                continue
            acc = metrics.accuracy(predictions, dataset)
            if best is None or acc > best.accuracy:
                best = ThresholdRule(threshold, direction, acc, gap, rule)
    return best


@dataclass(frozen=True)
class PPVWitness:
    """A PPV non-closure certificate: fair members, unfair uniform mixture.

    Both members have PPV gap exactly zero (verified on integer counts);
    the uniform two-member ensemble has |PPV gap| of at least 0.05.
    """

    dataset: Dataset
    members: tuple[TableClassifier, TableClassifier]
    weights: tuple[float, float]
    member_gaps: tuple[float, float]
    ensemble_gap: float
    seed: int
    trial_index: int


def _exact_ppv_gap_is_zero(predictions, dataset: Dataset) -> bool:
    n0, d0 = metrics.rate_counts(MetricKind.PPV, predictions, dataset, 0)
    n1, d1 = metrics.rate_counts(MetricKind.PPV, predictions, dataset, 1)
    return d0 > 0 and d1 > 0 and n0 * d1 == n1 * d0


MIN_WITNESS_GAP = Fraction(1, 20)


def ppv_counterexample_search(seed: int, max_trials: int) -> Optional[PPVWitness]:
    """Search for a PPV non-closure witness; None after the trial budget.

    Each trial draws group sizes, disjoint per-group accept-counts for
    two members, and a common PPV level per member (an exact rational,
    so the member gaps are zero by construction, not by rounding), then
    checks whether the uniform mixture's PPV gap reaches 0.05. The trial
    is materialized as a concrete dataset plus prediction tables and
    re-verified on integer counts before being returned.
    """
    if max_trials < 0:
        raise FairmixError(f"max_trials must be >= 0, got {max_trials}")
    rng = np.random.default_rng(seed)
    for trial in range(max_trials):
        n0, n1 = (int(v) for v in rng.integers(3, 21, size=2))
        a0 = int(rng.integers(1, n0))
        b0 = int(rng.integers(1, n0 - a0 + 1))
        a1 = int(rng.integers(1, n1))
        b1 = int(rng.integers(1, n1 - a1 + 1))
        # common positive fraction inside each member's accept set, so
        # the member's PPV is identical across groups by construction
        ga, gb = math.gcd(a0, a1), math.gcd(b0, b1)
        s = int(rng.integers(0, ga + 1))
        t = int(rng.integers(0, gb + 1))
        ha0, ha1 = a0 // ga * s, a1 // ga * s
        hb0, hb1 = b0 // gb * t, b1 // gb * t
        gap = Fraction(ha0 + hb0, a0 + b0) - Fraction(ha1 + hb1, a1 + b1)
        if abs(gap) < MIN_WITNESS_GAP:
            continue
        labels = []
        sensitive = []
        pred_a = []
        pred_b = []
        for n, a, b, ha, hb, z in (
            (n0, a0, b0, ha0, hb0, 0),
            (n1, a1, b1, ha1, hb1, 1),
        ):
            rest = n - a - b
            labels.extend([1] * ha + [-1] * (a - ha))
            labels.extend([1] * hb + [-1] * (b - hb))
            labels.extend(int(v) for v in rng.choice((-1, 1), size=rest))
            pred_a.extend([1] * a + [-1] * (b + rest))
            pred_b.extend([-1] * a + [1] * b + [-1] * rest)
            sensitive.extend([z] * n)
        n_total = n0 + n1
        dataset = Dataset.from_arrays(
            np.arange(n_total, dtype=float).reshape(-1, 1),
            np.asarray(labels),
            np.asarray(sensitive),
        )
        if np.array_equal(pred_a, pred_b):
            continue  # identical members can never witness non-closure
        member_a = TableClassifier(pred_a, dataset)
        member_b = TableClassifier(pred_b, dataset)
        if not (
            _exact_ppv_gap_is_zero(member_a.predictions, dataset)
            and _exact_ppv_gap_is_zero(member_b.predictions, dataset)
        ):
            continue
        return PPVWitness(
            dataset=dataset,
            members=(member_a, member_b),
            weights=(0.5, 0.5),
            member_gaps=(0.0, 0.0),
            ensemble_gap=float(gap),
            seed=seed,
            trial_index=trial,
        )
    return None
