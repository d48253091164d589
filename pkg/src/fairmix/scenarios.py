"""Built-in demonstration scenarios with exact expected values.

Each scenario bundles a small integer-count dataset, a member list,
prescribed mixture weights, and a map of expected quantities, chosen so
every number is an exact rational realized by cluster counts — nothing
is sampled and regeneration is bit-stable. Each one exhibits one effect:

* ``figure1`` — two complementary group-keyed rules; each alone decides
  by group membership, their uniform mixture treats every matched
  cross-group pair identically.
* ``figure2`` — members with unequal acceptance rates mixed into a
  group-balanced ensemble (weights 1/3, 2/3 reproduce rate 2/9 on both
  sides), plus a single deterministic rule with the same balanced rate.
* ``figure3`` — group-opposed labels where every fair single threshold
  rule stalls at coin-flip accuracy yet the fair uniform mixture of two
  group-aware rules reaches 0.75.
* ``figure4`` — two rules with identical group rates whose mixture
  spreads benefit evenly inside one group and deterministically inside
  the other: equal impact, opposite within-group dispersion.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import metrics, optimizer
from .classifiers import LinearClassifier, prediction_matrix
from .dataset import Dataset, build_counterfactual_pairs
from .distributional import dispersion
from .ensemble import (
    Ensemble,
    acceptance_probability,
    ensemble_group_rate,
    mixture_accuracy,
)
from .errors import FairmixError
from .metrics import MetricKind

#: per-cluster instance count shared by the generators; 2 keeps every
#: scenario rate an exact small rational while exercising duplicates
_COPIES = 2


@dataclass(frozen=True)
class Scenario:
    name: str
    description: str
    dataset: Dataset
    members: tuple[LinearClassifier, ...]
    prescribed_weights: np.ndarray
    expectations: dict

    def ensemble(self) -> Ensemble:
        return Ensemble(self.members, self.prescribed_weights)


@dataclass(frozen=True)
class ScenarioCheck:
    name: str
    expected: object
    actual: object
    ok: bool

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "expected": self.expected,
            "actual": self.actual,
            "ok": self.ok,
        }


def figure1() -> Scenario:
    """Opposite group-keyed rules; the uniform mixture is group-blind.

    The single feature is uninformative: both groups contain the same
    feature values with one positive and one negative label each, so
    every instance has a matched twin in the other group. Member one
    accepts exactly group 1, member two exactly group 0; each therefore
    flips on every matched pair, while their even mixture gives every
    instance probability 1/2.
    """
    features, labels, sensitive = [], [], []
    for f in (0.0, 1.0):
        for z in (0, 1):
            for y in (1, -1):
                features.append([f])
                labels.append(y)
                sensitive.append(z)
    dataset = Dataset.from_arrays(np.asarray(features), labels, sensitive)
    accepts_group1 = LinearClassifier((0.0,), sensitive_weight=1.0, bias=-0.5)
    accepts_group0 = LinearClassifier((0.0,), sensitive_weight=-1.0, bias=0.5)
    members = (accepts_group1, accepts_group0)
    expectations = {
        "pairs_checked": 8,
        "member_violation_fraction": [1.0, 1.0],
        "ensemble_violations": 0,
        "benefit_profile_constant": 0.5,
    }
    return Scenario(
        name="figure1",
        description="complementary group-keyed members; fair uniform mixture",
        dataset=dataset,
        members=members,
        prescribed_weights=np.array([0.5, 0.5]),
        expectations=expectations,
    )


def figure2() -> Scenario:
    """Rate-balancing mixture at weights (1/3, 2/3), plus a balanced single rule.

    Groups of nine; member one accepts six of group 1 and nobody from
    group 0 (rates 2/3 vs 0), member two accepts three of group 0 only
    (rates 0 vs 1/3). Weights (1/3, 2/3, 0) give both groups acceptance
    rate exactly 2/9. The third member is a plain feature-two threshold
    accepting two instances per group — the same 2/9 on both sides —
    and carries weight zero; it is the single-rule benchmark. Its
    accept-set (the two highest feature-two values per group) is one
    documented choice among several with that rate.
    """
    features, labels, sensitive = [], [], []

    def cluster(rows, y, z):
        for row in rows:
            features.append(row)
            labels.append(y)
            sensitive.append(z)

    # group 1: six positives accepted by member one, three negatives
    cluster([[-1.0, 1.0 + 0.1 * i] for i in range(6)], 1, 1)
    cluster([[-1.0, -1.0 - 0.1 * i] for i in range(3)], -1, 1)
    # group 0: three positives accepted by member two, six negatives
    cluster([[1.0, 1.0], [1.0, 1.4], [1.0, 1.5]], 1, 0)
    cluster([[1.0, -1.0 - 0.1 * i] for i in range(6)], -1, 0)
    dataset = Dataset.from_arrays(np.asarray(features), labels, sensitive)
    member1 = LinearClassifier((-1.0, 1.0), bias=-1.5)  # group 1's positives
    member2 = LinearClassifier((1.0, 1.0), bias=-1.5)  # group 0's positives
    member3 = LinearClassifier((0.0, 1.0), bias=-1.35)  # two per group
    members = (member1, member2, member3)
    third = 1.0 / 3.0
    expectations = {
        "member_acceptance_z0": [0.0, 1 / 3, 2 / 9],
        "member_acceptance_z1": [2 / 3, 0.0, 2 / 9],
        "member_gaps": [-2 / 3, 1 / 3, 0.0],
        "ensemble_acceptance_z0": 2 / 9,
        "ensemble_acceptance_z1": 2 / 9,
        "ensemble_gap": 0.0,
    }
    return Scenario(
        name="figure2",
        description="unequal members mixed to equal acceptance rate 2/9",
        dataset=dataset,
        members=members,
        prescribed_weights=np.array([third, 2 * third, 0.0]),
        expectations=expectations,
    )


def figure3() -> Scenario:
    """Group-opposed labels: fair mixture accuracy 0.75 vs single-rule 0.5.

    High feature value marks the positive class for group 0 and the
    negative class for group 1, in four equal clusters. Member one
    accepts group 0 at-or-above 1/2, member two accepts group 1 below
    1/2; each is 75% accurate but lopsided (rates 1/2 vs 0). Their even
    mixture keeps accuracy 0.75 with equal rates 1/4 — while no fair
    single threshold on the feature can beat 1/2 accuracy.
    """
    features, labels, sensitive = [], [], []
    clusters = (
        (1.0, 0, 1),   # group 0, positive at high feature
        (0.0, 0, -1),  # group 0, negative at low feature
        (0.0, 1, 1),   # group 1, positive at low feature
        (1.0, 1, -1),  # group 1, negative at high feature
    )
    for f, z, y in clusters:
        for _ in range(_COPIES):
            features.append([f])
            labels.append(y)
            sensitive.append(z)
    dataset = Dataset.from_arrays(np.asarray(features), labels, sensitive)
    # group 0 rule: accept iff z=0 and feature >= 1/2
    member1 = LinearClassifier((1.0,), sensitive_weight=-2.0, bias=-0.5)
    # group 1 rule: accept iff z=1 and feature <= 1/2
    member2 = LinearClassifier((-1.0,), sensitive_weight=1.0, bias=-0.5)
    members = (member1, member2)
    expectations = {
        "member_accuracies": [0.75, 0.75],
        "member_rates_z0": [0.5, 0.0],
        "member_rates_z1": [0.0, 0.5],
        "ensemble_accuracy": 0.75,
        "ensemble_rate_z0": 0.25,
        "ensemble_rate_z1": 0.25,
        "ensemble_gap": 0.0,
        "best_fair_threshold_accuracy": 0.5,
    }
    return Scenario(
        name="figure3",
        description="fair mixture beats every fair single threshold rule",
        dataset=dataset,
        members=members,
        prescribed_weights=np.array([0.5, 0.5]),
        expectations=expectations,
    )


def figure4() -> Scenario:
    """Equal group rates, opposite within-group benefit dispersion.

    Both members accept the same half of group 0 and complementary
    disjoint halves of group 1, so all group rates are 1/2. Under the
    even mixture every group-1 instance gets probability exactly 1/2
    (zero variance, nothing deterministic), while every group-0 instance
    gets probability 0 or 1 (maximal determinism at the same mean).
    """
    features, labels, sensitive = [], [], []
    clusters = (
        ([1.0, 1.0], 0, 1),    # group 0, accepted by both members
        ([-1.0, -1.0], 0, -1),  # group 0, rejected by both
        ([-1.0, 1.0], 1, 1),   # group 1, accepted by member one only
        ([1.0, -1.0], 1, -1),  # group 1, accepted by member two only
    )
    for row, z, y in clusters:
        for _ in range(_COPIES):
            features.append(row)
            labels.append(y)
            sensitive.append(z)
    dataset = Dataset.from_arrays(np.asarray(features), labels, sensitive)
    member1 = LinearClassifier((0.0, 1.0), bias=-0.5)  # upper half-plane
    member2 = LinearClassifier((1.0, 0.0), bias=-0.5)  # right half-plane
    members = (member1, member2)
    expectations = {
        "member_gaps": [0.0, 0.0],
        "ensemble_rate_z0": 0.5,
        "ensemble_rate_z1": 0.5,
        "ensemble_gap": 0.0,
        "z1_profile_constant": 0.5,
        "z0_variance": 0.25,
        "z0_determinism": 1.0,
        "z0_gini": 0.5,
        "z1_variance": 0.0,
        "z1_determinism": 0.0,
        "z1_gini": 0.0,
    }
    return Scenario(
        name="figure4",
        description="equal impact with opposite within-group dispersion",
        dataset=dataset,
        members=members,
        prescribed_weights=np.array([0.5, 0.5]),
        expectations=expectations,
    )


_GENERATORS: dict[str, Callable[[], Scenario]] = {
    "figure1": figure1,
    "figure2": figure2,
    "figure3": figure3,
    "figure4": figure4,
}


def scenario_names() -> tuple[str, ...]:
    return tuple(_GENERATORS)


def scenario_by_name(name: str) -> Scenario:
    try:
        return _GENERATORS[name]()
    except KeyError:
        raise FairmixError(
            f"unknown scenario {name!r}; available: {', '.join(_GENERATORS)}"
        ) from None


def _actuals_figure1(s: Scenario) -> dict:
    pairs = build_counterfactual_pairs(s.dataset)
    fractions = []
    for member in s.members:
        profile = metrics.indicator_profile(member.predict_all(s.dataset))
        violated = metrics.treatment_violations(profile, pairs)
        fractions.append(len(violated) / len(pairs))
    q = acceptance_probability(s.ensemble(), s.dataset)
    ens_violations = metrics.treatment_violations(q, pairs)
    constant = float(q[0]) if np.all(q == q[0]) else None
    return {
        "pairs_checked": len(pairs),
        "member_violation_fraction": fractions,
        "ensemble_violations": len(ens_violations),
        "benefit_profile_constant": constant,
    }


def _actuals_figure2(s: Scenario) -> dict:
    rates0, rates1, gaps = [], [], []
    for member in s.members:
        predictions = member.predict_all(s.dataset)
        rates0.append(
            metrics.group_rate(MetricKind.ACCEPTANCE_RATE, predictions, s.dataset, 0)
        )
        rates1.append(
            metrics.group_rate(MetricKind.ACCEPTANCE_RATE, predictions, s.dataset, 1)
        )
        gaps.append(
            metrics.fairness_gap(MetricKind.ACCEPTANCE_RATE, predictions, s.dataset)
        )
    ens = s.ensemble()
    r0 = ensemble_group_rate(ens, MetricKind.ACCEPTANCE_RATE, s.dataset, 0)
    r1 = ensemble_group_rate(ens, MetricKind.ACCEPTANCE_RATE, s.dataset, 1)
    return {
        "member_acceptance_z0": rates0,
        "member_acceptance_z1": rates1,
        "member_gaps": gaps,
        "ensemble_acceptance_z0": r0,
        "ensemble_acceptance_z1": r1,
        "ensemble_gap": r0 - r1,
    }


def _actuals_figure3(s: Scenario) -> dict:
    accuracies, rates0, rates1 = [], [], []
    for member in s.members:
        predictions = member.predict_all(s.dataset)
        accuracies.append(metrics.accuracy(predictions, s.dataset))
        rates0.append(
            metrics.group_rate(MetricKind.ACCEPTANCE_RATE, predictions, s.dataset, 0)
        )
        rates1.append(
            metrics.group_rate(MetricKind.ACCEPTANCE_RATE, predictions, s.dataset, 1)
        )
    ens = s.ensemble()
    r0 = ensemble_group_rate(ens, MetricKind.ACCEPTANCE_RATE, s.dataset, 0)
    r1 = ensemble_group_rate(ens, MetricKind.ACCEPTANCE_RATE, s.dataset, 1)
    sweep = optimizer.best_fair_single_threshold(s.dataset, 0, 1e-9)
    return {
        "member_accuracies": accuracies,
        "member_rates_z0": rates0,
        "member_rates_z1": rates1,
        "ensemble_accuracy": mixture_accuracy(ens, s.dataset),
        "ensemble_rate_z0": r0,
        "ensemble_rate_z1": r1,
        "ensemble_gap": r0 - r1,
        "best_fair_threshold_accuracy": None if sweep is None else sweep.accuracy,
    }


def _actuals_figure4(s: Scenario) -> dict:
    gaps = [
        metrics.fairness_gap(
            MetricKind.ACCEPTANCE_RATE, member.predict_all(s.dataset), s.dataset
        )
        for member in s.members
    ]
    ens = s.ensemble()
    r0 = ensemble_group_rate(ens, MetricKind.ACCEPTANCE_RATE, s.dataset, 0)
    r1 = ensemble_group_rate(ens, MetricKind.ACCEPTANCE_RATE, s.dataset, 1)
    q = acceptance_probability(ens, s.dataset)
    report = dispersion(q, s.dataset)
    q1 = q[s.dataset.sensitive == 1]
    constant = float(q1[0]) if q1.size and np.all(q1 == q1[0]) else None
    return {
        "member_gaps": gaps,
        "ensemble_rate_z0": r0,
        "ensemble_rate_z1": r1,
        "ensemble_gap": r0 - r1,
        "z1_profile_constant": constant,
        "z0_variance": report.group(0).variance_q,
        "z0_determinism": report.group(0).determinism_index,
        "z0_gini": report.group(0).gini_q,
        "z1_variance": report.group(1).variance_q,
        "z1_determinism": report.group(1).determinism_index,
        "z1_gini": report.group(1).gini_q,
    }


_ACTUALS: dict[str, Callable[[Scenario], dict]] = {
    "figure1": _actuals_figure1,
    "figure2": _actuals_figure2,
    "figure3": _actuals_figure3,
    "figure4": _actuals_figure4,
}

#: scenario numbers are exact rationals; recomputation must agree to
#: the last couple of bits
VERIFY_TOLERANCE = 1e-12


def _values_match(expected, actual) -> bool:
    if expected is None or actual is None:
        return expected is None and actual is None
    if isinstance(expected, (list, tuple)):
        return (
            isinstance(actual, (list, tuple))
            and len(expected) == len(actual)
            and all(_values_match(e, a) for e, a in zip(expected, actual))
        )
    if isinstance(expected, bool) or isinstance(actual, bool):
        return expected == actual
    if isinstance(expected, (int, float)):
        return abs(float(expected) - float(actual)) <= VERIFY_TOLERANCE
    return expected == actual


def verify_scenario(scenario: Scenario) -> list[ScenarioCheck]:
    """Recompute every expectation through the library; self-test a scenario."""
    actuals = _ACTUALS[scenario.name](scenario)
    checks = []
    for key, expected in scenario.expectations.items():
        actual = actuals[key]
        checks.append(ScenarioCheck(key, expected, actual, _values_match(expected, actual)))
    return checks


def scenario_prediction_matrix(scenario: Scenario) -> np.ndarray:
    """(M, N) member predictions for export alongside the dataset."""
    return prediction_matrix(scenario.members, scenario.dataset)
