"""Random classifier ensembles: a distribution over deterministic rules.

An ensemble pairs M member classifiers with a probability vector p.
Each decision applies one member drawn from p, so the outcome a user
receives is a Bernoulli draw whose success probability is the total
weight of the members that accept that user. That per-instance law (the
*benefit profile*) is exactly computable, and every group rate of the
ensemble follows from it analytically; the Monte Carlo sampler exists
only for validation and demonstration, never as the measurement path.

Acceptance rate, TPR and TNR are averages over fixed conditioning sets,
so the ensemble value is the p-weighted average of member values.
PPV/NPV condition on the *predicted* class, which varies per member;
their ensemble value is the ratio of weighted counts and is not linear
in p.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .classifiers import Classifier, prediction_matrix
from .dataset import CounterfactualPair, Dataset, group_indices
from .distributional import DispersionReport, dispersion
from .errors import FairmixError
from . import metrics
from .metrics import (
    DEFAULT_TOLERANCE,
    FairnessReport,
    LINEAR_KINDS,
    MetricKind,
    rate_counts,
)

WEIGHT_SUM_TOLERANCE = 1e-12
CLOSURE_IDENTITY_TOLERANCE = 1e-9

#: Recorded in sampler output; the seed-to-output mapping is part of the
#: artifact's compatibility contract.
GENERATOR_NAME = f"numpy.random.PCG64 (numpy {np.__version__}), inverse-CDF selection"


class Ensemble:
    """M classifiers plus a probability vector over them."""

    __slots__ = ("_members", "_weights")

    def __init__(self, members: Sequence[Classifier], weights):
        members = tuple(members)
        w = np.asarray(weights, dtype=float)
        if len(members) < 1:
            raise FairmixError("ensemble needs at least one member")
        if w.shape != (len(members),):
            raise FairmixError(
                f"{len(members)} members but {w.shape} weights"
            )
        if np.any(w < 0):
            raise FairmixError(f"negative weight in {w.tolist()}")
        if abs(float(np.sum(w)) - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise FairmixError(
                f"weights sum to {float(np.sum(w))!r}, expected 1"
            )
        w = w.copy()
        w.setflags(write=False)
        self._members = members
        self._weights = w

    @property
    def members(self) -> tuple[Classifier, ...]:
        return self._members

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    def __len__(self) -> int:
        return len(self._members)


def uniform_ensemble(members: Sequence[Classifier]) -> Ensemble:
    m = len(members)
    return Ensemble(members, np.full(m, 1.0 / m))


def acceptance_probability(ensemble: Ensemble, dataset: Dataset) -> np.ndarray:
    """Benefit profile q: per-instance probability of the +1 outcome.

    q_i is the total weight of the members that accept instance i,
    computed analytically with no sampling.
    """
    accepts = prediction_matrix(ensemble.members, dataset) == 1
    return ensemble.weights @ accepts


def ensemble_group_rate(
    ensemble: Ensemble, kind: MetricKind, dataset: Dataset, z: int
) -> Optional[float]:
    """Analytic group rate of the ensemble for one metric kind.

    Linear kinds are weighted averages of member rates. PPV/NPV use the
    weighted-ratio form: expected hits over expected conditioning-set
    size under the random member draw. Returns ``None`` when undefined.
    """
    if kind in LINEAR_KINDS:
        rates = []
        for member in ensemble.members:
            r = metrics.group_rate(kind, member.predict_all(dataset), dataset, z)
            if r is None:
                return None
            rates.append(r)
        return float(np.dot(ensemble.weights, rates))
    num = 0.0
    den = 0.0
    for w, member in zip(ensemble.weights, ensemble.members):
        hits, size = rate_counts(kind, member.predict_all(dataset), dataset, z)
        num += w * hits
        den += w * size
    if den == 0.0:
        return None
    return num / den


def ensemble_gap(
    ensemble: Ensemble, kind: MetricKind, dataset: Dataset
) -> Optional[float]:
    r0 = ensemble_group_rate(ensemble, kind, dataset, 0)
    r1 = ensemble_group_rate(ensemble, kind, dataset, 1)
    if r0 is None or r1 is None:
        return None
    return r0 - r1


def mixture_accuracy(ensemble: Ensemble, dataset: Dataset) -> float:
    """Ensemble accuracy: the p-weighted average of member accuracies."""
    accs = [metrics.accuracy(m.predict_all(dataset), dataset) for m in ensemble.members]
    return float(np.dot(ensemble.weights, accs))


@dataclass(frozen=True)
class ClosureReport:
    """Whether mixing preserved a fairness gap identity for one kind.

    For linear kinds the ensemble gap provably equals the weighted sum
    of member gaps and ``linear`` is True. For PPV/NPV both quantities
    are reported without asserting equality; their difference is the
    non-closure being measured.
    """

    kind: MetricKind
    linear: bool
    ensemble_gap: Optional[float]
    weighted_member_gap_sum: Optional[float]

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "linear": self.linear,
            "ensemble_gap": self.ensemble_gap,
            "weighted_member_gap_sum": self.weighted_member_gap_sum,
        }


def closure_check(
    ensemble: Ensemble, kind: MetricKind, dataset: Dataset
) -> ClosureReport:
    gap_ens = ensemble_gap(ensemble, kind, dataset)
    member_gaps = [
        metrics.fairness_gap(kind, m.predict_all(dataset), dataset)
        for m in ensemble.members
    ]
    if any(g is None for g in member_gaps):
        weighted = None
    else:
        weighted = float(np.dot(ensemble.weights, member_gaps))
    linear = kind in LINEAR_KINDS
    if linear and gap_ens is not None and weighted is not None:
        if abs(gap_ens - weighted) > CLOSURE_IDENTITY_TOLERANCE:
            raise FairmixError(
                f"linearity identity violated for {kind}: ensemble gap "
                f"{gap_ens!r} vs weighted member sum {weighted!r}"
            )
    return ClosureReport(kind, linear, gap_ens, weighted)


@dataclass(frozen=True)
class SampleResult:
    """Seeded Monte Carlo draw log plus empirical per-group rates.

    ``labels`` has one row per draw. In per-draw mode one member is
    selected per draw and applied to the whole dataset, and
    ``member_indices`` records the selection; in per-instance mode every
    instance draws its own member independently and ``member_indices``
    is None. Identical seeds give bit-identical results.
    """

    labels: np.ndarray
    member_indices: Optional[np.ndarray]
    per_draw_rates: dict
    group_rates: dict
    standard_errors: dict
    n_draws: int
    seed: int
    per_instance: bool
    generator: str

    def to_json_dict(self) -> dict:
        return {
            "n_draws": self.n_draws,
            "seed": self.seed,
            "mode": "per_instance" if self.per_instance else "per_draw",
            "generator": self.generator,
            "group_rates": {"z0": self.group_rates[0], "z1": self.group_rates[1]},
            "standard_errors": {
                "z0": self.standard_errors[0],
                "z1": self.standard_errors[1],
            },
        }


def _select_members(cumulative: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    # inverse CDF: smallest j with u < cum_j
    idx = np.searchsorted(cumulative, uniforms, side="right")
    return np.minimum(idx, len(cumulative) - 1)


def sample(
    ensemble: Ensemble,
    dataset: Dataset,
    n_draws: int,
    seed: int,
    per_instance: bool = False,
) -> SampleResult:
    """Simulate the ensemble for ``n_draws`` decisions, deterministically.

    Per-draw mode models one randomly selected member deciding the whole
    batch; per-instance mode draws independently per user. The two agree
    on all per-group marginals, so the analytic rates are the reference
    for both.
    """
    if n_draws < 1:
        raise ValueError("n_draws must be >= 1")
    matrix = prediction_matrix(ensemble.members, dataset).astype(np.int8)
    n = len(dataset)
    cumulative = np.cumsum(ensemble.weights)
    rng = np.random.default_rng(seed)
    if per_instance:
        uniforms = rng.random((n_draws, n))
        chosen = _select_members(cumulative, uniforms)
        labels = matrix[chosen, np.arange(n)]
        member_indices = None
    else:
        uniforms = rng.random(n_draws)
        chosen = _select_members(cumulative, uniforms)
        labels = matrix[chosen]
        member_indices = chosen
    accepted = labels == 1
    per_draw_rates = {}
    group_rates = {}
    standard_errors = {}
    for z in (0, 1):
        idx = group_indices(dataset, z)
        if idx.size == 0:
            per_draw_rates[z] = None
            group_rates[z] = None
            standard_errors[z] = None
            continue
        rates = accepted[:, idx].mean(axis=1)
        per_draw_rates[z] = rates
        group_rates[z] = float(rates.mean())
        if n_draws > 1:
            standard_errors[z] = float(rates.std(ddof=1) / np.sqrt(n_draws))
        else:
            standard_errors[z] = None
    return SampleResult(
        labels=labels,
        member_indices=member_indices,
        per_draw_rates=per_draw_rates,
        group_rates=group_rates,
        standard_errors=standard_errors,
        n_draws=n_draws,
        seed=seed,
        per_instance=per_instance,
        generator=GENERATOR_NAME,
    )


def ensemble_report(
    ensemble: Ensemble,
    dataset: Dataset,
    pairs: Sequence[CounterfactualPair] = (),
    tolerance: float = DEFAULT_TOLERANCE,
) -> FairnessReport:
    """Fairness report for the ensemble, including intra-group dispersion."""
    entries = []
    for kind in MetricKind:
        r0 = ensemble_group_rate(ensemble, kind, dataset, 0)
        r1 = ensemble_group_rate(ensemble, kind, dataset, 1)
        entries.append(metrics._group_metric(kind, r0, r1, tolerance))
    q = acceptance_probability(ensemble, dataset)
    violations = metrics.treatment_violations(q, pairs, tolerance)
    return FairnessReport(
        accuracy=mixture_accuracy(ensemble, dataset),
        metrics=tuple(entries),
        treatment_pairs_checked=len(pairs),
        treatment_violations=tuple(violations),
        tolerance=tolerance,
        distributional=dispersion(q, dataset),
    )
