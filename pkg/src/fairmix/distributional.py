"""Intra-group dispersion of benefit probabilities.

Inter-group metrics compare rates *between* sensitive groups; the
measures here quantify how evenly an ensemble spreads the chance of a
beneficial outcome *within* each group. Three summaries are computed
per group over the benefit profile q:

* population mean and variance of q,
* the Gini coefficient of q (undefined when the group mean is 0, since
  an all-rejected group is not "perfectly equal"),
* a determinism index: the fraction of the group whose outcome is not
  random at all (q exactly 0 or 1, within a 1e-12 clamp).

These summaries are extensions beyond the classical inter-group
measures and are flagged as such in serialized output.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dataset import Dataset, group_indices

DETERMINISM_CLAMP = 1e-12


@dataclass(frozen=True)
class GroupDispersion:
    """Dispersion summary of the benefit profile within one group."""

    mean_q: Optional[float]
    variance_q: Optional[float]
    gini_q: Optional[float]
    determinism_index: Optional[float]

    def to_json_dict(self) -> dict:
        return {
            "mean_q": self.mean_q,
            "variance_q": self.variance_q,
            "gini_q": self.gini_q,
            "determinism_index": self.determinism_index,
        }


@dataclass(frozen=True)
class DispersionReport:
    group_z0: GroupDispersion
    group_z1: GroupDispersion

    def group(self, z: int) -> GroupDispersion:
        return self.group_z0 if z == 0 else self.group_z1

    def to_json_dict(self) -> dict:
        return {
            "extension": True,
            "z0": self.group_z0.to_json_dict(),
            "z1": self.group_z1.to_json_dict(),
        }


def _group_dispersion(q: np.ndarray) -> GroupDispersion:
    n = q.shape[0]
    if n == 0:
        return GroupDispersion(None, None, None, None)
    mean = float(np.mean(q))
    variance = float(np.mean((q - mean) ** 2))
    if mean == 0.0:
        gini = None
    else:
        # Gini = sum_{i,k} |q_i - q_k| / (2 n^2 mean)
        gini = float(np.sum(np.abs(q[:, None] - q[None, :]))) / (2 * n * n * mean)
    deterministic = (q <= DETERMINISM_CLAMP) | (q >= 1.0 - DETERMINISM_CLAMP)
    determinism = int(np.sum(deterministic)) / n
    return GroupDispersion(mean, variance, gini, determinism)


def dispersion(benefit_profile, dataset: Dataset) -> DispersionReport:
    """Per-group dispersion of a benefit profile of length N."""
    q = np.asarray(benefit_profile, dtype=float)
    if q.shape != (len(dataset),):
        raise ValueError(
            f"benefit profile of length {q.shape} does not match dataset "
            f"size {len(dataset)}"
        )
    return DispersionReport(
        group_z0=_group_dispersion(q[group_indices(dataset, 0)]),
        group_z1=_group_dispersion(q[group_indices(dataset, 1)]),
    )


def _delta(a: Optional[float], b: Optional[float]) -> Optional[float]:
    if a is None or b is None:
        return None
    return a - b


def compare_dispersion(profile_a, profile_b, dataset: Dataset) -> dict:
    """Field-by-field dispersion deltas (a minus b) per group.

    Returns numbers only, no judgment: whether a delta is an improvement
    depends on the field and on the caller's notion of fairness.
    """
    rep_a = dispersion(profile_a, dataset)
    rep_b = dispersion(profile_b, dataset)
    out = {}
    for z in (0, 1):
        ga, gb = rep_a.group(z), rep_b.group(z)
        out[z] = {
            "mean_q": _delta(ga.mean_q, gb.mean_q),
            "variance_q": _delta(ga.variance_q, gb.variance_q),
            "gini_q": _delta(ga.gini_q, gb.gini_q),
            "determinism_index": _delta(ga.determinism_index, gb.determinism_index),
        }
    return out
