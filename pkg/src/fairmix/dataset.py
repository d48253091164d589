"""Data model: labeled instances with a binary sensitive attribute.

A dataset is an ordered collection of instances ``(features, label,
sensitive)`` with labels in {-1, +1} and the sensitive attribute in
{0, 1}. Instance order is stable: the row index identifies a user.
Indices are 0-based throughout the library; human-facing reports add 1.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from os import PathLike
from typing import Iterable, Iterator, Union

import numpy as np

from .errors import DataFormatError

PathArg = Union[str, PathLike]

VALID_LABELS = (-1, 1)
VALID_SENSITIVE = (0, 1)


@dataclass(frozen=True)
class Instance:
    """One user: feature vector, true label in {-1,+1}, group in {0,1}."""

    features: tuple[float, ...]
    label: int
    sensitive: int

    def __post_init__(self):
        if self.label not in VALID_LABELS:
            raise DataFormatError(f"invalid label {self.label!r}: must be -1 or 1")
        if self.sensitive not in VALID_SENSITIVE:
            raise DataFormatError(
                f"invalid sensitive value {self.sensitive!r}: must be 0 or 1"
            )
        for v in self.features:
            if not math.isfinite(v):
                raise DataFormatError(f"non-finite feature value {v!r}")


@dataclass(frozen=True)
class CounterfactualPair:
    """Two instance indices with identical features and differing groups.

    Used by treatment tests: a fair decision rule must not distinguish
    the two sides. ``left < right`` always holds.
    """

    left: int
    right: int


class Dataset:
    """Immutable, array-backed collection of instances.

    All operations on a dataset are pure reads, so sharing one across
    threads is safe.
    """

    __slots__ = ("_features", "_labels", "_sensitive")

    def __init__(self, instances: Iterable[Instance]):
        rows = list(instances)
        if not rows:
            raise DataFormatError("dataset must contain at least one instance")
        d = len(rows[0].features)
        for k, inst in enumerate(rows):
            if len(inst.features) != d:
                raise DataFormatError(
                    f"inconsistent feature dimension at row {k + 1}: "
                    f"expected {d}, got {len(inst.features)}"
                )
        self._features = np.array([inst.features for inst in rows], dtype=float)
        self._features.setflags(write=False)
        self._labels = np.array([inst.label for inst in rows], dtype=int)
        self._labels.setflags(write=False)
        self._sensitive = np.array([inst.sensitive for inst in rows], dtype=int)
        self._sensitive.setflags(write=False)

    @classmethod
    def from_arrays(cls, features, labels, sensitive) -> "Dataset":
        """Build a dataset from parallel arrays, validating every field."""
        features = np.atleast_2d(np.asarray(features, dtype=float))
        labels = np.asarray(labels, dtype=int)
        sensitive = np.asarray(sensitive, dtype=int)
        n = features.shape[0]
        if n == 0:
            raise DataFormatError("dataset must contain at least one instance")
        if labels.shape != (n,) or sensitive.shape != (n,):
            raise DataFormatError("features, labels and sensitive must have equal length")
        if not np.all(np.isin(labels, VALID_LABELS)):
            bad = int(np.flatnonzero(~np.isin(labels, VALID_LABELS))[0])
            raise DataFormatError(f"invalid label at row {bad + 1}")
        if not np.all(np.isin(sensitive, VALID_SENSITIVE)):
            bad = int(np.flatnonzero(~np.isin(sensitive, VALID_SENSITIVE))[0])
            raise DataFormatError(f"invalid sensitive value at row {bad + 1}")
        if not np.all(np.isfinite(features)):
            bad = int(np.flatnonzero(~np.all(np.isfinite(features), axis=1))[0])
            raise DataFormatError(f"non-finite feature value at row {bad + 1}")
        ds = object.__new__(cls)
        features = features.copy()
        features.setflags(write=False)
        labels = labels.copy()
        labels.setflags(write=False)
        sensitive = sensitive.copy()
        sensitive.setflags(write=False)
        ds._features = features
        ds._labels = labels
        ds._sensitive = sensitive
        return ds

    @property
    def features(self) -> np.ndarray:
        """(N, d) feature matrix, read-only."""
        return self._features

    @property
    def labels(self) -> np.ndarray:
        """(N,) true labels in {-1,+1}, read-only."""
        return self._labels

    @property
    def sensitive(self) -> np.ndarray:
        """(N,) sensitive attribute in {0,1}, read-only."""
        return self._sensitive

    @property
    def dimension(self) -> int:
        return self._features.shape[1]

    def __len__(self) -> int:
        return self._features.shape[0]

    def instance(self, i: int) -> Instance:
        return Instance(
            features=tuple(self._features[i].tolist()),
            label=int(self._labels[i]),
            sensitive=int(self._sensitive[i]),
        )

    def __iter__(self) -> Iterator[Instance]:
        return (self.instance(i) for i in range(len(self)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self._features.shape == other._features.shape
            and np.array_equal(self._features, other._features)
            and np.array_equal(self._labels, other._labels)
            and np.array_equal(self._sensitive, other._sensitive)
        )

    def __hash__(self):
        return hash((self._features.shape, self._features.tobytes()))


def _expected_header(d: int) -> list[str]:
    return [f"f_{k}" for k in range(1, d + 1)] + ["y", "z"]


def load_dataset(path: PathArg) -> Dataset:
    """Load a dataset from CSV with header ``f_1,...,f_d,y,z``.

    Row order is preserved; the feature dimension is inferred from the
    header. Raises :class:`DataFormatError` with the offending 1-based
    data-row number on any malformed value.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if len(header) < 3 or header[-2:] != ["y", "z"]:
            raise DataFormatError(
                f"{path}: header must be f_1,...,f_d,y,z; got {','.join(header)}"
            )
        d = len(header) - 2
        if header != _expected_header(d):
            raise DataFormatError(
                f"{path}: header must be f_1,...,f_d,y,z; got {','.join(header)}"
            )
        instances = []
        for k, row in enumerate(reader, start=1):
            if len(row) != d + 2:
                raise DataFormatError(
                    f"{path}: row {k}: expected {d + 2} fields, got {len(row)}"
                )
            try:
                feats = tuple(float(v) for v in row[:d])
            except ValueError:
                raise DataFormatError(f"{path}: row {k}: malformed feature value") from None
            if any(not math.isfinite(v) for v in feats):
                raise DataFormatError(f"{path}: row {k}: non-finite feature value")
            try:
                y = int(row[d])
            except ValueError:
                raise DataFormatError(f"{path}: invalid label at row {k}") from None
            if y not in VALID_LABELS:
                raise DataFormatError(f"{path}: invalid label at row {k}")
            try:
                z = int(row[d + 1])
            except ValueError:
                raise DataFormatError(
                    f"{path}: invalid sensitive value at row {k}"
                ) from None
            if z not in VALID_SENSITIVE:
                raise DataFormatError(f"{path}: invalid sensitive value at row {k}")
            instances.append(Instance(feats, y, z))
    if not instances:
        raise DataFormatError(f"{path}: no data rows")
    return Dataset(instances)


def save_dataset(path: PathArg, dataset: Dataset) -> None:
    """Write a dataset to CSV; ``load_dataset`` of the result is identity.

    Floats are written with ``repr`` so parsing restores them exactly.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(_expected_header(dataset.dimension))
        for i in range(len(dataset)):
            row = [repr(float(v)) for v in dataset.features[i]]
            row.append(str(int(dataset.labels[i])))
            row.append(str(int(dataset.sensitive[i])))
            writer.writerow(row)


def group_indices(dataset: Dataset, z: int) -> np.ndarray:
    """Ascending 0-based indices of instances with sensitive value ``z``.

    The two groups partition the index range.
    """
    if z not in VALID_SENSITIVE:
        raise ValueError(f"sensitive value must be 0 or 1, got {z!r}")
    return np.flatnonzero(dataset.sensitive == z)


def build_counterfactual_pairs(dataset: Dataset) -> list[CounterfactualPair]:
    """All index pairs with identical features and differing groups.

    Feature equality is exact (values as parsed, no tolerance): pairs
    are meant to be constructed duplicates, and a tolerance would invent
    false matches. Pairs are ordered by (left, right), left < right.
    """
    by_features: dict[tuple[float, ...], list[int]] = {}
    for i in range(len(dataset)):
        key = tuple(dataset.features[i].tolist())
        by_features.setdefault(key, []).append(i)
    z = dataset.sensitive
    pairs = []
    for indices in by_features.values():
        if len(indices) < 2:
            continue
        for a_pos, i in enumerate(indices):
            for j in indices[a_pos + 1:]:
                if z[i] != z[j]:
                    pairs.append(CounterfactualPair(i, j))
    pairs.sort(key=lambda p: (p.left, p.right))
    return pairs
