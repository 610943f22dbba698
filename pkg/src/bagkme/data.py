"""Bag/dataset model, canonical CSV ingestion, synthetic data, fold plans.

An instance is a 1-D float64 vector; a bag stores its instances as the rows
of an (L, d) array together with one real-valued label. Datasets are ordered
collections of bags sharing the feature dimension d. All containers are
immutable after construction (arrays are marked read-only) and safe to share
across threads.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ConfigError, DataFormatError


def _frozen_array(values, dtype=np.float64, ndim: int | None = None) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Bag:
    """One labeled group of instances: ``features`` has shape (L, d), L >= 1."""

    id: str
    label: float
    features: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "label", float(self.label))
        object.__setattr__(self, "features", _frozen_array(self.features, ndim=2))
        if self.features.shape[0] < 1:
            raise ValueError(f"bag {self.id!r} has no instances")
        if not math.isfinite(self.label):
            raise ValueError(f"bag {self.id!r} has non-finite label {self.label!r}")
        if not np.isfinite(self.features).all():
            raise ValueError(f"bag {self.id!r} has non-finite feature values")

    @property
    def size(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Bag):
            return NotImplemented
        return (
            self.id == other.id
            and self.label == other.label
            and self.features.shape == other.features.shape
            and bool(np.array_equal(self.features, other.features))
        )


@dataclass(frozen=True, eq=False)
class Dataset:
    """Ordered collection of bags with a shared feature dimension."""

    bags: tuple[Bag, ...]
    d: int

    def __post_init__(self):
        object.__setattr__(self, "bags", tuple(self.bags))
        if not self.bags:
            raise ValueError("dataset must contain at least one bag")
        ids = [b.id for b in self.bags]
        if len(set(ids)) != len(ids):
            dup = sorted({i for i in ids if ids.count(i) > 1})
            raise ValueError(f"duplicate bag ids: {dup}")
        for b in self.bags:
            if b.d != self.d:
                raise ValueError(
                    f"bag {b.id!r} has dimension {b.d}, dataset declares {self.d}"
                )

    @property
    def num_bags(self) -> int:
        return len(self.bags)

    @property
    def labels(self) -> np.ndarray:
        return np.array([b.label for b in self.bags])

    @property
    def bag_sizes(self) -> np.ndarray:
        return np.array([b.size for b in self.bags], dtype=np.int64)

    @property
    def num_instances(self) -> int:
        return int(self.bag_sizes.sum())

    def instance_pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """All (instance, bag label) training pairs, stacked in bag order."""
        X = np.concatenate([b.features for b in self.bags], axis=0)
        y = np.concatenate([np.full(b.size, b.label) for b in self.bags])
        return X, y

    def subset(self, indices: Iterable[int]) -> "Dataset":
        return Dataset(bags=tuple(self.bags[i] for i in indices), d=self.d)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.d == other.d and self.bags == other.bags


# ---------------------------------------------------------------------------
# Canonical CSV format: UTF-8, header `bag_id,label,f1,...,fd`, decimal-point
# floats, LF line endings. Rows of a bag are contiguous or not; grouping is by
# first appearance of bag_id, instance order is row order.
# ---------------------------------------------------------------------------

def load_canonical_csv(path: str | Path) -> Dataset:
    path = Path(path)
    if not path.exists():
        raise DataFormatError(f"no such file: {path}")
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError("empty file, expected header bag_id,label,f1,...") from None
        d = _validate_header(header)

        rows: dict[str, list[np.ndarray]] = {}
        labels: dict[str, tuple[float, int]] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2 + d:
                raise DataFormatError(
                    f"expected {2 + d} columns, got {len(row)}", line=lineno
                )
            bag_id = row[0]
            label = _parse_float(row[1], "label", lineno)
            feats = np.array(
                [_parse_float(v, f"f{k + 1}", lineno) for k, v in enumerate(row[2:])]
            )
            if bag_id in labels:
                first_label, first_line = labels[bag_id]
                if label != first_label:
                    raise DataFormatError(
                        f"bag {bag_id!r} has label {label!r} but line "
                        f"{first_line} declared {first_label!r}",
                        line=lineno,
                    )
            else:
                labels[bag_id] = (label, lineno)
                rows[bag_id] = []
            rows[bag_id].append(feats)

    if not rows:
        raise DataFormatError("no bags: file contains a header but no data rows")
    bags = tuple(
        Bag(id=bag_id, label=labels[bag_id][0], features=np.stack(feats))
        for bag_id, feats in rows.items()
    )
    return Dataset(bags=bags, d=d)


def save_canonical_csv(dataset: Dataset, path: str | Path) -> None:
    """Write a dataset in the canonical format; floats use shortest
    round-trip repr, so load(save(ds)) == ds exactly."""
    path = Path(path)
    header = "bag_id,label," + ",".join(f"f{k + 1}" for k in range(dataset.d))
    lines = [header]
    for bag in dataset.bags:
        label = repr(bag.label)
        for row in bag.features:
            lines.append(f"{bag.id},{label}," + ",".join(repr(float(v)) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _validate_header(header: list[str]) -> int:
    if len(header) < 3 or header[0] != "bag_id" or header[1] != "label":
        raise DataFormatError(
            f"bad header {header!r}, expected bag_id,label,f1,...", line=1
        )
    expected = [f"f{k + 1}" for k in range(len(header) - 2)]
    if header[2:] != expected:
        raise DataFormatError(
            f"bad feature columns {header[2:]!r}, expected {expected!r}", line=1
        )
    return len(header) - 2


def _parse_float(text: str, what: str, lineno: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DataFormatError(f"non-numeric {what}: {text!r}", line=lineno) from None
    if not math.isfinite(value):
        raise DataFormatError(f"non-finite {what}: {text!r}", line=lineno)
    return value


# ---------------------------------------------------------------------------
# Synthetic bags: latent t ~ U[0,1] is the label; feature 1 observes t through
# additive skew-normal noise, remaining features are pure distractor noise.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SynthConfig:
    num_bags: int
    instances_min: int = 1
    instances_max: int = 10
    d: int = 1
    noise_scale: float = 0.0
    noise_skew: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.num_bags < 1:
            raise ConfigError("num_bags must be >= 1")
        if not (1 <= self.instances_min <= self.instances_max):
            raise ConfigError("need 1 <= instances_min <= instances_max")
        if self.d < 1:
            raise ConfigError("d must be >= 1")
        if self.noise_scale < 0:
            raise ConfigError("noise_scale must be >= 0")


def _skew_normal(rng: np.random.Generator, shape: float, size: int) -> np.ndarray:
    # Classical stochastic representation: delta*|u| + sqrt(1-delta^2)*v
    # with u, v iid standard normal is skew-normal with shape parameter a.
    delta = shape / math.sqrt(1.0 + shape * shape)
    u = rng.standard_normal(size)
    v = rng.standard_normal(size)
    return delta * np.abs(u) + math.sqrt(1.0 - delta * delta) * v


def generate_synthetic(config: SynthConfig) -> Dataset:
    rng = np.random.default_rng(config.seed & ((1 << 64) - 1))
    bags = []
    width = max(4, len(str(config.num_bags - 1)))
    for i in range(config.num_bags):
        t = float(rng.uniform(0.0, 1.0))
        size = int(rng.integers(config.instances_min, config.instances_max + 1))
        features = np.empty((size, config.d))
        noise = (
            config.noise_scale * _skew_normal(rng, config.noise_skew, size)
            if config.noise_scale > 0
            else np.zeros(size)
        )
        features[:, 0] = t + noise
        if config.d > 1:
            features[:, 1:] = rng.standard_normal((size, config.d - 1))
        bags.append(Bag(id=f"b{i:0{width}d}", label=t, features=features))
    return Dataset(bags=tuple(bags), d=config.d)


# ---------------------------------------------------------------------------
# Fold plans: a seeded shuffle of the bags partitioned contiguously into
# num_folds folds whose sizes differ by at most one bag.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FoldPlan:
    """Deterministic assignment of bag positions to folds.

    ``assignment[i]`` is the fold of the i-th bag of the dataset the plan was
    built for; all instances of a bag inherit its fold.
    """

    seed: int
    num_folds: int
    assignment: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(int(f) for f in self.assignment))
        if self.num_folds < 1:
            raise ConfigError("num_folds must be >= 1")
        counts = np.bincount(np.array(self.assignment), minlength=self.num_folds)
        if len(counts) > self.num_folds or counts.min() < 1:
            raise ValueError("every fold must receive at least one bag")
        if counts.max() - counts.min() > 1:
            raise ValueError("fold sizes must differ by at most one bag")

    @property
    def num_bags(self) -> int:
        return len(self.assignment)

    def fold_of(self, bag_index: int) -> int:
        return self.assignment[bag_index]

    def fold_indices(self, fold: int) -> tuple[int, ...]:
        return tuple(i for i, f in enumerate(self.assignment) if f == fold)

    def complement_indices(self, fold: int) -> tuple[int, ...]:
        return tuple(i for i, f in enumerate(self.assignment) if f != fold)


def make_folds(dataset: Dataset, num_folds: int, seed: int) -> FoldPlan:
    """Shuffle bags with a seeded PRNG and split contiguously into folds.

    num_folds is clamped to the bag count (leave-one-bag-out at the limit);
    when B mod num_folds != 0 the earlier folds receive one extra bag each.
    """
    if num_folds < 1:
        raise ConfigError(f"num_folds must be positive, got {num_folds}")
    B = dataset.num_bags
    effective = min(num_folds, B)
    rng = np.random.default_rng(seed & ((1 << 64) - 1))
    order = rng.permutation(B)
    base, extra = divmod(B, effective)
    assignment = [0] * B
    start = 0
    for fold in range(effective):
        size = base + (1 if fold < extra else 0)
        for i in order[start : start + size]:
            assignment[int(i)] = fold
        start += size
    return FoldPlan(seed=seed, num_folds=effective, assignment=tuple(assignment))
