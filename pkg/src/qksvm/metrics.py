"""Confusion counts, the five classification metrics, and k-fold CV.

A metric whose denominator is zero is reported as ``None`` (JSON ``null``),
never as 0 or 1.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .errors import ConfigurationError, DimensionError

METRIC_NAMES = ("accuracy", "precision", "sensitivity", "specificity", "f1")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    tn: int
    fp: int
    fn: int
    positive_label: int = 1

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class MetricSet:
    accuracy: float | None
    precision: float | None
    sensitivity: float | None
    specificity: float | None
    f1: float | None

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class CvReport:
    k: int
    fold_scores: tuple[float, ...]
    mean: float
    std: float
    seed: int
    fold_sizes: tuple[int, ...] = ()
    std_kind: str = "population"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["fold_scores"] = list(self.fold_scores)
        d["fold_sizes"] = list(self.fold_sizes)
        return d


def _labels(y, name) -> np.ndarray:
    arr = np.asarray(y).reshape(-1)
    if arr.size and not np.all(np.isin(arr, (-1, 1))):
        raise ConfigurationError(f"{name} must contain only -1 and +1")
    return arr


def confusion(y_true, y_pred, positive_label: int = 1) -> ConfusionCounts:
    if positive_label not in (-1, 1):
        raise ConfigurationError(f"positive_label must be -1 or +1, got {positive_label}")
    t = _labels(y_true, "y_true")
    p = _labels(y_pred, "y_pred")
    if t.shape != p.shape:
        raise DimensionError(f"y_true has {t.size} entries, y_pred has {p.size}")
    tpos = t == positive_label
    ppos = p == positive_label
    return ConfusionCounts(
        tp=int(np.sum(tpos & ppos)),
        tn=int(np.sum(~tpos & ~ppos)),
        fp=int(np.sum(~tpos & ppos)),
        fn=int(np.sum(tpos & ~ppos)),
        positive_label=positive_label,
    )


def _ratio(num, den):
    return num / den if den else None


def metric_set(c: ConfusionCounts) -> MetricSet:
    if c.total <= 0:
        raise ConfigurationError("confusion counts are empty")
    precision = _ratio(c.tp, c.tp + c.fp)
    sensitivity = _ratio(c.tp, c.tp + c.fn)
    if precision is None or sensitivity is None or precision + sensitivity == 0:
        f1 = None
    else:
        f1 = 2 * precision * sensitivity / (precision + sensitivity)
    return MetricSet(
        accuracy=(c.tp + c.tn) / c.total,
        precision=precision,
        sensitivity=sensitivity,
        specificity=_ratio(c.tn, c.tn + c.fp),
        f1=f1,
    )


def fold_indices(n: int, k: int, seed: int) -> list[np.ndarray]:
    """Shuffled, non-stratified folds; the first ``n % k`` folds hold one extra index."""
    if not 2 <= k <= n:
        raise ConfigurationError(f"k must satisfy 2 <= k <= {n}, got {k}")
    perm = np.random.default_rng(seed).permutation(n)
    return [np.sort(f) for f in np.array_split(perm, k)]


def _std(values, kind: str) -> float:
    if kind == "population":
        return float(np.std(values))
    if kind == "sample":
        return float(np.std(values, ddof=1))
    raise ConfigurationError(f"std kind must be 'population' or 'sample', got {kind!r}")


def kfold_cross_validate(
    ds,
    k: int,
    train_fn: Callable,
    score_fn: Callable,
    seed: int,
    std_kind: str = "population",
) -> CvReport:
    """Train on each fold's complement and score on the fold.

    ``train_fn(train_ds) -> model`` and ``score_fn(model, test_ds) -> float``.
    """
    folds = fold_indices(len(ds), k, seed)
    everything = np.arange(len(ds))
    scores = []
    for fold in folds:
        rest = np.setdiff1d(everything, fold, assume_unique=True)
        model = train_fn(ds.subset(rest))
        scores.append(float(score_fn(model, ds.subset(fold))))
    return CvReport(
        k=k,
        fold_scores=tuple(scores),
        mean=float(np.mean(scores)),
        std=_std(scores, std_kind),
        seed=seed,
        fold_sizes=tuple(int(f.size) for f in folds),
        std_kind=std_kind,
    )


def accuracy_score(y_true, y_pred) -> float:
    t = np.asarray(y_true).reshape(-1)
    p = np.asarray(y_pred).reshape(-1)
    if t.shape != p.shape:
        raise DimensionError("label arrays differ in length")
    return float(np.mean(t == p))


def format_percent(value: float | None, digits: int = 2) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "undef"
    return f"{100.0 * value:.{digits}f}"
