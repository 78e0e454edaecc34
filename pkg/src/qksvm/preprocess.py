"""Dataset ingestion and the preprocessing pipeline.

Order: random oversampling of the minority class, standardization,
MinMax scaling (quantum branch only), then a shuffled train/test split.
By default the scalers are fitted on the whole oversampled set before the
split; ``fit_on_train_only`` fits them on the training part instead.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import seeding
from .errors import ConfigurationError, DimensionError, LoadError

FEATURES = (
    "radius",
    "texture",
    "perimeter",
    "area",
    "smoothness",
    "compactness",
    "symmetry",
    "fractal_dimension",
)
ID_COLUMN = "id"
LABEL_COLUMN = "diagnosis_result"
DIAGNOSIS_CODES = ("M", "B")


@dataclass(frozen=True)
class RawRecord:
    id: str
    features: tuple[float, ...]
    diagnosis: str


@dataclass
class LabeledDataset:
    X: np.ndarray
    y: np.ndarray
    ids: list = field(default_factory=list)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.int64)
        if not self.ids:
            self.ids = [str(i) for i in range(len(self.y))]
        if not (self.X.shape[0] == self.y.shape[0] == len(self.ids)):
            raise DimensionError(
                f"dataset parts disagree: {self.X.shape[0]} rows, {self.y.shape[0]} labels, "
                f"{len(self.ids)} ids"
            )
        if self.y.size and not np.all(np.isin(self.y, (-1, 1))):
            raise ConfigurationError("labels must be -1 or +1")

    def __len__(self):
        return self.y.shape[0]

    def subset(self, indices) -> "LabeledDataset":
        idx = np.asarray(indices, dtype=np.int64)
        return LabeledDataset(self.X[idx].copy(), self.y[idx].copy(), [self.ids[i] for i in idx])

    def with_features(self, X) -> "LabeledDataset":
        return LabeledDataset(np.asarray(X, dtype=np.float64), self.y.copy(), list(self.ids))

    def class_counts(self) -> dict[int, int]:
        return {1: int(np.sum(self.y == 1)), -1: int(np.sum(self.y == -1))}


def read_header(path) -> list[str]:
    with open(path, newline="") as fh:
        return next(csv.reader(fh), [])


def resolve_columns(header: Sequence[str], column_map: dict | None, need_label: bool = True) -> dict:
    """Map canonical column names to positions in ``header``."""
    column_map = column_map or {}
    names = [h.strip() for h in header]
    wanted = [ID_COLUMN] + ([LABEL_COLUMN] if need_label else []) + list(FEATURES)
    out = {}
    for canon in wanted:
        actual = column_map.get(canon, canon)
        if actual not in names:
            raise LoadError(f"missing column {actual!r} (for {canon!r}) in header")
        out[canon] = names.index(actual)
    return out


def load_csv(path, column_map: dict | None = None) -> list[RawRecord]:
    """Read the prostate-cancer CSV; data rows are numbered from 1 in errors."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise LoadError(f"{path}: file is empty (header row required)")
        cols = resolve_columns(header, column_map)
        records = []
        for rownum, row in enumerate(reader, start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < len(header):
                raise LoadError(f"{path}: row {rownum} has {len(row)} fields, header has {len(header)}")
            code = row[cols[LABEL_COLUMN]].strip().upper()
            if code not in DIAGNOSIS_CODES:
                raise LoadError(
                    f"{path}: row {rownum}, column {LABEL_COLUMN!r}: unknown diagnosis code {code!r}"
                )
            values = []
            for name in FEATURES:
                raw = row[cols[name]].strip()
                try:
                    v = float(raw)
                except ValueError:
                    raise LoadError(
                        f"{path}: row {rownum}, column {name!r}: cannot parse {raw!r} as a number"
                    ) from None
                if not math.isfinite(v):
                    raise LoadError(f"{path}: row {rownum}, column {name!r}: non-finite value {raw!r}")
                values.append(v)
            records.append(RawRecord(row[cols[ID_COLUMN]].strip(), tuple(values), code))
    if not records:
        warnings.warn(f"{path}: no data rows", RuntimeWarning, stacklevel=2)
    return records


def to_labeled(records: Sequence[RawRecord], positive_code: str = "M") -> LabeledDataset:
    if positive_code not in DIAGNOSIS_CODES:
        raise ConfigurationError(f"positive_code must be one of {DIAGNOSIS_CODES}")
    if not records:
        raise ConfigurationError("no records to label")
    X = np.array([r.features for r in records], dtype=np.float64)
    y = np.array([1 if r.diagnosis == positive_code else -1 for r in records])
    return LabeledDataset(X, y, [r.id for r in records])


def random_oversample(ds: LabeledDataset, seed: int) -> LabeledDataset:
    """Append uniformly drawn (with replacement) minority rows until classes balance."""
    pos = np.flatnonzero(ds.y == 1)
    neg = np.flatnonzero(ds.y == -1)
    if pos.size == 0 or neg.size == 0:
        raise ConfigurationError("random oversampling needs both classes present")
    minority, majority = (pos, neg) if pos.size < neg.size else (neg, pos)
    extra = majority.size - minority.size
    if extra == 0:
        return ds.subset(np.arange(len(ds)))
    rng = np.random.default_rng(seed)
    picks = rng.choice(minority, size=extra, replace=True)
    seen: dict[str, int] = {}
    dup_ids = []
    for i in picks:
        base = ds.ids[i]
        seen[base] = seen.get(base, 0) + 1
        dup_ids.append(f"{base}~{seen[base]}")
    return LabeledDataset(
        np.vstack([ds.X, ds.X[picks]]),
        np.concatenate([ds.y, ds.y[picks]]),
        list(ds.ids) + dup_ids,
    )


@dataclass
class ScalerState:
    kind: str
    a: np.ndarray  # mean (standard) or per-feature min (minmax)
    b: np.ndarray  # population std (standard) or per-feature max (minmax)
    feature_range: tuple[float, float] = (0.0, 1.0)
    fitted: bool = True

    def apply(self, X) -> np.ndarray:
        if not self.fitted:
            raise ConfigurationError("scaler has not been fitted")
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.a.shape[0]:
            raise DimensionError(
                f"scaler fitted on {self.a.shape[0]} features, got shape {X.shape}"
            )
        if self.kind == "standard":
            ok = self.b > 0
            out = np.zeros_like(X)
            out[:, ok] = (X[:, ok] - self.a[ok]) / self.b[ok]
            return out
        lo, hi = self.feature_range
        span = self.b - self.a
        ok = span > 0
        out = np.full_like(X, lo)
        out[:, ok] = (X[:, ok] - self.a[ok]) / span[ok] * (hi - lo) + lo
        return out

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "a": self.a.tolist(),
            "b": self.b.tolist(),
            "feature_range": list(self.feature_range),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScalerState":
        return cls(
            d["kind"],
            np.asarray(d["a"], dtype=np.float64),
            np.asarray(d["b"], dtype=np.float64),
            tuple(d.get("feature_range", (0.0, 1.0))),
        )


def _nonempty(X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ConfigurationError("cannot fit a scaler on an empty matrix")
    return X


def fit_standardize(X) -> ScalerState:
    """Per-feature mean and population std; constant features later map to 0."""
    X = _nonempty(X)
    return ScalerState("standard", X.mean(axis=0), X.std(axis=0))


def fit_minmax(X, feature_range=(0.0, 1.0)) -> ScalerState:
    """Per-feature min/max for (x - min) / (max - min) * (hi - lo) + lo."""
    X = _nonempty(X)
    lo, hi = float(feature_range[0]), float(feature_range[1])
    if not hi > lo:
        raise ConfigurationError(f"invalid feature range {feature_range}")
    return ScalerState("minmax", X.min(axis=0), X.max(axis=0), (lo, hi))


def apply_scalers(scalers: Sequence[ScalerState], X) -> np.ndarray:
    out = np.asarray(X, dtype=np.float64)
    for s in scalers:
        out = s.apply(out)
    return out


@dataclass(frozen=True)
class SplitIndices:
    train: np.ndarray
    test: np.ndarray
    seed: int


def n_test_samples(n: int, ratio: float) -> int:
    # round half away from zero
    return int(math.floor(ratio * n + 0.5))


def train_test_split(n, test_ratio: float, seed: int) -> SplitIndices:
    """Seeded shuffle; the first round(ratio * N) shuffled indices form the test set."""
    n = len(n) if not isinstance(n, (int, np.integer)) else int(n)
    if not 0 < test_ratio < 1:
        raise ConfigurationError(f"test ratio must be in (0, 1), got {test_ratio}")
    perm = np.random.default_rng(seed).permutation(n)
    k = n_test_samples(n, test_ratio)
    return SplitIndices(np.sort(perm[k:]), np.sort(perm[:k]), seed)


@dataclass(frozen=True)
class PipelineConfig:
    branch: str = "qsvm"
    seed: int = 0
    test_ratio: float = 0.2
    positive_code: str = "M"
    fit_on_train_only: bool = False
    feature_range: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        if self.branch not in ("svm", "qsvm"):
            raise ConfigurationError(f"branch must be 'svm' or 'qsvm', got {self.branch!r}")


@dataclass
class PipelineResult:
    train: LabeledDataset
    test: LabeledDataset
    full: LabeledDataset
    scalers: list
    split: SplitIndices


def _fit_scalers(X, cfg: PipelineConfig) -> list:
    std = fit_standardize(X)
    scalers = [std]
    if cfg.branch == "qsvm":
        scalers.append(fit_minmax(std.apply(X), cfg.feature_range))
    return scalers


def run_pipeline(records: Sequence[RawRecord], cfg: PipelineConfig) -> PipelineResult:
    """Oversample, scale and split.

    ``full`` is the whole oversampled set transformed by the returned scalers;
    it feeds cross-validation.
    """
    ds = to_labeled(records, cfg.positive_code)
    balanced = random_oversample(ds, seeding.stream_seed(cfg.seed, seeding.STREAM_OVERSAMPLE))
    split = train_test_split(len(balanced), cfg.test_ratio,
                             seeding.stream_seed(cfg.seed, seeding.STREAM_SPLIT))
    fit_rows = balanced.X[split.train] if cfg.fit_on_train_only else balanced.X
    scalers = _fit_scalers(fit_rows, cfg)
    full = balanced.with_features(apply_scalers(scalers, balanced.X))
    return PipelineResult(full.subset(split.train), full.subset(split.test), full, scalers, split)


def write_split_csv(ds: LabeledDataset, path, feature_names=FEATURES) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([ID_COLUMN, *feature_names, "label"])
        for rid, x, label in zip(ds.ids, ds.X, ds.y):
            w.writerow([rid, *(repr(float(v)) for v in x), int(label)])
