"""Soft-margin kernel SVM trained on precomputed Gram matrices.

The dual

    max  sum(a) - 1/2 sum_ij a_i a_j y_i y_j K_ij
    s.t. 0 <= a_i <= C,  sum(a_i y_i) = 0

is solved by SMO with second-order working-set selection (the loop lives in
the compiled core). The solver never sees feature vectors, so the RBF and
quantum kernels differ only in how K was produced.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._backend import core
from .errors import ConfigurationError, DimensionError, UnsupportedDiagnosticError
from .kernel import KernelConfig, KernelMatrix, cross_gram, gram_matrix

FORMAT_VERSION = 1
DEFAULT_C = 1.0
DEFAULT_TOL = 1e-3
DEFAULT_MAX_PASSES = 10000
SUPPORT_EPSILON = 1e-8


@dataclass
class SvmModel:
    alphas: np.ndarray
    bias: float
    y_train: np.ndarray
    C: float
    kernel: KernelConfig | None = None
    train_vectors: np.ndarray | None = None
    support_epsilon: float = SUPPORT_EPSILON
    metadata: dict = field(default_factory=dict)

    @property
    def support_indices(self) -> np.ndarray:
        return np.flatnonzero(self.alphas > self.support_epsilon)

    @property
    def dual_coef(self) -> np.ndarray:
        return self.alphas * self.y_train

    def decision_function(self, X) -> np.ndarray:
        """Decision values for raw feature vectors using the retained training set."""
        if self.kernel is None or self.train_vectors is None:
            raise ConfigurationError("model has no kernel/training vectors; use decision_values")
        return decision_values(self, cross_gram(X, self.train_vectors, self.kernel))

    def predict(self, X) -> np.ndarray:
        return _sign(self.decision_function(X))


@dataclass
class TrainDiagnostics:
    dual_objective: float
    iterations: int
    kkt_violation_max: float
    converged: bool
    objective_trace: np.ndarray | None = None

    def to_dict(self) -> dict:
        return {
            "dual_objective": self.dual_objective,
            "iterations": self.iterations,
            "kkt_violation_max": self.kkt_violation_max,
            "converged": self.converged,
        }


def _labels(y) -> np.ndarray:
    arr = np.asarray(y, dtype=np.float64).reshape(-1)
    if not np.all(np.isin(arr, (-1.0, 1.0))):
        raise ConfigurationError("labels must be -1 or +1")
    return arr


def _square(K) -> tuple[np.ndarray, KernelConfig | None]:
    if isinstance(K, KernelMatrix):
        values, cfg = K.values, K.provenance
    else:
        values, cfg = np.asarray(K, dtype=np.float64), None
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise DimensionError(f"kernel matrix must be square, got shape {values.shape}")
    return np.ascontiguousarray(values, dtype=np.float64), cfg


def dual_objective(alphas, K, y) -> float:
    a = np.asarray(alphas, dtype=np.float64)
    Kv, _ = _square(K)
    yv = np.asarray(y, dtype=np.float64)
    if not (a.shape[0] == yv.shape[0] == Kv.shape[0]):
        raise DimensionError("alphas, labels and kernel disagree in size")
    ay = a * yv
    return float(a.sum() - 0.5 * ay @ Kv @ ay)


def _bias(alphas, grad, y, C) -> float:
    # -y_t G_t equals b at every free support vector
    score = -y * grad
    free = (alphas > 0) & (alphas < C)
    if free.any():
        return float(score[free].mean())
    pos = y > 0
    in_up = np.where(pos, alphas < C, alphas > 0)
    in_low = np.where(pos, alphas > 0, alphas < C)
    hi = score[in_up].max() if in_up.any() else np.inf
    lo = score[in_low].min() if in_low.any() else -np.inf
    if np.isinf(hi) and np.isinf(lo):
        return 0.0
    if np.isinf(hi):
        return float(lo)
    if np.isinf(lo):
        return float(hi)
    return float(0.5 * (hi + lo))


def kkt_violations(alphas, K, y, bias, C) -> np.ndarray:
    """Per-sample violation of the soft-margin KKT conditions (0 when satisfied)."""
    Kv, _ = _square(K)
    margin = y * (Kv @ (alphas * y) + bias)
    at_lower = alphas <= 0
    at_upper = alphas >= C
    free = ~(at_lower | at_upper)
    v = np.zeros_like(margin)
    v[at_lower] = np.maximum(0.0, 1.0 - margin[at_lower])
    v[at_upper] = np.maximum(0.0, margin[at_upper] - 1.0)
    v[free] = np.abs(margin[free] - 1.0)
    return v


def train_dual(
    K,
    y,
    C: float = DEFAULT_C,
    tol: float = DEFAULT_TOL,
    max_passes: int = DEFAULT_MAX_PASSES,
    support_epsilon: float = SUPPORT_EPSILON,
    record_trace: bool = False,
) -> tuple[SvmModel, TrainDiagnostics]:
    """Solve the dual for a precomputed Gram matrix.

    ``max_passes`` caps the number of pairwise SMO updates. When it is hit the
    last iterate is returned with ``converged=False``.
    """
    Kv, cfg = _square(K)
    yv = _labels(y)
    if yv.shape[0] != Kv.shape[0]:
        raise DimensionError(f"{yv.shape[0]} labels for a {Kv.shape[0]}x{Kv.shape[0]} kernel")
    if not C > 0:
        raise ConfigurationError(f"C must be positive, got {C}")
    if not tol > 0:
        raise ConfigurationError(f"tol must be positive, got {tol}")
    m = yv.shape[0]

    if np.all(yv == yv[0]):
        warnings.warn(
            "training labels contain a single class; the model predicts that class everywhere",
            RuntimeWarning,
            stacklevel=2,
        )
        model = SvmModel(np.zeros(m), float(yv[0]), yv, float(C), cfg, support_epsilon=support_epsilon)
        trace = np.zeros(1) if record_trace else None
        return model, TrainDiagnostics(0.0, 0, 0.0, True, trace)

    alphas, grad, iterations, converged, trace = core.smo_solve(
        Kv, np.ascontiguousarray(yv), float(C), float(tol), int(max_passes), bool(record_trace)
    )
    alphas = np.asarray(alphas)
    grad = np.asarray(grad)
    bias = _bias(alphas, grad, yv, C)
    viol = kkt_violations(alphas, Kv, yv, bias, C)
    diag = TrainDiagnostics(
        dual_objective=dual_objective(alphas, Kv, yv),
        iterations=int(iterations),
        kkt_violation_max=float(viol.max()),
        converged=bool(converged),
        objective_trace=trace if record_trace else None,
    )
    model = SvmModel(alphas, bias, yv, float(C), cfg, support_epsilon=support_epsilon)
    return model, diag


def fit(X, y, kernel: KernelConfig, C: float = DEFAULT_C, tol: float = DEFAULT_TOL,
        max_passes: int = DEFAULT_MAX_PASSES, ids=None):
    """Build the Gram matrix of ``X``, train, and keep ``X`` for later prediction.

    Returns ``(model, diagnostics, gram)``.
    """
    X = np.asarray(X, dtype=np.float64)
    K = gram_matrix(X, kernel, ids)
    model, diag = train_dual(K, y, C=C, tol=tol, max_passes=max_passes)
    model.kernel = K.provenance
    model.train_vectors = X.copy()
    return model, diag, K


def decision_values(model: SvmModel, K_cross) -> np.ndarray:
    Kc = np.asarray(K_cross, dtype=np.float64)
    if Kc.ndim == 1:
        Kc = Kc.reshape(1, -1)
    if Kc.shape[1] != model.alphas.shape[0]:
        raise DimensionError(
            f"cross-kernel has {Kc.shape[1]} columns, model has {model.alphas.shape[0]} training points"
        )
    sv = model.support_indices
    return Kc[:, sv] @ model.dual_coef[sv] + model.bias


def _sign(values) -> np.ndarray:
    return np.where(np.asarray(values) >= 0, 1, -1)


def predict(model: SvmModel, K_cross) -> np.ndarray:
    """Signs of the decision values; an exact 0 maps to +1."""
    return _sign(decision_values(model, K_cross))


def primal_weights(model: SvmModel, X_train) -> np.ndarray:
    """w = sum_i a_i y_i x_i, only meaningful for the linear kernel."""
    if model.kernel is None or model.kernel.kind != "linear":
        kind = None if model.kernel is None else model.kernel.kind
        raise UnsupportedDiagnosticError(
            f"primal weights exist only for the linear kernel (model kernel: {kind})"
        )
    X = np.asarray(X_train, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.shape[0] != model.alphas.shape[0]:
        raise DimensionError("X_train rows do not match the model's training points")
    return model.dual_coef @ X


def model_to_dict(model: SvmModel) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kernel": None if model.kernel is None else model.kernel.to_dict(),
        "C": model.C,
        "alphas": model.alphas.tolist(),
        "bias": model.bias,
        "support_indices": model.support_indices.tolist(),
        "support_epsilon": model.support_epsilon,
        "y_train": [int(v) for v in model.y_train],
        "training_vectors": None if model.train_vectors is None else model.train_vectors.tolist(),
        "metadata": model.metadata,
    }


def model_from_dict(d: dict) -> SvmModel:
    version = d.get("format_version")
    if version != FORMAT_VERSION:
        raise ConfigurationError(f"unsupported model format_version {version!r}")
    tv = d.get("training_vectors")
    return SvmModel(
        alphas=np.asarray(d["alphas"], dtype=np.float64),
        bias=float(d["bias"]),
        y_train=np.asarray(d["y_train"], dtype=np.float64),
        C=float(d["C"]),
        kernel=None if d.get("kernel") is None else KernelConfig.from_dict(d["kernel"]),
        train_vectors=None if tv is None else np.asarray(tv, dtype=np.float64),
        support_epsilon=float(d.get("support_epsilon", SUPPORT_EPSILON)),
        metadata=d.get("metadata", {}),
    )


def save_model(model: SvmModel, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=1) + "\n")


def load_model(path) -> SvmModel:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read model file {path}: {exc}") from exc
    return model_from_dict(data)
