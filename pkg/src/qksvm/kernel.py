"""Classical RBF and quantum fidelity kernels, Gram assembly and export.

Kernel kinds sharing one interface:

``linear``
    xi . xj; used for the primal-weight diagnostic.
``rbf``
    exp(-gamma * ||xi - xj||^2).
``quantum_exact``
    |<phi(xi)|phi(xj)>|^2 from exact statevectors.
``quantum_shots``
    Frequency of the all-zeros outcome after running the encoding of xi
    followed by the inverse encoding of xj, estimated from ``shots`` samples.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import seeding
from .errors import ConfigurationError, DimensionError
from .featuremap import (
    FeatureMapConfig,
    gate_sequence,
    inverse_sequence,
    prepare_state,
    prepare_states,
    run_gates,
)
from .statevector import StateVector, all_zero_probability, inner_product, sample_measurements

KINDS = ("linear", "rbf", "quantum_exact", "quantum_shots")
DEFAULT_SHOTS = 8192
SHOT_PSD_TOLERANCE = 1e-2


@dataclass(frozen=True)
class KernelConfig:
    """Kernel selection plus the parameters meaningful for that kind.

    ``gamma=None`` for RBF resolves to ``1 / n_features`` when the Gram
    matrix is built.
    """

    kind: str = "quantum_exact"
    gamma: float | None = None
    feature_map: FeatureMapConfig | None = None
    shots: int = DEFAULT_SHOTS
    master_seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown kernel kind {self.kind!r}; choose from {KINDS}")
        if self.kind == "rbf" and self.gamma is not None and not self.gamma > 0:
            raise ConfigurationError(f"gamma must be positive, got {self.gamma}")
        if self.kind == "quantum_shots" and self.shots <= 0:
            raise ConfigurationError(f"shots must be positive, got {self.shots}")

    @property
    def is_quantum(self) -> bool:
        return self.kind.startswith("quantum")

    def resolve(self, n_features: int) -> "KernelConfig":
        """Fill in defaults that depend on the feature count."""
        if self.kind == "rbf":
            if self.gamma is None:
                return replace(self, gamma=1.0 / n_features)
            return self
        if self.kind == "linear":
            return self
        fm = self.feature_map
        if fm is None:
            return replace(self, feature_map=FeatureMapConfig(n_features))
        if fm.n_qubits != n_features:
            raise DimensionError(
                f"feature map has {fm.n_qubits} qubits but data has {n_features} features"
            )
        return self

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.kind == "rbf":
            d["gamma"] = self.gamma
        elif self.is_quantum:
            d["feature_map"] = None if self.feature_map is None else self.feature_map.to_dict()
        if self.kind == "quantum_shots":
            d["shots"] = self.shots
            d["master_seed"] = self.master_seed
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "KernelConfig":
        fm = d.get("feature_map")
        return cls(
            kind=d["kind"],
            gamma=d.get("gamma"),
            feature_map=None if fm is None else FeatureMapConfig.from_dict(fm),
            shots=int(d.get("shots", DEFAULT_SHOTS)),
            master_seed=int(d.get("master_seed", 0)),
        )


@dataclass
class KernelMatrix:
    values: np.ndarray
    provenance: KernelConfig
    row_ids: list = field(default_factory=list)

    @property
    def shape(self):
        return self.values.shape


def _pair(xi, xj) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(xi, dtype=np.float64).reshape(-1)
    b = np.asarray(xj, dtype=np.float64).reshape(-1)
    if a.shape != b.shape:
        raise DimensionError(f"feature vectors differ in length: {a.shape[0]} vs {b.shape[0]}")
    return a, b


def _clamp01(v):
    return np.clip(v, 0.0, 1.0)


def rbf_kernel(xi, xj, gamma: float) -> float:
    if not gamma > 0:
        raise ConfigurationError(f"gamma must be positive, got {gamma}")
    a, b = _pair(xi, xj)
    d = a - b
    return float(np.exp(-gamma * np.sum(d * d)))


def quantum_kernel_exact(xi, xj, fm: FeatureMapConfig) -> float:
    a, b = _pair(xi, xj)
    ov = inner_product(prepare_state(a, fm), prepare_state(b, fm))
    return float(_clamp01(abs(ov) ** 2))


def adjoint_circuit_state(xi, xj, fm: FeatureMapConfig) -> StateVector:
    """State after the encoding of ``xi`` followed by the inverse encoding of ``xj``."""
    a, b = _pair(xi, xj)
    amps = prepare_state(a, fm).copy_amps()
    run_gates(amps, inverse_sequence(gate_sequence(b, fm)))
    return StateVector(fm.n_qubits, amps)


def quantum_kernel_p0(xi, xj, fm: FeatureMapConfig) -> float:
    """Exact all-zeros probability of the adjoint circuit (no sampling)."""
    return float(_clamp01(all_zero_probability(adjoint_circuit_state(xi, xj, fm))))


def quantum_kernel_shots(xi, xj, fm: FeatureMapConfig, shots: int, seed: int) -> float:
    state = adjoint_circuit_state(xi, xj, fm)
    counts = sample_measurements(state, shots, seed)
    return counts[0] / shots


def _as_matrix(X, name="X") -> np.ndarray:
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1) if arr.size else arr.reshape(0, 0)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be a 2-D array of feature vectors")
    return arr


def _sq_dists(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    # explicit differences avoid the cancellation of the |a|^2 + |b|^2 - 2ab expansion
    D = A[:, None, :] - B[None, :, :]
    return np.sum(D * D, axis=-1)


def _shots_p0(state_amps: np.ndarray, xj, fm: FeatureMapConfig, shots: int, seed: int) -> float:
    amps = state_amps.copy()
    run_gates(amps, inverse_sequence(gate_sequence(xj, fm)))
    counts = sample_measurements(StateVector(fm.n_qubits, amps), shots, seed)
    return counts[0] / shots


def gram_matrix(X, cfg: KernelConfig, ids: Sequence | None = None) -> KernelMatrix:
    X = _as_matrix(X)
    if X.shape[0] == 0:
        raise DimensionError("cannot build a Gram matrix from no samples")
    cfg = cfg.resolve(X.shape[1])
    m = X.shape[0]
    ids = list(range(m)) if ids is None else list(ids)
    iu = np.triu_indices(m, 1)

    if cfg.kind == "linear":
        K = X @ X.T
    elif cfg.kind == "rbf":
        K = np.exp(-cfg.gamma * _sq_dists(X, X))
    elif cfg.kind == "quantum_exact":
        S = prepare_states(X, cfg.feature_map)
        K = _clamp01(np.abs(S.conj() @ S.T) ** 2)
    else:
        S = prepare_states(X, cfg.feature_map)
        K = np.eye(m)
        for i, j in zip(*iu):
            seed = seeding.pair_seed(cfg.master_seed, i, j)
            K[i, j] = _shots_p0(S[i], X[j], cfg.feature_map, cfg.shots, seed)
    # keep the upper triangle and mirror it so K is exactly symmetric
    K[(iu[1], iu[0])] = K[iu]
    return KernelMatrix(K, cfg, ids)


def cross_gram(X_eval, X_train, cfg: KernelConfig) -> np.ndarray:
    """Kernel values K(eval_i, train_j) as an (n_eval, n_train) array."""
    A = _as_matrix(X_eval, "X_eval")
    B = _as_matrix(X_train, "X_train")
    if B.shape[0] == 0:
        raise DimensionError("training set is empty")
    if A.shape[0] == 0:
        return np.zeros((0, B.shape[0]))
    if A.shape[1] != B.shape[1]:
        raise DimensionError(
            f"evaluation vectors have {A.shape[1]} features, training vectors {B.shape[1]}"
        )
    cfg = cfg.resolve(B.shape[1])
    if cfg.kind == "linear":
        return A @ B.T
    if cfg.kind == "rbf":
        return np.exp(-cfg.gamma * _sq_dists(A, B))
    SA = prepare_states(A, cfg.feature_map)
    if cfg.kind == "quantum_exact":
        SB = prepare_states(B, cfg.feature_map)
        return _clamp01(np.abs(SA.conj() @ SB.T) ** 2)
    out = np.empty((A.shape[0], B.shape[0]))
    for r in range(A.shape[0]):
        for c in range(B.shape[0]):
            seed = seeding.cross_seed(cfg.master_seed, r, c)
            out[r, c] = _shots_p0(SA[r], B[c], cfg.feature_map, cfg.shots, seed)
    return out


def psd_diagnostics(K) -> dict:
    """Smallest eigenvalue (of the symmetric part) and max |K_ij - K_ji|."""
    values = K.values if isinstance(K, KernelMatrix) else np.asarray(K, dtype=np.float64)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {values.shape}")
    sym_err = float(np.max(np.abs(values - values.T))) if values.size else 0.0
    eig = np.linalg.eigvalsh(0.5 * (values + values.T))
    return {"min_eigenvalue": float(eig[0]), "symmetry_error": sym_err}


def psd_project(K: KernelMatrix) -> KernelMatrix:
    """Clip negative eigenvalues to zero and rebuild the matrix."""
    w, V = np.linalg.eigh(0.5 * (K.values + K.values.T))
    P = (V * np.maximum(w, 0.0)) @ V.T
    P = 0.5 * (P + P.T)
    return KernelMatrix(P, K.provenance, list(K.row_ids))


def write_csv(K: KernelMatrix, path) -> None:
    """One header row of sample ids, then one row per sample led by its id."""
    ids = [str(i) for i in K.row_ids]
    lines = [",".join(["id"] + ids)]
    for rid, row in zip(ids, K.values):
        lines.append(",".join([rid] + [repr(float(v)) for v in row]))
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv(path) -> KernelMatrix:
    rows = Path(path).read_text().strip().splitlines()
    ids = rows[0].split(",")[1:]
    values = np.array([[float(v) for v in r.split(",")[1:]] for r in rows[1:]])
    return KernelMatrix(values, KernelConfig(), ids)


def write_pgm(K: KernelMatrix, path, maxval: int = 255) -> None:
    """Plain (P2) grayscale heatmap: 0 is black, 1 is white."""
    pix = np.rint(_clamp01(K.values) * maxval).astype(int)
    h, w = pix.shape
    lines = ["P2", f"{w} {h}", str(maxval)]
    lines.extend(" ".join(str(v) for v in row) for row in pix)
    Path(path).write_text("\n".join(lines) + "\n")
