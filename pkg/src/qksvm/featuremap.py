"""ZZ feature map with full entanglement.

One repetition applies H to every qubit, RZ(x_q) to every qubit, then a
ZZ phase exp(-i (pi - x_q)(pi - x_k) Z_q Z_k) for every pair q < k in
nested-loop order. Inputs are expected to be MinMax-scaled already.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._backend import core
from .errors import ConfigurationError, DimensionError
from .statevector import (
    StateVector,
    hadamard_matrix,
    rz_matrix,
    zero_state,
    zz_matrix,
)

CONVENTIONS = ("paper", "doubled")


def pair_angle(xq: float, xk: float) -> float:
    return (np.pi - xq) * (np.pi - xk)


def full_entanglement_pairs(n: int) -> list[tuple[int, int]]:
    return [(q, k) for q in range(n - 1) for k in range(q + 1, n)]


@dataclass(frozen=True)
class FeatureMapConfig:
    """Circuit layout of the ZZ feature map.

    ``convention="doubled"`` multiplies both the single-qubit and the pair
    angle by 2, the scaling many circuit libraries use.
    """

    n_qubits: int
    reps: int = 1
    entangling_pairs: tuple[tuple[int, int], ...] | None = None
    convention: str = "paper"
    pairs: tuple[tuple[int, int], ...] = field(init=False, repr=False)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ConfigurationError(f"n_qubits must be >= 1, got {self.n_qubits}")
        if self.reps < 1:
            raise ConfigurationError(f"reps must be >= 1, got {self.reps}")
        if self.convention not in CONVENTIONS:
            raise ConfigurationError(
                f"unknown angle convention {self.convention!r}; choose from {CONVENTIONS}"
            )
        if self.entangling_pairs is None:
            pairs = tuple(full_entanglement_pairs(self.n_qubits))
        else:
            pairs = tuple((int(q), int(k)) for q, k in self.entangling_pairs)
            for q, k in pairs:
                if not (0 <= q < k < self.n_qubits):
                    raise ConfigurationError(f"invalid entangling pair ({q}, {k})")
        object.__setattr__(self, "pairs", pairs)

    @property
    def scale(self) -> float:
        return 2.0 if self.convention == "doubled" else 1.0

    def single_angle(self, xq: float) -> float:
        return self.scale * xq

    def pair_angle(self, xq: float, xk: float) -> float:
        return self.scale * pair_angle(xq, xk)

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "reps": self.reps,
            "entangling_pairs": [list(p) for p in self.pairs],
            "convention": self.convention,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureMapConfig":
        pairs = d.get("entangling_pairs")
        if pairs is not None:
            pairs = tuple(tuple(int(v) for v in p) for p in pairs)
            if pairs == tuple(full_entanglement_pairs(int(d["n_qubits"]))):
                pairs = None
        return cls(
            n_qubits=int(d["n_qubits"]),
            reps=int(d.get("reps", 1)),
            entangling_pairs=pairs,
            convention=d.get("convention", "paper"),
        )


def _as_features(x: Sequence[float], cfg: FeatureMapConfig) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64).reshape(-1)
    if arr.shape[0] != cfg.n_qubits:
        raise DimensionError(
            f"feature vector has length {arr.shape[0]}, feature map expects {cfg.n_qubits}"
        )
    if not np.all(np.isfinite(arr)):
        raise ConfigurationError("feature vector contains non-finite values")
    return arr


def gate_sequence(x: Sequence[float], cfg: FeatureMapConfig) -> list[tuple]:
    """Ordered gate list ``("h", q)``, ``("rz", q, theta)``, ``("zz", q, k, phi)``."""
    arr = _as_features(x, cfg)
    layer: list[tuple] = []
    for q in range(cfg.n_qubits):
        layer.append(("h", q))
    for q in range(cfg.n_qubits):
        layer.append(("rz", q, cfg.single_angle(arr[q])))
    for q, k in cfg.pairs:
        layer.append(("zz", q, k, cfg.pair_angle(arr[q], arr[k])))
    return layer * cfg.reps


def inverse_sequence(gates: list[tuple]) -> list[tuple]:
    """Reverse the order and negate every angle; H is its own inverse."""
    out = []
    for g in reversed(gates):
        if g[0] == "h":
            out.append(g)
        elif g[0] == "rz":
            out.append(("rz", g[1], -g[2]))
        else:
            out.append(("zz", g[1], g[2], -g[3]))
    return out


def run_gates(amps: np.ndarray, gates: list[tuple]) -> np.ndarray:
    """Apply ``gates`` to ``amps`` in place and return it."""
    for g in gates:
        if g[0] == "h":
            core.apply_hadamard(amps, g[1])
        elif g[0] == "rz":
            core.apply_rz(amps, g[1], float(g[2]))
        else:
            core.apply_zz(amps, g[1], g[2], float(g[3]))
    return amps


def prepare_state(x: Sequence[float], cfg: FeatureMapConfig) -> StateVector:
    gates = gate_sequence(x, cfg)
    amps = zero_state(cfg.n_qubits).copy_amps()
    return StateVector(cfg.n_qubits, run_gates(amps, gates))


def prepare_states(X, cfg: FeatureMapConfig) -> np.ndarray:
    """Encoded states of every row of ``X`` stacked as a (rows, 2**n) complex array."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    out = np.empty((X.shape[0], 1 << cfg.n_qubits), dtype=np.complex128)
    for r, x in enumerate(X):
        out[r] = prepare_state(x, cfg).amps
    return out


def feature_map_unitary(x: Sequence[float], cfg: FeatureMapConfig) -> np.ndarray:
    """Explicit 2^n x 2^n unitary of the encoding circuit (n <= 3; for testing)."""
    if cfg.n_qubits > 3:
        raise ConfigurationError(f"explicit unitary limited to 3 qubits, got {cfg.n_qubits}")
    n = cfg.n_qubits
    U = np.eye(1 << n, dtype=np.complex128)
    for g in gate_sequence(x, cfg):
        if g[0] == "h":
            G = hadamard_matrix(g[1], n)
        elif g[0] == "rz":
            G = rz_matrix(g[1], n, g[2])
        else:
            G = zz_matrix(g[1], g[2], n, g[3])
        U = G @ U
    return U
