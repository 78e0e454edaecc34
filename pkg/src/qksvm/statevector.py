"""Dense statevector simulation for the H / RZ / ZZ-phase gate set.

Bit ordering is little-endian: qubit ``q`` is bit ``q`` of the amplitude
index, so index 1 is the state with only qubit 0 set.

Gate functions never mutate their input; each returns a fresh state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._backend import core
from .errors import ConfigurationError, DimensionError

MAX_QUBITS = 24


@dataclass(frozen=True, eq=False)
class StateVector:
    """Pure state of ``n_qubits`` qubits held as ``2**n_qubits`` complex amplitudes."""

    n_qubits: int
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.amps.shape != (1 << self.n_qubits,):
            raise DimensionError(
                f"expected {1 << self.n_qubits} amplitudes for {self.n_qubits} qubits, "
                f"got shape {self.amps.shape}"
            )

    @classmethod
    def from_amplitudes(cls, amps) -> "StateVector":
        arr = np.ascontiguousarray(amps, dtype=np.complex128).copy()
        n = arr.shape[0]
        if n < 2 or n & (n - 1):
            raise DimensionError(f"amplitude count {n} is not a power of two >= 2")
        return cls(n.bit_length() - 1, arr)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def copy_amps(self) -> np.ndarray:
        return self.amps.copy()


@dataclass(frozen=True)
class MeasurementCounts:
    shots: int
    counts: dict[int, int]

    def __getitem__(self, index: int) -> int:
        return self.counts.get(index, 0)


def _check_qubit(state: StateVector, qubit: int) -> None:
    if not 0 <= qubit < state.n_qubits:
        raise DimensionError(f"qubit index {qubit} out of range for {state.n_qubits} qubits")


def zero_state(n_qubits: int) -> StateVector:
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ConfigurationError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


def apply_hadamard(state: StateVector, qubit: int) -> StateVector:
    _check_qubit(state, qubit)
    amps = state.copy_amps()
    core.apply_hadamard(amps, qubit)
    return StateVector(state.n_qubits, amps)


def apply_rz(state: StateVector, qubit: int, theta: float) -> StateVector:
    """RZ(theta) = diag(exp(-i theta/2), exp(+i theta/2)) on ``qubit``."""
    _check_qubit(state, qubit)
    if not np.isfinite(theta):
        raise ConfigurationError(f"rotation angle must be finite, got {theta}")
    amps = state.copy_amps()
    core.apply_rz(amps, qubit, float(theta))
    return StateVector(state.n_qubits, amps)


def apply_zz(state: StateVector, q: int, k: int, phi: float) -> StateVector:
    """exp(-i phi Z_q Z_k): phase exp(-i phi) where bits agree, exp(+i phi) where they differ."""
    if q == k:
        raise ConfigurationError(f"ZZ phase needs two distinct qubits, got ({q}, {k})")
    _check_qubit(state, q)
    _check_qubit(state, k)
    if not np.isfinite(phi):
        raise ConfigurationError(f"phase angle must be finite, got {phi}")
    amps = state.copy_amps()
    core.apply_zz(amps, q, k, float(phi))
    return StateVector(state.n_qubits, amps)


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b> = sum(conj(a_i) * b_i)."""
    if a.n_qubits != b.n_qubits:
        raise DimensionError(f"cannot take overlap of {a.n_qubits}- and {b.n_qubits}-qubit states")
    return complex(np.vdot(a.amps, b.amps))


def all_zero_probability(state: StateVector) -> float:
    return float(abs(state.amps[0]) ** 2)


def sample_measurements(state: StateVector, shots: int, seed: int) -> MeasurementCounts:
    """Draw ``shots`` computational-basis outcomes.

    Sampling uses numpy's PCG64 generator seeded with ``seed``; the shot
    counts are one multinomial draw over the Born probabilities.
    """
    if shots <= 0:
        raise ConfigurationError(f"shots must be positive, got {shots}")
    probs = state.probabilities()
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    drawn = rng.multinomial(shots, probs)
    nz = np.flatnonzero(drawn)
    return MeasurementCounts(int(shots), {int(i): int(drawn[i]) for i in nz})


# Explicit-matrix construction, used as an independent oracle in tests.

_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0)
_Z = np.diag([1.0, -1.0]).astype(np.complex128)


def _embed(single: np.ndarray, qubit: int, n_qubits: int) -> np.ndarray:
    # little-endian: the highest qubit is the leftmost Kronecker factor
    out = np.array([[1.0 + 0j]])
    for q in reversed(range(n_qubits)):
        out = np.kron(out, single if q == qubit else np.eye(2))
    return out


def hadamard_matrix(qubit: int, n_qubits: int) -> np.ndarray:
    return _embed(_H, qubit, n_qubits)


def rz_matrix(qubit: int, n_qubits: int, theta: float) -> np.ndarray:
    rz = np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])
    return _embed(rz, qubit, n_qubits)


def zz_matrix(q: int, k: int, n_qubits: int, phi: float) -> np.ndarray:
    zz = _embed(_Z, q, n_qubits) @ _embed(_Z, k, n_qubits)
    # zz is diagonal with entries +-1, so the exponential is elementwise
    return np.diag(np.exp(-1j * phi * np.diag(zz)))
