import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import H, op_on, rz, zz_diag
from qksvm.errors import ConfigurationError, DimensionError
from qksvm.statevector import (
    StateVector,
    all_zero_probability,
    apply_hadamard,
    apply_rz,
    apply_zz,
    inner_product,
    sample_measurements,
    zero_state,
)

S2 = 1 / np.sqrt(2)


def random_state(rng, n):
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return StateVector.from_amplitudes(v / np.linalg.norm(v))


def apply_random_gate(state, rng, kind):
    n = state.n_qubits
    q = int(rng.integers(n))
    if kind == "h":
        return apply_hadamard(state, q), op_on(H, q, n)
    theta = float(rng.uniform(-7, 7))
    if kind == "rz":
        return apply_rz(state, q, theta), op_on(rz(theta), q, n)
    k = int((q + 1 + rng.integers(n - 1)) % n)
    return apply_zz(state, q, k, theta), zz_diag(q, k, n, theta)


class TestZeroState:
    @pytest.mark.parametrize("n, expected", [(1, [1, 0]), (2, [1, 0, 0, 0])])
    def test_small(self, n, expected):
        np.testing.assert_array_equal(zero_state(n).amps, expected)

    def test_eight_qubits(self):
        s = zero_state(8)
        assert s.amps.shape == (256,)
        assert s.norm_squared() == 1.0

    @pytest.mark.parametrize("n", [0, 25, -1])
    def test_out_of_range(self, n):
        with pytest.raises(ConfigurationError):
            zero_state(n)


class TestGates:
    def test_hadamard_single(self, backend):
        np.testing.assert_allclose(apply_hadamard(zero_state(1), 0).amps, [S2, S2], atol=1e-15)

    def test_hadamard_twice(self, backend, rng):
        s = random_state(rng, 3)
        back = apply_hadamard(apply_hadamard(s, 1), 1)
        np.testing.assert_allclose(back.amps, s.amps, atol=1e-12)

    def test_hadamard_qubit1_little_endian(self, backend):
        expected = op_on(H, 1, 2) @ np.array([1, 0, 0, 0])
        got = apply_hadamard(zero_state(2), 1).amps
        np.testing.assert_allclose(got, expected, atol=1e-15)
        np.testing.assert_allclose(got, [S2, 0, S2, 0], atol=1e-15)

    def test_rz_zero_is_identity(self, backend, rng):
        s = random_state(rng, 2)
        np.testing.assert_array_equal(apply_rz(s, 0, 0.0).amps, s.amps)

    @pytest.mark.parametrize("theta", [0.3, 1.0, 2.5, -4.0])
    def test_rz_interferometer(self, backend, theta):
        s = apply_hadamard(apply_rz(apply_hadamard(zero_state(1), 0), 0, theta), 0)
        oracle = H @ rz(theta) @ H @ np.array([1, 0])
        assert all_zero_probability(s) == pytest.approx(abs(oracle[0]) ** 2, abs=1e-14)
        assert all_zero_probability(s) == pytest.approx(np.cos(theta / 2) ** 2, abs=1e-14)

    def test_rz_two_pi_global_phase(self, backend):
        s = apply_rz(zero_state(1), 0, 2 * np.pi)
        assert s.amps[0] == pytest.approx(-1.0, abs=1e-15)
        assert abs(s.amps[0]) ** 2 == pytest.approx(1.0, abs=1e-15)

    def test_zz_eigenphases(self, backend):
        phi = 0.7
        plus = StateVector.from_amplitudes(np.full(4, 0.5))
        out = apply_zz(plus, 0, 1, phi).amps
        # |00> and |11> agree (eigenvalue +1), |01> and |10> differ (-1)
        np.testing.assert_allclose(out[[0, 3]], 0.5 * np.exp(-1j * phi), atol=1e-15)
        np.testing.assert_allclose(out[[1, 2]], 0.5 * np.exp(1j * phi), atol=1e-15)

    def test_zz_zero_is_identity(self, backend, rng):
        s = random_state(rng, 3)
        np.testing.assert_array_equal(apply_zz(s, 0, 2, 0.0).amps, s.amps)

    def test_zz_same_qubit_rejected(self):
        with pytest.raises(ConfigurationError):
            apply_zz(zero_state(2), 1, 1, 0.3)

    @pytest.mark.parametrize("gate", [apply_hadamard, lambda s, q: apply_rz(s, q, 0.1)])
    def test_qubit_out_of_range(self, gate):
        with pytest.raises(DimensionError):
            gate(zero_state(2), 2)

    def test_input_not_mutated(self, backend, rng):
        s = random_state(rng, 2)
        before = s.amps.copy()
        apply_hadamard(s, 0)
        apply_rz(s, 1, 0.4)
        apply_zz(s, 0, 1, 0.9)
        np.testing.assert_array_equal(s.amps, before)


class TestMatrixOracle:
    @pytest.mark.parametrize("n", [1, 2, 3])
    @pytest.mark.parametrize("kind", ["h", "rz", "zz"])
    def test_gate_matches_kron(self, backend, rng, n, kind):
        if kind == "zz" and n == 1:
            pytest.skip("ZZ needs two qubits")
        for _ in range(10):
            s = random_state(rng, n)
            out, U = apply_random_gate(s, rng, kind)
            np.testing.assert_allclose(out.amps, U @ s.amps, atol=1e-12, rtol=0)

    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_unitarity_and_norm(self, backend, rng, n):
        s, t = random_state(rng, n), random_state(rng, n)
        ref = inner_product(s, t)
        for _ in range(40):
            kind = ["h", "rz", "zz"][int(rng.integers(3))]
            seed = int(rng.integers(2**31))
            s, _ = apply_random_gate(s, np.random.default_rng(seed), kind)
            t, _ = apply_random_gate(t, np.random.default_rng(seed), kind)
            assert abs(s.norm_squared() - 1) <= 1e-10
        assert abs(inner_product(s, t) - ref) <= 1e-10


@settings(max_examples=60, deadline=None)
@given(
    ops=st.lists(
        st.tuples(
            st.sampled_from(["rz", "zz"]),
            st.integers(0, 3),
            st.integers(0, 3),
            st.floats(-10, 10, allow_nan=False),
        ),
        min_size=2,
        max_size=8,
    ),
    perm_seed=st.integers(0, 2**32 - 1),
)
def test_diagonal_gates_commute(ops, perm_seed):
    ops = [o for o in ops if o[0] == "rz" or o[1] != o[2]]
    base = StateVector.from_amplitudes(np.full(16, 0.25))

    def run(seq):
        s = base
        for kind, q, k, a in seq:
            s = apply_rz(s, q, a) if kind == "rz" else apply_zz(s, q, k, a)
        return s.amps

    shuffled = [ops[i] for i in np.random.default_rng(perm_seed).permutation(len(ops))]
    np.testing.assert_allclose(run(ops), run(shuffled), atol=1e-12, rtol=0)


class TestReadout:
    def test_self_overlap(self, rng):
        s = random_state(rng, 4)
        assert inner_product(s, s) == pytest.approx(1.0, abs=1e-10)

    def test_orthogonal(self):
        one = StateVector.from_amplitudes([0, 1])
        assert inner_product(zero_state(1), one) == 0

    def test_overlap_with_plus(self):
        plus = apply_hadamard(zero_state(1), 0)
        assert inner_product(zero_state(1), plus) == pytest.approx(S2, abs=1e-15)

    def test_overlap_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            inner_product(zero_state(1), zero_state(2))

    def test_all_zero_probability(self):
        assert all_zero_probability(zero_state(3)) == 1.0
        assert all_zero_probability(apply_hadamard(zero_state(1), 0)) == pytest.approx(0.5)
        hh = apply_hadamard(apply_hadamard(zero_state(2), 0), 1)
        assert all_zero_probability(hh) == pytest.approx(0.25)


class TestSampling:
    def test_deterministic_distribution(self):
        c = sample_measurements(zero_state(3), 777, seed=5)
        assert c.counts == {0: 777}

    def test_binomial_bound(self):
        plus = apply_hadamard(zero_state(1), 0)
        c = sample_measurements(plus, 10000, seed=11)
        assert abs(c[0] / 10000 - 0.5) <= 0.02
        assert sum(c.counts.values()) == 10000

    def test_seed_reproducible(self, rng):
        s = random_state(rng, 3)
        assert sample_measurements(s, 500, 9) == sample_measurements(s, 500, 9)

    @pytest.mark.parametrize("shots", [0, -3])
    def test_bad_shots(self, shots):
        with pytest.raises(ConfigurationError):
            sample_measurements(zero_state(1), shots, 0)

    def test_convergence_rate(self, rng):
        # per-outcome 4-sigma bound should hold in >= 99% of seeded trials
        s = random_state(rng, 3)
        p = s.probabilities()
        shots = 4096
        ok = 0
        trials = 200
        for seed in range(trials):
            c = sample_measurements(s, shots, seed)
            emp = np.array([c[i] for i in range(8)]) / shots
            ok += np.all(np.abs(emp - p) <= 4 * np.sqrt(p * (1 - p) / shots))
        assert ok >= 0.99 * trials
