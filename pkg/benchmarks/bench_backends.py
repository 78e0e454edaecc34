"""Time the compiled core against the numpy fallback.

Usage::

    python benchmarks/bench_backends.py [--repeat 5] [--qubits 8] [--samples 99]

Each workload runs once per available backend by swapping the module-level
``core`` reference, so both go through the same public code paths.
"""

import argparse
import time

import numpy as np

from qksvm import _backend, featuremap, statevector, svm
from qksvm.featuremap import FeatureMapConfig, gate_sequence, run_gates
from qksvm.kernel import KernelConfig, gram_matrix


def use(core):
    for mod in (statevector, featuremap, svm):
        mod.core = core


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def workloads(n_qubits, n_samples, rng):
    X = rng.uniform(size=(n_samples, n_qubits))
    y = np.where(X[:, 0] + 0.2 * rng.normal(size=n_samples) > 0.5, 1.0, -1.0)
    gates = gate_sequence(X[0], FeatureMapConfig(n_qubits, reps=2)) * 50
    K_rbf = gram_matrix(X * 4, KernelConfig("rbf", gamma=1.0)).values

    def gate_run():
        amps = np.zeros(2**n_qubits, dtype=np.complex128)
        amps[0] = 1
        run_gates(amps, gates)

    def exact_gram():
        gram_matrix(X, KernelConfig("quantum_exact"))

    def smo():
        svm.train_dual(K_rbf, y, C=10.0, tol=1e-6, max_passes=200000)

    return {
        f"gate sequence ({len(gates)} gates, {n_qubits} qubits)": gate_run,
        f"exact quantum Gram ({n_samples}x{n_samples})": exact_gram,
        f"SMO dual solve (M={n_samples}, C=10)": smo,
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--qubits", type=int, default=8)
    ap.add_argument("--samples", type=int, default=99)
    args = ap.parse_args()

    backends = _backend.available_backends()
    original = statevector.core
    rows = []
    try:
        for name, fn in workloads(args.qubits, args.samples, np.random.default_rng(0)).items():
            timings = {}
            for bname, core in sorted(backends.items()):
                use(core)
                fn()  # warm up
                timings[bname] = best_of(fn, args.repeat)
            rows.append((name, timings))
    finally:
        use(original)

    names = sorted(backends)
    width = max(len(r[0]) for r in rows)
    print(f"{'workload':<{width}}  " + "  ".join(f"{n:>12}" for n in names)
          + ("  speedup" if len(names) == 2 else ""))
    for name, t in rows:
        line = f"{name:<{width}}  " + "  ".join(f"{t[n] * 1e3:10.2f}ms" for n in names)
        if len(names) == 2:
            line += f"  {t['python'] / t['compiled']:6.1f}x"
        print(line)


if __name__ == "__main__":
    main()
