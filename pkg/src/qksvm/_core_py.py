"""Pure numpy fallback for the compiled kernels in ``_core.pyx``.

Same signatures, same in-place semantics. Used when the extension is not
built or when ``QKSVM_BACKEND=python`` is set.
"""

import numpy as np

_INV_SQRT2 = 1.0 / np.sqrt(2.0)
_TAU = 1e-12


def _bit(n, qubit):
    return (np.arange(n) >> qubit) & 1


def apply_hadamard(amps, qubit):
    stride = 1 << qubit
    view = amps.reshape(-1, 2, stride)
    a = view[:, 0, :].copy()
    b = view[:, 1, :]
    view[:, 0, :] = (a + b) * _INV_SQRT2
    view[:, 1, :] = (a - b) * _INV_SQRT2


def apply_rz(amps, qubit, theta):
    bit = _bit(amps.shape[0], qubit)
    phases = np.where(bit == 1, np.exp(0.5j * theta), np.exp(-0.5j * theta))
    amps *= phases


def apply_zz(amps, q, k, phi):
    n = amps.shape[0]
    parity = _bit(n, q) ^ _bit(n, k)
    phases = np.where(parity == 1, np.exp(1j * phi), np.exp(-1j * phi))
    amps *= phases


def smo_solve(K, y, C, tol, max_iter, record_trace=False):
    """Solve min a'Qa/2 - e'a, 0 <= a <= C, y'a = 0 with Q = yy' * K.

    Returns ``(alpha, grad, iterations, converged, trace)``.
    """
    m = K.shape[0]
    alpha = np.zeros(m)
    G = -np.ones(m)
    diag = np.diag(K).copy()
    pos = y > 0
    trace = [0.0] if record_trace else []
    converged = False
    it = 0
    while it < max_iter:
        upper = alpha >= C
        lower = alpha <= 0.0
        # I_up: y=+1 and not at C, or y=-1 and not at 0
        in_up = np.where(pos, ~upper, ~lower)
        in_low = np.where(pos, ~lower, ~upper)
        score = -y * G
        if not in_up.any():
            converged = True
            break
        cand = np.flatnonzero(in_up)
        # ties resolve to the last index, matching the compiled loop's >=
        i = cand[len(cand) - 1 - np.argmax(score[cand][::-1])]
        Gmax = score[i]
        if not in_low.any():
            converged = True
            break
        low = np.flatnonzero(in_low)
        Gmax2 = np.max(-score[low])
        grad_diff = Gmax - score[low]
        ok = grad_diff > 0
        if Gmax + Gmax2 < tol or not ok.any():
            converged = True
            break
        low = low[ok]
        grad_diff = grad_diff[ok]
        quad = diag[i] + diag[low] - 2.0 * K[i, low]
        quad = np.where(quad <= 0, _TAU, quad)
        obj_diff = -(grad_diff * grad_diff) / quad
        j = low[len(low) - 1 - np.argmin(obj_diff[::-1])]

        yi, yj = y[i], y[j]
        old_ai, old_aj = alpha[i], alpha[j]
        quad_ij = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if quad_ij <= 0:
            quad_ij = _TAU
        ai, aj = old_ai, old_aj
        if yi != yj:
            delta = (-G[i] - G[j]) / quad_ij
            diff = ai - aj
            ai += delta
            aj += delta
            if diff > 0:
                if aj < 0:
                    aj, ai = 0.0, diff
            elif ai < 0:
                ai, aj = 0.0, -diff
            if diff > 0:
                if ai > C:
                    ai, aj = C, C - diff
            elif aj > C:
                aj, ai = C, C + diff
        else:
            delta = (G[i] - G[j]) / quad_ij
            total = ai + aj
            ai -= delta
            aj += delta
            if total > C:
                if ai > C:
                    ai, aj = C, total - C
            elif aj < 0:
                aj, ai = 0.0, total
            if total > C:
                if aj > C:
                    aj, ai = C, total - C
            elif ai < 0:
                ai, aj = 0.0, total
        alpha[i], alpha[j] = ai, aj
        G += y * (yi * K[i] * (ai - old_ai) + yj * K[j] * (aj - old_aj))
        it += 1
        if record_trace:
            trace.append(0.5 * float(alpha @ (1.0 - G)))
    return alpha, G, it, converged, np.asarray(trace, dtype=np.float64)
