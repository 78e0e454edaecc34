# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: in-place gate application and the SMO dual solver loop.

Every function here has a numpy twin in ``_core_py`` with the same signature
and semantics; ``_backend`` picks one at import time.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, fabs, sqrt

cnp.import_array()

cdef double INV_SQRT2 = 0.70710678118654752440
cdef double TAU = 1e-12
cdef double INF = float("inf")


def apply_hadamard(double complex[::1] amps, int qubit):
    cdef Py_ssize_t n = amps.shape[0]
    cdef Py_ssize_t stride = 1 << qubit
    cdef Py_ssize_t base, i, j
    cdef double complex a, b
    for base in range(0, n, 2 * stride):
        for i in range(base, base + stride):
            j = i + stride
            a = amps[i]
            b = amps[j]
            amps[i] = (a + b) * INV_SQRT2
            amps[j] = (a - b) * INV_SQRT2


def apply_rz(double complex[::1] amps, int qubit, double theta):
    cdef Py_ssize_t n = amps.shape[0]
    cdef Py_ssize_t mask = 1 << qubit
    cdef Py_ssize_t i
    cdef double c = cos(0.5 * theta)
    cdef double s = sin(0.5 * theta)
    cdef double complex lo = c - 1j * s
    cdef double complex hi = c + 1j * s
    for i in range(n):
        if i & mask:
            amps[i] = amps[i] * hi
        else:
            amps[i] = amps[i] * lo


def apply_zz(double complex[::1] amps, int q, int k, double phi):
    cdef Py_ssize_t n = amps.shape[0]
    cdef Py_ssize_t mq = 1 << q
    cdef Py_ssize_t mk = 1 << k
    cdef Py_ssize_t i
    cdef double c = cos(phi)
    cdef double s = sin(phi)
    cdef double complex same = c - 1j * s
    cdef double complex diff = c + 1j * s
    cdef bint bq, bk
    for i in range(n):
        bq = (i & mq) != 0
        bk = (i & mk) != 0
        if bq == bk:
            amps[i] = amps[i] * same
        else:
            amps[i] = amps[i] * diff


cdef inline bint _is_upper(double a, double C):
    return a >= C


cdef inline bint _is_lower(double a):
    return a <= 0.0


cdef double _dual_objective(double[::1] alpha, double[::1] G, Py_ssize_t m):
    # D = e'a - a'Qa/2 = a'(e - G)/2 with G = Qa - e
    cdef double acc = 0.0
    cdef Py_ssize_t t
    for t in range(m):
        acc += alpha[t] * (1.0 - G[t])
    return 0.5 * acc


def smo_solve(double[:, ::1] K, double[::1] y, double C, double tol,
              long max_iter, bint record_trace=False):
    """Solve min a'Qa/2 - e'a, 0 <= a <= C, y'a = 0 with Q = yy' * K.

    Second-order working-set selection (Fan, Chen & Lin); returns
    ``(alpha, grad, iterations, converged, trace)``.
    """
    cdef Py_ssize_t m = K.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] alpha_arr = np.zeros(m)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] grad_arr = -np.ones(m)
    cdef double[::1] alpha = alpha_arr
    cdef double[::1] G = grad_arr
    cdef list trace = []
    cdef long it = 0
    cdef bint converged = False
    cdef Py_ssize_t i, j, t
    cdef double Gmax, Gmax2, obj_min, grad_diff, quad, obj_diff
    cdef double old_ai, old_aj, delta, diff, total, dai, daj, yi, yj
    cdef double qit, qjt

    if record_trace:
        trace.append(0.0)

    while it < max_iter:
        Gmax = -INF
        i = -1
        for t in range(m):
            if y[t] > 0:
                if not _is_upper(alpha[t], C) and -G[t] >= Gmax:
                    Gmax = -G[t]
                    i = t
            else:
                if not _is_lower(alpha[t]) and G[t] >= Gmax:
                    Gmax = G[t]
                    i = t

        Gmax2 = -INF
        obj_min = INF
        j = -1
        if i >= 0:
            yi = y[i]
            for t in range(m):
                if y[t] > 0:
                    if not _is_lower(alpha[t]):
                        grad_diff = Gmax + G[t]
                        if G[t] >= Gmax2:
                            Gmax2 = G[t]
                        if grad_diff > 0:
                            quad = K[i, i] + K[t, t] - 2.0 * K[i, t]
                            if quad <= 0:
                                quad = TAU
                            obj_diff = -(grad_diff * grad_diff) / quad
                            if obj_diff <= obj_min:
                                j = t
                                obj_min = obj_diff
                else:
                    if not _is_upper(alpha[t], C):
                        grad_diff = Gmax - G[t]
                        if -G[t] >= Gmax2:
                            Gmax2 = -G[t]
                        if grad_diff > 0:
                            quad = K[i, i] + K[t, t] - 2.0 * K[i, t]
                            if quad <= 0:
                                quad = TAU
                            obj_diff = -(grad_diff * grad_diff) / quad
                            if obj_diff <= obj_min:
                                j = t
                                obj_min = obj_diff

        if i < 0 or j < 0 or Gmax + Gmax2 < tol:
            converged = True
            break

        yi = y[i]
        yj = y[j]
        old_ai = alpha[i]
        old_aj = alpha[j]
        quad = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if quad <= 0:
            quad = TAU
        if yi != yj:
            delta = (-G[i] - G[j]) / quad
            diff = alpha[i] - alpha[j]
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j] = 0
                    alpha[i] = diff
            else:
                if alpha[i] < 0:
                    alpha[i] = 0
                    alpha[j] = -diff
            if diff > 0:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = C - diff
            else:
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = C + diff
        else:
            delta = (G[i] - G[j]) / quad
            total = alpha[i] + alpha[j]
            alpha[i] -= delta
            alpha[j] += delta
            if total > C:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = total - C
            else:
                if alpha[j] < 0:
                    alpha[j] = 0
                    alpha[i] = total
            if total > C:
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = total - C
            else:
                if alpha[i] < 0:
                    alpha[i] = 0
                    alpha[j] = total

        dai = alpha[i] - old_ai
        daj = alpha[j] - old_aj
        for t in range(m):
            qit = yi * y[t] * K[i, t]
            qjt = yj * y[t] * K[j, t]
            G[t] += qit * dai + qjt * daj
        it += 1
        if record_trace:
            trace.append(_dual_objective(alpha, G, m))

    return alpha_arr, grad_arr, it, converged, np.asarray(trace, dtype=np.float64)
