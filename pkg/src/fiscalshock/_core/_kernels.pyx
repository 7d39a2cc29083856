# cython: language_level=3
"""Compiled numerical kernels (HP banded solve, SVR dual SMO)."""

import numpy as np

from libc.math cimport INFINITY

cdef double TAU = 1e-12


def hp_bands(Py_ssize_t n, double lam):
    d0 = np.ones(n)
    d1 = np.zeros(max(n - 1, 0))
    d2 = np.zeros(max(n - 2, 0))
    cdef double[::1] a0 = d0
    cdef double[::1] a1 = d1
    cdef double[::1] a2 = d2
    cdef Py_ssize_t r
    for r in range(n - 2):
        a0[r] += lam
        a0[r + 1] += 4.0 * lam
        a0[r + 2] += lam
        a1[r] -= 2.0 * lam
        a1[r + 1] -= 2.0 * lam
        a2[r] += lam
    return d0, d1, d2


def hp_trend(y_in, double lam):
    cdef const double[::1] y = np.ascontiguousarray(y_in, dtype=np.float64)
    cdef Py_ssize_t n = y.shape[0]
    d0, d1, d2 = hp_bands(n, lam)
    cdef double[::1] a0 = d0
    cdef double[::1] a1 = d1
    cdef double[::1] a2 = d2
    diag_arr = np.empty(n)
    l1_arr = np.zeros(n)
    l2_arr = np.zeros(n)
    z_arr = np.empty(n)
    tau_arr = np.empty(n)
    cdef double[::1] diag = diag_arr
    cdef double[::1] l1 = l1_arr
    cdef double[::1] l2 = l2_arr
    cdef double[::1] z = z_arr
    cdef double[::1] tau = tau_arr
    cdef Py_ssize_t i
    cdef double e1, e2, acc, d, v
    for i in range(n):
        e2 = 0.0
        e1 = 0.0
        if i >= 2:
            e2 = a2[i - 2] / diag[i - 2]
        if i >= 1:
            acc = a1[i - 1]
            if i >= 2:
                acc -= e2 * diag[i - 2] * l1[i - 1]
            e1 = acc / diag[i - 1]
        d = a0[i]
        if i >= 1:
            d -= e1 * e1 * diag[i - 1]
        if i >= 2:
            d -= e2 * e2 * diag[i - 2]
        diag[i] = d
        l1[i] = e1
        l2[i] = e2
    for i in range(n):
        v = y[i]
        if i >= 1:
            v -= l1[i] * z[i - 1]
        if i >= 2:
            v -= l2[i] * z[i - 2]
        z[i] = v
    for i in range(n - 1, -1, -1):
        v = z[i] / diag[i]
        if i + 1 < n:
            v -= l1[i + 1] * tau[i + 1]
        if i + 2 < n:
            v -= l2[i + 2] * tau[i + 2]
        tau[i] = v
    return tau_arr


def smo_solve(K_in, y_in, double C, double eps, double tol, long max_iter, bint record_trace):
    cdef const double[:, ::1] K = np.ascontiguousarray(K_in, dtype=np.float64)
    cdef const double[::1] y = np.ascontiguousarray(y_in, dtype=np.float64)
    cdef Py_ssize_t n = y.shape[0]
    cdef Py_ssize_t m = 2 * n
    alpha_arr = np.zeros(m)
    G_arr = np.empty(m)
    p_arr = np.empty(m)
    cdef double[::1] alpha = alpha_arr
    cdef double[::1] G = G_arr
    cdef double[::1] p = p_arr
    cdef Py_ssize_t t, i, j, ii, jj, tt
    for t in range(n):
        p[t] = eps - y[t]
        p[t + n] = eps + y[t]
    for t in range(m):
        G[t] = p[t]
    trace = []
    cdef long it = 0
    cdef bint converged = False
    cdef double gmax, gmax2, v, st, b, a, obj, obj_min
    cdef double si, sj, qii, qjj, qij, ai, aj, old_i, old_j, quad, delta, diff, tot
    cdef double dai, daj, ci, cj, f
    while it < max_iter:
        gmax = -INFINITY
        i = -1
        for t in range(m):
            st = 1.0 if t < n else -1.0
            if (st > 0 and alpha[t] < C) or (st < 0 and alpha[t] > 0):
                v = -st * G[t]
                if v > gmax:
                    gmax = v
                    i = t
        gmax2 = -INFINITY
        j = -1
        obj_min = INFINITY
        ii = i % n if i >= 0 else 0
        for t in range(m):
            st = 1.0 if t < n else -1.0
            if (st > 0 and alpha[t] > 0) or (st < 0 and alpha[t] < C):
                v = st * G[t]
                if v > gmax2:
                    gmax2 = v
                if i < 0:
                    continue
                b = gmax + v
                if b > 0:
                    tt = t % n
                    a = K[ii, ii] + K[tt, tt] - 2.0 * K[ii, tt]
                    if a <= 0:
                        a = TAU
                    obj = -(b * b) / a
                    if obj < obj_min:
                        obj_min = obj
                        j = t
        if gmax + gmax2 < tol or i < 0 or j < 0:
            converged = True
            break
        jj = j % n
        si = 1.0 if i < n else -1.0
        sj = 1.0 if j < n else -1.0
        qii = K[ii, ii]
        qjj = K[jj, jj]
        qij = si * sj * K[ii, jj]
        old_i = alpha[i]
        old_j = alpha[j]
        ai = old_i
        aj = old_j
        if si != sj:
            quad = qii + qjj + 2.0 * qij
            if quad <= 0:
                quad = TAU
            delta = (-G[i] - G[j]) / quad
            diff = ai - aj
            ai += delta
            aj += delta
            if diff > 0:
                if aj < 0:
                    aj = 0.0
                    ai = diff
            else:
                if ai < 0:
                    ai = 0.0
                    aj = -diff
            if diff > 0:
                if ai > C:
                    ai = C
                    aj = C - diff
            else:
                if aj > C:
                    aj = C
                    ai = C + diff
        else:
            quad = qii + qjj - 2.0 * qij
            if quad <= 0:
                quad = TAU
            delta = (G[i] - G[j]) / quad
            tot = ai + aj
            ai -= delta
            aj += delta
            if tot > C:
                if ai > C:
                    ai = C
                    aj = tot - C
            else:
                if aj < 0:
                    aj = 0.0
                    ai = tot
            if tot > C:
                if aj > C:
                    aj = C
                    ai = tot - C
            else:
                if ai < 0:
                    ai = 0.0
                    aj = tot
        alpha[i] = ai
        alpha[j] = aj
        dai = ai - old_i
        daj = aj - old_j
        ci = si * dai
        cj = sj * daj
        for t in range(m):
            st = 1.0 if t < n else -1.0
            tt = t % n
            G[t] += st * ci * K[ii, tt] + st * cj * K[jj, tt]
        it += 1
        if record_trace:
            f = 0.0
            for t in range(m):
                f += alpha[t] * (G[t] + p[t])
            trace.append(-0.5 * f)
    return alpha_arr, G_arr, it, converged, np.asarray(trace, dtype=np.float64)
