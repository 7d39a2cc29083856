"""Pure-Python implementations of the numerical kernels.

These mirror ``_kernels.pyx`` operation for operation so the two backends
agree to rounding error. They are used whenever the compiled module is
missing or ``FISCALSHOCK_PURE_PYTHON`` is set.
"""

import numpy as np

TAU = 1e-12


def hp_bands(n, lam):
    """Diagonals of ``I + lam * D'D`` for the second-difference operator ``D``."""
    d0 = np.ones(n)
    d1 = np.zeros(max(n - 1, 0))
    d2 = np.zeros(max(n - 2, 0))
    for r in range(n - 2):
        d0[r] += lam
        d0[r + 1] += 4.0 * lam
        d0[r + 2] += lam
        d1[r] -= 2.0 * lam
        d1[r + 1] -= 2.0 * lam
        d2[r] += lam
    return d0, d1, d2


def hp_trend(y, lam):
    """Solve the pentadiagonal HP normal equations by banded LDL'."""
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    a0, a1, a2 = hp_bands(n, lam)
    diag = np.empty(n)
    l1 = np.zeros(n)  # l1[i] = L[i, i-1]
    l2 = np.zeros(n)  # l2[i] = L[i, i-2]
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
    z = np.empty(n)
    for i in range(n):
        v = y[i]
        if i >= 1:
            v -= l1[i] * z[i - 1]
        if i >= 2:
            v -= l2[i] * z[i - 2]
        z[i] = v
    tau = np.empty(n)
    for i in range(n - 1, -1, -1):
        v = z[i] / diag[i]
        if i + 1 < n:
            v -= l1[i + 1] * tau[i + 1]
        if i + 2 < n:
            v -= l2[i + 2] * tau[i + 2]
        tau[i] = v
    return tau


def smo_solve(K, y, C, eps, tol, max_iter, record_trace):
    """SMO for the epsilon-SVR dual in its 2n-variable form.

    Variables ``0..n-1`` are the ``a_i`` (sign +1) and ``n..2n-1`` the
    ``a_i*`` (sign -1). Minimises ``0.5 a'Qa + p'a`` subject to
    ``s'a = 0`` and ``0 <= a <= C`` using maximal-violating-pair selection
    with second-order choice of the partner.

    Returns ``(alpha, grad, iterations, converged, trace)`` where ``trace``
    holds the (maximisation-form) dual objective after every update.
    """
    K = np.asarray(K, dtype=float)
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    m = 2 * n
    idx = np.concatenate([np.arange(n), np.arange(n)])
    s = np.concatenate([np.ones(n), -np.ones(n)])
    p = np.concatenate([eps - y, eps + y])
    kd = np.diag(K)[idx]
    alpha = np.zeros(m)
    G = p.copy()
    trace = []
    it = 0
    converged = False
    while it < max_iter:
        up = ((s > 0) & (alpha < C)) | ((s < 0) & (alpha > 0))
        low = ((s > 0) & (alpha > 0)) | ((s < 0) & (alpha < C))
        v = np.where(up, -s * G, -np.inf)
        i = int(np.argmax(v))
        gmax = v[i]
        sg = np.where(low, s * G, -np.inf)
        gmax2 = sg.max()
        if gmax + gmax2 < tol:
            converged = True
            break
        b = gmax + s * G
        cand = low & (b > 0)
        if not cand.any():
            converged = True
            break
        ii = idx[i]
        a = kd[ii] + kd - 2.0 * K[ii, idx]
        a = np.where(a > 0, a, TAU)
        obj = np.where(cand, -(b * b) / a, np.inf)
        j = int(np.argmin(obj))
        jj = idx[j]

        qii = K[ii, ii]
        qjj = K[jj, jj]
        qij = s[i] * s[j] * K[ii, jj]
        old_i = alpha[i]
        old_j = alpha[j]
        ai = old_i
        aj = old_j
        if s[i] != s[j]:
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
        G += s * (s[i] * dai) * K[ii, idx] + s * (s[j] * daj) * K[jj, idx]
        it += 1
        if record_trace:
            trace.append(-0.5 * float(np.dot(alpha, G + p)))
    return alpha, G, it, converged, np.asarray(trace, dtype=float)
