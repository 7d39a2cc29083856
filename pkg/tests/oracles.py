"""Independent reference implementations used only by the tests.

None of these call into the package; they solve the same problems by a
different (usually dense, brute-force) route.
"""

import math

import numpy as np
from scipy import integrate


def dense_hp(y, lam):
    n = len(y)
    D = np.zeros((n - 2, n))
    for i in range(n - 2):
        D[i, i:i + 3] = (1.0, -2.0, 1.0)
    return np.linalg.solve(np.eye(n) + lam * D.T @ D, np.asarray(y, dtype=float))


def normal_equations(y, X):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    b = np.linalg.solve(X.T @ X, X.T @ y)
    e = y - X @ b
    return b, e, float(e @ e)


def ols_tstats(y, X):
    b, e, rss = normal_equations(y, X)
    n, k = X.shape
    cov = rss / (n - k) * np.linalg.inv(X.T @ X)
    return b, b / np.sqrt(np.diag(cov))


def restricted_rss_f(y, X, R, q=None):
    """F statistic from restricted vs unrestricted residual sums of squares."""
    X = np.asarray(X, dtype=float)
    R = np.atleast_2d(np.asarray(R, dtype=float))
    m, k = R.shape
    q = np.zeros(m) if q is None else np.asarray(q, dtype=float)
    n = X.shape[0]
    _, _, rss_u = normal_equations(y, X)
    b0 = np.linalg.lstsq(R, q, rcond=None)[0]
    _, _, Vt = np.linalg.svd(R)
    N = Vt[m:].T  # null space of R
    _, _, rss_r = normal_equations(np.asarray(y) - X @ b0, X @ N)
    return ((rss_r - rss_u) / m) / (rss_u / (n - k))


# -- densities for numerical-integration distribution oracles ----------------------

def normal_pdf(x):
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def t_pdf(x, df):
    c = math.lgamma((df + 1) / 2) - math.lgamma(df / 2) - 0.5 * math.log(df * math.pi)
    return math.exp(c - (df + 1) / 2 * math.log1p(x * x / df))


def chi2_pdf(x, df):
    if x <= 0:
        return 0.0
    return math.exp((df / 2 - 1) * math.log(x) - x / 2 - df / 2 * math.log(2) - math.lgamma(df / 2))


def f_pdf(x, d1, d2):
    if x <= 0:
        return 0.0
    lb = math.lgamma(d1 / 2) + math.lgamma(d2 / 2) - math.lgamma((d1 + d2) / 2)
    return math.exp(0.5 * d1 * math.log(d1 / d2) + (d1 / 2 - 1) * math.log(x)
                    - (d1 + d2) / 2 * math.log1p(d1 * x / d2) - lb)


def integrated_cdf(pdf, x, lower=-np.inf):
    val, _ = integrate.quad(pdf, lower, x, epsabs=1e-13, epsrel=1e-13, limit=500)
    return val


# -- Johansen ----------------------------------------------------------------------

def johansen_eigen_oracle(Y, p):
    """Generalized eigenvalues of S10 S00^-1 S01 w.r.t. S11 via Cholesky whitening.

    ``Y`` is a ``T x k`` level array, ``p`` lagged differences, unrestricted constant.
    """
    Y = np.asarray(Y, dtype=float)
    dY = np.diff(Y, axis=0)
    T = dY.shape[0]
    rows = range(p, T)
    Z0 = np.array([dY[t] for t in rows])
    Z1 = np.array([Y[t] for t in rows])  # Y_{t-1} for the difference dY[t] = Y[t+1]-Y[t]
    W = np.array([np.concatenate([[1.0]] + [dY[t - j] for j in range(1, p + 1)]) for t in rows])
    P = W @ np.linalg.pinv(W)
    R0 = Z0 - P @ Z0
    R1 = Z1 - P @ Z1
    N = R0.shape[0]
    S00, S01, S11 = R0.T @ R0 / N, R0.T @ R1 / N, R1.T @ R1 / N
    L = np.linalg.cholesky(S11)
    Li = np.linalg.inv(L)
    M = Li @ S01.T @ np.linalg.solve(S00, S01) @ Li.T
    return np.sort(np.linalg.eigvalsh(0.5 * (M + M.T)))[::-1]


# -- SVR dual QP -------------------------------------------------------------------

def _project(v, s, C):
    """Euclidean projection onto {a : s'a = 0, 0 <= a <= C} with s in {+1, -1}."""
    pos = s > 0
    bps = np.unique(np.concatenate([v[pos], v[pos] - C, -v[~pos], C - v[~pos]]))

    def phi(mu):
        a = np.clip(v - mu[..., None] * s, 0.0, C)
        return a @ s

    vals = phi(bps)
    # phi is non-increasing and piecewise linear between breakpoints
    k = np.searchsorted(-vals, 0.0)
    if k == 0:
        mu = bps[0]
    elif k >= bps.size:
        mu = bps[-1]
    else:
        m0, m1, f0, f1 = bps[k - 1], bps[k], vals[k - 1], vals[k]
        mu = m0 if f0 == f1 else m0 + (m1 - m0) * f0 / (f0 - f1)
    return np.clip(v - mu * s, 0.0, C)


def svr_dual_oracle(K, y, C, eps, iters=6000):
    """Accelerated projected gradient on the 2n-variable SVR dual.

    Returns ``(objective, alpha)`` with the objective in maximisation form
    ``-1/2 a'Qa - p'a``.
    """
    n = len(y)
    s = np.concatenate([np.ones(n), -np.ones(n)])
    Kf = np.block([[K, K], [K, K]])
    Q = np.outer(s, s) * Kf
    p = np.concatenate([eps - y, eps + y])
    L = max(np.linalg.eigvalsh(Q).max(), 1e-12)
    a = np.zeros(2 * n)
    z = a.copy()
    t = 1.0
    for _ in range(iters):
        an = _project(z - (Q @ z + p) / L, s, C)
        tn = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        z = an + (t - 1.0) / tn * (an - a)
        if np.max(np.abs(an - a)) < 1e-15:
            a = an
            break
        a, t = an, tn
    return -(0.5 * a @ Q @ a + p @ a), a


def kernel_sum(kernel_fn, svs, weights, bias, x):
    return sum(w * kernel_fn(sv, x) for sv, w in zip(svs, weights)) + bias
