"""Seeded data-generating processes used for validation, plus a tiny
Monte Carlo driver with independent per-replication streams."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError


def rng_streams(seed: int, reps: int) -> list[np.random.Generator]:
    """One independent generator per replication (``SeedSequence.spawn``)."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(reps)]


def monte_carlo(fn, reps: int, seed: int) -> list:
    """Evaluate ``fn(rng)`` for ``reps`` independent generators."""
    return [fn(rng) for rng in rng_streams(seed, reps)]


def rejection_rate(fn, reps: int, seed: int) -> float:
    return float(np.mean([bool(x) for x in monte_carlo(fn, reps, seed)]))


# -- univariate ----------------------------------------------------------------

def random_walk(rng, T: int, sigma: float = 1.0, drift: float = 0.0) -> np.ndarray:
    return np.cumsum(drift + sigma * rng.standard_normal(T))


def ar1_trend(rng, T: int, phi: float, slope: float = 0.05, intercept: float = 0.0,
              sigma: float = 1.0, burn: int = 100) -> np.ndarray:
    """Stationary AR(1) around a linear trend."""
    e = sigma * rng.standard_normal(T + burn)
    u = np.zeros(T + burn)
    for t in range(1, T + burn):
        u[t] = phi * u[t - 1] + e[t]
    return intercept + slope * np.arange(T) + u[burn:]


# -- multivariate ----------------------------------------------------------------

def check_stable(A_list) -> None:
    """Raise when the VAR companion matrix has an eigenvalue on/outside the unit circle."""
    A_list = [np.atleast_2d(a) for a in A_list]
    k = A_list[0].shape[0]
    p = len(A_list)
    comp = np.zeros((k * p, k * p))
    comp[:k, :] = np.hstack(A_list)
    if p > 1:
        comp[k:, :-k] = np.eye(k * (p - 1))
    rho = np.max(np.abs(np.linalg.eigvals(comp)))
    if rho >= 1.0:
        raise ConfigError(f"explosive or unit-root dynamics (spectral radius {rho:.4f})")


def simulate_var(rng, A_list, T: int, c=None, sigma=None, burn: int = 200) -> np.ndarray:
    """Stationary VAR(p) ``y_t = c + sum A_i y_{t-i} + e_t``; returns ``T x k``."""
    A_list = [np.atleast_2d(np.asarray(a, dtype=float)) for a in A_list]
    check_stable(A_list)
    k = A_list[0].shape[0]
    p = len(A_list)
    c = np.zeros(k) if c is None else np.asarray(c, dtype=float)
    chol = np.eye(k) if sigma is None else np.linalg.cholesky(np.asarray(sigma, dtype=float))
    e = rng.standard_normal((T + burn, k)) @ chol.T
    y = np.zeros((T + burn, k))
    for t in range(p, T + burn):
        y[t] = c + e[t]
        for i, A in enumerate(A_list, start=1):
            y[t] += A @ y[t - i]
    return y[burn:]


def simulate_vecm(rng, alpha, beta, T: int, gamma=None, c=None, sigma=None, burn: int = 200) -> np.ndarray:
    """Levels from ``dY_t = c + alpha beta' Y_{t-1} + Gamma dY_{t-1} + e_t``."""
    alpha = np.asarray(alpha, dtype=float).reshape(-1, 1)
    beta = np.asarray(beta, dtype=float).reshape(-1, 1)
    k = alpha.shape[0]
    Pi = alpha @ beta.T
    G = np.zeros((k, k)) if gamma is None else np.asarray(gamma, dtype=float)
    # levels VAR(2): Y_t = (I + Pi + G) Y_{t-1} - G Y_{t-2}; the cointegrating
    # direction must be stable
    if not -2.0 < (beta.T @ alpha).item() < 0.0:
        raise ConfigError("beta' alpha must lie in (-2, 0) for a stable error-correction")
    c = np.zeros(k) if c is None else np.asarray(c, dtype=float)
    chol = np.eye(k) if sigma is None else np.linalg.cholesky(np.asarray(sigma, dtype=float))
    e = rng.standard_normal((T + burn, k)) @ chol.T
    Y = np.zeros((T + burn, k))
    dY_prev = np.zeros(k)
    for t in range(1, T + burn):
        d = c + Pi @ Y[t - 1] + G @ dY_prev + e[t]
        Y[t] = Y[t - 1] + d
        dY_prev = d
    return Y[burn:]


@dataclass(frozen=True)
class BpParams:
    """Structural fiscal block with output-response in reduced form.

    ``u_y = c1 eT + c2 eG + eGNP``, ``u_r = a1 u_y + a2 eG + eT``,
    ``u_g = b1 u_y + b2 eT + eG``.
    """

    a1: float = 2.0
    a2: float = 0.0
    b1: float = 0.0
    b2: float = 0.3
    c1: float = -0.1
    c2: float = 0.25
    sd_t: float = 1.0
    sd_g: float = 1.0
    sd_gnp: float = 1.0


def simulate_bp_system(rng, T: int, params: BpParams = BpParams()) -> dict:
    """Draw independent structural shocks and map them to reduced-form residuals."""
    eT = params.sd_t * rng.standard_normal(T)
    eG = params.sd_g * rng.standard_normal(T)
    eY = params.sd_gnp * rng.standard_normal(T)
    u_y = params.c1 * eT + params.c2 * eG + eY
    u_r = params.a1 * u_y + params.a2 * eG + eT
    u_g = params.b1 * u_y + params.b2 * eT + eG
    return {"u_r": u_r, "u_g": u_g, "u_y": u_y, "eps_T": eT, "eps_G": eG, "eps_GNP": eY}
