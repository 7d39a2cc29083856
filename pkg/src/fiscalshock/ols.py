"""Least squares via QR with plain or Newey-West covariance, and Wald F tests."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import dist
from .exceptions import DataError, RankDeficientError
from .series import LagMatrix, QuarterlySeries

COND_LIMIT = 1e12


def nw_bandwidth(nobs: int) -> int:
    return int(math.floor(4.0 * (nobs / 100.0) ** (2.0 / 9.0)))


@dataclass(frozen=True, eq=False)
class RegressionFit:
    """Output of :func:`ols_fit`.

    Coefficient-level quantities are aligned with ``names``; use
    ``fit["name"]``, :meth:`se`, :meth:`pvalue` for named access.
    """

    names: tuple[str, ...]
    coefficients: np.ndarray
    residuals: np.ndarray
    rss: float
    coef_covariance: np.ndarray
    standard_errors: np.ndarray
    t_stats: np.ndarray
    p_values: np.ndarray
    nobs: int
    nregressors: int
    design: np.ndarray = field(repr=False)
    response: np.ndarray = field(repr=False)
    sample_start: int | None = None
    se_kind: str = "plain"

    @property
    def df_resid(self) -> int:
        return self.nobs - self.nregressors

    @property
    def fitted(self) -> np.ndarray:
        return self.response - self.residuals

    @property
    def sigma2(self) -> float:
        return self.rss / self.df_resid

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"no regressor named {name!r}; have {list(self.names)}") from None

    def __getitem__(self, name: str) -> float:
        return float(self.coefficients[self.index(name)])

    def se(self, name: str) -> float:
        return float(self.standard_errors[self.index(name)])

    def tstat(self, name: str) -> float:
        return float(self.t_stats[self.index(name)])

    def pvalue(self, name: str) -> float:
        return float(self.p_values[self.index(name)])

    def params(self) -> dict[str, float]:
        return dict(zip(self.names, map(float, self.coefficients)))

    def residual_series(self, name: str = "resid") -> QuarterlySeries:
        if self.sample_start is None:
            raise DataError("fit has no dates attached")
        return QuarterlySeries.from_ordinal(self.sample_start, self.residuals, name)


def _collinear_columns(r_diag, names):
    mags = np.abs(r_diag)
    bad = [names[j] for j in np.flatnonzero(mags < 1e-6)]
    if not bad:
        bad = [names[int(np.argmin(mags))]]
    return bad


def ols_fit(y, X, names=None, se_kind: str = "plain", bandwidth: int | None = None,
            sample_start: int | None = None) -> RegressionFit:
    """Ordinary least squares.

    Parameters
    ----------
    y : array_like or QuarterlySeries
        Response. A series is windowed to the rows of ``X`` when ``X`` is a
        :class:`LagMatrix`.
    X : LagMatrix or array_like
        Regressors; include a constant column explicitly if wanted.
    se_kind : {"plain", "newey_west"}
        Covariance estimator. Newey-West uses Bartlett weights and
        ``bandwidth`` lags (default ``floor(4 (T/100)^(2/9))``).

    Raises
    ------
    RankDeficientError
        When the column-equilibrated condition number exceeds ``1e12``;
        the offending columns are named.
    """
    if isinstance(X, LagMatrix):
        names = X.columns if names is None else tuple(names)
        sample_start = X.sample_start if sample_start is None else sample_start
        if isinstance(y, QuarterlySeries):
            y = X.target(y)
        X = X.data
    elif isinstance(y, QuarterlySeries):
        if sample_start is None:
            sample_start = y.first
        y = y.values
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=float).reshape(-1)
    n, k = X.shape
    if names is None:
        names = tuple(f"x{j}" for j in range(k))
    names = tuple(names)
    if len(names) != k:
        raise DataError(f"{len(names)} names for {k} regressors")
    if y.shape[0] != n:
        raise DataError(f"response has {y.shape[0]} rows, regressors {n}")
    if n <= k:
        raise DataError(f"need more observations ({n}) than regressors ({k})")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise DataError("non-finite values in regression data")

    norms = np.sqrt((X * X).sum(axis=0))
    zero = [names[j] for j in np.flatnonzero(norms == 0)]
    if zero:
        raise RankDeficientError(f"regressor(s) identically zero: {', '.join(zero)}", zero)
    Xs = X / norms
    Q, R = np.linalg.qr(Xs)
    sv = np.linalg.svd(R, compute_uv=False)
    if sv[-1] <= 0 or sv[0] / sv[-1] > COND_LIMIT:
        bad = _collinear_columns(np.diag(R), names)
        raise RankDeficientError(
            f"regressors are collinear (condition {sv[0] / max(sv[-1], 1e-300):.3g}); "
            f"check column(s): {', '.join(bad)}", bad)
    Rinv = np.linalg.solve(R, np.eye(k))
    beta = (Rinv @ (Q.T @ y)) / norms
    resid = y - X @ beta
    rss = float(resid @ resid)
    xtx_inv = (Rinv @ Rinv.T) / np.outer(norms, norms)
    df = n - k
    if se_kind == "plain":
        cov = (rss / df) * xtx_inv
    elif se_kind == "newey_west":
        L = nw_bandwidth(n) if bandwidth is None else int(bandwidth)
        xe = X * resid[:, None]
        S = xe.T @ xe
        for lag in range(1, L + 1):
            w = 1.0 - lag / (L + 1.0)
            g = xe[lag:].T @ xe[:-lag]
            S += w * (g + g.T)
        cov = xtx_inv @ S @ xtx_inv
    else:
        raise DataError(f"unknown se_kind {se_kind!r}")
    cov = 0.5 * (cov + cov.T)
    se = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    with np.errstate(divide="ignore", invalid="ignore"):
        tstats = np.where(se > 0, beta / se, np.inf * np.sign(beta))
    tdist = dist.student_t(df)
    pvals = np.array([dist.tail_prob(tdist, t, "two") if np.isfinite(t) else 0.0 for t in tstats])
    return RegressionFit(
        names=names, coefficients=beta, residuals=resid, rss=rss, coef_covariance=cov,
        standard_errors=se, t_stats=tstats, p_values=pvals, nobs=n, nregressors=k,
        design=X, response=y, sample_start=sample_start, se_kind=se_kind,
    )


@dataclass(frozen=True)
class WaldResult:
    F: float
    df1: int
    df2: int
    p: float


def wald_test(fit: RegressionFit, R, q=None) -> WaldResult:
    """F form of the Wald test of ``R beta = q``.

    ``F = (R b - q)' [R V R']^{-1} (R b - q) / rank(R)`` with ``p`` from
    ``F(rank(R), nobs - k)``. Under plain OLS covariance this equals the
    restricted-versus-unrestricted RSS ratio statistic.
    """
    R = np.atleast_2d(np.asarray(R, dtype=float))
    m = R.shape[0]
    if R.shape[1] != fit.nregressors:
        raise DataError(f"restriction has {R.shape[1]} columns, fit has {fit.nregressors} coefficients")
    q = np.zeros(m) if q is None else np.asarray(q, dtype=float).reshape(-1)
    if q.shape[0] != m:
        raise DataError("q must have one entry per restriction row")
    if np.linalg.matrix_rank(R) < m:
        raise RankDeficientError("restriction matrix does not have full row rank")
    diff = R @ fit.coefficients - q
    W = R @ fit.coef_covariance @ R.T
    F = float(diff @ np.linalg.solve(W, diff)) / m
    F = max(F, 0.0)
    p = dist.sf(dist.fisher_f(m, fit.df_resid), F)
    return WaldResult(F, m, fit.df_resid, p)
