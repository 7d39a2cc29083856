"""ADF, KPSS and ERS point-optimal tests (intercept and trend) and the
three-test integration-order rule."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DataError
from .ols import ols_fit
from .series import QuarterlySeries, transform_diff
from .tables import ADF_CT, ERS_CT, KPSS_CT, CriticalValueTable

LEVELS = (0.10, 0.05, 0.01)
ERS_CBAR = -13.5


@dataclass(frozen=True)
class UnitRootReport:
    test: str
    statistic: float
    lags_used: int
    decision_at: dict
    p_value_interp: float | None
    p_bound: str = ""
    nobs: int = 0
    null: str = "I(1)"
    extra: dict = field(default_factory=dict)

    def rejects(self, level: float = 0.05) -> bool:
        return self.decision_at[level]

    @property
    def indicates_unit_root(self) -> bool:
        """Vote of this test at 5 %: True means 'non-stationary'."""
        if self.null == "I(1)":
            return not self.rejects(0.05)
        return self.rejects(0.05)


def _report(test, table: CriticalValueTable, stat, lags, nobs, null, extra=None):
    p, bound = table.pvalue(stat)
    return UnitRootReport(
        test=test, statistic=float(stat), lags_used=int(lags),
        decision_at=table.decisions(stat, LEVELS), p_value_interp=p, p_bound=bound,
        nobs=int(nobs), null=null, extra=extra or {},
    )


def default_adf_lags(nobs: int) -> int:
    return int(math.floor(12.0 * (nobs / 100.0) ** 0.25))


def _values(s):
    return s.values if isinstance(s, QuarterlySeries) else np.asarray(s, dtype=float).reshape(-1)


def _adf_design(y, lags, first):
    """Rows ``t = first..T-1`` of the ADF regression with ``lags`` lagged differences."""
    T = y.shape[0]
    dy = np.diff(y)  # dy[t-1] = y[t] - y[t-1]
    t = np.arange(first, T)
    cols = [np.ones(t.size), t.astype(float), y[t - 1]]
    cols += [dy[t - 1 - j] for j in range(1, lags + 1)]
    names = ("C", "trend", "y(-1)") + tuple(f"dy(-{j})" for j in range(1, lags + 1))
    return dy[t - 1], np.column_stack(cols), names


def _adf_regression(y, max_lags, selection):
    T = y.shape[0]
    if selection == "fixed":
        lags = max_lags
    elif selection == "aic":
        best = None
        for k in range(max_lags + 1):
            target, X, names = _adf_design(y, k, max_lags + 1)
            fit = ols_fit(target, X, names)
            aic = fit.nobs * math.log(fit.rss / fit.nobs) + 2.0 * fit.nregressors
            if best is None or aic < best[0] - 1e-12:
                best = (aic, k)
        lags = best[1]
    else:
        raise DataError(f"lag selection must be 'fixed' or 'aic', got {selection!r}")
    target, X, names = _adf_design(y, lags, lags + 1)
    if T - lags - 1 <= X.shape[1]:
        raise DataError("adf: insufficient sample for the requested lags")
    return ols_fit(target, X, names), lags


def adf_test(s, max_lags: int | None = None, selection: str = "aic") -> UnitRootReport:
    """Augmented Dickey-Fuller test with intercept and linear trend.

    The statistic is the t-ratio on the lagged level; the null of a unit
    root is rejected for statistics below the critical value. With
    ``selection="aic"`` the lag order minimises AIC over ``0..max_lags``
    on a common sample and the chosen model is re-estimated on its full
    sample.
    """
    y = _values(s)
    T = y.shape[0]
    if max_lags is None:
        max_lags = default_adf_lags(T)
    if max_lags < 0:
        raise DataError("adf: max_lags must be non-negative")
    if T < max_lags + 10:
        raise DataError(f"adf: {T} observations is too few for {max_lags} lags")
    fit, lags = _adf_regression(y, max_lags, selection)
    stat = fit.tstat("y(-1)")
    return _report("adf", ADF_CT, stat, lags, fit.nobs, "I(1)")


def kpss_bandwidth(nobs: int) -> int:
    return int(math.floor(4.0 * (nobs / 100.0) ** (2.0 / 9.0)))


def long_run_variance(e: np.ndarray, bandwidth: int) -> float:
    """Bartlett-weighted long-run variance (divisor T)."""
    T = e.shape[0]
    s2 = float(e @ e)
    for j in range(1, bandwidth + 1):
        s2 += 2.0 * (1.0 - j / (bandwidth + 1.0)) * float(e[j:] @ e[:-j])
    return s2 / T


def kpss_test(s, bandwidth="auto") -> UnitRootReport:
    """KPSS stationarity test around a linear trend.

    Rejects the stationary null for statistics above the critical value.
    """
    y = _values(s)
    T = y.shape[0]
    if T < 20:
        raise DataError(f"kpss: needs at least 20 observations, got {T}")
    L = kpss_bandwidth(T) if bandwidth == "auto" else int(bandwidth)
    if L < 0:
        raise DataError("kpss: bandwidth must be non-negative")
    X = np.column_stack([np.ones(T), np.arange(1.0, T + 1)])
    e = ols_fit(y, X, ("C", "trend")).residuals
    S = np.cumsum(e)
    lrv = long_run_variance(e, L)
    stat = float(S @ S) / (T * T * lrv)
    return _report("kpss", KPSS_CT, stat, L, T, "I(0)", {"long_run_variance": lrv})


def gls_detrend_ssr(y, alpha: float) -> float:
    """Sum of squared residuals of the quasi-differenced trend regression.

    ``y_1`` and ``z_1 = (1, 1)`` are kept, later rows are ``y_t - alpha y_{t-1}``
    and ``z_t - alpha z_{t-1}`` with ``z_t = (1, t)``.
    """
    y = np.asarray(y, dtype=float)
    T = y.shape[0]
    z = np.column_stack([np.ones(T), np.arange(1.0, T + 1)])
    yq = np.concatenate([y[:1], y[1:] - alpha * y[:-1]])
    zq = np.vstack([z[:1], z[1:] - alpha * z[:-1]])
    return ols_fit(yq, zq, ("C", "trend")).rss


def ers_test(s, max_lags: int | None = None) -> UnitRootReport:
    """Elliott-Rothenberg-Stock point-optimal ``P_T`` test (intercept and trend).

    ``P_T = (S(a) - a S(1)) / w2`` with ``a = 1 - 13.5/T`` and ``w2`` the
    autoregressive spectral estimate at frequency zero from the ADF
    regression (AIC lag choice). Rejects the unit-root null for small values.
    """
    y = _values(s)
    T = y.shape[0]
    if T < 20:
        raise DataError(f"ers: needs at least 20 observations, got {T}")
    a_bar = 1.0 + ERS_CBAR / T
    s_a = gls_detrend_ssr(y, a_bar)
    s_1 = gls_detrend_ssr(y, 1.0)
    if max_lags is None:
        max_lags = min(default_adf_lags(T), max(T - 12, 0))
    fit, lags = _adf_regression(y, max_lags, "aic")
    gsum = sum(fit[f"dy(-{j})"] for j in range(1, lags + 1))
    sigma2 = fit.rss / fit.nobs
    w2 = sigma2 / (1.0 - gsum) ** 2
    stat = (s_a - a_bar * s_1) / w2
    return _report("ers", ERS_CT, stat, lags, T, "I(1)",
                   {"ssr_alpha": s_a, "ssr_one": s_1, "alpha": a_bar, "spectral_zero": w2})


@dataclass(frozen=True)
class IntegrationResult:
    decision: str
    level: tuple
    diff: tuple


def decide_integration(level_reports, diff_reports) -> str:
    """Two-of-three rule.

    ``"I(1)"`` when most tests find a unit root in the level and most find
    the first difference stationary; ``"I(0)"`` when most find the level
    stationary; ``"inconclusive"`` otherwise.
    """
    level_votes = sum(r.indicates_unit_root for r in level_reports)
    n = len(level_reports)
    if 2 * level_votes < n:
        return "I(0)"
    if 2 * level_votes > n and diff_reports:
        diff_stationary = sum(not r.indicates_unit_root for r in diff_reports)
        if 2 * diff_stationary > len(diff_reports):
            return "I(1)"
    return "inconclusive"


def run_battery(s) -> tuple:
    return adf_test(s), kpss_test(s), ers_test(s)


def classify_integration(level: QuarterlySeries) -> IntegrationResult:
    """Run ADF, KPSS and ERS on the level and first difference and classify."""
    if not isinstance(level, QuarterlySeries):
        level = QuarterlySeries((2000, 1), level, "x")
    lv = run_battery(level)
    df = run_battery(transform_diff(level, 1))
    return IntegrationResult(decide_integration(lv, df), lv, df)
