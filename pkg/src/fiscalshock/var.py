"""VAR and VECM estimation, Johansen reduced-rank tests and residual diagnostics.

Lag convention: ``p`` is the number of lagged *differences* in the
error-correction form, which is also what :func:`vecm_estimate` uses. The
matching levels VAR therefore has ``p + 1`` lags.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import dist
from .exceptions import ConfigError, DataError, NumericalError
from .ols import RegressionFit, ols_fit
from .series import LagMatrix, QuarterlySeries, align, build_lag_matrix, transform_diff
from .tables import johansen_table

LEVELS = (0.10, 0.05, 0.01)


def _as_list(x):
    if x is None:
        return []
    if isinstance(x, QuarterlySeries):
        return [x]
    return list(x)


def var_estimate(Y, p: int, exog=None, se_kind: str = "plain") -> list[RegressionFit]:
    """Equation-by-equation OLS on an intercept, ``p`` lags of every
    endogenous series and the current values of ``exog``."""
    Y = _as_list(Y)
    exog = _as_list(exog)
    if p < 1:
        raise ConfigError("VAR lag order must be at least 1")
    allser = align(Y + exog)
    Ya, Xa = allser[:len(Y)], allser[len(Y):]
    lm = build_lag_matrix(Ya + Xa, [p] * len(Ya) + [0] * len(Xa),
                          [False] * len(Ya) + [True] * len(Xa)).with_constant()
    return [ols_fit(lm.target(y), lm, se_kind=se_kind) for y in Ya]


@dataclass(frozen=True)
class VecmDesign:
    """Differenced targets and the (constant-free) regressor matrix of a VECM."""

    targets: dict
    regressors: LagMatrix
    levels_lag: np.ndarray  # Y_{t-1} on the regressor rows
    endog: tuple


def vecm_design(Y, p: int, exog=None, beta=None, ec_name: str = "ec(-1)") -> VecmDesign:
    """Build ``[ec_{t-1}, dY_{t-1..t-p}, exog_t]`` rows (no intercept).

    ``ec`` is omitted when ``beta`` is None.
    """
    Y = _as_list(Y)
    exog = _as_list(exog)
    if p < 0:
        raise ConfigError("number of lagged differences must be non-negative")
    levels = align(Y)
    dY = [transform_diff(y, 1).replace(name=f"d{y.name}") for y in levels]
    allser = align(dY + exog)
    dA, XA = allser[:len(dY)], allser[len(dY):]
    lm = build_lag_matrix(dA + XA, [p] * len(dA) + [0] * len(XA),
                          [False] * len(dA) + [True] * len(XA))
    first = lm.sample_start
    lagged = np.column_stack([y.window(first - 1, first + lm.nobs - 2).values for y in levels])
    if beta is not None:
        ec = lagged @ np.asarray(beta, dtype=float)
        lm = LagMatrix(np.column_stack([ec, lm.data]), (ec_name,) + lm.columns, first)
    targets = {y.name: lm.target(d) for y, d in zip(levels, dA)}
    return VecmDesign(targets, lm, lagged, tuple(y.name for y in levels))


# -- Johansen -------------------------------------------------------------------

@dataclass(frozen=True)
class JohansenReport:
    eigenvalues: np.ndarray
    trace_stats: np.ndarray
    maxeig_stats: np.ndarray
    trace_cv: np.ndarray      # rows r, columns 10/5/1 %
    maxeig_cv: np.ndarray
    trace_p: list             # (p, bound) pairs
    maxeig_p: list
    selected_rank: int
    eigenvectors: np.ndarray  # columns, normalised b' S11 b = 1
    nobs: int
    lags: int
    det_case: str
    level: float
    endog: tuple
    diagnostics: dict = field(default_factory=dict)
    notes: tuple = ()

    def trace_rejects(self, r: int, level: float = 0.05) -> bool:
        return bool(self.trace_stats[r] > self.trace_cv[r, LEVELS.index(level)])

    def maxeig_rejects(self, r: int, level: float = 0.05) -> bool:
        return bool(self.maxeig_stats[r] > self.maxeig_cv[r, LEVELS.index(level)])

    def cointegrating_vector(self, i: int = 0) -> np.ndarray:
        return normalize_beta(self.eigenvectors[:, i])


def normalize_beta(beta) -> np.ndarray:
    """Scale so the first non-zero coordinate equals 1."""
    beta = np.asarray(beta, dtype=float).reshape(-1)
    if beta.size == 0 or not np.any(beta):
        raise ConfigError("cointegrating vector must not be zero")
    nz = np.flatnonzero(np.abs(beta) > 1e-12 * np.abs(beta).max())
    return beta / beta[nz[0]]


def _residualize(Z, W):
    if W is None or W.shape[1] == 0:
        return Z
    coef, *_ = np.linalg.lstsq(W, Z, rcond=None)
    return Z - W @ coef


def johansen_test(Y, p: int, exog=None, det_case: str = "const", level: float = 0.05,
                  lm_lags: int = 4, notes=()) -> JohansenReport:
    """Johansen trace and maximum-eigenvalue tests.

    ``det_case="const"`` puts an unrestricted intercept in the
    differenced system (no trend in the cointegrating relation);
    ``"none"`` omits deterministic terms. Eigenvalues are the squared
    canonical correlations between ``dY_t`` and ``Y_{t-1}`` after both are
    purged of lagged differences, deterministics and ``exog``.
    ``selected_rank`` is the smallest ``r`` whose trace test is not
    rejected at ``level``.
    """
    Y = _as_list(Y)
    exog = _as_list(exog)
    k = len(Y)
    if k < 2:
        raise ConfigError("Johansen test needs at least two endogenous series")
    if det_case not in ("none", "const"):
        raise ConfigError(f"unsupported deterministic case {det_case!r}")
    if level not in LEVELS:
        raise ConfigError(f"level must be one of {LEVELS}")
    design = vecm_design(Y, p, exog, beta=None)
    N = design.regressors.nobs
    Z0 = np.column_stack([design.targets[n] for n in design.endog])
    Z1 = design.levels_lag
    W = design.regressors.data
    if det_case == "const":
        W = np.column_stack([np.ones(N), W])
    if N <= W.shape[1] + k:
        raise DataError("Johansen: too few observations for the requested lags")
    R0 = _residualize(Z0, W)
    R1 = _residualize(Z1, W)
    Q0, T0 = np.linalg.qr(R0)
    Q1, T1 = np.linalg.qr(R1)
    if (np.min(np.abs(np.diag(T0))) <= 1e-12 * np.max(np.abs(np.diag(T0)))
            or np.min(np.abs(np.diag(T1))) <= 1e-12 * np.max(np.abs(np.diag(T1)))):
        raise NumericalError("Johansen: singular moment matrix")
    U, sv, Vt = np.linalg.svd(Q0.T @ Q1)
    lam = np.clip(sv ** 2, 0.0, None)
    if lam[0] >= 1.0 - 1e-14:
        raise NumericalError("Johansen: eigenvalue numerically equal to one")
    vecs = np.sqrt(N) * np.linalg.solve(T1, Vt.T)
    logs = np.log1p(-lam)
    trace = np.array([-N * logs[r:].sum() for r in range(k)])
    maxeig = -N * logs
    trace_cv = np.empty((k, 3))
    max_cv = np.empty((k, 3))
    trace_p, max_p = [], []
    for r in range(k):
        tt = johansen_table("trace", det_case, k - r)
        mt = johansen_table("maxeig", det_case, k - r)
        trace_cv[r] = [tt.values[a] for a in LEVELS]
        max_cv[r] = [mt.values[a] for a in LEVELS]
        trace_p.append(tt.pvalue(trace[r]))
        max_p.append(mt.pvalue(maxeig[r]))
    col = LEVELS.index(level)
    rank = k
    for r in range(k):
        if not trace[r] > trace_cv[r, col]:
            rank = r
            break
    all_notes = list(notes)
    if exog:
        all_notes.append("asymptotic critical values; exogenous-adjusted distribution not applied")
    fits = var_estimate(Y, p + 1, exog)
    diag = residual_diagnostics(fits, lm_lags)
    return JohansenReport(
        eigenvalues=lam, trace_stats=trace, maxeig_stats=maxeig, trace_cv=trace_cv,
        maxeig_cv=max_cv, trace_p=trace_p, maxeig_p=max_p, selected_rank=rank,
        eigenvectors=vecs, nobs=N, lags=p, det_case=det_case, level=level,
        endog=tuple(y.name for y in Y), diagnostics=diag, notes=tuple(all_notes),
    )


# -- VECM -----------------------------------------------------------------------

@dataclass(frozen=True)
class VecmFit:
    equations: dict           # endogenous name -> RegressionFit of its difference
    beta: np.ndarray | None
    loadings: np.ndarray      # coefficient on ec(-1) per equation
    lags: int
    exog: tuple
    design: VecmDesign
    ec_dropped: bool = False

    def residual_series(self, name: str) -> QuarterlySeries:
        return self.equations[name].residual_series(f"u_{name}")


def vecm_estimate(Y, p: int, exog=None, beta=None, se_kind: str = "plain") -> VecmFit:
    """Estimate each ``dY`` equation on an intercept, ``ec_{t-1} = beta'Y_{t-1}``,
    ``p`` lagged differences and current ``exog``.

    ``beta=None`` gives a VAR in differences. A zero ``beta`` is rejected.
    When ``beta'Y`` is numerically zero on the sample the term is dropped
    and the fit equals the VAR in differences (``ec_dropped=True``).
    """
    Y = _as_list(Y)
    exog = _as_list(exog)
    b = None if beta is None else normalize_beta(beta)
    if b is not None and b.size != len(Y):
        raise ConfigError(f"beta has {b.size} entries for {len(Y)} endogenous series")
    design = vecm_design(Y, p, exog, b)
    dropped = False
    if b is not None:
        ec = design.regressors.data[:, 0]
        scale = np.abs(design.levels_lag).max() * np.abs(b).sum()
        if np.abs(ec).max() <= 1e-10 * max(scale, 1e-300):
            design = vecm_design(Y, p, exog, None)
            dropped = True
    X = design.regressors.with_constant()
    eqs = {name: ols_fit(design.targets[name], X, se_kind=se_kind) for name in design.endog}
    if b is not None and not dropped:
        loadings = np.array([eqs[n]["ec(-1)"] for n in design.endog])
    else:
        loadings = np.zeros(len(design.endog))
    return VecmFit(eqs, b, loadings, p, tuple(x.name for x in exog), design, dropped)


# -- diagnostics ----------------------------------------------------------------

def _common_design(fits):
    X = fits[0].design
    if all(f.design.shape == X.shape and np.array_equal(f.design, X) for f in fits[1:]):
        return X
    cols = []
    for f in fits:
        for j in range(f.design.shape[1]):
            c = f.design[:, j]
            if not any(np.array_equal(c, d) for d in cols):
                cols.append(c)
    return np.column_stack(cols)


def residual_diagnostics(fits, lm_lags: int = 4) -> dict:
    """Joint Jarque-Bera (Cholesky-orthogonalised) and multivariate
    Breusch-Godfrey LM tests on a system of residuals."""
    fits = list(fits)
    n = fits[0].nobs
    if any(f.nobs != n for f in fits):
        raise DataError("residual diagnostics need equal-length residual series")
    U = np.column_stack([f.residuals for f in fits])
    K = U.shape[1]
    Uc = U - U.mean(axis=0)
    Sigma = Uc.T @ Uc / n
    try:
        P = np.linalg.cholesky(Sigma)
    except np.linalg.LinAlgError:
        raise NumericalError("singular residual covariance") from None
    Wm = np.linalg.solve(P, Uc.T).T
    b1 = (Wm ** 3).mean(axis=0)
    b2 = (Wm ** 4).mean(axis=0)
    skew = n * float(b1 @ b1) / 6.0
    kurt = n * float((b2 - 3.0) @ (b2 - 3.0)) / 24.0
    jb = skew + kurt
    jb_p = dist.sf(dist.chi_square(2 * K), jb)

    X = _common_design(fits)
    lagged = np.zeros((n, K * lm_lags))
    for h in range(1, lm_lags + 1):
        lagged[h:, (h - 1) * K:h * K] = U[:-h]
    aux = np.column_stack([X, lagged])
    coef, *_ = np.linalg.lstsq(aux, U, rcond=None)
    E = U - aux @ coef
    sig_u = U.T @ U / n
    sig_e = E.T @ E / n
    lm = n * (K - float(np.trace(np.linalg.solve(sig_u, sig_e))))
    lm_df = lm_lags * K * K
    lm_p = dist.sf(dist.chi_square(lm_df), max(lm, 0.0))
    return {"jb_joint_stat": jb, "jb_joint_df": 2 * K, "jb_joint_p": jb_p,
            "lm_stat": lm, "lm_df": lm_df, "lm_p": lm_p, "lm_lags": lm_lags}
