"""Identification of structural fiscal shocks from a fixed output elasticity.

Revenue decisions come first (``a2 = 0``), spending does not respond to
output within the quarter (``b1 = 0``) and the output elasticity of net
revenue ``a1`` is imposed (default 2). The output responses ``c1, c2`` are
then estimated from the cyclically adjusted fiscal innovations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError, DataError, DegenerateShockError
from .ols import RegressionFit, ols_fit
from .series import QuarterlySeries


@dataclass(frozen=True)
class BpRestrictions:
    a1: float = 2.0
    b1: float = 0.0
    a2: float = 0.0
    research_mode: bool = False

    def __post_init__(self):
        if not self.research_mode and (self.b1 != 0.0 or self.a2 != 0.0):
            raise ConfigError("b1 and a2 are fixed at zero unless research_mode=True")


@dataclass(frozen=True)
class StructuralShocks:
    eps_T: QuarterlySeries
    eps_G: QuarterlySeries
    eps_GNP: QuarterlySeries
    b2: float
    c1: float
    c2: float
    se_b2: float
    se_c1: float
    se_c2: float
    method: str
    fits: dict

    def params(self) -> dict:
        return {"b2": self.b2, "c1": self.c1, "c2": self.c2,
                "se_b2": self.se_b2, "se_c1": self.se_c1, "se_c2": self.se_c2}


def _coerce(u, name):
    if isinstance(u, QuarterlySeries):
        return u
    return QuarterlySeries((2000, 1), np.asarray(u, dtype=float), name)


def _check_same(*series):
    first, n = series[0].first, len(series[0])
    if any(s.first != first or len(s) != n for s in series):
        raise DataError("residual series must cover the same quarters")


def cyclically_adjust(u_r, u_g, u_y, r: BpRestrictions = BpRestrictions()):
    """``t_ca = u_r - a1 u_y`` and ``g_ca = u_g - b1 u_y``."""
    u_r, u_g, u_y = _coerce(u_r, "u_r"), _coerce(u_g, "u_g"), _coerce(u_y, "u_y")
    _check_same(u_r, u_g, u_y)
    t_ca = u_r.replace(values=u_r.values - r.a1 * u_y.values, name="t_ca")
    g_ca = u_g.replace(values=u_g.values - r.b1 * u_y.values, name="g_ca")
    return t_ca, g_ca


def _require_variance(x, ref, label):
    scale = max(float(np.linalg.norm(ref)), 1e-300)
    if float(np.linalg.norm(x - x.mean())) <= 1e-10 * scale:
        raise DegenerateShockError(f"{label} has (numerically) zero variance")


def _iv(y, X, Z, names):
    # just-identified IV: b = (Z'X)^-1 Z'y
    ZX = Z.T @ X
    b = np.linalg.solve(ZX, Z.T @ y)
    e = y - X @ b
    n, k = X.shape
    s2 = float(e @ e) / (n - k)
    inv = np.linalg.inv(ZX)
    cov = s2 * inv @ (Z.T @ Z) @ inv.T
    return b, e, np.sqrt(np.diag(cov))


def identify_structural(u_r, u_g, u_y, r: BpRestrictions = BpRestrictions(),
                        method: str = "ols") -> StructuralShocks:
    """Recover ``eps_T``, ``eps_G``, ``eps_GNP`` from reduced-form residuals.

    1. ``eps_T = u_r - a1 u_y`` (exact with ``a2 = 0``).
    2. ``u_g`` on ``eps_T`` gives ``b2``; the residual is ``eps_G``.
    3. ``u_y`` on ``eps_T, eps_G`` gives ``c1, c2``; the residual is
       ``eps_GNP``. With ``method="iv"``, ``u_y`` is instead regressed on
       ``u_r, u_g`` using the cyclically adjusted innovations as instruments.

    Inputs are demeaned first; all shocks therefore have mean zero.
    """
    u_r, u_g, u_y = _coerce(u_r, "u_r"), _coerce(u_g, "u_g"), _coerce(u_y, "u_y")
    _check_same(u_r, u_g, u_y)
    n = len(u_r)
    if n < 30:
        raise DataError(f"identification needs at least 30 observations, got {n}")
    ur = u_r.values - u_r.values.mean()
    ug = u_g.values - u_g.values.mean()
    uy = u_y.values - u_y.values.mean()
    if r.a2 != 0.0:
        raise ConfigError("identification with a2 != 0 is not supported")
    eT = ur - r.a1 * uy
    _require_variance(eT, np.concatenate([ur, uy]), "eps_T")
    fit_g: RegressionFit = ols_fit(ug - r.b1 * uy if r.b1 else ug, eT[:, None], ("eps_T",))
    eG = fit_g.residuals
    _require_variance(eG, ug, "eps_G")
    fits = {"g": fit_g}
    if method == "ols":
        fit_y = ols_fit(uy, np.column_stack([eT, eG]), ("eps_T", "eps_G"))
        c1, c2 = fit_y["eps_T"], fit_y["eps_G"]
        se1, se2 = fit_y.se("eps_T"), fit_y.se("eps_G")
        eY = fit_y.residuals
        fits["y"] = fit_y
    elif method == "iv":
        t_ca, g_ca = eT, ug - r.b1 * uy
        (c1, c2), eY, (se1, se2) = _iv(uy, np.column_stack([ur, ug]),
                                       np.column_stack([t_ca, g_ca]), ("u_r", "u_g"))
    else:
        raise ConfigError(f"method must be 'ols' or 'iv', got {method!r}")
    _require_variance(eY, uy, "eps_GNP")
    mk = lambda v, nm: u_r.replace(values=v, name=nm)  # noqa: E731
    return StructuralShocks(
        eps_T=mk(eT, "eps_T"), eps_G=mk(eG, "eps_G"), eps_GNP=mk(eY, "eps_GNP"),
        b2=fit_g["eps_T"], c1=float(c1), c2=float(c2),
        se_b2=fit_g.se("eps_T"), se_c1=float(se1), se_c2=float(se2),
        method=method, fits=fits,
    )
