"""Signed shock decomposition and asymmetry regressions.

A shock is split into its positive and negative parts; output growth (or
its HP cycle) is regressed on both parts of the spending and revenue
shocks, and equality / joint-zero restrictions are tested with F tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigError, DataError
from .ols import RegressionFit, WaldResult, ols_fit, wald_test
from .series import QuarterlySeries, align, build_lag_matrix, lag_name, transform_diff

SPECS = ("contemporaneous", "four_lag")
SHOCK_NAMES = ("SGP", "SGN", "SRP", "SRN")
SOURCES = ("vecm-mzm", "vecm-divisia", "svr")


def cover_split(shock: QuarterlySeries, names: tuple[str, str] | None = None):
    """``(max(s, 0), min(s, 0))`` written as ``(|s| + s)/2`` and ``-(|s| - s)/2``."""
    v = shock.values
    a = np.abs(v)
    # "+ 0.0" turns -0.0 into 0.0
    pos = 0.5 * (a + v) + 0.0
    neg = -0.5 * (a - v) + 0.0
    pn, nn = names or (f"{shock.name}_pos", f"{shock.name}_neg")
    return shock.replace(values=pos, name=pn), shock.replace(values=neg, name=nn)


@dataclass(frozen=True)
class ShockBundle:
    SGP: QuarterlySeries
    SGN: QuarterlySeries
    SRP: QuarterlySeries
    SRN: QuarterlySeries
    source: str = "vecm-mzm"

    def __post_init__(self):
        parts = (self.SGP, self.SGN, self.SRP, self.SRN)
        if any(p.first != self.SGP.first or len(p) != len(self.SGP) for p in parts):
            raise DataError("shock bundle series must share one sample")
        if np.any(self.SGP.values < 0) or np.any(self.SRP.values < 0):
            raise DataError("positive shock parts must be non-negative")
        if np.any(self.SGN.values > 0) or np.any(self.SRN.values > 0):
            raise DataError("negative shock parts must be non-positive")

    @classmethod
    def from_shocks(cls, spending: QuarterlySeries, revenue: QuarterlySeries,
                    source: str = "vecm-mzm") -> "ShockBundle":
        spending, revenue = align([spending, revenue])
        sgp, sgn = cover_split(spending, ("SGP", "SGN"))
        srp, srn = cover_split(revenue, ("SRP", "SRN"))
        return cls(sgp, sgn, srp, srn, source)

    def series(self) -> list[QuarterlySeries]:
        return [self.SGP, self.SGN, self.SRP, self.SRN]


@dataclass(frozen=True)
class BatteryRow:
    hypothesis: str
    label: str
    F: float
    df1: int
    df2: int
    p: float


@dataclass(frozen=True)
class AsymmetryResult:
    fit: RegressionFit
    spec: str
    dep_name: str
    betas: dict
    battery: tuple = field(default=())

    def beta(self, j: int, lag: int = 0) -> float:
        return self.fit[shock_column(j, lag)]

    def with_battery(self) -> "AsymmetryResult":
        return AsymmetryResult(self.fit, self.spec, self.dep_name, self.betas,
                               tuple(hypothesis_battery(self)))

    def coefficient_rows(self) -> list[dict]:
        f = self.fit
        return [{"name": n, "coef": f.coefficients[i], "se": f.standard_errors[i],
                 "t": f.t_stats[i], "p": f.p_values[i]} for i, n in enumerate(f.names)]


def shock_column(j: int, lag: int = 0) -> str:
    """Column name of shock ``j`` (1=SGP, 2=SGN, 3=SRP, 4=SRN) at ``lag``."""
    if not 1 <= j <= 4:
        raise ConfigError(f"shock index must be 1..4, got {j}")
    return lag_name(SHOCK_NAMES[j - 1], lag)


def asymmetry_regression(dep: QuarterlySeries, tb3: QuarterlySeries, m: QuarterlySeries,
                         shocks: ShockBundle, spec: str = "contemporaneous",
                         se_kind: str = "plain") -> AsymmetryResult:
    """Regress ``dep`` on its own lags, differenced rate and money, and the
    four signed shocks.

    ``contemporaneous``: ``C, dep(-1), dep(-2), d(TB3), d(M)`` and the current
    shocks. ``four_lag``: ``C, dep(-1..-4)`` and lags ``0..4`` of ``d(TB3)``,
    ``d(M)`` and every shock. ``tb3`` and ``m`` are passed in levels.
    """
    if spec not in SPECS:
        raise ConfigError(f"spec must be one of {SPECS}, got {spec!r}")
    dtb3 = transform_diff(tb3, 1).replace(name="d(TB3)")
    dm = transform_diff(m, 1).replace(name="d(M)")
    y = dep.replace(name=dep.name)
    series = align([y, dtb3, dm] + shocks.series())
    ylags, xlags = (2, 0) if spec == "contemporaneous" else (4, 4)
    L = build_lag_matrix(series, [ylags] + [xlags] * 6, [False] + [True] * 6).with_constant("C")
    fit = ols_fit(L.target(series[0]), L, se_kind=se_kind)
    if spec == "contemporaneous":
        betas = {f"beta{j}": fit[shock_column(j)] for j in range(1, 5)}
    else:
        betas = {f"beta{j}{i}": fit[shock_column(j, i)] for j in range(1, 5) for i in range(5)}
    return AsymmetryResult(fit, spec, dep.name, betas)


def _restriction_matrix(fit: RegressionFit, rows) -> np.ndarray:
    R = np.zeros((len(rows), fit.nregressors))
    for r, row in enumerate(rows):
        for name, w in row.items():
            R[r, fit.index(name)] += w
    return R


def linear_restriction_test(result, R, q=None) -> WaldResult:
    """F test of ``R beta = q``; ``R`` is a matrix or a list of ``{column: weight}`` rows."""
    fit = result.fit if isinstance(result, AsymmetryResult) else result
    if isinstance(R, (list, tuple)) and R and isinstance(R[0], dict):
        R = _restriction_matrix(fit, R)
    return wald_test(fit, R, q)


def _battery_spec(spec: str):
    s = shock_column
    if spec == "contemporaneous":
        return [
            ("b1=b2", "SGP = SGN", [{s(1): 1, s(2): -1}]),
            ("b3=b4", "SRP = SRN", [{s(3): 1, s(4): -1}]),
            ("b1=b4", "SGP = SRN (literal)", [{s(1): 1, s(4): -1}]),
            ("b1=-b4", "SGP = -SRN (economic)", [{s(1): 1, s(4): 1}]),
            ("b2=b3", "SGN = SRP (literal)", [{s(2): 1, s(3): -1}]),
            ("b2=-b3", "SGN = -SRP (economic)", [{s(2): 1, s(3): 1}]),
        ]
    rows = [
        ("b10=b20", "SGP = SGN (lag 0)", [{s(1): 1, s(2): -1}]),
        ("b30=b40", "SRP = SRN (lag 0)", [{s(3): 1, s(4): -1}]),
        ("b10=-b40", "SGP = -SRN (lag 0)", [{s(1): 1, s(4): 1}]),
        ("b20=-b30", "SGN = -SRP (lag 0)", [{s(2): 1, s(3): 1}]),
    ]
    for j in range(1, 5):
        rows.append((f"b{j}i=0", f"{SHOCK_NAMES[j - 1]} lags 0-4 jointly zero",
                     [{s(j, i): 1} for i in range(5)]))
    for j, k in ((1, 2), (3, 4)):
        row = {s(j, i): 1.0 for i in range(5)}
        row.update({s(k, i): -1.0 for i in range(5)})
        rows.append((f"sum b{j}=sum b{k}",
                     f"sum {SHOCK_NAMES[j - 1]} = sum {SHOCK_NAMES[k - 1]}", [row]))
    return rows


def hypothesis_battery(result: AsymmetryResult) -> list[BatteryRow]:
    out = []
    for hid, label, rows in _battery_spec(result.spec):
        w = linear_restriction_test(result, rows)
        out.append(BatteryRow(hid, label, w.F, w.df1, w.df2, w.p))
    return out
