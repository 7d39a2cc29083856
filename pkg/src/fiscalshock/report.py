"""Table models and their CSV / aligned-text renderings."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

from .exceptions import DataError
from .tables import stars

TABLE_KINDS = ("unit_root", "cointegration", "contemporaneous", "lagged")


def fmt(x, digits: int = 3) -> str:
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    s = f"{x:.{digits}f}"
    return "0." + "0" * digits if s == "-0." + "0" * digits else s


def fmt_p(p, bound: str = "") -> str:
    return f"{bound}{fmt(p)}" if p is not None else ""


@dataclass(frozen=True)
class TableArtifact:
    kind: str
    title: str
    header: tuple
    rows: tuple
    lower_header: tuple = ()
    lower_rows: tuple = ()
    notes: tuple = ()

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        w.writerows(self.rows)
        if self.lower_rows:
            w.writerow([])
            w.writerow(self.lower_header)
            w.writerows(self.lower_rows)
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [self.title, ""]
        lines += _aligned(self.header, self.rows)
        if self.lower_rows:
            lines.append("")
            lines += _aligned(self.lower_header, self.lower_rows)
        if self.notes:
            lines.append("")
            lines += [f"Note: {n}" for n in self.notes]
        return "\n".join(lines) + "\n"


def _aligned(header, rows) -> list[str]:
    cells = [list(map(str, header))] + [list(map(str, r)) for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    out = []
    for k, r in enumerate(cells):
        parts = [r[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(r[1:], widths[1:])]
        out.append("  ".join(parts).rstrip())
        if k == 0:
            out.append("  ".join("-" * w for w in widths))
    return out


def coefficient_table(kind: str, title: str, coefficients, battery=(), notes=()) -> TableArtifact:
    """``coefficients``: ``(name, coef, p)``; ``battery``: ``(label, F, df1, df2, p)``."""
    rows = tuple((n, fmt(c), stars(p), fmt(p)) for n, c, p in coefficients)
    lower = tuple((lab, fmt(F), f"({int(d1)}, {int(d2)})", fmt(p)) for lab, F, d1, d2, p in battery)
    return TableArtifact(kind, title, ("Variable", "Coefficient", "Sig.", "p-value"), rows,
                         ("F test", "F", "df", "Tail area") if lower else (), lower, tuple(notes))


def parse_coefficient_csv(text: str) -> dict:
    """Coefficient column of a rendered coefficient table, keyed by variable."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    out = {}
    for row in reader:
        if not row:
            break
        rec = dict(zip(header, row))
        out[rec["Variable"]] = float(rec["Coefficient"])
    return out


def asymmetry_table(result, kind: str, system: str = "") -> TableArtifact:
    f = result.fit
    coefs = [(n, f.coefficients[i], f.p_values[i]) for i, n in enumerate(f.names)]
    batt = [(b.label, b.F, b.df1, b.df2, b.p) for b in result.battery]
    title = ("Contemporaneous fiscal policy shocks" if kind == "contemporaneous"
             else "Current and lagged fiscal policy shocks")
    title += f" on {result.dep_name}" + (f" ({system})" if system else "")
    notes = [f"*, ** and *** denote significance at the 0.10, 0.05 and 0.01 levels; N = {f.nobs}"]
    return coefficient_table(kind, title, coefs, batt, notes)


def unit_root_table(classifications: dict) -> TableArtifact:
    rows = []
    for name, res in classifications.items():
        for form, reps in (("level", res.level), ("first difference", res.diff)):
            cells = [name, form]
            for r in reps:
                p = r.p_value_interp
                cells += [fmt(r.statistic) + _decision_stars(r), fmt_p(p, r.p_bound)]
            cells.append(res.decision if form == "level" else "")
            rows.append(tuple(cells))
    header = ("Series", "Form", "ADF", "ADF p", "KPSS", "KPSS p", "ERS", "ERS p", "Order")
    notes = ("ADF and ERS test the unit-root null, KPSS the stationarity null; all include intercept and trend",
             "p-values interpolated from tabulated critical values; '<' / '>' mark values beyond the table")
    return TableArtifact("unit_root", "Unit root tests", header, tuple(rows), notes=notes)


def _decision_stars(r) -> str:
    d = r.decision_at
    return "***" if d[0.01] else "**" if d[0.05] else "*" if d[0.10] else ""


def cointegration_table(jo) -> TableArtifact:
    rows = []
    col = 1  # 5 % column
    for r in range(len(jo.eigenvalues)):
        tp, tb = jo.trace_p[r]
        mp, mb = jo.maxeig_p[r]
        rows.append((f"r <= {r}", fmt(jo.eigenvalues[r], 4), fmt(jo.trace_stats[r]),
                     fmt(jo.trace_cv[r, col]), fmt_p(tp, tb), fmt(jo.maxeig_stats[r]),
                     fmt(jo.maxeig_cv[r, col]), fmt_p(mp, mb)))
    header = ("H0", "Eigenvalue", "Trace", "5% CV", "p", "Max-eig", "5% CV", "p")
    notes = [f"endogenous: {', '.join(jo.endog)}; lagged differences: {jo.lags}; "
             f"deterministic case: {jo.det_case}; N = {jo.nobs}",
             f"selected rank at {fmt(jo.level, 2)}: {jo.selected_rank}"]
    d = jo.diagnostics
    if d:
        notes.append(f"residual normality (joint JB) = {fmt(d['jb_joint_stat'])}, p = {fmt(d['jb_joint_p'])}; "
                     f"LM({d['lm_lags']}) = {fmt(d['lm_stat'])}, p = {fmt(d['lm_p'])}")
    notes += list(jo.notes)
    return TableArtifact("cointegration", "Johansen cointegration tests", header, tuple(rows),
                         notes=tuple(notes))


def emit_table(bundle, kind: str) -> TableArtifact:
    """Render table ``kind`` from a pipeline result (or a dict with the same keys)."""
    if kind not in TABLE_KINDS:
        raise DataError(f"unknown table kind {kind!r}; expected one of {TABLE_KINDS}")
    get = bundle.get if isinstance(bundle, dict) else (lambda k: getattr(bundle, k, None))
    if kind == "unit_root":
        obj = get("unit_root")
        if not obj:
            raise DataError("no unit-root results in this run")
        return unit_root_table(obj)
    if kind == "cointegration":
        obj = get("johansen")
        if obj is None:
            raise DataError("no cointegration results in this run")
        return cointegration_table(obj)
    res = get("asymmetry")
    want = "contemporaneous" if kind == "contemporaneous" else "four_lag"
    if res is None or res.spec != want:
        raise DataError(f"no {want} asymmetry results in this run")
    return asymmetry_table(res, kind, get("system") or "")

