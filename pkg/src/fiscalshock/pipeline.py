"""Configuration and stage orchestration.

Stages run in order: ingest, unit-root, cointegration, shocks, split,
asymmetry. Every stage writes into the run directory; a failure leaves the
partial outputs in place together with a ``FAILED_AT`` marker and a
manifest recording the stage and cause.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
from dataclasses import dataclass, field, fields

import numpy as np

from . import __version__
from .exceptions import ConfigError, DataError, FiscalShockError, PipelineError
from .io import load_fred_csv, write_fred_csv
from .report import emit_table
from .series import QuarterlySeries, align, deflate, from_ordinal, hp_filter, quarter_label, \
    transform_diff, transform_log
from .shocks import ShockBundle, asymmetry_regression
from .svar import BpRestrictions, identify_structural
from .svr import HyperGrid, save_model, svr_search
from .unitroot import classify_integration
from .var import johansen_test, vecm_design, vecm_estimate

STAGES = ("ingest", "unit-root", "cointegration", "shocks", "split", "asymmetry")
DATA_KEYS = ("gnp", "gov_spending", "gov_revenue", "tb3", "mzm", "divisia", "deflator")


def _floats(text) -> tuple:
    if isinstance(text, (tuple, list)):
        return tuple(float(x) for x in text)
    return tuple(float(x) for x in str(text).split(",") if x.strip())


def _words(text) -> tuple:
    if isinstance(text, (tuple, list)):
        return tuple(str(x) for x in text)
    return tuple(x.strip() for x in str(text).split(",") if x.strip())


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


@dataclass(frozen=True)
class PipelineConfig:
    gnp: str | None = None
    gov_spending: str | None = None
    gov_revenue: str | None = None
    tb3: str | None = None
    mzm: str | None = None
    divisia: str | None = None
    deflator: str | None = None
    nominal: tuple = ("gov_revenue",)
    base_year: int = 2005
    lags: int = 4
    det_case: str = "const"
    johansen_level: float = 0.05
    a1: float = 2.0
    identification: str = "ols"
    engine: str = "vecm"
    shock_mode: str = "auto"
    svr_C: tuple = (0.1, 1.0, 10.0, 100.0)
    svr_epsilon: tuple = (0.01, 0.05, 0.1)
    svr_gamma: tuple = (0.01, 0.1, 1.0)
    svr_kernels: tuple = ("linear", "rbf")
    svr_folds: int = 5
    svr_tol: float = 1e-3
    dependent: str = "growth"
    hp_lambda: float = 1600.0
    spec: str = "contemporaneous"
    money: str = "mzm"
    seed: int = 0
    run_unit_root: bool = True

    _CONVERT = {
        "nominal": _words, "svr_C": _floats, "svr_epsilon": _floats, "svr_gamma": _floats,
        "svr_kernels": _words, "run_unit_root": _bool,
    }
    _CHOICES = {
        "det_case": ("none", "const"), "identification": ("ols", "iv"), "engine": ("vecm", "svr"),
        "shock_mode": ("auto", "structural", "raw"), "dependent": ("growth", "cycle"),
        "spec": ("contemporaneous", "four_lag"), "money": ("mzm", "divisia"),
    }

    def __post_init__(self):
        for name, allowed in self._CHOICES.items():
            if getattr(self, name) not in allowed:
                raise ConfigError(f"{name} must be one of {allowed}, got {getattr(self, name)!r}")
        if self.lags < 1:
            raise ConfigError(f"lags must be at least 1, got {self.lags}")
        if self.johansen_level not in (0.10, 0.05, 0.01):
            raise ConfigError("johansen_level must be 0.10, 0.05 or 0.01")
        for k in self.nominal:
            if k not in DATA_KEYS:
                raise ConfigError(f"unknown series {k!r} in nominal")
        HyperGrid(self.svr_C, self.svr_epsilon, self.svr_gamma, self.svr_kernels, self.svr_folds, self.svr_tol)

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    @classmethod
    def coerce(cls, values: dict) -> dict:
        """Convert string values (from files or flags) to field types."""
        types = {f.name: f.type for f in fields(cls)}
        out = {}
        for k, v in values.items():
            if k not in types:
                raise ConfigError(f"unknown configuration key {k!r}")
            if v is None:
                continue
            if k in cls._CONVERT:
                v = cls._CONVERT[k](v)
            elif types[k] == "int":
                try:
                    v = int(v)
                except ValueError:
                    raise ConfigError(f"{k} must be an integer, got {v!r}") from None
            elif types[k] == "float":
                try:
                    v = float(v)
                except ValueError:
                    raise ConfigError(f"{k} must be a number, got {v!r}") from None
            else:
                v = str(v)
            out[k] = v
        return out

    @classmethod
    def from_file(cls, path, overrides: dict | None = None) -> "PipelineConfig":
        """Flat ``key = value`` file (``#`` comments); data paths are relative to the file."""
        try:
            with open(path, encoding="utf-8") as fh:
                lines = fh.read().splitlines()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
        raw = {}
        for i, line in enumerate(lines, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}: line {i}: expected key = value")
            k, v = (x.strip() for x in line.split("=", 1))
            raw[k] = v
        base = os.path.dirname(os.path.abspath(path))
        for k in DATA_KEYS:
            if raw.get(k) and not os.path.isabs(raw[k]):
                raw[k] = os.path.join(base, raw[k])
        raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls(**cls.coerce(raw))

    def replace(self, **kw) -> "PipelineConfig":
        return dataclasses.replace(self, **kw)

    def grid(self) -> HyperGrid:
        return HyperGrid(self.svr_C, self.svr_epsilon, self.svr_gamma, self.svr_kernels,
                         self.svr_folds, self.svr_tol)

    def snapshot(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        for k in DATA_KEYS:
            if d[k]:
                d[k] = os.path.basename(d[k])
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}

    @property
    def system(self) -> str:
        return "svr" if self.engine == "svr" else f"vecm-{self.money}"

    @property
    def structural(self) -> bool:
        """Identification applies by default to VECM residuals, not SVR ones."""
        if self.shock_mode == "auto":
            return self.engine == "vecm"
        return self.shock_mode == "structural"


@dataclass
class PipelineResult:
    config: PipelineConfig
    series: dict = field(default_factory=dict)
    unit_root: dict = field(default_factory=dict)
    johansen: object = None
    vecm: object = None
    structural: object = None
    svr: dict = field(default_factory=dict)
    shocks: dict = field(default_factory=dict)
    bundle: ShockBundle | None = None
    asymmetry: object = None
    sample: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    @property
    def system(self) -> str:
        return self.config.system


# -- stages -------------------------------------------------------------------------

def stage_ingest(cfg: PipelineConfig, raw: dict | None = None) -> dict:
    """Load (or accept in-memory) raw series and return the analysis series.

    Keys of the result: ``y, r, g`` (logs of real output, revenue, spending),
    ``tb3`` (level) and ``m`` (log of the chosen money aggregate).
    """
    need = ["gnp", "gov_spending", "gov_revenue", "tb3", cfg.money]
    if cfg.deflator or (raw and "deflator" in raw and cfg.nominal):
        need.append("deflator")
    if raw is None:
        raw = {}
        for k in need:
            path = getattr(cfg, k)
            if not path:
                raise ConfigError(f"no data path configured for {k}")
            raw[k] = load_fred_csv(path)
    missing = [k for k in need if k not in raw]
    if missing:
        raise DataError(f"missing input series: {', '.join(missing)}")
    data = dict(raw)
    if "deflator" in need:
        yrs = [from_ordinal(o)[0] for o in data["deflator"].ordinals()]
        if cfg.base_year not in yrs:
            raise DataError(f"base year {cfg.base_year} is outside the deflator sample")
        for k in cfg.nominal:
            data[k] = deflate(data[k], data["deflator"], cfg.base_year)
    y = transform_log(data["gnp"]).replace(name="y")
    r = transform_log(data["gov_revenue"]).replace(name="r")
    g = transform_log(data["gov_spending"]).replace(name="g")
    tb3 = data["tb3"].replace(name="tb3")
    m = transform_log(data[cfg.money]).replace(name="m")
    return dict(zip(("y", "r", "g", "tb3", "m"), align([y, r, g, tb3, m])))


def _exog(series: dict) -> list[QuarterlySeries]:
    return [transform_diff(series["tb3"]).replace(name="d(TB3)"),
            transform_diff(series["m"]).replace(name="d(M)")]


def stage_unit_root(series: dict) -> dict:
    return {k: classify_integration(series[k]) for k in ("y", "r", "g", "tb3", "m")}


def stage_cointegration(cfg: PipelineConfig, series: dict):
    endog = [series["y"], series["r"], series["g"]]
    return johansen_test(endog, cfg.lags, _exog(series), cfg.det_case, cfg.johansen_level)


def _beta(jo):
    return jo.cointegrating_vector(0) if jo.selected_rank > 0 else None


def stage_shocks_vecm(cfg: PipelineConfig, series: dict, jo):
    endog = [series["y"], series["r"], series["g"]]
    v = vecm_estimate(endog, cfg.lags, _exog(series), _beta(jo))
    u = {k: v.residual_series(k) for k in ("y", "r", "g")}
    st = None
    if cfg.structural:
        st = identify_structural(u["r"], u["g"], u["y"], BpRestrictions(a1=cfg.a1), cfg.identification)
        shocks = {"spending": st.eps_G.replace(name="eps_G"), "revenue": st.eps_T.replace(name="eps_T")}
    else:
        shocks = {"spending": u["g"], "revenue": u["r"]}
    return v, st, shocks


def stage_shocks_svr(cfg: PipelineConfig, series: dict, jo):
    endog = [series["y"], series["r"], series["g"]]
    design = vecm_design(endog, cfg.lags, _exog(series), _beta(jo))
    X = design.regressors
    grid = cfg.grid()
    fits = {}
    for k in ("y", "r", "g") if cfg.structural else ("r", "g"):
        target = QuarterlySeries.from_ordinal(X.sample_start, design.targets[k], f"d{k}")
        fits[k] = svr_search(target, X, grid)
    st = None
    if cfg.structural:
        st = identify_structural(fits["r"].residuals, fits["g"].residuals, fits["y"].residuals,
                                 BpRestrictions(a1=cfg.a1), cfg.identification)
        shocks = {"spending": st.eps_G.replace(name="eps_G"), "revenue": st.eps_T.replace(name="eps_T")}
    else:
        shocks = {"spending": fits["g"].residuals.replace(name="u_g"),
                  "revenue": fits["r"].residuals.replace(name="u_r")}
    return fits, st, shocks


def dependent_series(cfg: PipelineConfig, series: dict) -> QuarterlySeries:
    if cfg.dependent == "growth":
        return transform_diff(series["y"]).replace(name="dy")
    _, cycle = hp_filter(series["y"], cfg.hp_lambda)
    return cycle.replace(name="y_cycle")


def stage_asymmetry(cfg: PipelineConfig, series: dict, bundle: ShockBundle):
    res = asymmetry_regression(dependent_series(cfg, series), series["tb3"], series["m"], bundle, cfg.spec)
    return res.with_battery()


def analyze(cfg: PipelineConfig, raw: dict | None = None, stop_after: str = "asymmetry",
            result: PipelineResult | None = None, on_stage=None) -> PipelineResult:
    """Run the stages in memory. ``on_stage(name, result)`` is called after each."""
    if stop_after not in STAGES:
        raise ConfigError(f"stop_after must be one of {STAGES}")
    res = result or PipelineResult(cfg)
    last = STAGES.index(stop_after)
    for stage in STAGES[:last + 1]:
        try:
            _run_stage(stage, cfg, raw, res)
            if on_stage:
                on_stage(stage, res)
        except (FiscalShockError, ValueError, ArithmeticError, OSError, np.linalg.LinAlgError) as exc:
            raise PipelineError(stage, exc) from exc
    return res


def _run_stage(stage, cfg, raw, res):
    if stage == "ingest":
        res.series = stage_ingest(cfg, raw)
        y = res.series["y"]
        res.sample = {"first": quarter_label(y.first), "last": quarter_label(y.last), "nobs": len(y)}
    elif stage == "unit-root":
        if cfg.run_unit_root:
            res.unit_root = stage_unit_root(res.series)
    elif stage == "cointegration":
        res.johansen = stage_cointegration(cfg, res.series)
    elif stage == "shocks":
        if cfg.engine == "vecm":
            res.vecm, res.structural, res.shocks = stage_shocks_vecm(cfg, res.series, res.johansen)
        else:
            res.svr, res.structural, res.shocks = stage_shocks_svr(cfg, res.series, res.johansen)
    elif stage == "split":
        res.bundle = ShockBundle.from_shocks(res.shocks["spending"], res.shocks["revenue"], cfg.system)
    elif stage == "asymmetry":
        res.asymmetry = stage_asymmetry(cfg, res.series, res.bundle)


# -- persistence -------------------------------------------------------------------

def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_text(path, text):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _write_table(out_dir, art):
    _write_text(os.path.join(out_dir, "tables", f"{art.kind}.csv"), art.to_csv())
    _write_text(os.path.join(out_dir, "tables", f"{art.kind}.txt"), art.to_text())


def _persist_stage(stage, res: PipelineResult, out_dir):
    cfg = res.config
    sdir = os.path.join(out_dir, "series")
    if stage == "ingest":
        for k, s in res.series.items():
            write_fred_csv(s, os.path.join(sdir, f"{k}.csv"))
    elif stage == "unit-root" and res.unit_root:
        _write_table(out_dir, emit_table(res, "unit_root"))
    elif stage == "cointegration":
        _write_table(out_dir, emit_table(res, "cointegration"))
        jo = res.johansen
        res.diagnostics["johansen"] = {
            "selected_rank": jo.selected_rank,
            "eigenvalues": [float(x) for x in jo.eigenvalues],
            "beta": None if jo.selected_rank == 0 else [float(x) for x in jo.cointegrating_vector(0)],
            "nobs": jo.nobs,
            "notes": list(jo.notes),
        }
    elif stage == "shocks":
        if res.vecm is not None:
            for k in ("y", "r", "g"):
                write_fred_csv(res.vecm.residual_series(k), os.path.join(sdir, f"u_{k}.csv"))
            res.diagnostics["vecm"] = {"ec_dropped": res.vecm.ec_dropped,
                                       "loadings": [float(x) for x in res.vecm.loadings]}
        for k, ext in res.svr.items():
            save_model(ext.model, os.path.join(out_dir, "models", f"svr_{k}.json"))
            write_fred_csv(ext.residuals, os.path.join(sdir, f"svr_u_{k}.csv"))
        if res.svr:
            res.diagnostics["svr"] = {
                k: {"kernel": e.kernel.kind, "gamma": e.kernel.gamma, "C": e.C, "epsilon": e.epsilon,
                    "cv_mse": e.cv_mse, "removed_mean": e.removed_mean,
                    "n_support": int(e.model.dual_weights.size),
                    "iterations": e.model.diagnostics["iterations"],
                    "duality_gap": e.model.diagnostics["duality_gap"]}
                for k, e in res.svr.items()}
        if res.structural is not None:
            res.diagnostics["identification"] = {"method": res.structural.method, **res.structural.params()}
        for k, s in res.shocks.items():
            write_fred_csv(s, os.path.join(sdir, f"shock_{k}.csv"))
    elif stage == "split":
        for s in res.bundle.series():
            write_fred_csv(s, os.path.join(sdir, f"{s.name}.csv"))
    elif stage == "asymmetry":
        kind = "contemporaneous" if cfg.spec == "contemporaneous" else "lagged"
        _write_table(out_dir, emit_table(res, kind))
        res.diagnostics["asymmetry"] = {k: float(v) for k, v in res.asymmetry.betas.items()}


def _manifest(res: PipelineResult, out_dir, inputs: dict, status: str, failed_at=None, error=None) -> dict:
    outputs = {}
    for root, _dirs, files in os.walk(out_dir):
        for f in files:
            p = os.path.join(root, f)
            rel = os.path.relpath(p, out_dir).replace(os.sep, "/")
            if rel in ("manifest.json", "FAILED_AT"):
                continue
            outputs[rel] = sha256_file(p)
    m = {
        "package_version": __version__,
        "status": status,
        "config": res.config.snapshot(),
        "sample": res.sample,
        "inputs": inputs,
        "outputs": dict(sorted(outputs.items())),
        "diagnostics": res.diagnostics,
    }
    if failed_at:
        m["failed_at"] = failed_at
        m["error"] = error
    return m


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def write_manifest(out_dir, manifest: dict) -> str:
    path = os.path.join(out_dir, "manifest.json")
    _write_text(path, json.dumps(manifest, indent=2, sort_keys=True, default=_json_default) + "\n")
    return path


def run_pipeline(cfg: PipelineConfig, out_dir, stop_after: str = "asymmetry") -> PipelineResult:
    """Run the stages and persist everything under ``out_dir``.

    Raises :class:`PipelineError` after writing the failure marker and a
    manifest with ``status = "failed"``.
    """
    os.makedirs(out_dir, exist_ok=True)
    marker = os.path.join(out_dir, "FAILED_AT")
    if os.path.exists(marker):
        os.remove(marker)
    inputs = {}
    for k in DATA_KEYS:
        p = getattr(cfg, k)
        if p and os.path.isfile(p):
            inputs[k] = {"file": os.path.basename(p), "sha256": sha256_file(p)}
    res = PipelineResult(cfg)
    try:
        analyze(cfg, None, stop_after, res, on_stage=lambda st, r: _persist_stage(st, r, out_dir))
    except PipelineError as exc:
        _write_text(marker, exc.stage + "\n")
        write_manifest(out_dir, _manifest(res, out_dir, inputs, "failed", exc.stage, str(exc.cause)))
        raise
    write_manifest(out_dir, _manifest(res, out_dir, inputs, "ok"))
    return res
