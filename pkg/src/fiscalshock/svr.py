"""Epsilon-insensitive support vector regression.

Features are z-scored with training statistics, targets are left in their
own units. The dual is solved by :func:`fiscalshock._core.smo_solve`.
"""

from __future__ import annotations

import itertools
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import _core
from .exceptions import ConfigError, ConvergenceError, DataError
from .series import LagMatrix, QuarterlySeries

KERNELS = ("linear", "rbf", "polynomial", "sigmoid")
MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "rbf"
    gamma: float = 1.0
    r_offset: float = 0.0
    degree: int = 3

    def __post_init__(self):
        if self.kind not in KERNELS:
            raise ConfigError(f"unknown kernel {self.kind!r}; expected one of {KERNELS}")
        if self.kind != "linear" and not self.gamma > 0:
            raise ConfigError(f"kernel gamma must be positive, got {self.gamma}")
        if int(self.degree) != self.degree or self.degree < 1:
            raise ConfigError(f"kernel degree must be a positive integer, got {self.degree}")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "gamma": self.gamma, "r_offset": self.r_offset, "degree": int(self.degree)}


def gram(k: KernelSpec, A, B) -> np.ndarray:
    """Kernel matrix ``K[i, j] = k(A[i], B[j])``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if A.shape[1] != B.shape[1]:
        raise DataError(f"kernel inputs have dimensions {A.shape[1]} and {B.shape[1]}")
    if k.kind == "rbf":
        d2 = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2.0 * A @ B.T
        return np.exp(-k.gamma * np.maximum(d2, 0.0))
    dot = A @ B.T
    if k.kind == "linear":
        return dot
    if k.kind == "polynomial":
        return (k.gamma * dot + k.r_offset) ** int(k.degree)
    return np.tanh(k.gamma * dot + k.r_offset)


def kernel_eval(k: KernelSpec, x1, x2) -> float:
    x1 = np.asarray(x1, dtype=float).reshape(-1)
    x2 = np.asarray(x2, dtype=float).reshape(-1)
    if x1.shape != x2.shape:
        raise DataError(f"kernel inputs have dimensions {x1.size} and {x2.size}")
    if k.kind == "rbf":
        diff = x1 - x2
        return math.exp(-k.gamma * float(diff @ diff))
    return float(gram(k, x1[None, :], x2[None, :])[0, 0])


@dataclass(frozen=True)
class TrainingSet:
    """Standardized inputs plus the statistics needed to map new points.

    Zero-variance features are dropped (``keep`` marks the survivors).
    """

    inputs: np.ndarray
    targets: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    keep: np.ndarray

    @classmethod
    def from_arrays(cls, X, y) -> "TrainingSet":
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        y = np.asarray(y, dtype=float).reshape(-1)
        if X.shape[0] != y.shape[0]:
            raise DataError(f"{X.shape[0]} inputs but {y.shape[0]} targets")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise DataError("training data contains non-finite values")
        mean = X.mean(axis=0)
        std = X.std(axis=0)
        keep = std > 1e-12 * np.maximum(1.0, np.abs(mean))
        Z = (X[:, keep] - mean[keep]) / std[keep]
        return cls(Z, y, mean[keep], std[keep], keep)

    @property
    def n(self) -> int:
        return self.targets.shape[0]

    def transform(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.keep.shape[0]:
            raise DataError(f"expected {self.keep.shape[0]} features, got {X.shape[1]}")
        return (X[:, self.keep] - self.mean) / self.std


@dataclass(frozen=True)
class SvrModel:
    support_vectors: np.ndarray  # standardized space
    dual_weights: np.ndarray
    bias: float
    kernel: KernelSpec
    C: float
    epsilon: float
    mean: np.ndarray
    std: np.ndarray
    keep: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    @property
    def n_features(self) -> int:
        return int(self.keep.shape[0])

    def standardize(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.n_features:
            raise DataError(f"model expects {self.n_features} features, got {X.shape[1]}")
        return (X[:, self.keep] - self.mean) / self.std

    def predict(self, X) -> np.ndarray:
        Z = self.standardize(X)
        if self.dual_weights.size == 0:
            return np.full(Z.shape[0], self.bias)
        return gram(self.kernel, Z, self.support_vectors) @ self.dual_weights + self.bias

    def linear_coef(self) -> tuple[np.ndarray, float]:
        """Slope and intercept in raw feature units (linear kernel only)."""
        if self.kernel.kind != "linear":
            raise ConfigError("linear_coef is only defined for the linear kernel")
        w_std = self.dual_weights @ self.support_vectors if self.dual_weights.size else np.zeros(self.mean.size)
        slope = np.zeros(self.n_features)
        slope[self.keep] = w_std / self.std
        return slope, float(self.bias - np.sum(w_std * self.mean / self.std))

    def to_dict(self) -> dict:
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "kernel": self.kernel.to_dict(),
            "C": self.C,
            "epsilon": self.epsilon,
            "bias": self.bias,
            "feature_mean": self.mean.tolist(),
            "feature_std": self.std.tolist(),
            "feature_keep": self.keep.tolist(),
            "support_vectors": self.support_vectors.tolist(),
            "dual_weights": self.dual_weights.tolist(),
            "diagnostics": {k: v for k, v in self.diagnostics.items() if k != "trace"},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SvrModel":
        if d.get("format_version") != MODEL_FORMAT_VERSION:
            raise DataError(f"unsupported model format version {d.get('format_version')!r}")
        mean = np.asarray(d["feature_mean"], dtype=float)
        sv = np.asarray(d["support_vectors"], dtype=float).reshape(-1, mean.size)
        return cls(sv, np.asarray(d["dual_weights"], dtype=float), float(d["bias"]),
                   KernelSpec(**d["kernel"]), float(d["C"]), float(d["epsilon"]),
                   mean, np.asarray(d["feature_std"], dtype=float),
                   np.asarray(d["feature_keep"], dtype=bool), dict(d.get("diagnostics", {})))


def save_model(model: SvrModel, path) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path) -> SvrModel:
    with open(path, encoding="utf-8") as fh:
        return SvrModel.from_dict(json.load(fh))


def svr_predict(m: SvrModel, x) -> float | np.ndarray:
    x = np.asarray(x, dtype=float)
    out = m.predict(x)
    return float(out[0]) if x.ndim == 1 else out


def _bias(alpha, G, s, C):
    # average of s*G over free variables, else midpoint of the feasible interval
    at_upper = alpha >= C
    at_lower = alpha <= 0.0
    free = ~(at_upper | at_lower)
    yG = s * G
    if free.any():
        rho = float(yG[free].mean())
    else:
        ub_mask = (at_upper & (s < 0)) | (at_lower & (s > 0))
        lb_mask = (at_upper & (s > 0)) | (at_lower & (s < 0))
        ub = float(yG[ub_mask].min()) if ub_mask.any() else math.inf
        lb = float(yG[lb_mask].max()) if lb_mask.any() else -math.inf
        rho = 0.5 * (ub + lb)
    return -rho


def _non_psd(K) -> bool:
    if K.shape[0] == 0:
        return False
    ev = np.linalg.eigvalsh(K)
    return bool(ev[0] < -1e-8 * max(1.0, float(np.abs(ev).max())))


def svr_train(D: TrainingSet, C: float, epsilon: float, kernel: KernelSpec,
              tol: float = 1e-3, max_iter: int | None = None,
              record_trace: bool = False) -> SvrModel:
    """Fit an epsilon-SVR by SMO on the box-and-equality constrained dual."""
    if not C > 0:
        raise ConfigError(f"C must be positive, got {C}")
    if not epsilon >= 0:
        raise ConfigError(f"epsilon must be non-negative, got {epsilon}")
    if not tol > 0:
        raise ConfigError(f"tol must be positive, got {tol}")
    n = D.n
    if n < 2:
        raise DataError(f"svr needs at least 2 samples, got {n}")
    if max_iter is None:
        max_iter = max(100_000, 100 * n)
    K = np.ascontiguousarray(gram(kernel, D.inputs, D.inputs))
    y = np.ascontiguousarray(D.targets)
    alpha, G, iters, converged, trace = _core.smo_solve(
        K, y, float(C), float(epsilon), float(tol), int(max_iter), bool(record_trace))
    alpha = np.asarray(alpha)
    G = np.asarray(G)
    s = np.concatenate([np.ones(n), -np.ones(n)])
    p = np.concatenate([epsilon - y, epsilon + y])
    w = alpha[:n] - alpha[n:]
    b = _bias(alpha, G, s, C)
    dual = -0.5 * float(alpha @ (G + p))
    f = K @ w + b
    primal = 0.5 * float(w @ K @ w) + C * float(np.maximum(np.abs(y - f) - epsilon, 0.0).sum())
    up = ((s > 0) & (alpha < C)) | ((s < 0) & (alpha > 0))
    low = ((s > 0) & (alpha > 0)) | ((s < 0) & (alpha < C))
    gmax = float((-s * G)[up].max()) if up.any() else -math.inf
    gmax2 = float((s * G)[low].max()) if low.any() else -math.inf
    diagnostics = {
        "iterations": int(iters),
        "converged": bool(converged),
        "kkt_violation": max(0.0, gmax + gmax2),
        "dual_objective": dual,
        "primal_objective": primal,
        "duality_gap": primal - dual,
        "non_psd": _non_psd(K) if kernel.kind in ("sigmoid", "polynomial") else False,
        "backend": _core.BACKEND,
    }
    if record_trace:
        diagnostics["trace"] = np.asarray(trace)
    nz = w != 0.0
    model = SvrModel(D.inputs[nz].copy(), w[nz].copy(), float(b), kernel, float(C), float(epsilon),
                     D.mean, D.std, D.keep, diagnostics)
    if not converged:
        raise ConvergenceError(
            f"SMO did not converge in {max_iter} iterations (KKT violation "
            f"{diagnostics['kkt_violation']:.3g} > {tol})",
            diagnostics={**diagnostics, "model": model})
    return model


def fit(X, y, C=1.0, epsilon=0.1, kernel: KernelSpec | None = None, **kw) -> SvrModel:
    """Convenience wrapper: standardize ``X`` then train."""
    return svr_train(TrainingSet.from_arrays(X, y), C, epsilon, kernel or KernelSpec("rbf"), **kw)


# -- hyper-parameter search and shock extraction --------------------------------

@dataclass(frozen=True)
class HyperGrid:
    C: tuple = (0.1, 1.0, 10.0, 100.0)
    epsilon_scale: tuple = (0.01, 0.05, 0.1)  # multiples of std(target)
    gamma_scale: tuple = (0.01, 0.1, 1.0)  # divided by the number of features
    kernels: tuple = ("linear", "rbf")
    folds: int = 5
    tol: float = 1e-3

    def __post_init__(self):
        if self.folds < 2:
            raise ConfigError("cross-validation needs at least 2 folds")
        for k in self.kernels:
            if k not in KERNELS:
                raise ConfigError(f"unknown kernel {k!r} in hyper-parameter grid")
        if not (self.C and self.epsilon_scale and self.kernels):
            raise ConfigError("hyper-parameter grid is empty")

    def candidates(self, target_std: float, n_features: int):
        m = max(n_features, 1)
        for kind in self.kernels:
            gammas = (1.0,) if kind == "linear" else tuple(g / m for g in self.gamma_scale)
            for C, es, g in itertools.product(self.C, self.epsilon_scale, gammas):
                yield KernelSpec(kind, gamma=g), float(C), float(es * target_std)


def chronological_folds(n: int, k: int) -> list[np.ndarray]:
    """Contiguous validation blocks covering ``0..n-1`` in order."""
    if n < 2 * k:
        raise DataError(f"{n} observations is too few for {k}-fold cross-validation")
    return [np.asarray(b) for b in np.array_split(np.arange(n), k)]


@dataclass(frozen=True)
class SvrExtraction:
    residuals: QuarterlySeries
    model: SvrModel
    kernel: KernelSpec
    C: float
    epsilon: float
    cv_mse: float
    removed_mean: float
    cv_table: tuple = ()


def _as_xy(target, regressors):
    if isinstance(regressors, LagMatrix):
        X = regressors.data
        names = regressors.columns
        if isinstance(target, QuarterlySeries):
            y = regressors.target(target)
            start = regressors.sample_start
            name = target.name
        else:
            y = np.asarray(target, dtype=float).reshape(-1)
            start, name = regressors.sample_start, "target"
    else:
        X = np.asarray(regressors, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        names = tuple(f"x{i}" for i in range(X.shape[1]))
        if isinstance(target, QuarterlySeries):
            y, start, name = target.values, target.first, target.name
        else:
            y, start, name = np.asarray(target, dtype=float).reshape(-1), None, "target"
    if X.shape[0] != y.shape[0]:
        raise DataError(f"target has {y.shape[0]} observations, regressors {X.shape[0]}")
    return X, y, names, start, name


def svr_search(target, regressors, grid: HyperGrid = HyperGrid()) -> SvrExtraction:
    """Grid search by chronological block CV, refit on the full sample and
    return demeaned in-sample residuals with the chosen model."""
    X, y, _names, start, name = _as_xy(target, regressors)
    n = y.shape[0]
    folds = chronological_folds(n, grid.folds)
    sd = float(np.std(y))
    rows = []
    best = None
    for kernel, C, eps in grid.candidates(sd, X.shape[1]):
        errs = []
        for val in folds:
            train = np.setdiff1d(np.arange(n), val, assume_unique=True)
            try:
                m = svr_train(TrainingSet.from_arrays(X[train], y[train]), C, eps, kernel, tol=grid.tol)
            except ConvergenceError:
                errs = None
                break
            errs.append(float(np.mean((y[val] - m.predict(X[val])) ** 2)))
        mse = math.inf if errs is None else float(np.mean(errs))
        rows.append({"kernel": kernel.kind, "gamma": kernel.gamma, "C": C, "epsilon": eps, "cv_mse": mse})
        if best is None or mse < best[0]:
            best = (mse, kernel, C, eps)
    if best is None or not math.isfinite(best[0]):
        raise ConvergenceError("no hyper-parameter combination converged", diagnostics={"cv_table": rows})
    mse, kernel, C, eps = best
    model = svr_train(TrainingSet.from_arrays(X, y), C, eps, kernel, tol=grid.tol)
    resid = y - model.predict(X)
    mu = float(resid.mean())
    resid = resid - mu
    start = 0 if start is None else start
    series = QuarterlySeries.from_ordinal(start, resid, f"svr_{name}")
    return SvrExtraction(series, model, kernel, C, eps, mse, mu, tuple(rows))


def extract_svr_shocks(target, regressors, grid: HyperGrid = HyperGrid()) -> QuarterlySeries:
    """Demeaned SVR residual series of ``target`` given ``regressors``."""
    return svr_search(target, regressors, grid).residuals
