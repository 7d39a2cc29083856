"""Seeded Monte Carlo experiments shared by module and acceptance tests.

Each experiment is cached for the pytest session so the 500-replication
loops run once even when several test files read the same rates.
"""

import time
from functools import lru_cache

import numpy as np

from fiscalshock.series import QuarterlySeries
from fiscalshock.simulate import (BpParams, ar1_trend, random_walk, rng_streams,
                                  simulate_bp_system, simulate_vecm)
from fiscalshock.svar import identify_structural
from fiscalshock.unitroot import adf_test, ers_test, kpss_test
from fiscalshock.var import johansen_test

REPS = 500
T_UR = 180
UR_SEED = 4180
JOHANSEN_SEED = 5180
BP_SEED = 378


def _qs(v, name="x"):
    return QuarterlySeries((1967, 1), v, name)


@lru_cache(maxsize=None)
def unit_root_experiment(kind: str, seed: int) -> dict:
    """Statistics and 5 % decisions of the three tests on one DGP family.

    ``kind``: ``"rw"`` (random walk), ``"ar05"`` (AR(0.5) around a trend),
    ``"ar03"`` (AR(0.3) around a trend), ``"wn"`` (white noise around a trend).
    The ``"elapsed"`` entry records the wall time of the first computation.
    """
    t0 = time.perf_counter()
    out = {"adf": [], "kpss": [], "ers": [], "kpss_stat": []}
    for rng in rng_streams(seed, REPS):
        if kind == "rw":
            y = random_walk(rng, T_UR)
        elif kind == "wn":
            y = 0.05 * np.arange(T_UR) + rng.standard_normal(T_UR)
        else:
            y = ar1_trend(rng, T_UR, {"ar05": 0.5, "ar03": 0.3}[kind])
        s = _qs(y)
        out["adf"].append(adf_test(s).rejects(0.05))
        k = kpss_test(s)
        out["kpss"].append(k.rejects(0.05))
        out["kpss_stat"].append(k.statistic)
        out["ers"].append(ers_test(s).rejects(0.05))
    res = {k: np.asarray(v) for k, v in out.items()}
    res["elapsed"] = time.perf_counter() - t0
    return res


JOHANSEN_ALPHA = (-0.2, 0.1, 0.05)
JOHANSEN_BETA = (1.0, 0.0, -1.0)
JOHANSEN_LAGS = 1


@lru_cache(maxsize=None)
def johansen_rank_experiment(kind: str, seed: int) -> tuple:
    """Selected ranks at 5 % over 500 replications, T = 180, and elapsed seconds."""
    t0 = time.perf_counter()
    ranks = []
    for rng in rng_streams(seed, REPS):
        if kind == "rank1":
            Y = simulate_vecm(rng, JOHANSEN_ALPHA, JOHANSEN_BETA, T_UR)
        else:
            Y = np.cumsum(rng.standard_normal((T_UR, 3)), axis=0)
        ser = [_qs(Y[:, i], n) for i, n in enumerate(("a", "b", "c"))]
        ranks.append(johansen_test(ser, JOHANSEN_LAGS, lm_lags=1).selected_rank)
    return np.asarray(ranks), time.perf_counter() - t0


@lru_cache(maxsize=None)
def bp_b2_zero_experiment(seed: int, T: int = 200) -> float:
    """Share of replications where b2-hat is insignificant at 5 % when b2 = 0."""
    hits = []
    for rng in rng_streams(seed, REPS):
        d = simulate_bp_system(rng, T, BpParams(b2=0.0))
        st = identify_structural(d["u_r"], d["u_g"], d["u_y"])
        hits.append(abs(st.b2 / st.se_b2) < 1.959963984540054)
    return float(np.mean(hits))


def asymmetry_sample(rng, T: int, beta=(0.4, 0.2, -0.1, -0.12), noise: float = 0.4,
                     lag: int = 0, phi=(0.0, 0.0)):
    """Growth regression data with known signed-shock multipliers.

    Shocks have unit scale; ``beta`` acts on the parts at ``lag``. Returns
    ``(dep, tb3_level, m_level, ShockBundle)``.
    """
    from fiscalshock.shocks import ShockBundle

    n = T + 6
    g = rng.standard_normal(n)
    r = rng.standard_normal(n)
    parts = np.column_stack([np.maximum(g, 0), np.minimum(g, 0), np.maximum(r, 0), np.minimum(r, 0)])
    d_tb3 = 0.3 * rng.standard_normal(n)
    d_m = 0.01 + 0.01 * rng.standard_normal(n)
    dy = np.zeros(n)
    e = noise * rng.standard_normal(n)
    drive = np.zeros(n)
    drive[lag:] = parts[:n - lag] @ np.asarray(beta, dtype=float)
    for t in range(n):
        dy[t] = (phi[0] * (dy[t - 1] if t >= 1 else 0.0) + phi[1] * (dy[t - 2] if t >= 2 else 0.0)
                 - 0.002 * d_tb3[t] + 0.1 * d_m[t] + drive[t] + e[t])
    sl = slice(6, n)
    dep = _qs(dy[sl], "dy")
    tb3 = QuarterlySeries.from_ordinal(dep.first - 1, 5.0 + np.cumsum(d_tb3[5:]), "tb3")
    m = QuarterlySeries.from_ordinal(dep.first - 1, np.cumsum(d_m[5:]), "m")
    bundle = ShockBundle.from_shocks(_qs(g[sl], "g"), _qs(r[sl], "r"))
    return dep, tb3, m, bundle
