"""Synthetic quarterly data set with known fiscal shocks and multipliers.

Output growth follows the contemporaneous asymmetry equation

    dy_t = mu + phi1 dy_{t-1} + phi2 dy_{t-2} + gamma d(tb3_t) + delta d(m_t)
           + b1 SGP_t + b2 SGN_t + b3 SRP_t + b4 SRN_t + e_t,

where SGP/SGN and SRP/SRN are the signed parts of the structural spending
and revenue shocks. Log revenue is cointegrated with log output and loads
the output innovation with elasticity ``a1``; log spending is a random walk
with drift whose innovation is ``b2 eps_T + eps_G``.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass

import numpy as np

from .exceptions import ConfigError
from .io import write_fred_csv
from .series import QuarterlySeries, to_ordinal
from .simulate import check_stable

FILES = {
    "gnp": ("GNPC96", "gnp.csv"),
    "gov_spending": ("GCEC", "gcec.csv"),
    "gov_revenue": ("GRECP", "grecp.csv"),
    "tb3": ("TB3MS", "tb3ms.csv"),
    "mzm": ("MZMSL", "mzm.csv"),
    "divisia": ("MZMDIV", "divisia_mzm.csv"),
    "deflator": ("GNPDEF", "gnpdef.csv"),
}


@dataclass(frozen=True)
class SyntheticDgp:
    T: int = 180
    start_year: int = 1967
    burn: int = 100
    beta: tuple = (0.4, 0.2, -0.1, -0.12)
    phi: tuple = (0.2, 0.1)
    mu_y: float = 0.005
    gamma_tb3: float = -0.002
    delta_m: float = 0.1
    sd_t: float = 0.01
    sd_g: float = 0.01
    sd_y: float = 0.004
    a1: float = 2.0
    b2: float = 0.3
    alpha_r: float = -0.2
    mu_g: float = 0.004
    sd_tb3: float = 0.3
    mu_m: float = 0.015
    sd_m: float = 0.01
    sd_divisia: float = 0.002
    inflation: float = 0.008

    def validate(self) -> None:
        if self.T < 40:
            raise ConfigError(f"synthetic sample must have at least 40 quarters, got {self.T}")
        if len(self.beta) != 4 or len(self.phi) != 2:
            raise ConfigError("beta needs 4 entries and phi 2")
        check_stable([np.array([[self.phi[0]]]), np.array([[self.phi[1]]])])
        if not -2.0 < self.alpha_r < 0.0:
            raise ConfigError("alpha_r must lie in (-2, 0) for a stable error correction")
        for name in ("sd_t", "sd_g", "sd_y", "sd_tb3", "sd_m", "sd_divisia"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")
        if self.sd_t <= 0 or self.sd_g <= 0:
            raise ConfigError("structural fiscal shocks need positive scale")


def simulate_dataset(dgp: SyntheticDgp, seed: int) -> dict:
    """Return ``{"series": {key: QuarterlySeries}, "truth": {...}}`` in memory."""
    dgp.validate()
    rng = np.random.default_rng(seed)
    n = dgp.T + dgp.burn
    eT = dgp.sd_t * rng.standard_normal(n)
    eG = dgp.sd_g * rng.standard_normal(n)
    eY = dgp.sd_y * rng.standard_normal(n)
    d_tb3 = dgp.sd_tb3 * rng.standard_normal(n)
    d_m = dgp.mu_m + dgp.sd_m * rng.standard_normal(n)
    dev = dgp.sd_divisia * rng.standard_normal(n)
    d_p = dgp.inflation + 0.002 * rng.standard_normal(n)

    parts = np.column_stack([np.maximum(eG, 0.0), np.minimum(eG, 0.0),
                             np.maximum(eT, 0.0), np.minimum(eT, 0.0)])
    half = 1.0 / math.sqrt(2.0 * math.pi)
    centre = np.array([dgp.sd_g * half, -dgp.sd_g * half, dgp.sd_t * half, -dgp.sd_t * half])
    beta = np.asarray(dgp.beta, dtype=float)
    shock_term = parts @ beta
    u_y = (parts - centre) @ beta + eY  # output innovation

    dy = np.zeros(n)
    y = np.zeros(n)
    r = np.zeros(n)
    g = np.zeros(n)
    y[0], r[0], g[0] = math.log(3000.0), math.log(600.0), math.log(800.0)
    for t in range(1, n):
        lag1 = dy[t - 1]
        lag2 = dy[t - 2] if t >= 2 else 0.0
        dy[t] = (dgp.mu_y + dgp.phi[0] * lag1 + dgp.phi[1] * lag2 + dgp.gamma_tb3 * d_tb3[t]
                 + dgp.delta_m * d_m[t] + shock_term[t] + eY[t])
        y[t] = y[t - 1] + dy[t]
        ec = r[t - 1] - y[t - 1] - (r[0] - y[0])
        r[t] = r[t - 1] + dgp.alpha_r * ec + dgp.mu_y + dgp.a1 * u_y[t] + eT[t]
        g[t] = g[t - 1] + dgp.mu_g + dgp.b2 * eT[t] + eG[t]
    tb3 = 5.0 + np.cumsum(d_tb3)
    m = math.log(1000.0) + np.cumsum(d_m)
    m_div = m + 0.5 * dev + np.concatenate([[0.0], 0.5 * dev[:-1]])
    logp = np.cumsum(d_p)

    keep = slice(dgp.burn, n)
    first = to_ordinal(dgp.start_year, 1)
    mk = lambda v, name: QuarterlySeries.from_ordinal(first, v[keep], name)  # noqa: E731
    series = {
        "gnp": mk(np.exp(y), "GNPC96"),
        "gov_spending": mk(np.exp(g), "GCEC"),
        "gov_revenue": mk(np.exp(r + logp), "GRECP"),
        "tb3": mk(tb3, "TB3MS"),
        "mzm": mk(np.exp(m), "MZMSL"),
        "divisia": mk(np.exp(m_div), "MZMDIV"),
        "deflator": mk(100.0 * np.exp(logp), "GNPDEF"),
    }
    truth = {
        "params": asdict(dgp),
        "seed": int(seed),
        "start": [dgp.start_year, 1],
        "eps_T": eT[keep].tolist(),
        "eps_G": eG[keep].tolist(),
        "eps_GNP": eY[keep].tolist(),
        "u_y": u_y[keep].tolist(),
    }
    return {"series": series, "truth": truth}


def truth_shocks(truth: dict) -> dict:
    """True structural shocks from a truth record as QuarterlySeries."""
    first = to_ordinal(*truth["start"])
    return {k: QuarterlySeries.from_ordinal(first, np.asarray(truth[k]), k)
            for k in ("eps_T", "eps_G", "eps_GNP", "u_y")}


def generate_synthetic(out_dir, dgp: SyntheticDgp = SyntheticDgp(), seed: int = 0) -> dict:
    """Write the seven input CSVs and ``truth.json``; return the path map."""
    data = simulate_dataset(dgp, seed)
    os.makedirs(out_dir, exist_ok=True)
    paths = {}
    for key, s in data["series"].items():
        code, fname = FILES[key]
        p = os.path.join(out_dir, fname)
        write_fred_csv(s, p, code)
        paths[key] = p
    tp = os.path.join(out_dir, "truth.json")
    with open(tp, "w", encoding="utf-8") as fh:
        json.dump(data["truth"], fh, indent=1, sort_keys=True)
        fh.write("\n")
    paths["truth"] = tp
    return paths
