"""Distribution functions for p-values.

Chi-square uses the regularised incomplete gamma function, Student t and
Fisher F the regularised incomplete beta function (continued fraction,
modified Lentz); the normal uses the complementary error function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .exceptions import ConfigError, ConvergenceError

KINDS = ("normal", "student-t", "chi-square", "fisher-f")
_NDF = {"normal": 0, "student-t": 1, "chi-square": 1, "fisher-f": 2}

BETA_MAX_ITER = 500
BETA_EPS = 1e-14
_TINY = 1e-300


@dataclass(frozen=True)
class DistSpec:
    kind: str
    df: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown distribution kind {self.kind!r}")
        df = tuple(float(v) for v in self.df)
        if len(df) != _NDF[self.kind]:
            raise ConfigError(f"{self.kind} needs {_NDF[self.kind]} degrees-of-freedom parameter(s)")
        if any(not (v > 0) or math.isinf(v) for v in df):
            raise ConfigError(f"degrees of freedom must be positive and finite, got {df}")
        object.__setattr__(self, "df", df)

    @property
    def symmetric(self) -> bool:
        return self.kind in ("normal", "student-t")


def normal() -> DistSpec:
    return DistSpec("normal")


def student_t(df: float) -> DistSpec:
    return DistSpec("student-t", (df,))


def chi_square(df: float) -> DistSpec:
    return DistSpec("chi-square", (df,))


def fisher_f(df1: float, df2: float) -> DistSpec:
    return DistSpec("fisher-f", (df1, df2))


# -- special functions -------------------------------------------------------

def _gamma_series(a, x):
    # P(a, x) by its power series; good for x < a + 1
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(2000):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * 1e-16:
            break
    else:
        raise ConvergenceError(f"incomplete gamma series did not converge (a={a}, x={x})")
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_cf(a, x):
    # Q(a, x) by continued fraction; good for x >= a + 1
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, 2000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    else:
        raise ConvergenceError(f"incomplete gamma fraction did not converge (a={a}, x={x})")
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def gammainc_pq(a: float, x: float) -> tuple[float, float]:
    """Regularised lower and upper incomplete gamma ``(P(a, x), Q(a, x))``."""
    if x <= 0:
        return 0.0, 1.0
    if math.isinf(x):
        return 1.0, 0.0
    if x < a + 1.0:
        p = _gamma_series(a, x)
        return p, 1.0 - p
    q = _gamma_cf(a, x)
    return 1.0 - q, q


def _beta_cf(a, b, x):
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, BETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < BETA_EPS:
            return h
    raise ConvergenceError(f"incomplete beta fraction did not converge (a={a}, b={b}, x={x})")


def betainc_pq(a: float, b: float, x: float) -> tuple[float, float]:
    """Regularised incomplete beta ``(I_x(a, b), 1 - I_x(a, b))``.

    The continued fraction is evaluated directly for ``x < (a+1)/(a+b+2)``
    and through the symmetry ``I_x(a,b) = 1 - I_{1-x}(b,a)`` otherwise.
    """
    if x <= 0:
        return 0.0, 1.0
    if x >= 1:
        return 1.0, 0.0
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        i = front * _beta_cf(a, b, x) / a
        return i, 1.0 - i
    j = front * _beta_cf(b, a, 1.0 - x) / b
    return 1.0 - j, j


# -- distribution functions --------------------------------------------------

def _both(d: DistSpec, x: float) -> tuple[float, float]:
    """``(cdf, survival)`` evaluated without cancellation in the small one."""
    if math.isnan(x):
        raise ConfigError("cdf argument is NaN")
    if d.kind == "normal":
        lo = 0.5 * math.erfc(-x / math.sqrt(2.0))
        hi = 0.5 * math.erfc(x / math.sqrt(2.0))
        return lo, hi
    if d.kind == "student-t":
        nu = d.df[0]
        if math.isinf(x):
            return (1.0, 0.0) if x > 0 else (0.0, 1.0)
        # upper tail beyond |x|
        tail = 0.5 * betainc_pq(0.5 * nu, 0.5, nu / (nu + x * x))[0]
        return (1.0 - tail, tail) if x > 0 else (tail, 1.0 - tail)
    if x <= 0:
        return 0.0, 1.0
    if math.isinf(x):
        return 1.0, 0.0
    if d.kind == "chi-square":
        return gammainc_pq(0.5 * d.df[0], 0.5 * x)
    d1, d2 = d.df
    return betainc_pq(0.5 * d1, 0.5 * d2, d1 * x / (d1 * x + d2))


def cdf(d: DistSpec, x: float) -> float:
    return _both(d, float(x))[0]


def sf(d: DistSpec, x: float) -> float:
    """Survival function ``1 - cdf``, computed directly."""
    return _both(d, float(x))[1]


def tail_prob(d: DistSpec, stat: float, tails: str = "one") -> float:
    """Upper-tail (``"one"``) or two-sided (``"two"``) probability of ``stat``."""
    if tails == "one":
        return sf(d, stat)
    if tails == "two":
        if not d.symmetric:
            raise ConfigError(f"two-tailed probability is undefined for asymmetric {d.kind}")
        return min(1.0, 2.0 * sf(d, abs(float(stat))))
    raise ConfigError(f"tails must be 'one' or 'two', got {tails!r}")


def quantile(d: DistSpec, prob: float, tol: float = 1e-12) -> float:
    """Inverse cdf by bisection."""
    if not 0.0 < prob < 1.0:
        raise ConfigError("quantile probability must lie in (0, 1)")
    lo, hi = (-1.0, 1.0) if d.symmetric else (0.0, 1.0)
    while cdf(d, lo) > prob:
        lo *= 2.0
    while cdf(d, hi) < prob:
        hi *= 2.0
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if cdf(d, mid) < prob:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, abs(mid)):
            break
    return 0.5 * (lo + hi)
