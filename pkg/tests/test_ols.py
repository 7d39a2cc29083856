import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import qs
from fiscalshock.exceptions import DataError, RankDeficientError
from fiscalshock.ols import ols_fit, wald_test
from fiscalshock.series import build_lag_matrix
from oracles import normal_equations, ols_tstats, restricted_rss_f


def _problem(rng, n=40, k=4):
    X = np.column_stack([np.ones(n), rng.standard_normal((n, k - 1))])
    y = X @ rng.standard_normal(k) + 0.3 * rng.standard_normal(n)
    return y, X


def test_exact_fit_has_zero_residuals(rng):
    X = np.column_stack([np.ones(30), rng.standard_normal((30, 2))])
    y = X @ np.array([1.0, -2.0, 0.5])
    fit = ols_fit(y, X)
    assert np.max(np.abs(fit.residuals)) < 1e-10


def test_intercept_only_gives_mean(rng):
    y = rng.standard_normal(25)
    assert ols_fit(y, np.ones((25, 1)), ("C",))["C"] == pytest.approx(y.mean(), abs=1e-14)


def test_normal_equations_oracle(rng):
    y, X = _problem(rng)
    b, e, rss = normal_equations(y, X)
    fit = ols_fit(y, X)
    np.testing.assert_allclose(fit.coefficients, b, rtol=0, atol=1e-9)
    assert fit.rss == pytest.approx(rss, rel=1e-10)
    np.testing.assert_allclose(fit.t_stats, ols_tstats(y, X)[1], rtol=1e-9)


def test_named_access_and_dates():
    s = qs(np.sin(np.arange(30.0)), "y")
    L = build_lag_matrix([s], 2, False).with_constant()
    fit = ols_fit(s, L)
    assert fit.names == ("C", "y(-1)", "y(-2)")
    assert fit.residual_series().first == s.first + 2
    assert fit.pvalue("C") == pytest.approx(fit.p_values[0])
    with pytest.raises(KeyError):
        fit["nope"]


def test_collinearity_names_column(rng):
    x = rng.standard_normal(30)
    X = np.column_stack([np.ones(30), x, 2.0 * x])
    with pytest.raises(RankDeficientError) as info:
        ols_fit(rng.standard_normal(30), X, ("C", "x", "x2"))
    assert set(info.value.columns) & {"x", "x2"}
    with pytest.raises(RankDeficientError, match="zero: z"):
        ols_fit(rng.standard_normal(30), np.column_stack([np.ones(30), np.zeros(30)]), ("C", "z"))


def test_shape_errors(rng):
    with pytest.raises(DataError):
        ols_fit(np.ones(3), np.ones((3, 3)))
    with pytest.raises(DataError):
        ols_fit(np.ones(5), np.ones((4, 1)))
    with pytest.raises(DataError):
        ols_fit(rng.standard_normal(10), np.ones((10, 1)), se_kind="hc9")


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.lists(st.floats(0.001, 1000), min_size=3, max_size=3))
def test_column_rescaling_invariance(seed, scales):
    y, X = _problem(np.random.default_rng(seed), 40, 3)
    s = np.asarray(scales)
    f0, f1 = ols_fit(y, X), ols_fit(y, X * s)
    np.testing.assert_allclose(f1.coefficients * s, f0.coefficients, rtol=1e-9, atol=1e-12)
    np.testing.assert_allclose(f1.fitted, f0.fitted, rtol=1e-9, atol=1e-11)


def test_newey_west_matches_statsmodels(rng):
    sm = pytest.importorskip("statsmodels.api")
    y, X = _problem(rng, 120, 3)
    ref = sm.OLS(y, X).fit(cov_type="HAC", cov_kwds={"maxlags": 4, "use_correction": False})
    fit = ols_fit(y, X, se_kind="newey_west", bandwidth=4)
    np.testing.assert_allclose(fit.standard_errors, ref.bse, rtol=1e-10)


class TestWald:
    def test_estimate_restriction_gives_zero(self, rng):
        y, X = _problem(rng)
        fit = ols_fit(y, X)
        R = rng.standard_normal((2, 4))
        w = wald_test(fit, R, R @ fit.coefficients)
        assert w.F == pytest.approx(0.0, abs=1e-18) and w.p == pytest.approx(1.0)

    def test_single_zero_restriction_is_squared_t(self, rng):
        y, X = _problem(rng)
        fit = ols_fit(y, X)
        for j in range(4):
            R = np.eye(4)[j:j + 1]
            assert wald_test(fit, R).F == pytest.approx(fit.t_stats[j] ** 2, rel=1e-9)

    def test_rss_ratio_oracle(self, rng):
        y, X = _problem(rng)
        fit = ols_fit(y, X)
        R = rng.standard_normal((2, 4))
        q = rng.standard_normal(2)
        w = wald_test(fit, R, q)
        assert w.F == pytest.approx(restricted_rss_f(y, X, R, q), rel=1e-8)
        assert (w.df1, w.df2) == (2, 36)

    def test_bad_restrictions(self, rng):
        fit = ols_fit(*_problem(rng))
        with pytest.raises(DataError):
            wald_test(fit, np.ones((1, 3)))
        with pytest.raises(RankDeficientError):
            wald_test(fit, np.ones((2, 4)))
