"""Residual diagnostics and bootstrap intervals.

Ljung-Box statistics are recomputed by direct summation in the tests;
Shapiro-Wilk is compared against an independent implementation of the
same published algorithm (scipy's Fortran translation).
"""

import math
from types import SimpleNamespace

import numpy as np
import pytest
import scipy.stats

from mineprod.arima import ArimaSpec, fit_arima, forecast_arima, simulate_arima
from mineprod.diagnostics import (
    bootstrap_forecast,
    diagnose,
    ljung_box,
    shapiro_wilk,
)
from mineprod.errors import (
    DegenerateError,
    HorizonError,
    LagError,
    ReplicateError,
    ShortResidualError,
    SizeError,
)
from mineprod.series import TimeSeries


def direct_ljung_box(x, h):
    n = x.size
    xc = x - x.mean()
    c0 = (xc @ xc) / n
    q = 0.0
    for k in range(1, h + 1):
        rk = (xc[k:] @ xc[:-k]) / n / c0
        q += rk * rk / (n - k)
    return n * (n + 2) * q


class TestLjungBox:
    def test_statistic_by_direct_sum(self):
        rng = np.random.default_rng(40)
        x = rng.normal(size=200)
        res = ljung_box(x, h=12)
        assert res.statistic == pytest.approx(direct_ljung_box(x, 12), rel=1e-12)
        assert res.df_or_n == 12
        assert res.p_value == pytest.approx(
            scipy.stats.chi2.sf(res.statistic, 12), abs=1e-10)
        assert res.test_name == "ljung-box"

    def test_fitted_params_shift_df(self):
        rng = np.random.default_rng(41)
        x = rng.normal(size=300)
        res = ljung_box(x, h=10, fitted_params=3)
        assert res.df_or_n == 7
        assert res.p_value == pytest.approx(
            scipy.stats.chi2.sf(res.statistic, 7), abs=1e-10)

    def test_detects_autocorrelation(self):
        y = simulate_arima(phi=[0.8], n=300, seed=42)
        assert ljung_box(y.values, h=10).p_value < 1e-6

    def test_white_noise_not_rejected(self):
        y = simulate_arima(n=300, seed=43)
        assert ljung_box(y.values, h=10).p_value > 0.05

    def test_default_lag_rule(self):
        rng = np.random.default_rng(44)
        assert ljung_box(rng.normal(size=200)).df_or_n == 10
        assert ljung_box(rng.normal(size=30)).df_or_n == 6
        assert ljung_box(rng.normal(size=30), fitted_params=8).df_or_n == 1

    def test_accepts_time_series(self):
        y = simulate_arima(n=100, seed=45)
        r1 = ljung_box(y)
        r2 = ljung_box(y.values)
        assert r1.statistic == r2.statistic

    def test_lag_validation(self):
        rng = np.random.default_rng(46)
        x = rng.normal(size=50)
        with pytest.raises(LagError):
            ljung_box(x, h=50)
        with pytest.raises(LagError):
            ljung_box(x, h=0)
        with pytest.raises(LagError):
            ljung_box(x, h=3, fitted_params=3)
        with pytest.raises(DegenerateError):
            ljung_box(np.ones(50), h=5)


class TestShapiroWilk:
    @pytest.mark.parametrize("n", [10, 25, 50, 300, 1000])
    def test_matches_reference_implementation(self, n):
        rng = np.random.default_rng(n)
        x = rng.normal(size=n)
        res = shapiro_wilk(x)
        ref_w, ref_p = scipy.stats.shapiro(x)
        assert res.statistic == pytest.approx(float(ref_w), abs=5e-7)
        assert res.p_value == pytest.approx(float(ref_p), abs=5e-5)

    def test_three_point_symmetric_sample(self):
        res = shapiro_wilk([-1.0, 0.0, 1.0])
        assert res.statistic == pytest.approx(1.0, abs=1e-12)
        assert res.p_value == pytest.approx(1.0, abs=1e-5)

    def test_skewed_data_rejected(self):
        rng = np.random.default_rng(47)
        x = rng.exponential(size=50)
        assert shapiro_wilk(x).p_value < 0.005

    def test_heavy_tails_rejected(self):
        rng = np.random.default_rng(48)
        x = rng.standard_t(df=2, size=200)
        assert shapiro_wilk(x).p_value < 0.01

    def test_size_bounds(self):
        with pytest.raises(SizeError):
            shapiro_wilk([1.0, 2.0])
        with pytest.raises(SizeError):
            shapiro_wilk(np.random.default_rng(0).normal(size=5001))

    def test_constant_sample(self):
        with pytest.raises(DegenerateError):
            shapiro_wilk([3.0, 3.0, 3.0, 3.0])


class TestBootstrapForecast:
    def test_deterministic_and_seed_sensitive(self):
        y = simulate_arima(phi=[0.6], n=200, seed=50)
        fit = fit_arima(y, ArimaSpec(1, 0, 0))
        a = bootstrap_forecast(fit, 4, replicates=200, seed=9)
        b = bootstrap_forecast(fit, 4, replicates=200, seed=9)
        c = bootstrap_forecast(fit, 4, replicates=200, seed=10)
        assert np.array_equal(a.lower, b.lower)
        assert np.array_equal(a.upper, b.upper)
        assert not np.array_equal(a.lower, c.lower)

    def test_white_noise_reproduces_pool_percentiles(self):
        y = simulate_arima(n=400, seed=51)
        fit = fit_arima(y, ArimaSpec(0, 0, 0))
        boot = bootstrap_forecast(fit, 3, replicates=2000, seed=0)
        pool = fit.residuals.values - fit.residuals.values.mean()
        lo = fit.mu + np.percentile(pool, 2.5)
        hi = fit.mu + np.percentile(pool, 97.5)
        sd = pool.std()
        assert np.all(np.abs(boot.lower - lo) < 0.4 * sd)
        assert np.all(np.abs(boot.upper - hi) < 0.4 * sd)
        assert np.all(np.abs(boot.mean - fit.mu) < 0.15 * sd)

    def test_close_to_gaussian_for_normal_innovations(self):
        y = simulate_arima(phi=[0.6], n=400, seed=52)
        fit = fit_arima(y, ArimaSpec(1, 0, 0))
        gauss = forecast_arima(fit, 5)
        boot = bootstrap_forecast(fit, 5, replicates=4000, seed=1)
        halfwidth = (gauss.upper - gauss.lower) / 2.0
        assert np.all(np.abs(boot.lower - gauss.lower) <= 0.1 * halfwidth)
        assert np.all(np.abs(boot.upper - gauss.upper) <= 0.1 * halfwidth)

    def test_random_walk_paths_start_at_last_level(self):
        y = simulate_arima(d=1, n=300, seed=53)
        fit = fit_arima(y, ArimaSpec(0, 1, 0))
        boot = bootstrap_forecast(fit, 4, replicates=500, seed=2)
        sd = math.sqrt(fit.sigma2)
        assert abs(boot.mean[0] - y.values[-1]) < 0.2 * sd
        # spread grows with horizon
        widths = boot.upper - boot.lower
        assert widths[-1] > widths[0]

    def test_validation(self):
        y = simulate_arima(n=100, seed=54)
        fit = fit_arima(y, ArimaSpec(0, 0, 0))
        with pytest.raises(HorizonError):
            bootstrap_forecast(fit, 0)
        with pytest.raises(ValueError):
            bootstrap_forecast(fit, 3, level=2.0)
        with pytest.raises(ReplicateError):
            bootstrap_forecast(fit, 3, replicates=50)

    def test_short_residual_pool_rejected(self):
        y = simulate_arima(n=8, seed=55)
        fit = fit_arima(y, ArimaSpec(0, 0, 0))
        with pytest.raises(ShortResidualError):
            bootstrap_forecast(fit, 3)


class TestDiagnose:
    def test_full_report_on_arima_fit(self):
        y = simulate_arima(phi=[0.5], n=300, seed=56)
        fit = fit_arima(y, ArimaSpec(1, 0, 0))
        rep = diagnose(fit)
        assert rep.ljung_box is not None
        assert rep.shapiro_wilk is not None
        assert rep.errors == ()
        # one AR parameter fitted -> df = h - 1
        assert rep.ljung_box.df_or_n == 9
        assert rep.ljung_box_pass is True
        assert rep.shapiro_wilk_pass is True
        d = rep.to_dict()
        assert d["ljung_box_pass"] is True
        assert d["alpha"] == 0.05

    def test_errors_fill_in_for_degenerate_residuals(self):
        fake = SimpleNamespace(residuals=TimeSeries([1.0, 1.0, 1.0, 1.0]))
        rep = diagnose(fake)
        assert rep.ljung_box is None and rep.shapiro_wilk is None
        assert rep.ljung_box_pass is None
        assert len(rep.errors) == 2

    def test_alpha_validation(self):
        y = simulate_arima(n=100, seed=57)
        fit = fit_arima(y, ArimaSpec(0, 0, 0))
        with pytest.raises(ValueError):
            diagnose(fit, alpha=0.0)

    def test_misfit_flagged(self):
        # fit white noise to an AR(1): correlation survives in residuals
        y = simulate_arima(phi=[0.8], n=400, seed=58)
        fit = fit_arima(y, ArimaSpec(0, 0, 0))
        rep = diagnose(fit)
        assert rep.ljung_box_pass is False
