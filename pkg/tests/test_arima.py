"""ARIMA estimation, selection, forecasting, simulation.

Likelihood values are checked against the joint Gaussian density computed
directly from the process autocovariance matrix; forecasts are checked
against their closed forms.
"""

import numpy as np
import pytest
from numpy.linalg import slogdet, solve
from scipy.linalg import toeplitz

from mineprod.arima import (
    ArimaFit,
    ArimaSpec,
    arma_loglik,
    auto_arima,
    check_roots,
    fit_arima,
    forecast_arima,
    forecast_mean_path,
    pacf_to_ar,
    psi_weights,
    select_d,
    simulate_arima,
)
from mineprod.errors import (
    DegenerateError,
    HorizonError,
    LengthError,
    ParamError,
    TooShortError,
)
from mineprod.series import TimeSeries


def mvn_logpdf(y, mean, cov):
    d = y - mean
    sign, logdet = slogdet(cov)
    assert sign > 0
    return float(-0.5 * (y.size * np.log(2 * np.pi) + logdet + d @ solve(cov, d)))


def ar1_cov(phi, sigma2, n):
    return toeplitz(sigma2 * phi ** np.arange(n) / (1.0 - phi * phi))


def ma1_cov(theta, sigma2, n):
    c = np.zeros(n)
    c[0] = sigma2 * (1.0 + theta * theta)
    c[1] = sigma2 * theta
    return toeplitz(c)


def arma11_cov(phi, theta, sigma2, n):
    c = np.zeros(n)
    c[0] = sigma2 * (1.0 + 2.0 * phi * theta + theta * theta) / (1.0 - phi * phi)
    for k in range(1, n):
        base = sigma2 * (1.0 + phi * theta) * (phi + theta) / (1.0 - phi * phi)
        c[k] = base * phi ** (k - 1)
    return toeplitz(c)


class TestLikelihood:
    def test_ar1_matches_joint_density(self):
        rng = np.random.default_rng(0)
        z = rng.normal(size=8)
        for phi, s2 in [(0.7, 1.0), (-0.4, 2.5), (0.95, 0.3)]:
            direct = mvn_logpdf(z, np.zeros(8), ar1_cov(phi, s2, 8))
            got = arma_loglik(z, [phi], [], s2)
            assert got == pytest.approx(direct, rel=1e-12, abs=1e-10)

    def test_ma1_matches_joint_density(self):
        rng = np.random.default_rng(1)
        z = rng.normal(size=12)
        for theta, s2 in [(0.5, 1.0), (-0.8, 0.7)]:
            direct = mvn_logpdf(z, np.zeros(12), ma1_cov(theta, s2, 12))
            got = arma_loglik(z, [], [theta], s2)
            assert got == pytest.approx(direct, rel=1e-12, abs=1e-10)

    def test_arma11_matches_joint_density(self):
        rng = np.random.default_rng(2)
        z = rng.normal(size=30)
        direct = mvn_logpdf(z, np.zeros(30), arma11_cov(0.6, 0.3, 1.4, 30))
        got = arma_loglik(z, [0.6], [0.3], 1.4)
        assert got == pytest.approx(direct, rel=1e-12, abs=1e-8)

    def test_fitted_loglik_matches_joint_density(self):
        y = simulate_arima(phi=[0.6], n=40, seed=3)
        fit = fit_arima(y, ArimaSpec(1, 0, 0))
        cov = ar1_cov(fit.phi[0], fit.sigma2, 40)
        direct = mvn_logpdf(y.values, np.full(40, fit.mu), cov)
        assert fit.loglik == pytest.approx(direct, rel=1e-10)

    def test_white_noise_closed_form(self):
        y = simulate_arima(n=25, seed=4)
        fit = fit_arima(y, ArimaSpec(0, 0, 0))
        z = y.values - y.values.mean()
        assert fit.mu == pytest.approx(y.values.mean())
        assert fit.sigma2 == pytest.approx(float(np.mean(z * z)))
        direct = mvn_logpdf(y.values, np.full(25, fit.mu),
                            fit.sigma2 * np.eye(25))
        assert fit.loglik == pytest.approx(direct, rel=1e-12)


class TestTransform:
    def test_pacf_identity_first_order(self):
        assert pacf_to_ar(np.array([0.6]))[0] == pytest.approx(0.6)

    def test_pacf_second_order_durbin_levinson(self):
        a, b = 0.5, -0.3
        phi = pacf_to_ar(np.array([a, b]))
        assert phi[0] == pytest.approx(a * (1.0 - b))
        assert phi[1] == pytest.approx(b)

    def test_pacf_output_always_stationary(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            pacs = rng.uniform(-0.999, 0.999, size=4)
            phi = pacf_to_ar(pacs)
            check_roots(phi, "ar")  # must not raise

    def test_check_roots_rejects_unit_root(self):
        with pytest.raises(ParamError):
            check_roots(np.array([1.0]), "ar")
        with pytest.raises(ParamError):
            check_roots(np.array([1.5]), "ar")
        with pytest.raises(ParamError):
            check_roots(np.array([-1.0]), "ma")
        check_roots(np.array([0.99]), "ar")
        check_roots(np.array([]), "ar")


class TestPsiWeights:
    def test_ar1_geometric(self):
        psi = psi_weights(np.array([0.7]), np.array([]), 6)
        assert np.allclose(psi, 0.7 ** np.arange(6))

    def test_ma1_truncates(self):
        psi = psi_weights(np.array([]), np.array([0.4]), 5)
        assert np.allclose(psi, [1.0, 0.4, 0.0, 0.0, 0.0])

    def test_arma11_recursion(self):
        phi, theta = 0.6, 0.3
        psi = psi_weights(np.array([phi]), np.array([theta]), 5)
        expected = [1.0, phi + theta]
        for _ in range(3):
            expected.append(phi * expected[-1])
        assert np.allclose(psi, expected)


class TestForecast:
    def test_ar1_closed_form(self):
        y = simulate_arima(phi=[0.7], n=300, seed=5)
        fit = fit_arima(y, ArimaSpec(1, 0, 0))
        phi, mu, s2 = fit.phi[0], fit.mu, fit.sigma2
        last = y.values[-1]
        fc = forecast_arima(fit, 6, level=0.95)
        for h in range(1, 7):
            mean_h = mu + phi ** h * (last - mu)
            var_h = s2 * float(np.sum(phi ** (2 * np.arange(h))))
            assert fc.mean[h - 1] == pytest.approx(mean_h, abs=1e-10)
            half = 1.959963984540054 * np.sqrt(var_h)
            assert fc.upper[h - 1] - fc.mean[h - 1] == pytest.approx(half, abs=1e-8)
            assert fc.mean[h - 1] - fc.lower[h - 1] == pytest.approx(half, abs=1e-8)

    def test_ma1_mean_reverts_after_one_step(self):
        y = simulate_arima(theta=[0.5], n=300, seed=6)
        fit = fit_arima(y, ArimaSpec(0, 0, 1))
        fc = forecast_arima(fit, 4)
        assert fc.mean[1] == pytest.approx(fit.mu, abs=1e-10)
        assert fc.mean[2] == pytest.approx(fit.mu, abs=1e-10)
        # variance steps up once then flattens
        w1 = fc.upper[0] - fc.lower[0]
        w2 = fc.upper[1] - fc.lower[1]
        w3 = fc.upper[2] - fc.lower[2]
        assert w2 > w1
        assert w3 == pytest.approx(w2, rel=1e-12)

    def test_random_walk_flat_mean_linear_variance(self):
        y = simulate_arima(d=1, n=200, seed=7)
        fit = fit_arima(y, ArimaSpec(0, 1, 0))
        fc = forecast_arima(fit, 5)
        assert np.allclose(fc.mean, y.values[-1], atol=1e-10)
        halves = (fc.upper - fc.lower) / 2.0
        expected = 1.959963984540054 * np.sqrt(fit.sigma2 * np.arange(1, 6))
        assert np.allclose(halves, expected, atol=1e-8)

    def test_d1_mean_path_integrates_differences(self):
        y = simulate_arima(phi=[0.5], d=1, n=250, seed=8)
        fit = fit_arima(y, ArimaSpec(1, 1, 0))
        path = forecast_mean_path(fit, 3)
        # the differenced series is zero-mean AR(1): w_{T+h} = phi^h w_T
        w_last = y.values[-1] - y.values[-2]
        diff_path = fit.phi[0] ** np.arange(1, 4) * w_last
        assert np.allclose(path, y.values[-1] + np.cumsum(diff_path), atol=1e-10)

    def test_horizon_validation(self):
        y = simulate_arima(n=50, seed=9)
        fit = fit_arima(y, ArimaSpec(0, 0, 0))
        with pytest.raises(HorizonError):
            forecast_arima(fit, 0)
        with pytest.raises(ValueError):
            forecast_arima(fit, 3, level=1.5)


class TestFit:
    def test_recovers_ar1_single_seed(self):
        y = simulate_arima(phi=[0.7], n=500, seed=0)
        fit = fit_arima(y, ArimaSpec(1, 0, 0))
        assert 0.6 <= fit.phi[0] <= 0.8
        assert fit.aic == pytest.approx(2 * 3 - 2 * fit.loglik)

    def test_recovers_ma1_sign(self):
        y = simulate_arima(theta=[-0.6], n=500, seed=1)
        fit = fit_arima(y, ArimaSpec(0, 0, 1))
        assert -0.75 <= fit.theta[0] <= -0.45

    def test_constant_term_relation(self):
        y = simulate_arima(phi=[0.5], c=2.0, n=400, seed=2)
        fit = fit_arima(y, ArimaSpec(1, 0, 0))
        assert fit.c == pytest.approx(fit.mu * (1.0 - fit.phi[0]))
        # process mean is c/(1-phi) = 4
        assert fit.mu == pytest.approx(4.0, abs=0.6)

    def test_residuals_align_with_series(self):
        y = simulate_arima(phi=[0.4], n=120, seed=3, start=(2010, 1))
        fit = fit_arima(y, ArimaSpec(1, 0, 0))
        assert fit.residuals.n == 120
        assert fit.residuals.start == (2010, 1)
        y2 = simulate_arima(phi=[0.4], d=1, n=120, seed=3, start=(2010, 1))
        fit2 = fit_arima(y2, ArimaSpec(1, 1, 0))
        assert fit2.residuals.n == 119
        assert fit2.residuals.start == (2010, 2)
        assert fit2.n_effective == 119
        assert fit2.anchors.size == 1

    def test_too_short_raises(self):
        y = TimeSeries(np.arange(5.0) + np.array([0.1, -0.2, 0.3, 0.0, 0.1]))
        with pytest.raises(LengthError):
            fit_arima(y, ArimaSpec(2, 0, 2))

    def test_constant_series_degenerate(self):
        with pytest.raises(DegenerateError):
            fit_arima(TimeSeries([4.0] * 30), ArimaSpec(1, 0, 0))

    def test_spec_bounds(self):
        with pytest.raises(ValueError):
            ArimaSpec(6, 0, 0)
        with pytest.raises(ValueError):
            ArimaSpec(0, 3, 0)
        with pytest.raises(ValueError):
            ArimaSpec(0, 0, -1)

    def test_to_dict_shape(self):
        y = simulate_arima(phi=[0.5], n=60, seed=4, unit="TMF")
        d = fit_arima(y, ArimaSpec(1, 0, 0)).to_dict()
        assert d["spec"] == {"p": 1, "d": 0, "q": 0}
        assert set(d) >= {"c", "phi", "theta", "sigma2", "loglik", "aic",
                          "n_effective", "residuals"}
        assert d["residuals"]["unit"] == "TMF"


class TestSelection:
    def test_select_d_levels(self):
        flat = simulate_arima(phi=[0.6], n=300, seed=5)
        walk = simulate_arima(d=1, n=300, seed=5)
        double = simulate_arima(d=2, n=300, seed=5)
        assert select_d(flat)[0] == 0
        assert select_d(walk)[0] == 1
        assert select_d(double)[0] == 2

    def test_auto_arima_white_noise(self):
        y = simulate_arima(n=400, seed=10)
        fit = auto_arima(y)
        assert (fit.spec.p, fit.spec.d, fit.spec.q) == (0, 0, 0)

    def test_auto_arima_ar1(self):
        y = simulate_arima(phi=[0.7], n=500, seed=0)
        fit = auto_arima(y)
        assert (fit.spec.p, fit.spec.d, fit.spec.q) == (1, 0, 0)

    def test_auto_arima_random_walk_differences(self):
        y = simulate_arima(d=1, n=400, seed=11)
        fit = auto_arima(y)
        assert fit.spec.d == 1

    def test_auto_arima_too_short(self):
        with pytest.raises(TooShortError):
            auto_arima(TimeSeries([1.0, 2.0, 1.5, 2.5, 1.0, 2.0, 1.5, 2.2, 0.9]))


class TestSimulate:
    def test_deterministic_per_seed(self):
        a = simulate_arima(phi=[0.5], theta=[0.2], n=50, seed=42)
        b = simulate_arima(phi=[0.5], theta=[0.2], n=50, seed=42)
        c = simulate_arima(phi=[0.5], theta=[0.2], n=50, seed=43)
        assert np.array_equal(a.values, b.values)
        assert not np.array_equal(a.values, c.values)

    def test_metadata_passthrough(self):
        y = simulate_arima(n=24, seed=0, frequency=1, start=(1990, 1), unit="oz")
        assert y.frequency == 1
        assert y.unit == "oz"
        assert y.end == (2013, 1)

    def test_rejects_explosive_coefficients(self):
        with pytest.raises(ParamError):
            simulate_arima(phi=[1.2], n=50, seed=0)
        with pytest.raises(ParamError):
            simulate_arima(sigma2=-1.0, n=50, seed=0)

    def test_integration_order(self):
        y0 = simulate_arima(n=100, seed=12)
        y1 = simulate_arima(n=100, seed=12, d=1)
        assert np.allclose(np.diff(y1.values), y0.values[1:], atol=1e-12)


class TestArimaFitContainer:
    def test_arrays_read_only(self):
        y = simulate_arima(phi=[0.5], n=60, seed=13)
        fit = fit_arima(y, ArimaSpec(1, 0, 0))
        with pytest.raises(ValueError):
            fit.phi[0] = 0.0

    def test_forecast_result_validation(self):
        from mineprod.arima import ForecastResult

        with pytest.raises(ValueError):
            ForecastResult(2, [1.0, 1.0], [2.0, 0.0], [3.0, 3.0], 0.95, "")
        with pytest.raises(ValueError):
            ForecastResult(3, [1.0, 1.0], [0.0, 0.0], [2.0, 2.0], 0.95, "")
