"""Residual diagnostics and bootstrap prediction intervals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .arima import ArimaFit
from .errors import (
    DegenerateError,
    HorizonError,
    LagError,
    MineprodError,
    ReplicateError,
    ShortResidualError,
    SizeError,
)
from .series import TimeSeries
from .special import chi2_cdf, normal_cdf, normal_quantile


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    df_or_n: int
    test_name: str

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p-value out of range: {self.p_value}")

    def to_dict(self) -> dict:
        return {
            "statistic": float(self.statistic),
            "p_value": float(self.p_value),
            "df_or_n": int(self.df_or_n),
            "test_name": self.test_name,
        }


def _as_values(sample) -> np.ndarray:
    if isinstance(sample, TimeSeries):
        return sample.values
    return np.asarray(sample, dtype=float)


def ljung_box(residuals, h: Optional[int] = None, fitted_params: int = 0) -> TestResult:
    """Ljung-Box portmanteau test for residual autocorrelation.

    Degrees of freedom are h - fitted_params. The default h is min(10, n/5),
    raised when necessary so at least one degree of freedom remains.
    """
    x = _as_values(residuals)
    n = x.size
    if fitted_params < 0:
        raise ValueError("fitted_params must be nonnegative")
    if h is None:
        h = max(min(10, n // 5), fitted_params + 1)
    if not isinstance(h, int) or h < 1:
        raise LagError(f"lag count must be a positive integer, got {h}")
    if h >= n:
        raise LagError(f"lag count {h} must be below the sample size {n}")
    if h <= fitted_params:
        raise LagError(f"need h > fitted_params, got h={h}, fitted_params={fitted_params}")
    xc = x - x.mean()
    c0 = float(np.dot(xc, xc)) / n
    if c0 <= 0.0:
        raise DegenerateError("Ljung-Box is undefined for a constant sample")
    q = 0.0
    for k in range(1, h + 1):
        rk = float(np.dot(xc[k:], xc[:-k])) / n / c0
        q += rk * rk / (n - k)
    q *= n * (n + 2.0)
    df = h - fitted_params
    p = 1.0 - chi2_cdf(q, df)
    return TestResult(q, min(max(p, 0.0), 1.0), df, "ljung-box")


# Royston's approximation: polynomial corrections to the Blom coefficients
# and the distribution of log(1 - W). Coefficient order is lowest degree first.
_SW_C1 = (0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056)
_SW_C2 = (0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633)
_SW_C3 = (0.544, -0.39978, 0.025054, -6.714e-4)
_SW_C4 = (1.3822, -0.77857, 0.062767, -2.0322e-3)
_SW_C5 = (-1.5861, -0.31082, -0.083751, 3.8915e-3)
_SW_C6 = (-0.4803, -0.082676, 3.0302e-3)
_SW_G = (-2.273, 0.459)


def _poly(coeffs, x: float) -> float:
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def shapiro_wilk(sample) -> TestResult:
    """Shapiro-Wilk normality test for 3 <= n <= 5000.

    W is the squared correlation between the order statistics and their
    expected normal scores; small W (and small p) indicates departure from
    normality. Samples where every spacing is zero are degenerate.
    """
    x = np.sort(_as_values(sample))
    n = x.size
    if n < 3 or n > 5000:
        raise SizeError(f"sample size must be in 3..5000, got {n}")
    rng_x = float(x[-1] - x[0])
    if rng_x <= 0.0:
        raise DegenerateError("all sample values are equal")

    m = np.array([normal_quantile((i - 0.375) / (n + 0.25)) for i in range(1, n + 1)])
    ssq = float(np.dot(m, m))
    if n == 3:
        a = np.array([-math.sqrt(0.5), 0.0, math.sqrt(0.5)])
    else:
        rsn = 1.0 / math.sqrt(n)
        a_n = m[-1] / math.sqrt(ssq) + _poly(_SW_C1, rsn)
        if n <= 5:
            phi = (ssq - 2.0 * m[-1] ** 2) / (1.0 - 2.0 * a_n ** 2)
            a = m / math.sqrt(phi)
            a[-1], a[0] = a_n, -a_n
        else:
            a_n1 = m[-2] / math.sqrt(ssq) + _poly(_SW_C2, rsn)
            phi = (ssq - 2.0 * m[-1] ** 2 - 2.0 * m[-2] ** 2) / (
                1.0 - 2.0 * a_n ** 2 - 2.0 * a_n1 ** 2)
            a = m / math.sqrt(phi)
            a[-1], a[0] = a_n, -a_n
            a[-2], a[1] = a_n1, -a_n1

    xc = x - x.mean()
    denom = float(np.dot(xc, xc))
    w = float(np.dot(a, x)) ** 2 / denom
    w = min(w, 1.0)

    if n == 3:
        p = 1.909859 * (math.asin(math.sqrt(w)) - 1.047198)
        p = min(max(p, 0.0), 1.0)
        return TestResult(w, p, n, "shapiro-wilk")
    if w >= 1.0:
        return TestResult(1.0, 1.0, n, "shapiro-wilk")
    y = math.log(1.0 - w)
    if n <= 11:
        gamma = _poly(_SW_G, float(n))
        if y >= gamma:
            return TestResult(w, 0.0, n, "shapiro-wilk")
        y = -math.log(gamma - y)
        mu = _poly(_SW_C3, float(n))
        sigma = math.exp(_poly(_SW_C4, float(n)))
    else:
        ln = math.log(n)
        mu = _poly(_SW_C5, ln)
        sigma = math.exp(_poly(_SW_C6, ln))
    p = 1.0 - normal_cdf((y - mu) / sigma)
    return TestResult(w, min(max(p, 0.0), 1.0), n, "shapiro-wilk")


@dataclass(frozen=True)
class BootstrapForecast:
    """Percentile intervals from residual-resampled forecast paths."""

    horizon: int
    mean: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    level: float
    replicates: int
    seed: int

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if not (mean.size == lower.size == upper.size == self.horizon):
            raise ValueError("bootstrap arrays must all have length == horizon")
        if np.any(lower > upper):
            raise ValueError("lower bound above upper bound")
        for name, arr in (("mean", mean), ("lower", lower), ("upper", upper)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def to_dict(self) -> dict:
        return {
            "horizon": int(self.horizon),
            "mean": [float(v) for v in self.mean],
            "lower": [float(v) for v in self.lower],
            "upper": [float(v) for v in self.upper],
            "level": float(self.level),
            "replicates": int(self.replicates),
            "seed": int(self.seed),
        }


def bootstrap_forecast(fit: ArimaFit, horizon: int, level: float = 0.95,
                       replicates: int = 500, seed: int = 0) -> BootstrapForecast:
    """Forecast bands from resampled residual paths.

    Each replicate draws its innovations from a counter-based substream keyed
    by (seed, replicate index), so results do not depend on evaluation order
    and stay identical run to run.
    """
    if not isinstance(horizon, int) or horizon < 1:
        raise HorizonError(f"horizon must be a positive integer, got {horizon}")
    if not 0.0 < level < 1.0:
        raise ValueError(f"confidence level must lie in (0, 1), got {level}")
    if replicates < 100:
        raise ReplicateError(f"need at least 100 replicates, got {replicates}")
    pool = fit.residuals.values
    if pool.size < 10:
        raise ShortResidualError(f"need at least 10 residuals, got {pool.size}")
    pool = pool - pool.mean()

    p, d, q = fit.spec.p, fit.spec.d, fit.spec.q
    eps = np.empty((replicates, horizon))
    for r in range(replicates):
        sub = np.random.Generator(np.random.Philox(key=[seed, r]))
        eps[r] = pool[sub.integers(0, pool.size, size=horizon)]

    # ARMA recursion vectorized across replicates
    zpast = fit.z_tail
    epast = fit.eps_tail
    z = np.empty((replicates, horizon))
    for h in range(horizon):
        acc = eps[:, h].copy()
        for i in range(1, p + 1):
            acc += fit.phi[i - 1] * (z[:, h - i] if h - i >= 0 else zpast[h - i])
        for j in range(1, q + 1):
            acc += fit.theta[j - 1] * (eps[:, h - j] if h - j >= 0 else epast[h - j])
        z[:, h] = acc
    w = z + fit.mu
    if d:
        paths = np.empty_like(w)
        for r in range(replicates):
            vals = w[r]
            levels = [fit.anchors]
            for _ in range(1, d):
                levels.append(np.diff(levels[-1]))
            for k in range(d - 1, -1, -1):
                vals = levels[k][-1] + np.cumsum(vals)
            paths[r] = vals
    else:
        paths = w

    lo_q = 100.0 * (1.0 - level) / 2.0
    lower, upper = np.percentile(paths, [lo_q, 100.0 - lo_q], axis=0)
    return BootstrapForecast(horizon, paths.mean(axis=0), lower, upper, level,
                             replicates, seed)


@dataclass(frozen=True)
class DiagnosticsReport:
    """Outcome of the standard residual checks at a given alpha."""

    alpha: float
    ljung_box: Optional[TestResult] = None
    shapiro_wilk: Optional[TestResult] = None
    errors: tuple[str, ...] = ()

    @property
    def ljung_box_pass(self) -> Optional[bool]:
        return None if self.ljung_box is None else bool(self.ljung_box.p_value > self.alpha)

    @property
    def shapiro_wilk_pass(self) -> Optional[bool]:
        return None if self.shapiro_wilk is None else bool(self.shapiro_wilk.p_value > self.alpha)

    def to_dict(self) -> dict:
        return {
            "alpha": float(self.alpha),
            "ljung_box": None if self.ljung_box is None else self.ljung_box.to_dict(),
            "ljung_box_pass": self.ljung_box_pass,
            "shapiro_wilk": None if self.shapiro_wilk is None else self.shapiro_wilk.to_dict(),
            "shapiro_wilk_pass": self.shapiro_wilk_pass,
            "errors": list(self.errors),
        }


def diagnose(fit, alpha: float = 0.05, h: Optional[int] = None) -> DiagnosticsReport:
    """Run both residual checks on a fitted model, capturing per-test failures.

    A test that cannot run (short or constant residual series) contributes an
    error message instead of aborting the report.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    resid = fit.residuals
    fitted_params = 0
    spec = getattr(fit, "spec", None)
    if spec is not None:
        fitted_params = spec.p + spec.q
    lb = sw = None
    errors = []
    try:
        lb = ljung_box(resid, h=h, fitted_params=fitted_params)
    except MineprodError as exc:
        errors.append(f"ljung-box: {exc}")
    try:
        sw = shapiro_wilk(resid)
    except MineprodError as exc:
        errors.append(f"shapiro-wilk: {exc}")
    return DiagnosticsReport(alpha=alpha, ljung_box=lb, shapiro_wilk=sw,
                             errors=tuple(errors))
