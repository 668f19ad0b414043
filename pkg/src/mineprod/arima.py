"""ARIMA estimation by exact Gaussian maximum likelihood.

The ARMA part is filtered in the Harvey state-space form (state dimension
max(p, q+1), transition matrix with the AR coefficients down the first
column and ones on the superdiagonal). The innovation variance is
concentrated out of the likelihood, so the optimizer only searches over the
AR/MA coefficients, each mapped to the stationary/invertible region through
tanh-bounded partial autocorrelations and the Durbin-Levinson recursion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConvergenceError,
    DegenerateError,
    HorizonError,
    LengthError,
    NoModelError,
    ParamError,
    SingularError,
    TooShortError,
)
from .kalman import LOG_2PI, run_filter
from .optimize import minimize_or_raise, nelder_mead
from .series import Frequency, TimeSeries, advance, difference, inverse_difference
from .special import normal_quantile

_ROOT_MARGIN = 1e-8


@dataclass(frozen=True)
class ArimaSpec:
    """Model order (p, d, q)."""

    p: int
    d: int
    q: int

    def __post_init__(self):
        for name, val, hi in (("p", self.p, 5), ("d", self.d, 2), ("q", self.q, 5)):
            if not isinstance(val, int) or not 0 <= val <= hi:
                raise ValueError(f"{name} must be an integer in 0..{hi}, got {val}")

    def to_dict(self) -> dict:
        return {"p": self.p, "d": self.d, "q": self.q}


@dataclass(frozen=True)
class ArimaFit:
    """Fitted ARIMA model.

    residuals are the standardized one-step innovations v_t/sqrt(F_t) on the
    data scale (F_t from the unit-variance filter, so they estimate the
    innovation sequence itself). The tail fields carry just enough state to
    forecast and bootstrap from the fit without the original series.
    """

    spec: ArimaSpec
    c: float
    phi: np.ndarray
    theta: np.ndarray
    sigma2: float
    residuals: TimeSeries
    loglik: float
    aic: float
    n_effective: int
    mu: float = 0.0
    z_tail: np.ndarray = field(default_factory=lambda: np.zeros(0))
    eps_tail: np.ndarray = field(default_factory=lambda: np.zeros(0))
    anchors: np.ndarray = field(default_factory=lambda: np.zeros(0))
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        for name in ("phi", "theta", "z_tail", "eps_tail", "anchors"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "c": float(self.c),
            "phi": [float(v) for v in self.phi],
            "theta": [float(v) for v in self.theta],
            "sigma2": float(self.sigma2),
            "residuals": self.residuals.to_dict(),
            "loglik": float(self.loglik),
            "aic": float(self.aic),
            "n_effective": int(self.n_effective),
        }


@dataclass(frozen=True)
class ForecastResult:
    """Point forecasts with central prediction intervals."""

    horizon: int
    mean: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    level: float
    unit: str

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if not (mean.size == lower.size == upper.size == self.horizon):
            raise ValueError("forecast arrays must all have length == horizon")
        if np.any(lower > mean) or np.any(mean > upper):
            raise ValueError("interval bounds must bracket the mean path")
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
            "unit": self.unit,
        }


def pacf_to_ar(pacs: np.ndarray) -> np.ndarray:
    """Durbin-Levinson expansion of partial autocorrelations into AR weights."""
    pacs = np.asarray(pacs, dtype=float)
    phi = np.zeros(pacs.size)
    for k in range(pacs.size):
        pk = pacs[k]
        phi[:k] = phi[:k] - pk * phi[:k][::-1]
        phi[k] = pk
    return phi


def _unpack_params(x: np.ndarray, p: int, q: int) -> tuple[np.ndarray, np.ndarray]:
    phi = pacf_to_ar(np.tanh(x[:p]))
    # invertible MA region is the stationary AR region with flipped signs
    theta = -pacf_to_ar(np.tanh(x[p:]))
    return phi, theta


def harvey_system(phi: np.ndarray, theta: np.ndarray):
    """State-space matrices (T, R, Z) for an ARMA(p, q) with unit variance."""
    p, q = len(phi), len(theta)
    r = max(p, q + 1)
    T = np.zeros((r, r))
    T[:p, 0] = phi
    for i in range(r - 1):
        T[i, i + 1] = 1.0
    R = np.zeros(r)
    R[0] = 1.0
    R[1:q + 1] = theta
    Z = np.zeros(r)
    Z[0] = 1.0
    return T, R, Z


def stationary_cov(T: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Solve P = T P T' + V for the stationary state covariance."""
    r = T.shape[0]
    A = np.eye(r * r) - np.kron(T, T)
    try:
        vec = np.linalg.solve(A, V.reshape(-1))
    except np.linalg.LinAlgError as exc:
        raise ParamError("no stationary covariance for these coefficients") from exc
    P = vec.reshape(r, r)
    return 0.5 * (P + P.T)


def _filter_unit_variance(z: np.ndarray, phi: np.ndarray, theta: np.ndarray):
    """Kalman pass with sigma2 = 1; returns (v, F)."""
    T, R, Z = harvey_system(phi, theta)
    Q = np.outer(R, R)
    P0 = stationary_cov(T, Q)
    mask = np.ones(z.size, dtype=bool)
    v, F, _, _ = run_filter(z, mask, T, Z, Q, 0.0, np.zeros(T.shape[0]), P0)
    return v, F


def _concentrated_negll(z: np.ndarray, phi: np.ndarray, theta: np.ndarray):
    """Negative log likelihood with sigma2 profiled out; also sigma2_hat."""
    status, negll, sigma2 = _negll_fused(
        np.ascontiguousarray(z), np.ascontiguousarray(phi), np.ascontiguousarray(theta))
    if status != 0:
        return np.inf, np.nan
    return float(negll), float(sigma2)


def arma_loglik(z: np.ndarray, phi, theta, sigma2: float) -> float:
    """Exact Gaussian log likelihood of a zero-mean ARMA at fixed parameters."""
    z = np.asarray(z, dtype=float)
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if sigma2 <= 0.0:
        raise ParamError(f"sigma2 must be positive, got {sigma2}")
    v, F = _filter_unit_variance(z, phi, theta)
    return float(-0.5 * np.sum(LOG_2PI + np.log(sigma2 * F) + v * v / (sigma2 * F)))


def _negll_impl(z, phi, theta):
    """Fused concentrated negative log likelihood.

    Builds the Harvey system, solves the stationary covariance by doubling
    (P accumulates sum of A^k Q A'^k while A squares), then filters with
    the observation vector fixed at e1 so the innovation variance is just
    the (0, 0) element of the predicted covariance.
    Returns (status, negll, sigma2); status 1 flags a collapsed innovation
    variance or a non-convergent covariance sum.
    """
    n = z.shape[0]
    p = phi.shape[0]
    q = theta.shape[0]
    r = max(p, q + 1)
    T = np.zeros((r, r))
    for i in range(p):
        T[i, 0] = phi[i]
    for i in range(r - 1):
        T[i, i + 1] = 1.0
    R = np.zeros(r)
    R[0] = 1.0
    for j in range(q):
        R[j + 1] = theta[j]
    Q = np.empty((r, r))
    for i in range(r):
        for j in range(r):
            Q[i, j] = R[i] * R[j]

    P = Q.copy()
    A = T.copy()
    tmp = np.empty((r, r))
    tmp2 = np.empty((r, r))
    converged = False
    for _ in range(128):
        for i in range(r):
            for k in range(r):
                s = 0.0
                for l in range(r):
                    s += A[i, l] * P[l, k]
                tmp[i, k] = s
        delta = 0.0
        base = 0.0
        for i in range(r):
            for j in range(r):
                s = 0.0
                for k in range(r):
                    s += tmp[i, k] * A[j, k]
                tmp2[i, j] = s
                delta += abs(s)
                base += abs(P[i, j])
        for i in range(r):
            for j in range(r):
                P[i, j] += tmp2[i, j]
        if delta <= 1e-14 * base:
            converged = True
            break
        for i in range(r):
            for k in range(r):
                s = 0.0
                for l in range(r):
                    s += A[i, l] * A[l, k]
                tmp[i, k] = s
        for i in range(r):
            for k in range(r):
                A[i, k] = tmp[i, k]
    if not converged:
        return 1, np.inf, np.inf

    a = np.zeros(r)
    ap = np.empty(r)
    Pp = np.empty((r, r))
    sum_log_f = 0.0
    ssq = 0.0
    for t in range(n):
        for i in range(r):
            s = 0.0
            for j in range(r):
                s += T[i, j] * a[j]
            ap[i] = s
        for i in range(r):
            for k in range(r):
                s = 0.0
                for l in range(r):
                    s += T[i, l] * P[l, k]
                tmp[i, k] = s
        for i in range(r):
            for j in range(r):
                s = Q[i, j]
                for k in range(r):
                    s += tmp[i, k] * T[j, k]
                Pp[i, j] = s
        f = Pp[0, 0]
        if f <= 1e-300 or not np.isfinite(f):
            return 1, np.inf, np.inf
        vt = z[t] - ap[0]
        sum_log_f += math.log(f)
        ssq += vt * vt / f
        for i in range(r):
            a[i] = ap[i] + Pp[i, 0] * vt / f
        for i in range(r):
            for j in range(r):
                P[i, j] = Pp[i, j] - Pp[i, 0] * Pp[j, 0] / f
        for i in range(r):
            for j in range(i + 1, r):
                m = 0.5 * (P[i, j] + P[j, i])
                P[i, j] = m
                P[j, i] = m
    sigma2 = ssq / n
    if sigma2 <= 0.0:
        return 1, np.inf, np.inf
    negll = 0.5 * n * (LOG_2PI + math.log(sigma2) + 1.0) + 0.5 * sum_log_f
    return 0, negll, sigma2


def _css_impl(w, phi, theta):
    n = w.shape[0]
    p = phi.shape[0]
    q = theta.shape[0]
    eps = np.zeros(n)
    ss = 0.0
    for t in range(p, n):
        acc = w[t]
        for i in range(p):
            acc -= phi[i] * w[t - 1 - i]
        for j in range(q):
            k = t - 1 - j
            if k >= 0:
                acc -= theta[j] * eps[k]
        eps[t] = acc
        ss += acc * acc
    return ss


def _make_negll_x(negll_fn):
    """Unconstrained-parameter objective: tanh -> Durbin-Levinson -> negll."""

    def _negll_x(z, x, p, q):
        tmp = np.zeros(max(p, q))
        phi = np.zeros(p)
        for k in range(p):
            pk = math.tanh(x[k])
            for i in range(k):
                tmp[i] = phi[i] - pk * phi[k - 1 - i]
            for i in range(k):
                phi[i] = tmp[i]
            phi[k] = pk
        theta = np.zeros(q)
        for k in range(q):
            pk = math.tanh(x[p + k])
            for i in range(k):
                tmp[i] = theta[i] - pk * theta[k - 1 - i]
            for i in range(k):
                theta[i] = tmp[i]
            theta[k] = pk
        for j in range(q):
            theta[j] = -theta[j]
        return negll_fn(z, phi, theta)

    return _negll_x


try:
    from numba import njit

    _css = njit(cache=True)(_css_impl)
    _negll_fused = njit(cache=True)(_negll_impl)
    _negll_x = njit(cache=True)(_make_negll_x(_negll_fused))
except ImportError:  # pragma: no cover
    _css = _css_impl
    _negll_fused = _negll_impl
    _negll_x = _make_negll_x(_negll_impl)


def check_roots(coeffs: np.ndarray, kind: str, margin: float = _ROOT_MARGIN) -> None:
    """Require the lag polynomial 1 -/+ c1 z ... to have all roots strictly
    outside the unit circle, with a safety margin.

    Estimates that land on the boundary (unit AR or MA roots, the usual
    likelihood pile-up of overparameterized candidates) violate the fitted
    model's validity and are rejected here.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.size == 0:
        return
    sign = -1.0 if kind == "ar" else 1.0
    poly = np.r_[1.0, sign * coeffs][::-1]
    roots = np.roots(poly)
    if roots.size and np.min(np.abs(roots)) <= 1.0 + margin:
        raise ParamError(f"{kind} polynomial root not strictly outside the unit circle")


def fit_arima(series: TimeSeries, spec: ArimaSpec) -> ArimaFit:
    """Fit an ARIMA(p, d, q) by exact maximum likelihood.

    d = 0 fits a nonzero mean (reported through the intercept c); d >= 1
    models the differenced series as zero-mean, so no drift term.
    """
    p, d, q = spec.p, spec.d, spec.q
    n = series.n
    if n - d <= p + q + 1:
        raise LengthError(
            f"need more than {p + q + 1} observations after differencing, have {n - d}"
        )
    w = difference(series, d) if d else series
    wv = w.values
    if float(np.var(wv)) <= 0.0:
        raise DegenerateError("differenced series has zero variance")
    mu = float(wv.mean()) if d == 0 else 0.0
    z = wv - mu

    if p + q == 0:
        sigma2 = float(np.mean(z * z))
        if sigma2 <= 0.0:
            raise DegenerateError("residual variance is zero")
        negll = 0.5 * z.size * (LOG_2PI + math.log(sigma2) + 1.0)
        phi = np.zeros(0)
        theta = np.zeros(0)
        resid = z.copy()
    else:
        def css_obj(x):
            ph, th = _unpack_params(x, p, q)
            ss = _css(z, ph, th)
            return math.log(max(ss, 1e-300) / z.size)

        start = nelder_mead(css_obj, np.zeros(p + q), step=0.4, tol=1e-5,
                            budget=60 * (p + q) + 60).x

        zc = np.ascontiguousarray(z)

        def mle_obj(x):
            return _negll_x(zc, np.ascontiguousarray(x), p, q)[1]

        # a CSS optimum hard against the boundary can sit where the exact
        # filter overflows; restart from the origin in that case
        if not math.isfinite(mle_obj(start)):
            start = np.zeros(p + q)
        res = minimize_or_raise(mle_obj, start, step=0.2, tol=1e-8, budget=2000)
        phi, theta = _unpack_params(res.x, p, q)
        check_roots(phi, "ar")
        check_roots(theta, "ma")
        negll, sigma2 = _concentrated_negll(z, phi, theta)
        if not np.isfinite(negll):
            raise ConvergenceError("likelihood not finite at the optimum")
        v, F = _filter_unit_variance(z, phi, theta)
        resid = v / np.sqrt(F)

    loglik = -negll
    residuals = TimeSeries(resid, advance(series.start, d, series.frequency),
                           series.frequency, series.unit)
    return ArimaFit(
        spec=spec,
        c=mu * (1.0 - float(np.sum(phi))) if d == 0 else 0.0,
        phi=phi,
        theta=theta,
        sigma2=sigma2,
        residuals=residuals,
        loglik=loglik,
        aic=2.0 * (p + q + 2) - 2.0 * loglik,
        n_effective=n - d,
        mu=mu,
        z_tail=z[z.size - p:] if p else np.zeros(0),
        eps_tail=resid[resid.size - q:] if q else np.zeros(0),
        anchors=series.values[n - d:] if d else np.zeros(0),
    )


def select_d(series: TimeSeries) -> tuple[int, tuple[str, ...]]:
    """Differencing order: smallest d whose result looks stationary.

    A level qualifies when its variance did not grow relative to d-1 and its
    lag-1 autocorrelation stays below a length-aware bound. The bound matters:
    the biased estimator on a pure linear trend equals exactly 1 - 3/n, so a
    fixed cutoff near 1 would wave short trending series through. Using
    min(0.95, 1 - 6/n) keeps room below the trend value while leaving long
    series under the usual 0.95 rule. If no level qualifies the
    variance-minimizing d is used and a note records that.
    """
    variances = []
    rho1 = []
    sizes = []
    for d in range(3):
        zv = difference(series, d).values if d else series.values
        var = float(np.var(zv))
        variances.append(var)
        sizes.append(zv.size)
        if var <= 0.0 or zv.size < 2:
            rho1.append(0.0)
            continue
        x = zv - zv.mean()
        rho1.append(float(np.dot(x[1:], x[:-1]) / np.dot(x, x)))
    for d in range(3):
        if d > 0 and variances[d] > variances[d - 1]:
            continue
        bound = min(0.95, 1.0 - 6.0 / max(sizes[d], 7))
        if abs(rho1[d]) < bound:
            return d, ()
    d = int(np.argmin(variances))
    return d, (f"no differencing level passed the stationarity screen; "
               f"using variance-minimizing d={d}",)


def _selection_admissible(fit: ArimaFit, margin: float = 1e-3) -> bool:
    """Reject candidates whose estimated roots crowd the unit circle.

    Overparameterized candidates routinely push an AR/MA root pair onto the
    boundary (likelihood pile-up), where the spuriously high likelihood says
    nothing about forecasting merit. The selection therefore requires a
    wider berth than the fit-validity margin.
    """
    try:
        check_roots(fit.phi, "ar", margin)
        check_roots(fit.theta, "ma", margin)
    except ParamError:
        return False
    return True


def auto_arima(series: TimeSeries, max_p: int = 5, max_q: int = 5,
               max_order: int = 6) -> ArimaFit:
    """Stepwise ARIMA order search minimizing AIC.

    After choosing d, the search starts from the usual candidate set
    {(2,2), (0,0), (1,0), (0,1)} and repeatedly moves to the best
    neighboring order (p and/or q changed by one) while the AIC improves.
    Candidates that fail to fit, or whose roots sit against the unit
    circle, are skipped. AIC ties break toward fewer parameters, then
    lower p.
    """
    if series.n < 10:
        raise TooShortError(
            f"automatic selection needs at least 10 observations, got {series.n}"
        )
    d, notes = select_d(series)
    cache: dict[tuple[int, int], ArimaFit | None] = {}

    def candidate(p: int, q: int) -> ArimaFit | None:
        if not (0 <= p <= max_p and 0 <= q <= max_q and p + q <= max_order):
            return None
        if (p, q) not in cache:
            try:
                fit = fit_arima(series, ArimaSpec(p, d, q))
                cache[(p, q)] = fit if _selection_admissible(fit) else None
            except (DegenerateError, LengthError, ConvergenceError, ParamError,
                    SingularError, np.linalg.LinAlgError):
                cache[(p, q)] = None
        return cache[(p, q)]

    def key(fit: ArimaFit):
        return (fit.aic, fit.spec.p + fit.spec.q, fit.spec.p)

    best = None
    for p, q in ((2, 2), (0, 0), (1, 0), (0, 1)):
        fit = candidate(p, q)
        if fit is not None and (best is None or key(fit) < key(best)):
            best = fit
    if best is None:
        # fall back to a sweep so a fittable model elsewhere is still found
        for p in range(max_p + 1):
            for q in range(max_q + 1):
                fit = candidate(p, q)
                if fit is not None and (best is None or key(fit) < key(best)):
                    best = fit
    if best is None:
        raise NoModelError(f"no ARIMA candidate could be fitted at d={d}")
    improved = True
    while improved:
        improved = False
        p0, q0 = best.spec.p, best.spec.q
        for dp in (-1, 0, 1):
            for dq in (-1, 0, 1):
                if dp == 0 and dq == 0:
                    continue
                fit = candidate(p0 + dp, q0 + dq)
                if fit is not None and key(fit) < key(best):
                    best = fit
                    improved = True
    if notes:
        best = ArimaFit(**{**_fit_kwargs(best), "notes": best.notes + notes})
    return best


def _fit_kwargs(fit: ArimaFit) -> dict:
    return {
        "spec": fit.spec, "c": fit.c, "phi": fit.phi, "theta": fit.theta,
        "sigma2": fit.sigma2, "residuals": fit.residuals, "loglik": fit.loglik,
        "aic": fit.aic, "n_effective": fit.n_effective, "mu": fit.mu,
        "z_tail": fit.z_tail, "eps_tail": fit.eps_tail, "anchors": fit.anchors,
        "notes": fit.notes,
    }


def psi_weights(phi: np.ndarray, theta: np.ndarray, count: int) -> np.ndarray:
    """First `count` moving-average representation weights, psi_0 = 1."""
    p, q = len(phi), len(theta)
    psi = np.zeros(count)
    if count == 0:
        return psi
    psi[0] = 1.0
    for j in range(1, count):
        acc = theta[j - 1] if j <= q else 0.0
        for i in range(1, min(j, p) + 1):
            acc += phi[i - 1] * psi[j - i]
        psi[j] = acc
    return psi


def forecast_mean_path(fit: ArimaFit, horizon: int) -> np.ndarray:
    """Point forecasts on the original (integrated) scale."""
    p, d, q = fit.spec.p, fit.spec.d, fit.spec.q
    zpast = list(fit.z_tail)
    epast = list(fit.eps_tail)
    zfut = []
    for h in range(horizon):
        acc = 0.0
        for i in range(1, p + 1):
            acc += fit.phi[i - 1] * (zfut[h - i] if h - i >= 0 else zpast[h - i])
        for j in range(1, q + 1):
            if h - j < 0:
                acc += fit.theta[j - 1] * epast[h - j]
        zfut.append(acc)
    wfut = np.asarray(zfut) + fit.mu
    if d == 0:
        return wfut
    freq = fit.residuals.frequency
    seg = TimeSeries(wfut, advance(fit.residuals.end, 1, freq), freq, fit.residuals.unit)
    return inverse_difference(seg, fit.anchors, d).values


def forecast_arima(fit: ArimaFit, horizon: int, level: float = 0.95) -> ForecastResult:
    """Mean path plus Gaussian prediction intervals at the given level."""
    if not isinstance(horizon, int) or horizon < 1:
        raise HorizonError(f"horizon must be a positive integer, got {horizon}")
    if not 0.0 < level < 1.0:
        raise ValueError(f"confidence level must lie in (0, 1), got {level}")
    mean = forecast_mean_path(fit, horizon)
    psi = psi_weights(fit.phi, fit.theta, horizon)
    for _ in range(fit.spec.d):
        psi = np.cumsum(psi)
    var = fit.sigma2 * np.cumsum(psi * psi)
    zq = normal_quantile(0.5 + level / 2.0)
    half = zq * np.sqrt(var)
    return ForecastResult(horizon, mean, mean - half, mean + half, level,
                          fit.residuals.unit)


def simulate_arima(phi=(), theta=(), c: float = 0.0, sigma2: float = 1.0,
                   n: int = 100, seed: int = 0, d: int = 0,
                   frequency: int = Frequency.MONTHLY,
                   start: tuple[int, int] = (2000, 1), unit: str = "") -> TimeSeries:
    """Draw a seeded ARIMA sample path (200-step burn-in, then integrate d times)."""
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if sigma2 <= 0.0:
        raise ParamError(f"sigma2 must be positive, got {sigma2}")
    if n < 1:
        raise LengthError(f"need n >= 1, got {n}")
    check_roots(phi, "ar")
    check_roots(theta, "ma")
    p, q = phi.size, theta.size
    burn = 200
    rng = np.random.default_rng(seed)
    eps = rng.standard_normal(burn + n) * math.sqrt(sigma2)
    w = np.zeros(burn + n)
    for t in range(burn + n):
        acc = c + eps[t]
        for i in range(1, p + 1):
            if t - i >= 0:
                acc += phi[i - 1] * w[t - i]
        for j in range(1, q + 1):
            if t - j >= 0:
                acc += theta[j - 1] * eps[t - j]
        w[t] = acc
    vals = w[burn:]
    for _ in range(d):
        vals = np.cumsum(vals)
    return TimeSeries(vals, start, frequency, unit)
