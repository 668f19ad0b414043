"""Structural time-series models: local level and local linear trend.

Both models condition on their first state rather than using a diffuse
prior: the level starts pinned at the first observation (local level) and
the level/slope pair starts pinned at the second observation and the first
difference (local trend). The reported likelihood is therefore the exact
Gaussian density of the remaining observations given those starting values,
which keeps it comparable across variance candidates without diffuse
approximation artifacts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import ConvergenceError, DegenerateError, HorizonError, LengthError, SingularError
from .kalman import gaussian_loglik, run_filter
from .optimize import nelder_mead
from .series import TimeSeries, advance
from .special import normal_quantile

_LOG_FLOOR = -30.0


class StructuralKind(str, Enum):
    LOCAL_LEVEL = "LocalLevel"
    LOCAL_TREND = "LocalTrend"


@dataclass(frozen=True)
class Control:
    """Exogenous additive term B u(t) in the state equation."""

    B: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        B = np.atleast_2d(np.asarray(self.B, dtype=float))
        u = np.atleast_2d(np.asarray(self.u, dtype=float))
        if u.shape[1] != B.shape[1]:
            raise ValueError(
                f"control input width {u.shape[1]} does not match B columns {B.shape[1]}"
            )
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "u", u)

    def offsets(self) -> np.ndarray:
        return self.u @ self.B.T


def system_matrices(kind: StructuralKind):
    if kind == StructuralKind.LOCAL_LEVEL:
        return np.array([[1.0]]), np.array([1.0])
    if kind == StructuralKind.LOCAL_TREND:
        return np.array([[1.0, 1.0], [0.0, 1.0]]), np.array([1.0, 0.0])
    raise ValueError(f"unknown structural kind: {kind!r}")


def n_state_noises(kind: StructuralKind) -> int:
    return 1 if kind == StructuralKind.LOCAL_LEVEL else 2


def min_length(kind: StructuralKind) -> int:
    return 4 if kind == StructuralKind.LOCAL_LEVEL else 6


def kalman_step(prior_mean, prior_cov, observation, kind: StructuralKind,
                q_variances, r_variance: float, control_offset=None):
    """One predict-update cycle.

    prior_mean/prior_cov describe the filtered state of the previous period.
    A missing observation (None or NaN) returns the prediction unchanged with
    innovation and innovation variance None.
    """
    A, C = system_matrices(kind)
    m = np.asarray(prior_mean, dtype=float).reshape(-1)
    P = np.atleast_2d(np.asarray(prior_cov, dtype=float))
    q = np.asarray(q_variances, dtype=float).reshape(-1)
    if q.size != n_state_noises(kind):
        raise ValueError(f"{kind.value} takes {n_state_noises(kind)} state variances")
    if np.any(q < 0.0) or r_variance < 0.0:
        raise ValueError("variances must be nonnegative")
    pred_mean = A @ m
    if control_offset is not None:
        pred_mean = pred_mean + np.asarray(control_offset, dtype=float).reshape(-1)
    pred_cov = A @ P @ A.T + np.diag(q)
    gap = observation is None or (isinstance(observation, float) and math.isnan(observation))
    if gap:
        return pred_mean, 0.5 * (pred_cov + pred_cov.T), None, None
    f = float(C @ pred_cov @ C + r_variance)
    if f <= 1e-300:
        raise SingularError("innovation variance fell to zero in kalman_step")
    v = float(observation) - float(C @ pred_mean)
    K = (pred_cov @ C) / f
    post_mean = pred_mean + K * v
    post_cov = pred_cov - np.outer(K, C @ pred_cov)
    return post_mean, 0.5 * (post_cov + post_cov.T), v, f


@dataclass(frozen=True)
class StructuralFit:
    """Fitted local-level or local-trend model."""

    kind: StructuralKind
    q_variances: np.ndarray
    r_variance: float
    loglik: float
    aic: float
    residuals: TimeSeries
    filtered_means: np.ndarray
    filtered_covs: np.ndarray
    last_state: np.ndarray
    last_cov: np.ndarray
    n_conditioned: int

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "q_variances": [float(v) for v in self.q_variances],
            "r_variance": float(self.r_variance),
            "loglik": float(self.loglik),
            "aic": float(self.aic),
        }


def _pinned_start(y: np.ndarray, kind: StructuralKind):
    """Conditioning state and the index of the first forecastable observation."""
    if kind == StructuralKind.LOCAL_LEVEL:
        return np.array([y[0]]), 1
    return np.array([y[1], y[1] - y[0]]), 2


def _run(y: np.ndarray, kind: StructuralKind, q: np.ndarray, r: float,
         offsets: Optional[np.ndarray]):
    A, C = system_matrices(kind)
    a0, k = _pinned_start(y, kind)
    yy = y[k:]
    off = offsets[k:] if offsets is not None else None
    mask = np.ones(yy.size, dtype=bool)
    return run_filter(yy, mask, A, C, np.diag(q), r, a0,
                      np.zeros((a0.size, a0.size)), off), k


def fit_structural(series: TimeSeries, kind: StructuralKind,
                   control: Optional[Control] = None) -> StructuralFit:
    """Estimate the state and observation noise variances by maximum likelihood.

    The search runs over log variances (floored at e^-30 relative to the
    data scale) from a few deterministic starting points; the best converged
    run wins.
    """
    kind = StructuralKind(kind)
    y = series.values
    if series.n < min_length(kind):
        raise LengthError(
            f"{kind.value} needs at least {min_length(kind)} observations, got {series.n}"
        )
    if float(np.var(y)) <= 0.0:
        raise DegenerateError("cannot fit a structural model to a constant series")
    offsets = None
    if control is not None:
        off = control.offsets()
        if off.shape[0] != series.n or off.shape[1] != system_matrices(kind)[0].shape[0]:
            raise ValueError(
                f"control offsets must be shaped ({series.n}, state dim), got {off.shape}"
            )
        offsets = off
    scale = float(np.std(y))
    ys = y / scale
    offs = offsets / scale if offsets is not None else None
    nq = n_state_noises(kind)

    def negll(theta):
        params = np.exp(np.clip(theta, _LOG_FLOOR, 40.0))
        try:
            (v, F, _, _), _ = _run(ys, kind, params[:nq], params[nq], offs)
        except SingularError:
            return np.inf
        return -gaussian_loglik(v, F)

    if kind == StructuralKind.LOCAL_LEVEL:
        starts = [(-0.7, -0.7), (0.0, -4.6), (-4.6, 0.0)]
    else:
        starts = [(-0.7, -4.6, -0.7), (-2.3, -6.9, 0.0), (0.0, -9.2, -4.6)]
    best = None
    for s in starts:
        res = nelder_mead(negll, np.asarray(s, dtype=float), step=1.0, tol=1e-8,
                          budget=2000)
        if res.converged and (best is None or res.fval < best.fval):
            best = res
    if best is None:
        raise ConvergenceError("no variance search converged within budget")

    params = np.exp(np.clip(best.x, _LOG_FLOOR, 40.0)) * scale * scale
    q_hat, r_hat = params[:nq], float(params[nq])
    (v, F, fa, fP), k = _run(y, kind, q_hat, r_hat, offsets)
    loglik = gaussian_loglik(v, F)
    resid = v / np.sqrt(F)
    residuals = TimeSeries(resid, advance(series.start, k, series.frequency),
                           series.frequency, series.unit)
    n_params = nq + 1
    return StructuralFit(
        kind=kind,
        q_variances=q_hat,
        r_variance=r_hat,
        loglik=loglik,
        aic=2.0 * n_params - 2.0 * loglik,
        residuals=residuals,
        filtered_means=fa,
        filtered_covs=fP,
        last_state=fa[-1].copy(),
        last_cov=fP[-1].copy(),
        n_conditioned=k,
    )


def forecast_structural(fit: StructuralFit, horizon: int, level: float = 0.95,
                        future_control: Optional[Control] = None):
    """Iterate the fitted system forward with Gaussian prediction intervals."""
    from .arima import ForecastResult  # shared result record

    if not isinstance(horizon, int) or horizon < 1:
        raise HorizonError(f"horizon must be a positive integer, got {horizon}")
    if not 0.0 < level < 1.0:
        raise ValueError(f"confidence level must lie in (0, 1), got {level}")
    A, C = system_matrices(fit.kind)
    offsets = None
    if future_control is not None:
        offsets = future_control.offsets()
        if offsets.shape[0] < horizon or offsets.shape[1] != A.shape[0]:
            raise ValueError(
                f"future control must cover {horizon} steps of the state dimension"
            )
    a = fit.last_state.copy()
    P = fit.last_cov.copy()
    Q = np.diag(fit.q_variances)
    mean = np.empty(horizon)
    var = np.empty(horizon)
    for h in range(horizon):
        a = A @ a
        if offsets is not None:
            a = a + offsets[h]
        P = A @ P @ A.T + Q
        mean[h] = float(C @ a)
        var[h] = float(C @ P @ C + fit.r_variance)
    zq = normal_quantile(0.5 + level / 2.0)
    half = zq * np.sqrt(var)
    return ForecastResult(horizon, mean, mean - half, mean + half, level,
                          fit.residuals.unit)
