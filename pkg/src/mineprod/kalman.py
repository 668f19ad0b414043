"""Shared Kalman filter kernel.

One explicit-loop implementation serves both the ARMA likelihood and the
structural models. It is written in the numba-compatible subset of numpy so
the same function body runs compiled when numba is importable and as plain
Python otherwise.

Conventions: (a0, P0) describe the filtered state just before the first
processed observation, so each step is predict-then-update. Missing
observations (mask 0) skip the update and leave NaN in the innovation
sequence. A nonpositive innovation variance aborts with status 1; callers
translate that into SingularError.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import SingularError

LOG_2PI = math.log(2.0 * math.pi)


def _filter_impl(y, mask, T, Z, Q, h, a0, P0, offsets):
    n = y.shape[0]
    r = a0.shape[0]
    a = a0.copy()
    P = P0.copy()
    v = np.empty(n)
    F = np.empty(n)
    fa = np.empty((n, r))
    fP = np.empty((n, r, r))
    ap = np.empty(r)
    Pp = np.empty((r, r))
    TP = np.empty((r, r))
    PZ = np.empty(r)
    for t in range(n):
        # predict: ap = T a + offset, Pp = T P T' + Q
        for i in range(r):
            s = offsets[t, i]
            for j in range(r):
                s += T[i, j] * a[j]
            ap[i] = s
        for i in range(r):
            for k in range(r):
                s = 0.0
                for l in range(r):
                    s += T[i, l] * P[l, k]
                TP[i, k] = s
        for i in range(r):
            for j in range(r):
                s = Q[i, j]
                for k in range(r):
                    s += TP[i, k] * T[j, k]
                Pp[i, j] = s
        if mask[t]:
            for i in range(r):
                s = 0.0
                for j in range(r):
                    s += Pp[i, j] * Z[j]
                PZ[i] = s
            f = h
            for i in range(r):
                f += Z[i] * PZ[i]
            if f <= 1e-300:
                return 1, v, F, fa, fP
            mean = 0.0
            for i in range(r):
                mean += Z[i] * ap[i]
            vt = y[t] - mean
            v[t] = vt
            F[t] = f
            for i in range(r):
                a[i] = ap[i] + PZ[i] * vt / f
            for i in range(r):
                for j in range(r):
                    P[i, j] = Pp[i, j] - PZ[i] * PZ[j] / f
        else:
            v[t] = np.nan
            F[t] = np.nan
            for i in range(r):
                a[i] = ap[i]
            for i in range(r):
                for j in range(r):
                    P[i, j] = Pp[i, j]
        # keep P symmetric against roundoff drift
        for i in range(r):
            for j in range(i + 1, r):
                m = 0.5 * (P[i, j] + P[j, i])
                P[i, j] = m
                P[j, i] = m
        for i in range(r):
            fa[t, i] = a[i]
            for j in range(r):
                fP[t, i, j] = P[i, j]
    return 0, v, F, fa, fP


try:
    from numba import njit

    _filter_jit = njit(cache=True)(_filter_impl)
except ImportError:  # pragma: no cover
    _filter_jit = _filter_impl


def run_filter(y, mask, T, Z, Q, h, a0, P0, offsets=None):
    """Filter a scalar observation sequence through a linear state space.

    Returns (innovations, innovation_variances, filtered_means,
    filtered_covariances); the first two hold NaN at masked steps.
    """
    y = np.ascontiguousarray(y, dtype=np.float64)
    mask = np.ascontiguousarray(mask, dtype=np.bool_)
    T = np.ascontiguousarray(T, dtype=np.float64)
    Z = np.ascontiguousarray(Z, dtype=np.float64)
    Q = np.ascontiguousarray(Q, dtype=np.float64)
    a0 = np.ascontiguousarray(a0, dtype=np.float64)
    P0 = np.ascontiguousarray(P0, dtype=np.float64)
    if offsets is None:
        offsets = np.zeros((y.shape[0], a0.shape[0]))
    offsets = np.ascontiguousarray(offsets, dtype=np.float64)
    status, v, F, fa, fP = _filter_jit(y, mask, T, Z, Q, float(h), a0, P0, offsets)
    if status != 0:
        raise SingularError("innovation variance fell to zero during filtering")
    return v, F, fa, fP


def gaussian_loglik(v, F, skip: int = 0) -> float:
    """Prediction-error-decomposition log likelihood.

    Sums over non-NaN innovations, discarding the first `skip` of them
    (used by the structural models, whose first states are pinned to data).
    """
    ok = np.isfinite(v) & np.isfinite(F)
    vv = v[ok][skip:]
    FF = F[ok][skip:]
    return float(-0.5 * np.sum(LOG_2PI + np.log(FF) + vv * vv / FF))
