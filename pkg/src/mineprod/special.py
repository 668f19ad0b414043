"""Scalar special functions used by the statistical tests and intervals.

All routines are self-contained: the regularized lower incomplete gamma is
computed from its power series and continued fraction, the normal CDF rides
on it through erf, and the normal quantile is the Wichura PPND16 rational
approximation. Accuracy targets: 1e-10 absolute for the gamma and CDF
routines, 1e-8 for the quantile (the approximation itself is good to ~1e-15).
"""

from __future__ import annotations

import math

_MAX_ITER = 400
_EPS = 1e-16


def reg_lower_gamma(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) for a > 0, x >= 0.

    Series expansion for x < a + 1, Lentz continued fraction for the
    complement otherwise.
    """
    if a <= 0.0 or not math.isfinite(a):
        raise ValueError(f"shape parameter must be positive, got {a}")
    if x < 0.0 or not math.isfinite(x):
        raise ValueError(f"argument must be nonnegative, got {x}")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        # P(a,x) = pre / a * sum_k x^k / ((a+1)...(a+k))
        lpre = a * math.log(x) - x - math.lgamma(a)
        ap = a
        term = 1.0 / a
        total = term
        for _ in range(_MAX_ITER):
            ap += 1.0
            term *= x / ap
            total += term
            if abs(term) < abs(total) * _EPS:
                break
        return min(1.0, math.exp(lpre) * total)
    return max(0.0, 1.0 - _upper_gamma_cf(a, x))


def _upper_gamma_cf(a: float, x: float) -> float:
    """Regularized upper tail Q(a, x) by modified Lentz, for x >= a + 1.

    Kept separate so tail probabilities can be used directly without the
    cancellation in 1 - P.
    """
    lpre = a * math.log(x) - x - math.lgamma(a)
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(lpre) * h


def chi2_cdf(x: float, df: float) -> float:
    """CDF of the chi-square distribution with df degrees of freedom."""
    if df <= 0:
        raise ValueError(f"degrees of freedom must be positive, got {df}")
    if x <= 0.0:
        return 0.0
    return reg_lower_gamma(0.5 * df, 0.5 * x)


def normal_cdf(z: float) -> float:
    """Standard normal CDF via erf(|z|/sqrt(2)) = P(1/2, z^2/2)."""
    if z == 0.0:
        return 0.5
    x = 0.5 * z * z
    if x < 1.5:
        half_erf = 0.5 * reg_lower_gamma(0.5, x)
        return 0.5 + half_erf if z > 0.0 else 0.5 - half_erf
    # the tail comes straight from the continued fraction; 0.5 - 0.5*P
    # would cancel to nothing for large |z|
    half_q = 0.5 * _upper_gamma_cf(0.5, x)
    return 1.0 - half_q if z > 0.0 else half_q


# Wichura PPND16 coefficients (central, middle, and far-tail branches).
_PPND_A = (3.3871328727963666080e0, 1.3314166789178437745e2,
           1.9715909503065514427e3, 1.3731693765509461125e4,
           4.5921953931549871457e4, 6.7265770927008700853e4,
           3.3430575583588128105e4, 2.5090809287301226727e3)
_PPND_B = (1.0, 4.2313330701600911252e1, 6.8718700749205790830e2,
           5.3941960214247511077e3, 2.1213794301586595867e4,
           3.9307895800092710610e4, 2.8729085735721942674e4,
           5.2264952788528545610e3)
_PPND_C = (1.42343711074968357734e0, 4.63033784615654529590e0,
           5.76949722146069140550e0, 3.64784832476320460504e0,
           1.27045825245236838258e0, 2.41780725177450611770e-1,
           2.27238449892691845833e-2, 7.74545014278341407640e-4)
_PPND_D = (1.0, 2.05319162663775882187e0, 1.67638483018380384940e0,
           6.89767334985100004550e-1, 1.48103976427480074590e-1,
           1.51986665636164571966e-2, 5.47593808499534494600e-4,
           1.05075007164441684324e-9)
_PPND_E = (6.65790464350110377720e0, 5.46378491116411436990e0,
           1.78482653991729133580e0, 2.96560571828504891230e-1,
           2.65321895265761230930e-2, 1.24266094738807843860e-3,
           2.71155556874348757815e-5, 2.01033439929228813265e-7)
_PPND_F = (1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1,
           1.48753612908506148525e-2, 7.86869131145613259100e-4,
           1.84631831751005468180e-5, 1.42151175831644588870e-7,
           2.04426310338993978564e-15)


def _poly(coeffs, r: float) -> float:
    # coeffs ordered lowest degree first
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * r + c
    return acc


def normal_quantile(p: float) -> float:
    """Inverse standard normal CDF for 0 < p < 1 (AS 241, PPND16)."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"probability must lie strictly in (0, 1), got {p}")
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        return q * _poly(_PPND_A, r) / _poly(_PPND_B, r)
    r = p if q < 0.0 else 1.0 - p
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r -= 1.6
        val = _poly(_PPND_C, r) / _poly(_PPND_D, r)
    else:
        r -= 5.0
        val = _poly(_PPND_E, r) / _poly(_PPND_F, r)
    return -val if q < 0.0 else val
