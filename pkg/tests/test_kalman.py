"""Linear filter core against hand-computed local-level steps."""

import math

import numpy as np
import pytest

from mineprod.errors import SingularError
from mineprod.kalman import LOG_2PI, gaussian_loglik, run_filter


def _local_level(q, h):
    T = np.array([[1.0]])
    Z = np.array([1.0])
    Q = np.array([[q]])
    return T, Z, Q, h


def test_single_step_by_hand():
    # prior N(0, 1), transition adds q=0.5, obs noise h=2, observe y=3:
    # predicted variance 1.5, F = 3.5, K = 1.5/3.5
    T, Z, Q, h = _local_level(0.5, 2.0)
    y = np.array([3.0])
    mask = np.array([True])
    v, F, fa, fP = run_filter(y, mask, T, Z, Q, h, np.array([0.0]), np.array([[1.0]]))
    assert v[0] == pytest.approx(3.0)
    assert F[0] == pytest.approx(3.5)
    k = 1.5 / 3.5
    assert fa[0, 0] == pytest.approx(k * 3.0)
    assert fP[0, 0, 0] == pytest.approx(1.5 * (1.0 - k))


def test_two_steps_recursion():
    T, Z, Q, h = _local_level(0.3, 1.2)
    y = np.array([1.0, -0.5])
    mask = np.array([True, True])
    v, F, fa, fP = run_filter(y, mask, T, Z, Q, h, np.array([0.5]), np.array([[0.8]]))
    # step 1
    pp = 0.8 + 0.3
    f1 = pp + 1.2
    k1 = pp / f1
    a1 = 0.5 + k1 * (1.0 - 0.5)
    p1 = pp * (1.0 - k1)
    assert v[0] == pytest.approx(1.0 - 0.5)
    assert F[0] == pytest.approx(f1)
    assert fa[0, 0] == pytest.approx(a1)
    assert fP[0, 0, 0] == pytest.approx(p1)
    # step 2
    pp2 = p1 + 0.3
    f2 = pp2 + 1.2
    k2 = pp2 / f2
    assert v[1] == pytest.approx(-0.5 - a1)
    assert F[1] == pytest.approx(f2)
    assert fa[1, 0] == pytest.approx(a1 + k2 * (-0.5 - a1))
    assert fP[1, 0, 0] == pytest.approx(pp2 * (1.0 - k2))


def test_masked_step_propagates_without_update():
    T, Z, Q, h = _local_level(0.4, 1.0)
    y = np.array([1.0, 99.0, 2.0])
    mask = np.array([True, False, True])
    v, F, fa, fP = run_filter(y, mask, T, Z, Q, h, np.array([0.0]), np.array([[1.0]]))
    assert math.isnan(v[1]) and math.isnan(F[1])
    # at the masked step the filtered state is the prediction itself
    assert fa[1, 0] == pytest.approx(fa[0, 0])
    assert fP[1, 0, 0] == pytest.approx(fP[0, 0, 0] + 0.4)
    assert math.isfinite(v[2])


def test_offsets_shift_state_prediction():
    T, Z, Q, h = _local_level(0.0, 1.0)
    y = np.array([0.0, 0.0])
    mask = np.array([True, True])
    off = np.array([[0.0], [5.0]])
    v, F, fa, fP = run_filter(y, mask, T, Z, Q, h, np.array([0.0]), np.array([[0.0]]),
                              offsets=off)
    # second prediction is previous state + 5, so observing 0 leaves v = -5
    assert v[0] == pytest.approx(0.0)
    assert v[1] == pytest.approx(-5.0)
    assert fa[1, 0] == pytest.approx(5.0)  # no update: P stays 0


def test_zero_variance_everywhere_is_singular():
    T, Z, Q, h = _local_level(0.0, 0.0)
    with pytest.raises(SingularError):
        run_filter(np.array([1.0]), np.array([True]), T, Z, Q, h,
                   np.array([1.0]), np.array([[0.0]]))


def test_gaussian_loglik_direct():
    v = np.array([0.5, np.nan, -1.0, 2.0])
    F = np.array([1.0, np.nan, 2.0, 4.0])
    direct = sum(
        -0.5 * (LOG_2PI + math.log(f) + vv * vv / f)
        for vv, f in [(0.5, 1.0), (-1.0, 2.0), (2.0, 4.0)]
    )
    assert gaussian_loglik(v, F) == pytest.approx(direct, abs=1e-14)
    # skip drops the leading retained innovation
    direct_skip = sum(
        -0.5 * (LOG_2PI + math.log(f) + vv * vv / f)
        for vv, f in [(-1.0, 2.0), (2.0, 4.0)]
    )
    assert gaussian_loglik(v, F, skip=1) == pytest.approx(direct_skip, abs=1e-14)


def test_white_noise_loglik_matches_iid_density():
    rng = np.random.default_rng(5)
    y = rng.normal(size=40)
    T = np.array([[0.0]])
    Z = np.array([1.0])
    Q = np.array([[1.0]])
    # state is the white noise itself: a_t ~ N(0, 1), observed exactly
    v, F, fa, fP = run_filter(y, np.ones(40, dtype=bool), T, Z, Q, 0.0,
                              np.array([0.0]), np.array([[1.0]]))
    ll = gaussian_loglik(v, F)
    direct = float(np.sum(-0.5 * (LOG_2PI + y * y)))
    assert ll == pytest.approx(direct, rel=1e-12)
