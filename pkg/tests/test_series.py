"""Time axis bookkeeping, differencing, autocorrelation, normalization."""

import numpy as np
import pytest

from mineprod.errors import AnchorError, DegenerateError, LagError, LengthError
from mineprod.series import (
    Frequency,
    TimeSeries,
    acf,
    advance,
    difference,
    format_point,
    inverse_difference,
    znormalize,
)


def test_advance_monthly_wraps_years():
    assert advance((2020, 11), 0, 12) == (2020, 11)
    assert advance((2020, 11), 1, 12) == (2020, 12)
    assert advance((2020, 11), 2, 12) == (2021, 1)
    assert advance((2020, 1), 25, 12) == (2022, 2)


def test_advance_annual():
    assert advance((1980, 1), 42, 1) == (2022, 1)


def test_format_point():
    assert format_point((2021, 7), Frequency.MONTHLY) == "2021-07"
    assert format_point((2021, 1), Frequency.ANNUAL) == "2021"


class TestTimeSeries:
    def test_basic_properties(self):
        ts = TimeSeries([1.0, 2.0, 3.0], start=(2020, 11), frequency=12, unit="TMF")
        assert ts.n == 3
        assert ts.end == (2021, 1)
        assert ts.span() == ("2020-11", "2021-01")
        assert ts.unit == "TMF"

    def test_values_read_only(self):
        ts = TimeSeries([1.0, 2.0, 3.0])
        with pytest.raises(ValueError):
            ts.values[0] = 9.0

    def test_rejects_empty_and_nonfinite(self):
        with pytest.raises(LengthError):
            TimeSeries([])
        with pytest.raises(ValueError):
            TimeSeries([1.0, np.nan])
        with pytest.raises(ValueError):
            TimeSeries([1.0, np.inf])

    def test_rejects_bad_frequency(self):
        with pytest.raises(ValueError):
            TimeSeries([1.0, 2.0], frequency=4)

    def test_to_dict(self):
        ts = TimeSeries([1.5, 2.5], start=(2019, 3), frequency=12, unit="oz")
        assert ts.to_dict() == {
            "values": [1.5, 2.5],
            "start": [2019, 3],
            "frequency": 12,
            "unit": "oz",
        }


class TestDifferencing:
    def test_first_difference_values_and_start(self):
        ts = TimeSeries([3.0, 5.0, 4.0, 9.0], start=(2020, 12), frequency=12)
        d1 = difference(ts, 1)
        assert np.array_equal(d1.values, [2.0, -1.0, 5.0])
        assert d1.start == (2021, 1)

    def test_d0_is_identity(self):
        ts = TimeSeries([3.0, 5.0, 4.0])
        assert np.array_equal(difference(ts, 0).values, ts.values)

    def test_round_trip_exact_on_integers(self):
        rng = np.random.default_rng(7)
        vals = rng.integers(-50, 2000, size=60).astype(float)
        ts = TimeSeries(vals, start=(2015, 1), frequency=12)
        for d in (1, 2):
            diffed = difference(ts, d)
            rebuilt = inverse_difference(diffed, ts.values[:d], d)
            assert np.array_equal(rebuilt.values, ts.values[d:])
            assert rebuilt.start == diffed.start
            assert rebuilt.n == diffed.n

    def test_round_trip_close_on_floats(self):
        rng = np.random.default_rng(11)
        vals = np.cumsum(rng.normal(size=120)) * 1e3
        ts = TimeSeries(vals)
        for d in (1, 2):
            rebuilt = inverse_difference(difference(ts, d), vals[:d], d)
            assert np.allclose(rebuilt.values, vals[d:], atol=1e-9)

    def test_inverse_anchor_count_enforced(self):
        ts = TimeSeries([1.0, 2.0, 4.0, 7.0])
        diffed = difference(ts, 2)
        with pytest.raises(AnchorError):
            inverse_difference(diffed, [1.0], 2)

    def test_too_short_to_difference(self):
        with pytest.raises(LengthError):
            difference(TimeSeries([1.0, 2.0]), 2)

    def test_negative_order_rejected(self):
        with pytest.raises(ValueError):
            difference(TimeSeries([1.0, 2.0, 3.0]), -1)


class TestAcf:
    def test_matches_direct_sum(self):
        rng = np.random.default_rng(3)
        vals = rng.normal(size=80)
        ts = TimeSeries(vals)
        res = acf(ts, 12)
        x = vals - vals.mean()
        c0 = (x @ x) / 80
        for k in range(1, 13):
            direct = np.sum(x[k:] * x[:-k]) / 80 / c0
            assert res.values[k - 1] == pytest.approx(direct, abs=1e-14)
        assert list(res.lags) == list(range(1, 13))
        assert res.n == 80

    def test_constant_series_degenerate(self):
        with pytest.raises(DegenerateError):
            acf(TimeSeries([5.0] * 30), 5)

    def test_lag_bounds(self):
        ts = TimeSeries(np.arange(10.0))
        with pytest.raises(LagError):
            acf(ts, 10)
        with pytest.raises(LagError):
            acf(ts, 0)

    def test_alternating_series_negative_lag1(self):
        ts = TimeSeries([1.0, -1.0] * 20)
        res = acf(ts, 2)
        assert res.values[0] < -0.9
        assert res.values[1] > 0.9


class TestZnormalize:
    def test_population_scaling(self):
        out = znormalize([2.0, 4.0, 6.0])
        x = np.array([2.0, 4.0, 6.0])
        expected = (x - 4.0) / x.std()
        assert np.allclose(out, expected)
        assert out.mean() == pytest.approx(0.0, abs=1e-15)
        assert out.std() == pytest.approx(1.0, abs=1e-15)

    def test_gaps_preserved(self):
        out = znormalize([1.0, None, 3.0, np.nan])
        assert np.isnan(out[1]) and np.isnan(out[3])
        assert np.isfinite(out[0]) and np.isfinite(out[2])

    def test_zero_spread_maps_to_zeros(self):
        out = znormalize([7.0, 7.0, None, 7.0])
        assert out[0] == 0.0 and out[1] == 0.0 and out[3] == 0.0
        assert np.isnan(out[2])

    def test_all_missing_rejected(self):
        with pytest.raises(DegenerateError):
            znormalize([None, np.nan])
