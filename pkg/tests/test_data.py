"""Panel repair, spread construction, splits and diagnostics."""

import numpy as np
import pandas as pd
import pytest
from statsmodels.tsa.stattools import adfuller

from spreadfit.data import (
    SpreadId,
    SpreadPanel,
    adf_test,
    all_spread_ids,
    build_spreads,
    descriptive_stats,
    dst_normalize,
    fill_missing,
    split,
    synthetic_panel,
)
from spreadfit.data.panel import DAY_SPRING
from spreadfit.errors import CalendarError, DomainError, InsufficientHistory, SingularDesign


def records_for(days):
    """days: list of (date, [(hour, value), ...])."""
    rows = []
    for date, pairs in days:
        for hour, value in pairs:
            rows.append((date, hour, value))
    return pd.DataFrame(rows, columns=["date", "hour", "value"])


def full_day(date, base=0.0):
    return (date, [(h, base + h) for h in range(24)])


class TestDstNormalize:
    def test_spring_day_interpolates_hour_two(self):
        pairs = [(h, float(h * 10)) for h in range(24) if h != 2]
        df = records_for([full_day("2015-03-28"), ("2015-03-29", pairs)])
        grid = dst_normalize(df)
        assert grid.values[1, 2] == pytest.approx(0.5 * (10.0 + 30.0))
        assert grid.day_types[1] == "spring"
        assert len(grid.log) == 1 and grid.log[0].action == "interpolated"

    def test_normal_day_unchanged(self):
        df = records_for([full_day("2015-06-01", base=5.0)])
        grid = dst_normalize(df)
        assert np.array_equal(grid.values[0], 5.0 + np.arange(24))
        assert grid.day_types[0] == "normal"

    def test_fall_day_keeps_first_duplicate(self):
        pairs = [(h, float(h)) for h in range(24)]
        pairs[2] = (2, 5.0)
        pairs.insert(3, (2, 9.0))
        df = records_for([("2015-10-25", pairs)])
        grid = dst_normalize(df)
        assert grid.values[0, 2] == 5.0
        assert grid.day_types[0] == "fall"

    def test_idempotent_on_repaired_grid(self):
        pairs = [(h, float(h * 10)) for h in range(24) if h != 2]
        df = records_for([full_day("2015-03-28"), ("2015-03-29", pairs)])
        once = dst_normalize(df)
        rows = [
            (str(d.date()), h, once.values[i, h])
            for i, d in enumerate(once.dates)
            for h in range(24)
        ]
        twice = dst_normalize(pd.DataFrame(rows, columns=["date", "hour", "value"]))
        assert np.array_equal(once.values, twice.values)

    def test_bad_hour_count_raises(self):
        df = records_for([("2015-01-01", [(h, 1.0) for h in range(20)])])
        with pytest.raises(CalendarError):
            dst_normalize(df)


class TestFillMissing:
    def _grid(self, n_days=10, spring_at=None):
        days = [full_day(str(pd.Timestamp("2015-03-20") + pd.Timedelta(days=i))) for i in range(n_days)]
        grid = dst_normalize(records_for(days))
        if spring_at is not None:
            grid.day_types[spring_at] = DAY_SPRING
        return grid

    def test_constant_history(self):
        grid = self._grid()
        grid.values[0:7, 6] = 4.0
        assert fill_missing(grid, 7, 6) == 4.0

    def test_arithmetic_mean(self):
        grid = self._grid()
        grid.values[1:8, 6] = np.arange(1.0, 8.0)
        assert fill_missing(grid, 8, 6) == 4.0

    def test_spring_day_shifts_source_hour(self):
        grid = self._grid(spring_at=8)
        grid.values[1:8, 5] = 50.0
        grid.values[1:8, 6] = 60.0
        assert fill_missing(grid, 8, 6) == 50.0

    def test_insufficient_history(self):
        grid = self._grid()
        with pytest.raises(InsufficientHistory):
            fill_missing(grid, 5, 3)


class TestSpreads:
    def test_sign_convention(self):
        panel = synthetic_panel(n_days=30, seed=1)
        panel.prices[:, 3] = 50.0
        panel.prices[:, 7] = 30.0
        Y = build_spreads(panel)
        assert np.all(Y[:, SpreadId(3, 7).index - 1] == 20.0)

    def test_equal_prices_zero(self):
        panel = synthetic_panel(n_days=30, seed=1)
        panel.prices[:, 4] = panel.prices[:, 9]
        Y = build_spreads(panel)
        assert np.all(Y[:, SpreadId(4, 9).index - 1] == 0.0)

    def test_exactly_276_series(self):
        panel = synthetic_panel(n_days=30, seed=1)
        assert build_spreads(panel).shape[1] == 276
        assert len(all_spread_ids()) == 276

    def test_index_bijection(self):
        seen = set()
        for sid in all_spread_ids():
            assert SpreadId.from_index(sid.index) == sid
            seen.add(sid.index)
        assert seen == set(range(1, 277))

    def test_telescoping_identity(self):
        panel = synthetic_panel(n_days=60, seed=3)
        Y = build_spreads(panel)
        rng = np.random.default_rng(0)
        for _ in range(50):
            h1, h2, h3 = sorted(rng.choice(24, size=3, replace=False))
            lhs = Y[:, SpreadId(h1, h2).index - 1] + Y[:, SpreadId(h2, h3).index - 1]
            rhs = Y[:, SpreadId(h1, h3).index - 1]
            assert np.max(np.abs(lhs - rhs)) < 1e-9

    def test_invalid_pairs_rejected(self):
        with pytest.raises(DomainError):
            SpreadId(5, 5)
        with pytest.raises(DomainError):
            SpreadId(7, 3)


class TestFeatures:
    def _spanel(self):
        return SpreadPanel(synthetic_panel(n_days=40, seed=4))

    def test_interaction_load_value(self):
        sp = self._spanel()
        sid = SpreadId(2, 5)
        sp.panel.load[:, 2] = 100.0
        sp.panel.load[:, 5] = 80.0
        feats = sp.features(sid)
        assert np.all(feats[:, 7] == pytest.approx(1800.0))

    def test_equal_wind_gives_zero_spread(self):
        sp = self._spanel()
        sp.panel.wind[:, 1] = sp.panel.wind[:, 6]
        feats = sp.features(SpreadId(1, 6))
        assert np.all(feats[:, 3] == 0.0)

    def test_interaction_identity(self):
        # x8 == x7 * mean(load_h1, load_h2)
        sp = self._spanel()
        for sid in (SpreadId(0, 12), SpreadId(7, 19)):
            feats = sp.features(sid)
            h1, h2 = sid.h1, sid.h2
            mean_load = 0.5 * (sp.panel.load[1:, h1] + sp.panel.load[1:, h2])
            assert np.max(np.abs(feats[:, 7] - feats[:, 6] * mean_load)) < 1e-6

    def test_lagged_own_spread(self):
        sp = self._spanel()
        sid = SpreadId(3, 9)
        feats = sp.features(sid)
        assert np.array_equal(feats[:, 0], sp.Y[:-1, sid.index - 1])

    def test_rows_align_with_response(self):
        sp = self._spanel()
        sid = SpreadId(0, 1)
        assert sp.features(sid).shape[0] == sp.response(sid).shape[0] == sp.n_days - 1


class TestSplit:
    def test_reference_panel_boundaries(self):
        s = split(1917)
        assert s.train == (2, 1150)
        assert s.validation == (1151, 1534)
        assert s.test == (1535, 1917)
        # true index counts, not the rounded published ones
        assert s.lengths["validation"] == 384
        assert s.lengths["test"] == 383

    def test_small_panel_proportions(self):
        s = split(10)
        assert s.train == (2, 6)
        assert s.validation == (7, 8)
        assert s.test == (9, 10)

    def test_rows_are_disjoint_and_cover(self):
        s = split(300)
        r1, r2, r3 = s.rows("train"), s.rows("validation"), s.rows("test")
        assert r1.stop == r2.start and r2.stop == r3.start
        assert r1.start == 0 and r3.stop == 299


class TestAdf:
    def test_white_noise_is_stationary(self):
        rng = np.random.default_rng(0)
        res = adf_test(rng.normal(size=1000))
        assert res.stationary_at_1pct

    def test_random_walk_is_not(self):
        rng = np.random.default_rng(1)
        rejections = 0
        for _ in range(10):
            walk = np.cumsum(rng.normal(size=1000))
            rejections += adf_test(walk).stationary_at_1pct
        assert rejections <= 1

    def test_constant_series_raises(self):
        with pytest.raises(SingularDesign):
            adf_test(np.ones(200))

    def test_matches_reference_implementation(self):
        rng = np.random.default_rng(2)
        y = np.cumsum(rng.normal(size=400)) * 0.1 + rng.normal(size=400)
        mine = adf_test(y, lags=10)
        ref_stat = adfuller(y, maxlag=10, regression="ct", autolag=None)[0]
        assert mine.statistic == pytest.approx(ref_stat, abs=1e-8)


class TestDescriptive:
    def test_symmetric_sample_zero_skew(self):
        panel = synthetic_panel(n_days=40, seed=5)
        panel.prices[:, 0] = np.resize([1.0, -1.0], panel.n_days)
        panel.prices[:, 1] = 0.0
        stats = descriptive_stats(SpreadPanel(panel))
        assert stats.skewness[0, 1] == pytest.approx(0.0, abs=1e-12)

    def test_normal_sample_excess_kurtosis_near_zero(self):
        panel = synthetic_panel(n_days=500, seed=6)
        rng = np.random.default_rng(7)
        panel.prices[:, 0] = rng.normal(size=panel.n_days)
        panel.prices[:, 1] = 0.0
        stats = descriptive_stats(SpreadPanel(panel))
        assert abs(stats.excess_kurtosis[0, 1]) < 0.6

    def test_variance_on_diagonal(self):
        panel = synthetic_panel(n_days=200, seed=8)
        stats = descriptive_stats(SpreadPanel(panel))
        assert stats.price_covariance[5, 5] == pytest.approx(np.var(panel.prices[:, 5], ddof=1))
