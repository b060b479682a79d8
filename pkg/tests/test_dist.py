import numpy as np
import pytest
from scipy import stats as sp_stats

import oracles
from supergame import dist
from supergame.dist import ShockFamily, TruncationSide


class TestCdf:
    def test_symmetry_at_zero(self):
        assert dist.cdf(0.0) == 0.5

    def test_limits(self):
        assert dist.cdf(np.inf) == 1.0
        assert dist.cdf(-np.inf) == 0.0

    def test_against_erf_oracle(self):
        assert dist.cdf(1.0) == pytest.approx(oracles.PHI_1, abs=1e-13)
        for x in (-3.7, -1.2, 0.3, 2.5, 6.0):
            assert dist.cdf(x) == pytest.approx(oracles.phi_cdf(x), rel=1e-13)

    def test_monotone(self):
        x = np.linspace(-9, 9, 500)
        assert np.all(np.diff(dist.cdf(x)) >= 0)

    def test_logistic(self):
        assert dist.cdf(0.0, ShockFamily.LOGISTIC) == 0.5
        assert dist.cdf(2.0, ShockFamily.LOGISTIC) == pytest.approx(
            oracles.logistic_cdf(2.0), rel=1e-14
        )


class TestQuantile:
    def test_roundtrip_within_1e10(self):
        # probabilities keep full relative precision only in the lower tail;
        # for x > 0 the round trip goes through the complementary form, the
        # same representation every internal tail evaluation uses
        for fam in ShockFamily:
            x = np.linspace(-8, 0, 161)
            back = dist.quantile(dist.cdf(x, fam), fam)
            assert np.max(np.abs(back - x)) < 1e-10
            upper = -dist.quantile(dist.cdf(x, fam), fam)  # = quantile(sf(-x)) reflected
            assert np.max(np.abs(upper - (-x))) < 1e-10

    def test_accuracy_against_bisection_oracle(self):
        for q in (1e-15, 1e-9, 0.11, 0.5, 0.75, 1 - 1e-9):
            assert dist.quantile(q) == pytest.approx(oracles.phi_quantile(q), abs=1e-10)

    def test_known_value(self):
        assert dist.quantile(0.75) == pytest.approx(oracles.Q75, abs=1e-12)

    def test_clamp_counter(self):
        dist.reset_quantile_clamp_count()
        dist.quantile(np.array([1e-20, 0.5, 1.0]))
        assert dist.quantile_clamp_count() == 2
        dist.reset_quantile_clamp_count()
        assert dist.quantile_clamp_count() == 0


class TestLogIntervalMass:
    def test_total_mass(self):
        assert dist.log_interval_mass(-np.inf, np.inf) == 0.0

    def test_half_mass(self):
        assert dist.log_interval_mass(0.0, np.inf) == pytest.approx(np.log(0.5), abs=1e-14)

    def test_unit_interval(self):
        expected = np.log(oracles.PHI_1_MINUS_PHI_0)
        assert dist.log_interval_mass(0.0, 1.0) == pytest.approx(expected, abs=1e-13)

    def test_empty_and_invalid(self):
        assert dist.log_interval_mass(1.3, 1.3) == -np.inf
        with pytest.raises(ValueError):
            dist.log_interval_mass(2.0, 1.0)

    def test_matches_cdf_difference(self):
        rng = np.random.default_rng(0)
        a = rng.uniform(-6, 6, size=4000)
        b = a + rng.uniform(1e-3, 6, size=4000)
        got = np.exp(dist.log_interval_mass(a, b))
        # the comparison difference itself must be formed tail-stably:
        # F(b) - F(a) = [1 - F(a)] - [1 - F(b)] when both endpoints are positive
        want = np.where(
            a >= 0, dist.cdf(-a) - dist.cdf(-b), dist.cdf(b) - dist.cdf(a)
        )
        assert np.all(got > 0) and np.all(got < 1)
        assert np.max(np.abs(got - want) / want) < 1e-12

    def test_matches_erf_series_oracle(self):
        rng = np.random.default_rng(3)
        a = rng.uniform(-6, 6, size=200)
        b = a + rng.uniform(1e-3, 6, size=200)
        got = dist.log_interval_mass(a, b)
        want = np.array([oracles.phi_log_interval(x, y) for x, y in zip(a, b)])
        assert np.max(np.abs(got - want) / np.abs(want)) < 1e-12

    @pytest.mark.parametrize("lo,hi", [(10.0, 11.0), (-31.0, -30.0), (38.0, 40.0)])
    def test_deep_tail_relative_accuracy(self, lo, hi):
        # naive cdf differencing underflows out here; the oracle does not
        got = dist.log_interval_mass(lo, hi)
        want = oracles.phi_log_interval(lo, hi)
        assert got == pytest.approx(want, rel=1e-11)

    def test_logistic_interval(self):
        got = np.exp(dist.log_interval_mass(-1.0, 2.0, ShockFamily.LOGISTIC))
        want = oracles.logistic_cdf(2.0) - oracles.logistic_cdf(-1.0)
        assert got == pytest.approx(want, rel=1e-13)


class TestSampleTruncated:
    def test_median_untruncated(self):
        assert dist.sample_truncated(0.5, np.inf, TruncationSide.BELOW_OR_EQUAL) == 0.0

    def test_supremum_below_zero(self):
        q = 1.0 - 1e-12
        draw = dist.sample_truncated(q, 0.0, TruncationSide.BELOW_OR_EQUAL)
        assert -1e-10 < draw <= 0.0

    def test_above_median(self):
        draw = dist.sample_truncated(0.5, 0.0, TruncationSide.ABOVE)
        assert draw == pytest.approx(oracles.Q75, abs=1e-12)

    def test_rejects_bad_q(self):
        for q in (0.0, 1.0, -0.2, 1.3):
            with pytest.raises(ValueError):
                dist.sample_truncated(q, 0.0, TruncationSide.ABOVE)

    def test_rejects_inconsistent_bound(self):
        with pytest.raises(ValueError):
            dist.sample_truncated(0.5, -np.inf, TruncationSide.BELOW_OR_EQUAL)
        with pytest.raises(ValueError):
            dist.sample_truncated(0.5, np.inf, TruncationSide.ABOVE)

    def test_side_constraint_holds_everywhere(self):
        # a million (q, bound) pairs per side, with extreme bounds included
        rng = np.random.default_rng(1)
        n = 1_000_000
        q = rng.uniform(1e-12, 1 - 1e-12, size=n)
        bound = rng.uniform(-42, 42, size=n)
        below = dist.sample_truncated(q, bound, TruncationSide.BELOW_OR_EQUAL)
        assert np.all(below <= bound)
        above = dist.sample_truncated(q, bound, TruncationSide.ABOVE)
        assert np.all(above > bound)

    def test_deterministic_in_q(self):
        q = np.linspace(0.01, 0.99, 101)
        a = dist.sample_truncated(q, 1.3, TruncationSide.BELOW_OR_EQUAL)
        b = dist.sample_truncated(q, 1.3, TruncationSide.BELOW_OR_EQUAL)
        assert np.array_equal(a, b)

    @pytest.mark.parametrize(
        "side,bound",
        [
            (TruncationSide.BELOW_OR_EQUAL, 0.7),
            (TruncationSide.BELOW_OR_EQUAL, -2.0),
            (TruncationSide.ABOVE, -0.5),
            (TruncationSide.ABOVE, 1.5),
        ],
    )
    def test_ks_against_truncated_cdf(self, side, bound):
        rng = np.random.default_rng(7)
        q = rng.uniform(1e-12, 1 - 1e-12, size=100_000)
        draws = dist.sample_truncated(q, bound, side)
        F_b = dist.cdf(bound)
        if side is TruncationSide.BELOW_OR_EQUAL:
            cdf = lambda x: np.clip(dist.cdf(np.minimum(x, bound)) / F_b, 0, 1)
        else:
            cdf = lambda x: np.clip((dist.cdf(np.maximum(x, bound)) - F_b) / (1 - F_b), 0, 1)
        stat = sp_stats.kstest(draws, cdf)
        assert stat.pvalue > 1e-3

    def test_deep_tail_draw_is_exact(self):
        # far beyond double-precision CDF underflow the draw still lands inside
        draw = dist.sample_truncated(0.5, -40.0, TruncationSide.BELOW_OR_EQUAL)
        assert draw <= -40.0
        assert np.isfinite(draw)


def test_log_pdf_matches_oracle():
    for x in (-2.0, 0.0, 1.0, 4.5):
        assert dist.log_pdf(x) == pytest.approx(np.log(oracles.phi_pdf(x)), rel=1e-12)
    assert dist.log_pdf(np.inf) == -np.inf
    assert dist.log_pdf(-np.inf) == -np.inf
