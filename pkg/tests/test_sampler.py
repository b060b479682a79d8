import collections

import numpy as np
import pytest

import oracles
from conftest import make_network, uniforms
from supergame import equil, oracle, sampler
from supergame.model import EvalContext, GameKind, GameModel, Theta
from supergame.validate import (
    random_instance,
    realized_target,
    suite_lambda_coverage,
    suite_sampler_validity,
    suite_threshold_agreement,
)

TARGET_11 = np.ones((2, 1), dtype=np.int8)


class TestFindThreshold:
    """The two-player walkthrough, drawing player 0 first."""

    def test_first_call_presumes_partner_plays(self, coordination):
        g, th = coordination
        u = np.full((2, 1), -np.inf)
        assert sampler.find_threshold(g, th, TARGET_11, u, 0, 0) == 1.0  # x'b + delta

    def test_second_call_on_the_fence(self, coordination):
        g, th = coordination
        u = np.array([[0.5], [-np.inf]])  # player 0 drawn inside (0, 1]
        assert sampler.find_threshold(g, th, TARGET_11, u, 1, 0) == 0.0  # x'b

    def test_second_call_dominant_partner(self, coordination):
        g, th = coordination
        u = np.array([[-0.3], [-np.inf]])  # player 0 strictly dominant-in
        assert sampler.find_threshold(g, th, TARGET_11, u, 1, 0) == 1.0

    def test_counterfactual_is_sparser_than_target(self):
        # the equilibrium inside the threshold computation never exceeds the target
        rng = np.random.default_rng(0)
        for _ in range(60):
            model, theta = random_instance(rng, effects=bool(rng.integers(2)))
            target = realized_target(model, theta, rng)
            actives = np.argwhere(target == 1)
            if actives.size == 0:
                continue
            U = uniforms(rng, 1, model.players, model.actions_per_player)
            raw = sampler.sample_scenarios_raw(model, theta, target, U)
            k = int(rng.integers(len(actives)))
            t, m = map(int, actives[k])
            u_state = raw["u"][0].copy()
            for tt, mm in actives[k:]:
                u_state[tt, mm] = -np.inf
            ctx = EvalContext(model, theta)
            cu = sampler._counterfactual_base(ctx, target, u_state)
            g_target = ctx.utilities(target[None].astype(float))[0]
            cu[t, m] = g_target[t, m] + 1.0
            y_tilde = equil.minimal_ne_batch(ctx, cu[None])[0]
            assert np.all(y_tilde <= target)


class TestSampleScenario:
    def test_both_dominant_scenario_weight(self, coordination):
        g, th = coordination
        # uniforms small enough that both draws land at or below zero
        draw = sampler.sample_scenario(g, th, TARGET_11, np.full((2, 1), 0.3))
        assert np.all(draw.u <= 0)
        expected = 2 * np.log(oracles.A_RATIO)
        assert draw.log_lambda == pytest.approx(expected, abs=1e-12)

    def test_inactive_target_stays_inactive(self, coordination):
        g, th = coordination
        rng = np.random.default_rng(1)
        target = np.zeros((2, 1), dtype=np.int8)
        for _ in range(50):
            draw = sampler.sample_scenario(g, th, target, rng.random((2, 1)) * 0.998 + 0.001)
            assert np.all(draw.u > 0)
            assert equil.minimal_ne(g, th, draw.u).sum() == 0

    def test_empirical_frequencies_match_lambda(self, coordination):
        g, th = coordination
        rng = np.random.default_rng(2)
        n = 100_000
        raw = sampler.sample_scenarios_raw(g, th, TARGET_11, uniforms(rng, n, 2, 1))
        keys = collections.Counter()
        lam = {}
        for s in range(n):
            k = raw["lower_levels"][s].tobytes() + raw["upper_levels"][s].tobytes()
            keys[k] += 1
            lam[k] = np.exp(raw["log_lambda"][s])
        assert len(keys) == 3
        expected = sorted(
            [
                oracles.A_RATIO**2,
                1 - oracles.A_RATIO,
                (1 - oracles.A_RATIO) * oracles.A_RATIO,
            ]
        )
        got_lambda = sorted(lam.values())
        np.testing.assert_allclose(got_lambda, expected, atol=1e-12)
        for k, count in keys.items():
            assert count / n == pytest.approx(lam[k], abs=4 * np.sqrt(lam[k] / n) + 1e-4)

    def test_minimal_ne_guarantee_across_kinds(self):
        res = suite_sampler_validity(n_instances=60, total_draws=3000, seed=11)
        assert res.passed, res.failures

    def test_sorted_order_also_valid(self):
        res = suite_sampler_validity(n_instances=30, total_draws=1500, seed=12, order="sorted")
        assert res.passed, res.failures

    def test_deterministic_given_uniforms(self, coordination):
        g, th = coordination
        rng = np.random.default_rng(3)
        U = uniforms(rng, 20, 2, 1)
        a = sampler.sample_scenarios_raw(g, th, TARGET_11, U)
        b = sampler.sample_scenarios_raw(g, th, TARGET_11, U)
        assert np.array_equal(a["u"], b["u"])
        assert np.array_equal(a["log_lambda"], b["log_lambda"])

    def test_rejects_bad_uniforms(self, coordination):
        g, th = coordination
        with pytest.raises(ValueError, match="strictly inside"):
            sampler.sample_scenarios(g, th, TARGET_11, np.zeros((1, 2, 1)))

    def test_extreme_linear_index_stays_finite(self):
        # very unlikely targets still sample with finite log weights
        g = GameModel(
            players=2,
            actions_per_player=1,
            covariates=np.full((2, 1, 1), -12.0),
            kind=GameKind.COORDINATION,
        )
        th = Theta(beta=np.ones(1), delta=0.5)
        draw = sampler.sample_scenario(g, th, TARGET_11, np.full((2, 1), 0.5))
        assert np.isfinite(draw.log_lambda)
        assert np.array_equal(equil.minimal_ne(g, th, draw.u), TARGET_11)


class TestLocateScenario:
    def test_both_below_first_boundary(self, coordination):
        g, th = coordination
        sc = sampler.locate_scenario(g, th, np.array([[-0.3], [-0.3]]))
        assert np.all(np.isneginf(sc.lower_levels))
        assert np.all(sc.upper_levels == 0.0)

    def test_fence_bucket(self, coordination):
        g, th = coordination
        sc = sampler.locate_scenario(g, th, np.array([[0.4], [-0.3]]))
        assert sc.lower_levels[0, 0, 0] == 0.0 and sc.upper_levels[0, 0, 0] == 1.0
        assert np.isneginf(sc.lower_levels[1, 0, 0]) and sc.upper_levels[1, 0, 0] == 0.0

    def test_boundary_value_goes_left(self, coordination):
        # buckets are left-open/right-closed: a shock exactly on a boundary
        # belongs to the bucket that ends there
        g, th = coordination
        sc = sampler.locate_scenario(g, th, np.array([[0.0], [1.0]]))
        assert sc.upper_levels[0, 0, 0] == 0.0
        assert (sc.lower_levels[1, 0, 0], sc.upper_levels[1, 0, 0]) == (0.0, 1.0)

    def test_infinite_shock_rejected(self, coordination):
        g, th = coordination
        with pytest.raises(ValueError, match="finite"):
            sampler.locate_scenario(g, th, np.array([[np.inf], [0.0]]))


class TestLogZeta:
    def test_fence_fence_scenario(self, coordination):
        g, th = coordination
        fence = sampler.Scenario(
            lower_levels=np.zeros((2, 1, 1)), upper_levels=np.ones((2, 1, 1))
        )
        expected = 2 * np.log(oracles.PHI_1_MINUS_PHI_0)
        assert sampler.log_zeta(g, th, fence) == pytest.approx(expected, abs=1e-13)

    def test_unbounded_scenario_has_full_mass(self, coordination):
        g, th = coordination
        sc = sampler.Scenario(
            lower_levels=np.full((2, 1, 1), -np.inf), upper_levels=np.full((2, 1, 1), np.inf)
        )
        assert sampler.log_zeta(g, th, sc) == 0.0

    def test_partition_masses_sum_to_one(self, coordination):
        g, th = coordination
        cells = oracle.enumerate_scenarios(g, th)
        assert len(cells) == 9
        total = sum(np.exp(sampler.log_zeta(g, th, c.scenario)) for c in cells)
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_recycling_reprices_at_new_theta(self, coordination):
        g, th = coordination
        fence = sampler.Scenario(
            lower_levels=np.zeros((2, 1, 1)), upper_levels=np.ones((2, 1, 1))
        )
        th2 = Theta(beta=np.zeros(1), delta=0.5)
        expected = 2 * oracles.phi_log_interval(0.0, 0.5)
        assert sampler.log_zeta(g, th2, fence) == pytest.approx(expected, abs=1e-12)


class TestLogLambda:
    def test_on_the_fence_first_player(self, coordination):
        # player 0 drawn into (0, 1], player 1 then below 0 for sure
        g, th = coordination
        q0 = 0.9  # quantile(0.9 * Phi(1)) lands in (0, 1]
        draw = sampler.sample_scenario(g, th, TARGET_11, np.array([[q0], [0.4]]))
        assert 0 < draw.u[0, 0] <= 1
        assert draw.log_lambda == pytest.approx(np.log(1 - oracles.A_RATIO), abs=1e-12)

    def test_dominant_then_fence(self, coordination):
        g, th = coordination
        # player 0 below zero, player 1 in its fence bucket
        draw = sampler.sample_scenario(g, th, TARGET_11, np.array([[0.3], [0.95]]))
        assert draw.u[0, 0] <= 0 < draw.u[1, 0] <= 1
        expected = np.log(oracles.A_RATIO) + np.log(1 - oracles.A_RATIO)
        assert draw.log_lambda == pytest.approx(expected, abs=1e-12)

    def test_adding_up_over_target_set(self):
        rng = np.random.default_rng(4)
        checked = 0
        while checked < 6:
            model, theta = random_instance(
                rng, [GameKind.COORDINATION, GameKind.PEER_EFFECTS_COUNT][checked % 2]
            )
            if model.players > 3:
                continue
            target = realized_target(model, theta, rng)
            cells = oracle.enumerate_scenarios(model, theta)
            ctx = EvalContext(model, theta)
            reps = np.stack([c.representative for c in cells])
            ne = equil.minimal_ne_batch(ctx, reps)
            members = [c for c, h in zip(cells, np.all(ne == target[None], axis=(1, 2))) if h]
            if not (1 < len(members) <= 64):
                continue
            checked += 1
            n = 20_000
            raw = sampler.sample_scenarios_raw(
                model, theta, target, uniforms(rng, n, model.players, model.actions_per_player)
            )
            lam = {}
            for s in range(n):
                k = raw["lower_levels"][s].tobytes() + raw["upper_levels"][s].tobytes()
                lam[k] = raw["log_lambda"][s]
            if len(lam) == len(members):
                assert sum(np.exp(v) for v in lam.values()) == pytest.approx(1.0, abs=1e-10)

    def test_lambda_constant_within_scenario(self, coordination):
        # two different draws landing in the same scenario carry the same weight
        g, th = coordination
        rng = np.random.default_rng(5)
        raw = sampler.sample_scenarios_raw(g, th, TARGET_11, uniforms(rng, 3000, 2, 1))
        seen = {}
        for s in range(3000):
            k = raw["lower_levels"][s].tobytes() + raw["upper_levels"][s].tobytes()
            if k in seen:
                assert raw["log_lambda"][s] == seen[k]
            seen[k] = raw["log_lambda"][s]


class TestThresholdOracleAgreement:
    def test_quick_cross_check(self):
        res = suite_threshold_agreement(n_trials=60, seed=6)
        assert res.passed, res.failures


class TestCoverageSuite:
    def test_quick_coverage(self):
        res = suite_lambda_coverage(n_instances=3, n_draws=20_000, seed=7)
        assert res.passed, res.failures
