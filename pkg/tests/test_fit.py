import numpy as np
import pytest

import oracles
from conftest import make_network
from supergame import equil, fit, lik
from supergame.errors import Separation
from supergame.model import GameKind, GameModel, Theta
from supergame.validate import random_instance


def peer_dataset(n_games=30, T=12, delta=0.25, seed=0):
    """Simulated count-peer games with a known parameter."""
    rng = np.random.default_rng(seed)
    theta = Theta(beta=np.array([-0.8, 0.6]), delta=delta)
    dataset = []
    for _ in range(n_games):
        upper = np.triu(rng.random((T, T)) < 0.35, k=1)
        D = (upper | upper.T).astype(float)
        X = rng.normal(size=(T, 1, 2))
        model = GameModel(
            players=T,
            actions_per_player=1,
            covariates=X,
            adjacency=D,
            kind=GameKind.PEER_EFFECTS_COUNT,
        )
        u = rng.standard_normal((T, 1))
        dataset.append((model, equil.minimal_ne(model, theta, u)))
    return dataset, theta


class TestSmlFit:
    def test_recovers_parameters(self):
        dataset, theta = peer_dataset(n_games=60, T=12, seed=1)
        result = fit.sml_fit(dataset, theta, 10, fit.FitOptions(seed=5))
        d = float(result.theta_hat.delta[0][0])
        assert abs(d - 0.25) < 0.08
        assert result.converged
        assert result.gradient_norm <= 1e-6
        assert result.standard_errors is not None

    def test_monotone_ascent(self):
        # every accepted quasi-Newton iterate improves the CRN-fixed criterion
        dataset, theta = peer_dataset(n_games=10, T=8, seed=2)
        opts = fit.FitOptions(seed=6)
        pack = fit._Packing(dataset[0][0], False)
        crn = lik.CrnBlock.generate(dataset, 5, opts.seed)
        fun, base, free, _scale = fit._objective_factory(dataset, theta, crn, pack, opts)
        values = []

        from scipy import optimize as sp_optimize

        def cb(xk):
            values.append(fun(xk)[0])

        sp_optimize.minimize(
            fun, base[free], jac=True, method="L-BFGS-B", callback=cb,
            options=dict(maxiter=200, ftol=1e-12, gtol=1e-7),
        )
        assert len(values) > 3
        assert np.all(np.diff(values) <= 1e-10)  # minimization: nonincreasing

    def test_delta_always_positive(self):
        # data generated without interaction: the estimate collapses toward zero
        # but stays positive through the exp reparameterization
        dataset, _ = peer_dataset(n_games=40, T=10, delta=0.0, seed=3)
        result = fit.sml_fit(
            dataset, Theta(beta=np.zeros(2), delta=0.1), 5, fit.FitOptions(seed=7)
        )
        d = float(result.theta_hat.delta[0][0])
        assert 0 < d < 0.08

    def test_zero_delta_data_matches_probit(self):
        dataset, _ = peer_dataset(n_games=40, T=10, delta=0.0, seed=4)
        probit = fit.naive_probit(dataset)
        result = fit.sml_fit(
            dataset, Theta(beta=np.zeros(2), delta=0.1), 5, fit.FitOptions(seed=8)
        )
        beta_sml = result.theta_hat.beta[0]
        beta_probit = probit.theta_hat.beta[0]
        assert np.max(np.abs(beta_sml - beta_probit)) < 0.1
        assert abs(float(probit.theta_hat.delta[0][0])) < 0.05

    def test_chain_rule_in_eta(self):
        dataset, theta = peer_dataset(n_games=6, T=8, seed=5)
        opts = fit.FitOptions(seed=9)
        pack = fit._Packing(dataset[0][0], False)
        crn = lik.CrnBlock.generate(dataset, 5, opts.seed)
        fun, base, free, _scale = fit._objective_factory(dataset, theta, crn, pack, opts)
        v = base[free] + 0.05
        _, grad = fun(v)
        fd = oracles.central_difference(lambda x: fun(x)[0], v, step=1e-6)
        assert np.max(np.abs(grad - fd) / np.maximum(np.abs(fd), 1e-6)) < 1e-5

    def test_single_game_warns(self):
        dataset, theta = peer_dataset(n_games=1, T=8, seed=6)
        with pytest.warns(UserWarning, match="single-game"):
            fit.sml_fit(dataset, theta, 3, fit.FitOptions(seed=10, compute_se=False))

    def test_fixed_delta_restriction(self):
        dataset, theta = peer_dataset(n_games=10, T=8, seed=7)
        opts = fit.FitOptions(seed=11, compute_se=False)
        free_fit = fit.sml_fit(dataset, theta, 5, opts)
        pinned = fit.sml_fit(
            dataset, theta, 5, fit.FitOptions(seed=11, compute_se=False, fixed_delta=0.25)
        )
        assert float(pinned.theta_hat.delta[0][0]) == 0.25
        assert pinned.loglik <= free_fit.loglik + 1e-9

    def test_rejects_nonpositive_initial_delta(self):
        dataset, _ = peer_dataset(n_games=4, T=6, seed=8)
        with pytest.raises(ValueError, match="positive"):
            fit.sml_fit(dataset, Theta(beta=np.zeros(2), delta=0.0), 3)


class TestHessianSe:
    def test_symmetry(self):
        dataset, theta = peer_dataset(n_games=15, T=10, seed=9)
        result = fit.sml_fit(dataset, theta, 5, fit.FitOptions(seed=12, compute_se=False))
        H = fit.simulated_hessian(dataset, result.theta_hat, 5, options=fit.FitOptions(seed=12))
        scale = np.max(np.abs(H))
        assert np.max(np.abs(H - H.T)) / scale < 1e-6

    def test_exact_on_synthetic_quadratic(self, monkeypatch):
        # with a linear gradient the central differences are exact, so the SEs
        # must equal the analytic inverse-curvature values to round-off
        dataset, theta = peer_dataset(n_games=2, T=6, seed=10)
        pack = fit._Packing(dataset[0][0], False)
        A = np.diag([4.0, 2.0, 9.0])
        v_star = pack.to_internal(Theta(beta=np.array([0.3, -0.2]), delta=1.0))  # eta = 0

        monkeypatch.setattr(fit, "build_templates", lambda *a, **k: None)

        def fake_grad(_templates, th):
            v = pack.to_internal(th)
            return 0.0, -(A @ (v - v_star))

        monkeypatch.setattr(fit, "grad_from_templates", fake_grad)
        theta_hat = pack.to_theta(v_star)  # delta_hat = 1 so the delta-method factor is 1
        se = fit.hessian_se(dataset, theta_hat, 3, options=fit.FitOptions(seed=13))
        np.testing.assert_allclose(se, 1 / np.sqrt(np.diag(A)), rtol=1e-9)

    def test_delta_method_adjustment(self, monkeypatch):
        dataset, theta = peer_dataset(n_games=2, T=6, seed=11)
        pack = fit._Packing(dataset[0][0], False)
        A = np.eye(3)
        delta_hat = 0.4
        v_star = pack.to_internal(Theta(beta=np.zeros(2), delta=delta_hat))

        monkeypatch.setattr(fit, "build_templates", lambda *a, **k: None)

        def fake_grad(_templates, th):
            # gradient in theta space chosen so the eta-space gradient is -A (v - v*)
            v = pack.to_internal(th)
            g = -(A @ (v - v_star))
            g[pack.delta_slice] /= np.exp(v[pack.delta_slice])
            return 0.0, g

        monkeypatch.setattr(fit, "grad_from_templates", fake_grad)
        se = fit.hessian_se(dataset, pack.to_theta(v_star), 3, options=fit.FitOptions(seed=14))
        assert se[-1] == pytest.approx(delta_hat * 1.0, rel=1e-9)  # SE_delta = delta * SE_eta

    def test_singular_hessian_raises(self, monkeypatch):
        from supergame.errors import SingularHessian

        dataset, theta = peer_dataset(n_games=2, T=6, seed=12)
        pack = fit._Packing(dataset[0][0], False)
        A = np.diag([1.0, 1.0, 0.0])  # flat direction
        v_star = pack.to_internal(theta)
        monkeypatch.setattr(fit, "build_templates", lambda *a, **k: None)
        monkeypatch.setattr(
            fit, "grad_from_templates", lambda _t, th: (0.0, -(A @ (pack.to_internal(th) - v_star)))
        )
        with pytest.raises(SingularHessian):
            fit.hessian_se(dataset, pack.to_theta(v_star), 3, options=fit.FitOptions(seed=15))


class TestLrTest:
    def test_nonnegative_and_calibrated_shape(self):
        dataset, theta = peer_dataset(n_games=20, T=10, delta=0.25, seed=13)
        opts = fit.FitOptions(seed=16, compute_se=False)
        unres = fit.sml_fit(dataset, theta, 5, opts)
        res = fit.lr_test(dataset, unres, theta, 0.25, opts)
        assert res.statistic >= -1e-8
        assert 0 <= res.p_value <= 1
        far = fit.lr_test(dataset, unres, theta, 0.9, opts)
        assert far.statistic > res.statistic  # a remote null is easier to reject


class TestNaiveProbit:
    def test_matches_irls_oracle(self):
        # textbook fixture: strategic statistic treated as exogenous
        dataset, _ = peer_dataset(n_games=25, T=10, seed=14)
        result = fit.naive_probit(dataset)
        Z, y, _ = fit._probit_design(dataset, include_effects=False)
        b_irls, ll_irls = oracles.irls_probit(Z, y)
        packed = np.concatenate([result.theta_hat.beta[0], result.theta_hat.delta[0]])
        np.testing.assert_allclose(packed, b_irls, atol=1e-8)
        assert result.loglik == pytest.approx(ll_irls, abs=1e-8)

    def test_consistent_when_no_interaction(self):
        dataset, _ = peer_dataset(n_games=60, T=12, delta=0.0, seed=15)
        result = fit.naive_probit(dataset)
        assert abs(float(result.theta_hat.delta[0][0])) < 0.04

    def test_separation_detected(self):
        # a covariate that perfectly predicts the outcome
        X = np.linspace(-1, 1, 20).reshape(20, 1, 1)
        model = GameModel(
            players=20,
            actions_per_player=1,
            covariates=X,
            adjacency=np.zeros((20, 20)),
            kind=GameKind.PEER_EFFECTS_COUNT,
        )
        y = (X[:, :, 0] > 0).astype(np.int8)
        with pytest.raises(Separation):
            fit.naive_probit([(model, y)])

    def test_network_effects_dummies(self):
        model, theta = make_network(T=12, effects=True, seed=16, delta=0.1, intercept=-1.2)
        rng = np.random.default_rng(17)
        u = rng.standard_normal((12, 11))
        y = equil.minimal_ne(model, theta, u)
        result = fit.naive_probit([(model, y)], include_effects=True)
        assert result.theta_hat.sender_effects is not None
        assert result.theta_hat.receiver_effects[0] == 0.0  # normalization
