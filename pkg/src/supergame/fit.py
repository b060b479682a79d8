"""SML estimation: quasi-Newton maximization, curvature SEs, naive probit baseline.

The strategic parameter is optimized through delta = exp(eta) so every
parameter visited during optimization keeps the game supermodular, which the
sampler and the equilibrium theory require. With a single strategic parameter
the sampled scenarios are recycled: the sampler runs once at theta0 and the
optimizer only re-prices frozen scenario geometry. Otherwise scenarios are
re-sampled from the fixed uniform block at each major iteration.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import optimize as sp_optimize
from scipy import stats as sp_stats

from . import dist
from .errors import Separation, SingularHessian
from .lik import CrnBlock, build_templates, grad_from_templates, recyclable
from .model import (
    GameKind,
    GameModel,
    Theta,
    strategic_statistic,
    theta_dim,
    theta_from_vector,
    theta_labels,
    theta_to_vector,
)


@dataclass
class FitOptions:
    seed: int = 0
    order: str = "index"
    recycle: str = "auto"  # "auto" | "off"
    grad_tol: float = 1e-6
    rel_tol: float = 1e-10
    max_iter: int = 500
    max_major_iter: int = 25
    inner_iter: int = 40  # L-BFGS iterations between scenario refreshes (recycle="off")
    effects_ridge: float = 1e-8
    two_stage: bool = False
    stage_one_draws: int = 1
    refresh_rounds: int = 0  # re-anchor theta0 at the current estimate and refit
    refresh_tol: float = 1e-4
    compute_se: bool = True
    fixed_delta: float | None = None
    wald_z: float = 1.959963984540054  # 97.5% normal quantile


@dataclass
class FitResult:
    theta_hat: Theta
    standard_errors: np.ndarray | None
    loglik: float
    iterations: int
    converged: bool
    gradient_norm: float
    labels: list[str] = field(default_factory=list)
    n_draws: int = 0
    seed: int = 0
    hessian_condition: float | None = None
    theta0: Theta | None = None  # importance anchor of the final criterion

    def named_se(self) -> dict:
        if self.standard_errors is None:
            return {}
        return dict(zip(self.labels, self.standard_errors))


# ---------------------------------------------------------------------------
# packing between theta and the unconstrained optimization vector
# ---------------------------------------------------------------------------


class _Packing:
    """Optimization runs on [beta..., eta = log(delta)..., A..., B...]."""

    def __init__(self, model: GameModel, with_effects: bool):
        self.model = model
        self.with_effects = with_effects
        n = model.n_action_types
        K = model.n_covariates
        P = model.stat_dim
        self.n_beta = n * K
        self.n_delta = n * P
        self.dim = theta_dim(model, with_effects)
        self.delta_slice = slice(self.n_beta, self.n_beta + self.n_delta)
        self.effect_slice = slice(self.n_beta + self.n_delta, self.dim)

    def to_internal(self, theta: Theta) -> np.ndarray:
        v = theta_to_vector(self.model, theta).copy()
        d = v[self.delta_slice]
        if np.any(d <= 0):
            raise ValueError("initial delta must be strictly positive (delta = exp(eta))")
        v[self.delta_slice] = np.log(d)
        return v

    def to_theta(self, v: np.ndarray) -> Theta:
        w = np.asarray(v, dtype=float).copy()
        w[self.delta_slice] = np.exp(w[self.delta_slice])
        return theta_from_vector(self.model, w, self.with_effects)

    def chain_gradient(self, grad_theta: np.ndarray, v: np.ndarray) -> np.ndarray:
        g = grad_theta.copy()
        g[self.delta_slice] *= np.exp(v[self.delta_slice])
        return g


def _ridge_terms(pack: _Packing, v: np.ndarray, ridge: float):
    if not pack.with_effects or ridge <= 0:
        return 0.0, np.zeros_like(v)
    eff = v[pack.effect_slice]
    grad = np.zeros_like(v)
    grad[pack.effect_slice] = ridge * eff
    return 0.5 * ridge * float(eff @ eff), grad


# ---------------------------------------------------------------------------
# SML fit
# ---------------------------------------------------------------------------


def sml_fit(dataset, theta_init: Theta, n_draws: int, options: FitOptions | None = None):
    """Maximize the simulated log-likelihood; returns a FitResult.

    Single-game fits carry standard errors of unknown statistical quality;
    a warning is emitted in that case.
    """
    opts = options or FitOptions()
    if n_draws < 1:
        raise ValueError("n_draws must be at least 1")
    model0 = dataset[0][0]
    pack = _Packing(model0, theta_init.has_effects)
    crn = CrnBlock.generate(dataset, n_draws, opts.seed)
    use_recycling = opts.recycle != "off" and recyclable(dataset)

    theta0 = theta_init
    if opts.two_stage and use_recycling:
        stage_opts = replace(opts, two_stage=False, refresh_rounds=0, compute_se=False)
        pilot = sml_fit(dataset, theta_init, opts.stage_one_draws, stage_opts)
        theta0 = pilot.theta_hat

    if use_recycling:
        v_hat, loglik, iters, converged, gnorm = _maximize_once(
            dataset, theta0, crn, pack, opts, opts.max_iter
        )
        for _ in range(opts.refresh_rounds):
            # re-anchor the importance distribution at the current estimate
            theta0 = pack.to_theta(v_hat)
            v_new, loglik, it2, converged, gnorm = _maximize_once(
                dataset, theta0, crn, pack, opts, opts.max_iter
            )
            moved = float(np.max(np.abs(v_new - v_hat)))
            v_hat = v_new
            iters += it2
            if moved <= opts.refresh_tol:
                break
    else:
        v_hat, loglik, iters, converged, gnorm, theta0 = _maximize_with_refresh(
            dataset, theta0, crn, pack, opts
        )

    theta_hat = pack.to_theta(v_hat)
    result = FitResult(
        theta_hat=theta_hat,
        standard_errors=None,
        loglik=loglik,
        iterations=iters,
        converged=converged,
        gradient_norm=gnorm,
        labels=theta_labels(model0, pack.with_effects),
        n_draws=n_draws,
        seed=opts.seed,
        theta0=theta0,
    )
    if opts.compute_se:
        try:
            se, cond = hessian_se(dataset, theta_hat, n_draws, crn, options=opts, return_cond=True)
            result.standard_errors = se
            result.hessian_condition = cond
        except SingularHessian:
            result.standard_errors = None
    if len(dataset) == 1:
        warnings.warn(
            "single-game fit: standard errors measure criterion curvature only "
            "and have unknown statistical properties",
            stacklevel=2,
        )
    return result


def _objective_factory(dataset, theta0, crn, pack, opts):
    templates = build_templates(dataset, theta0, crn, opts.order)
    free = np.ones(pack.dim, dtype=bool)
    base = pack.to_internal(theta0)
    if opts.fixed_delta is not None:
        if opts.fixed_delta <= 0:
            raise ValueError("fixed_delta must be strictly positive")
        free[pack.delta_slice] = False
        base[pack.delta_slice] = np.log(opts.fixed_delta)
    # optimize the per-coordinate mean so the tolerances are scale-free:
    # a raw log-likelihood of order -10^3 drowns a 1e-6 gradient in round-off
    scale = 1.0 / sum(m.players * m.actions_per_player for m, _ in dataset)

    def fun(vfree):
        v = base.copy()
        v[free] = vfree
        ll, grad_theta = grad_from_templates(templates, pack.to_theta(v))
        g = pack.chain_gradient(grad_theta, v)
        pen, pen_grad = _ridge_terms(pack, v, opts.effects_ridge)
        return -(ll - pen) * scale, -(g - pen_grad)[free] * scale

    return fun, base, free, scale


def _maximize_once(dataset, theta0, crn, pack, opts, maxiter):
    fun, base, free, scale = _objective_factory(dataset, theta0, crn, pack, opts)
    res = sp_optimize.minimize(
        fun,
        base[free],
        jac=True,
        method="L-BFGS-B",
        options=dict(maxiter=maxiter, ftol=opts.rel_tol, gtol=opts.grad_tol, maxcor=20),
    )
    iters = int(res.nit)
    gnorm = float(np.max(np.abs(res.jac)))
    if res.success and gnorm > opts.grad_tol and iters < maxiter:
        # the relative-change rule fired first; polish until the gradient rule holds
        polish = sp_optimize.minimize(
            fun,
            res.x,
            jac=True,
            method="L-BFGS-B",
            options=dict(maxiter=maxiter - iters, ftol=1e-16, gtol=opts.grad_tol, maxcor=20),
        )
        if polish.fun <= res.fun and np.max(np.abs(polish.jac)) < gnorm:
            res = polish
            iters += int(polish.nit)
            gnorm = float(np.max(np.abs(res.jac)))
    v = base.copy()
    v[free] = res.x
    converged = gnorm <= opts.grad_tol
    return v, -float(res.fun) / scale, iters, converged, gnorm


def _maximize_with_refresh(dataset, theta_init, crn, pack, opts):
    """Re-sample scenarios from the fixed CRN block at each major iteration."""
    theta0 = theta_init
    total_iters = 0
    v_prev = None
    result = None
    for _ in range(opts.max_major_iter):
        v, ll, iters, converged, gnorm = _maximize_once(
            dataset, theta0, crn, pack, opts, opts.inner_iter
        )
        total_iters += iters
        moved = np.inf if v_prev is None else float(np.max(np.abs(v - v_prev)))
        v_prev = v
        result = (v, ll, total_iters, converged, gnorm, theta0)
        if converged and moved <= 1e-6:
            break
        theta0 = pack.to_theta(v)
    return result


# ---------------------------------------------------------------------------
# curvature standard errors
# ---------------------------------------------------------------------------


def simulated_hessian(
    dataset,
    theta: Theta,
    n_draws: int,
    crn: CrnBlock | None = None,
    options: FitOptions | None = None,
    step: float = 1e-5,
) -> np.ndarray:
    """Hessian of the simulated log-likelihood in the internal (eta) coordinates.

    Central differences of the analytic gradient; scenarios are held fixed at
    theta0 = theta so the differentiated criterion is the recycled one.
    """
    opts = options or FitOptions()
    if crn is None:
        crn = CrnBlock.generate(dataset, n_draws, opts.seed)
    pack = _Packing(dataset[0][0], theta.has_effects)
    templates = build_templates(dataset, theta, crn, opts.order)

    def grad_at(v):
        _, grad_theta = grad_from_templates(templates, pack.to_theta(v))
        g = pack.chain_gradient(grad_theta, v)
        _, pen_grad = _ridge_terms(pack, v, opts.effects_ridge)
        return g - pen_grad

    v0 = pack.to_internal(theta)
    dim = v0.size
    H = np.empty((dim, dim))
    for j in range(dim):
        h = step * max(1.0, abs(v0[j]))
        vp = v0.copy()
        vp[j] += h
        vm = v0.copy()
        vm[j] -= h
        H[:, j] = (grad_at(vp) - grad_at(vm)) / (2 * h)
    return H


def hessian_se(
    dataset,
    theta_hat: Theta,
    n_draws: int,
    crn: CrnBlock | None = None,
    options: FitOptions | None = None,
    return_cond: bool = False,
):
    """Standard errors from the curvature of the simulated log-likelihood.

    sqrt of the diagonal of the inverse negative Hessian, computed in the
    eta = log(delta) coordinates and mapped back to delta by the delta
    method (SE_delta = delta_hat * SE_eta).
    """
    opts = options or FitOptions()
    pack = _Packing(dataset[0][0], theta_hat.has_effects)
    H = simulated_hessian(dataset, theta_hat, n_draws, crn, opts)
    H = 0.5 * (H + H.T)
    neg = -H
    cond = float(np.linalg.cond(neg))
    if not np.isfinite(cond) or cond > 1e12:
        raise SingularHessian(
            f"simulated Hessian is numerically singular (condition number {cond:.3e})",
            condition_number=cond,
        )
    cov = np.linalg.inv(neg)
    diag = np.diag(cov)
    if np.any(diag <= 0):
        raise SingularHessian(
            "negative-Hessian inverse has nonpositive diagonal entries",
            condition_number=cond,
        )
    se = np.sqrt(diag)
    v0 = pack.to_internal(theta_hat)
    se[pack.delta_slice] *= np.exp(v0[pack.delta_slice])  # delta-method for delta = exp(eta)
    if return_cond:
        return se, cond
    return se


# ---------------------------------------------------------------------------
# likelihood-ratio facility
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LrTest:
    statistic: float
    p_value: float
    df: int
    restricted: FitResult


def lr_test(dataset, unrestricted: FitResult, theta_init: Theta, delta0: float, options: FitOptions):
    """LR test of delta = delta0 against the unrestricted SML fit.

    The restricted maximum is taken over the same criterion the unrestricted
    fit ended on: same CRN block and same importance anchor, no re-anchoring.
    """
    anchor = unrestricted.theta0 if unrestricted.theta0 is not None else theta_init
    ropts = replace(
        options, fixed_delta=delta0, compute_se=False, refresh_rounds=0, two_stage=False
    )
    restricted = sml_fit(dataset, anchor, unrestricted.n_draws, ropts)
    pack = _Packing(dataset[0][0], theta_init.has_effects)
    df = pack.n_delta
    stat = 2.0 * (unrestricted.loglik - restricted.loglik)
    return LrTest(
        statistic=float(stat),
        p_value=float(sp_stats.chi2.sf(max(stat, 0.0), df)),
        df=df,
        restricted=restricted,
    )


# ---------------------------------------------------------------------------
# naive probit baseline
# ---------------------------------------------------------------------------


def _probit_design(dataset, include_effects: bool):
    rows = []
    ys = []
    for model, target in dataset:
        target = np.asarray(target)
        T, M = model.players, model.actions_per_player
        n_eff = 2 * T - 1 if include_effects else 0
        for t in range(T):
            for m in range(M):
                z = [model.covariates[t, m, :], strategic_statistic(model, target, t, m)]
                if include_effects:
                    if model.kind is not GameKind.DIRECTED_NETWORK_SUPPORT:
                        raise ValueError("effect dummies only apply to network games")
                    _, s = model.dyad_of(t, m)
                    a_dummy = np.zeros(T)
                    a_dummy[s] = 1.0
                    b_dummy = np.zeros(T - 1)  # first receiver effect normalized to zero
                    if t > 0:
                        b_dummy[t - 1] = 1.0
                    z += [a_dummy, b_dummy]
                rows.append(np.concatenate(z))
                ys.append(target[t, m])
    Z = np.array(rows)
    y = np.array(ys, dtype=float)
    return Z, y, n_eff


def naive_probit(dataset, include_effects: bool = False) -> FitResult:
    """Probit MLE treating the strategic statistic as an exogenous regressor.

    This is the inconsistent-under-simultaneity baseline; its delta estimate
    may be negative and is reported as found.
    """
    Z, y, _ = _probit_design(dataset, include_effects)
    n, k = Z.shape

    def negloglik(b):
        zb = Z @ b
        log_p = dist.log_cdf(zb)
        log_q = dist.log_sf(zb)
        ll = float(y @ log_p + (1 - y) @ log_q)
        # score: phi(zb) * (y - Phi(zb)) / (Phi(zb) * (1 - Phi(zb)))
        g = np.exp(dist.log_pdf(zb) - log_p - log_q) * (y - dist.cdf(zb))
        return -ll, -(Z.T @ g)

    res = sp_optimize.minimize(
        negloglik,
        np.zeros(k),
        jac=True,
        method="BFGS",
        options=dict(maxiter=500, gtol=1e-9),
    )
    b = res.x
    zb = Z @ b
    if np.linalg.norm(b) > 1e3 or np.max(np.abs(zb)) > 35:
        margin_lo = zb[y == 1].min() if np.any(y == 1) else np.inf
        margin_hi = zb[y == 0].max() if np.any(y == 0) else -np.inf
        if margin_lo >= margin_hi:
            raise Separation("probit design admits perfect prediction")

    # expected-information standard errors; NaN where the information is singular
    w = np.exp(2 * dist.log_pdf(zb) - dist.log_cdf(zb) - dist.log_sf(zb))
    info = Z.T @ (Z * w[:, None])
    try:
        with np.errstate(invalid="ignore"):
            se = np.sqrt(np.diag(np.linalg.inv(info)))
    except np.linalg.LinAlgError:
        se = np.full(k, np.nan)

    model0 = dataset[0][0]
    K = model0.n_covariates
    P = model0.stat_dim
    if model0.n_action_types != 1:
        raise ValueError("the probit baseline applies to single-action-type models")
    beta = b[:K]
    delta = b[K : K + P]
    A = B = None
    if include_effects:
        T = model0.players
        A = b[K + P : K + P + T]
        B = np.concatenate([[0.0], b[K + P + T :]])
    theta_hat = Theta(beta=beta, delta=delta, sender_effects=A, receiver_effects=B)
    labels = theta_labels(model0, False)
    if include_effects:
        T = model0.players
        labels += [f"A{t + 1}" for t in range(T)]
        labels += [f"B{t + 1}" for t in range(1, T)]  # B1 normalized to zero
    gnorm = float(np.max(np.abs(res.jac)))
    return FitResult(
        theta_hat=theta_hat,
        standard_errors=se,
        loglik=-float(res.fun),
        iterations=int(res.nit),
        converged=bool(res.success) and gnorm <= 1e-6,
        gradient_norm=gnorm,
        labels=labels,
    )
