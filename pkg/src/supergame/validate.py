"""Self-validation suites: the sampler against brute-force ground truth.

These are the checks behind `supergame validate`: sampler validity (every
draw's minimal NE equals the target), coverage and weight calibration against
enumerated scenario sets, analytic-gradient agreement with finite
differences, importance-sampling agreement with exact likelihoods, and
threshold agreement with the bisection oracle. The test suite runs the same
functions at acceptance scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sp_stats

from . import lik, oracle, sampler
from .equil import minimal_ne, minimal_ne_batch
from .errors import FeasibleSetTooLarge, TooManyScenarios
from .model import EvalContext, GameKind, GameModel, Theta, theta_from_vector, theta_to_vector


@dataclass
class SuiteResult:
    name: str
    passed: bool
    summary: str
    failures: list = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.summary}"


# ---------------------------------------------------------------------------
# randomized small instances
# ---------------------------------------------------------------------------


def random_instance(rng, kind: GameKind | None = None, effects: bool = False):
    """A random small (model, theta) pair of the requested kind."""
    if kind is None:
        kind = rng.choice(
            [
                GameKind.COORDINATION,
                GameKind.PEER_EFFECTS_MEAN,
                GameKind.PEER_EFFECTS_COUNT,
                GameKind.MULTI_ACTION_PEER,
                GameKind.DIRECTED_NETWORK_SUPPORT,
            ]
        )
    K = int(rng.integers(1, 3))
    if kind is GameKind.COORDINATION:
        T, M = 2, 1
        adjacency = None
    elif kind in (GameKind.PEER_EFFECTS_MEAN, GameKind.PEER_EFFECTS_COUNT):
        T, M = int(rng.integers(3, 7)), 1
        adjacency = _random_graph(rng, T)
    elif kind is GameKind.MULTI_ACTION_PEER:
        T, M = int(rng.integers(2, 4)), 2
        adjacency = None
    else:
        T = int(rng.integers(3, 6))
        M = T - 1
        adjacency = None
    X = rng.normal(scale=0.8, size=(T, M, K))
    model = GameModel(
        players=T, actions_per_player=M, covariates=X, adjacency=adjacency, kind=kind
    )
    beta = [rng.normal(scale=0.6, size=K) for _ in range(model.n_action_types)]
    delta = [rng.uniform(0.1, 0.9, size=model.stat_dim) for _ in range(model.n_action_types)]
    A = B = None
    if effects and kind is GameKind.DIRECTED_NETWORK_SUPPORT:
        A = rng.normal(scale=0.3, size=T)
        B = rng.normal(scale=0.3, size=T)
    theta = Theta(beta=beta, delta=delta, sender_effects=A, receiver_effects=B)
    return model, theta


def _random_graph(rng, T):
    upper = np.triu(rng.random((T, T)) < 0.6, k=1)
    D = (upper | upper.T).astype(float)
    if not D.any():
        D[0, 1] = D[1, 0] = 1.0
    return D


def realized_target(model, theta, rng):
    """A profile that is certainly a minimal NE: simulate one."""
    U = rng.standard_normal((model.players, model.actions_per_player))
    return minimal_ne(model, theta, U)


def _uniforms(rng, S, T, M):
    return rng.integers(1, 2**53, size=(S, T, M)) / float(2**53)


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------


def suite_sampler_validity(n_instances=200, total_draws=10_000, seed=0, order="index"):
    """Every sampled shock matrix must have the target as its minimal NE."""
    rng = np.random.default_rng(seed)
    kinds = [
        GameKind.COORDINATION,
        GameKind.PEER_EFFECTS_MEAN,
        GameKind.PEER_EFFECTS_COUNT,
        GameKind.DIRECTED_NETWORK_SUPPORT,
    ]
    per_instance = max(1, total_draws // n_instances)
    failures = []
    checked = 0
    for i in range(n_instances):
        model, theta = random_instance(rng, kinds[i % len(kinds)], effects=(i % 8 == 3))
        target = realized_target(model, theta, rng)
        U = _uniforms(rng, per_instance, model.players, model.actions_per_player)
        raw = sampler.sample_scenarios_raw(model, theta, target, U, order)
        ne = minimal_ne_batch(EvalContext(model, theta), raw["u"])
        ok = np.all(ne == target[None], axis=(1, 2))
        checked += per_instance
        if not np.all(ok):
            failures.append(f"instance {i} ({model.kind.value}): {np.sum(~ok)} bad draws")
    return SuiteResult(
        name="sampler-validity",
        passed=not failures,
        summary=f"{checked} draws across {n_instances} instances, "
        f"{'all' if not failures else 'NOT all'} hit their target",
        failures=failures,
    )


def suite_lambda_coverage(n_instances=8, n_draws=100_000, seed=0, alpha=1e-3, order="index"):
    """On tiny games: full scenario coverage, chi-squared calibration, sum to one."""
    rng = np.random.default_rng(seed)
    failures = []
    tested = 0
    while tested < n_instances:
        model, theta = random_instance(
            rng,
            [GameKind.COORDINATION, GameKind.PEER_EFFECTS_MEAN, GameKind.PEER_EFFECTS_COUNT][
                tested % 3
            ],
        )
        if model.players > 3:
            continue
        target = realized_target(model, theta, rng)
        cells = oracle.enumerate_scenarios(model, theta)
        ctx = EvalContext(model, theta)
        reps = np.stack([c.representative for c in cells])
        ne = minimal_ne_batch(ctx, reps)
        members = [c for c, hit in zip(cells, np.all(ne == target[None], axis=(1, 2))) if hit]
        if len(members) > 64 or not members:
            continue
        tested += 1
        U = _uniforms(rng, n_draws, model.players, model.actions_per_player)
        raw = sampler.sample_scenarios_raw(model, theta, target, U, order)
        keys = [
            raw["lower_levels"][s].tobytes() + raw["upper_levels"][s].tobytes()
            for s in range(n_draws)
        ]
        member_keys = {
            c.scenario.key(): i for i, c in enumerate(members)
        }
        counts = np.zeros(len(members))
        lam = np.full(len(members), np.nan)
        stray = False
        for s, k in enumerate(keys):
            idx = member_keys.get(k)
            if idx is None:
                failures.append(f"instance {tested}: a draw landed outside the target set")
                stray = True
                break
            counts[idx] += 1
            lam[idx] = np.exp(raw["log_lambda"][s])
        if stray:
            continue
        if np.any(counts == 0):
            failures.append(
                f"instance {tested}: {int(np.sum(counts == 0))} of {len(members)} "
                f"scenarios never sampled in {n_draws} draws"
            )
            continue
        if abs(lam.sum() - 1.0) > 1e-9:
            failures.append(f"instance {tested}: sum of lambda = {lam.sum():.12f} != 1")
        chi2 = float(np.sum((counts - n_draws * lam) ** 2 / (n_draws * lam)))
        pval = float(sp_stats.chi2.sf(chi2, df=len(members) - 1))
        if pval < alpha:
            failures.append(
                f"instance {tested}: frequency chi2 p-value {pval:.2e} < {alpha}"
            )
    return SuiteResult(
        name="lambda-coverage",
        passed=not failures,
        summary=f"{tested} tiny instances x {n_draws} draws: coverage, chi2, adding-up",
        failures=failures,
    )


def suite_gradient_check(n_thetas=20, seed=0, step=1e-5, tol=1e-5):
    """Analytic gradient against central finite differences of the criterion."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    failures = []
    for i in range(n_thetas):
        kind = [GameKind.PEER_EFFECTS_COUNT, GameKind.COORDINATION, GameKind.PEER_EFFECTS_MEAN][
            i % 3
        ]
        model, theta0 = random_instance(rng, kind)
        target = realized_target(model, theta0, rng)
        dataset = [(model, target)]
        crn = lik.CrnBlock.generate(dataset, 20, int(rng.integers(2**31)))
        v0 = theta_to_vector(model, theta0) + rng.normal(scale=0.1, size=theta_to_vector(model, theta0).size)
        v0[-model.stat_dim :] = np.abs(v0[-model.stat_dim :]) + 0.05
        theta = theta_from_vector(model, v0)
        grad = lik.grad_loglik(dataset, theta, crn, theta0)
        fd = np.empty_like(grad)
        for j in range(v0.size):
            vp = v0.copy()
            vp[j] += step
            vm = v0.copy()
            vm[j] -= step
            fd[j] = (
                lik.simulated_loglik(dataset, theta_from_vector(model, vp), crn, theta0)
                - lik.simulated_loglik(dataset, theta_from_vector(model, vm), crn, theta0)
            ) / (2 * step)
        scale = np.maximum(np.abs(fd), 1e-6)
        rel = float(np.max(np.abs(grad - fd) / scale))
        worst = max(worst, rel)
        if rel > tol:
            failures.append(f"theta {i}: relative error {rel:.2e} > {tol}")
    return SuiteResult(
        name="gradient-fd",
        passed=not failures,
        summary=f"{n_thetas} random parameter points, worst relative error {worst:.2e}",
        failures=failures,
    )


def suite_oracle_agreement(n_instances=200, n_draws=100, seed=0, min_pass_rate=0.95):
    """IS estimate within 4 Monte Carlo standard errors of the exact likelihood."""
    rng = np.random.default_rng(seed)
    hits = 0
    tested = 0
    failures = []
    while tested < n_instances:
        model, theta = random_instance(
            rng,
            [
                GameKind.COORDINATION,
                GameKind.PEER_EFFECTS_MEAN,
                GameKind.PEER_EFFECTS_COUNT,
                GameKind.MULTI_ACTION_PEER,
            ][tested % 4],
        )
        if model.players * model.actions_per_player > 6:
            continue
        target = realized_target(model, theta, rng)
        try:
            exact = oracle.exact_likelihood(model, theta, target)
        except (TooManyScenarios, FeasibleSetTooLarge):
            continue
        tested += 1
        U = _uniforms(rng, n_draws, model.players, model.actions_per_player)
        raw = sampler.sample_scenarios_raw(model, theta, target, U)
        w = np.exp(raw["log_zeta0"] - raw["log_lambda"])
        est = float(w.mean())
        se = float(w.std(ddof=1) / np.sqrt(n_draws))
        # the 1e-12 floor absorbs roundoff when the target set is a single scenario
        ok = abs(est - exact.value) <= 4 * se + 1e-12
        hits += ok
        if not ok:
            failures.append(
                f"instance {tested}: |{est:.6f} - {exact.value:.6f}| > 4 x {se:.2e}"
            )
    rate = hits / tested
    return SuiteResult(
        name="oracle-agreement",
        passed=rate >= min_pass_rate,
        summary=f"{hits}/{tested} instances within 4 MC standard errors",
        failures=failures,
    )


def suite_threshold_agreement(n_trials=500, seed=0, tol=1e-9):
    """The threshold finder against the bisection oracle on randomized states."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    failures = []
    done = 0
    while done < n_trials:
        model, theta = random_instance(rng, effects=bool(rng.integers(2)))
        target = realized_target(model, theta, rng)
        actives = np.argwhere(target == 1)
        if actives.size == 0:
            continue
        # build a partially drawn shock matrix consistent with the sampler state
        U = _uniforms(rng, 1, model.players, model.actions_per_player)
        raw = sampler.sample_scenarios_raw(model, theta, target, U)
        u_full = raw["u"][0]
        k = int(rng.integers(len(actives)))
        t, m = map(int, actives[k])
        u_state = u_full.copy()
        for tt, mm in actives[k:]:
            u_state[tt, mm] = -np.inf  # not yet drawn
        h = sampler.find_threshold(model, theta, target, u_state, t, m)
        hb = oracle.threshold_bisection(model, theta, u_state, t, m, tol=tol * 1e-3)
        err = abs(h - hb)
        worst = max(worst, err)
        done += 1
        if err > tol:
            failures.append(f"trial {done} ({model.kind.value}): |{h} - {hb}| = {err:.2e}")
    return SuiteResult(
        name="threshold-agreement",
        passed=not failures,
        summary=f"{done} randomized configurations, worst |difference| {worst:.2e}",
        failures=failures,
    )


QUICK = dict(
    sampler=dict(n_instances=40, total_draws=2000),
    coverage=dict(n_instances=3, n_draws=20_000),
    gradient=dict(n_thetas=6),
    oracle=dict(n_instances=40, n_draws=100),
    threshold=dict(n_trials=80),
)

FULL = dict(
    sampler=dict(n_instances=200, total_draws=10_000),
    coverage=dict(n_instances=8, n_draws=100_000),
    gradient=dict(n_thetas=20),
    oracle=dict(n_instances=200, n_draws=100),
    threshold=dict(n_trials=500),
)


def run_suites(level: str = "quick", seed: int = 0):
    """Run all validation suites at the requested level; returns SuiteResults."""
    cfg = QUICK if level == "quick" else FULL
    return [
        suite_sampler_validity(seed=seed, **cfg["sampler"]),
        suite_lambda_coverage(seed=seed, **cfg["coverage"]),
        suite_gradient_check(seed=seed, **cfg["gradient"]),
        suite_oracle_agreement(seed=seed, **cfg["oracle"]),
        suite_threshold_agreement(seed=seed, **cfg["threshold"]),
    ]
