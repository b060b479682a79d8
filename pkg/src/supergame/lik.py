"""Importance-sampled likelihood, analytic gradient, scenario recycling, CRN.

The likelihood of observing a profile is the total shock mass of the scenarios
consistent with it. The estimator averages mass ratios zeta(b; theta) /
lambda(b; theta0) over scenarios drawn by the sampler at theta0. Everything is
accumulated in log space with max-shifted summation; single-scenario masses in
large games are far below the double-precision underflow threshold.

Common random numbers: a CrnBlock fixes one uniform variate per (game, draw,
player, action) up front, generated by a counter-based bit generator, so that
the simulated criterion is a deterministic, smooth function of theta.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from . import dist
from .errors import AllMassUnderflow, RecyclingUnavailable
from .model import EvalContext, GameModel, Theta, theta_to_vector
from .sampler import (
    ImportanceDraw,
    log_zeta_values,
    sample_scenarios,
    sample_scenarios_raw,
    scenario_boundary_values,
)

_TWO53 = float(2**53)


@dataclass(frozen=True, eq=False)
class CrnBlock:
    """Per-game blocks of uniforms in (0,1), shape (S, T, M); immutable after creation."""

    seed: int
    blocks: tuple

    def __post_init__(self):
        for b in self.blocks:
            b.setflags(write=False)

    @property
    def n_draws(self) -> int:
        return self.blocks[0].shape[0] if self.blocks else 0

    @classmethod
    def generate(cls, dataset, n_draws: int, seed: int) -> "CrnBlock":
        """One disjoint sub-block per game, indexed (draw, player, action).

        Each game's block comes from its own counter-based Philox stream keyed
        by (seed, game index), so values do not depend on evaluation order.
        """
        if n_draws < 1:
            raise ValueError("need at least one scenario draw")
        blocks = []
        for i, (model, _target) in enumerate(dataset):
            gen = np.random.Generator(
                np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(i,)))
            )
            shape = (n_draws, model.players, model.actions_per_player)
            blocks.append(gen.integers(1, 2**53, size=shape) / _TWO53)
        return cls(seed=seed, blocks=tuple(blocks))


def _logmeanexp(values: np.ndarray) -> float:
    top = np.max(values)
    if np.isneginf(top):
        return -np.inf
    return float(top + np.log(np.mean(np.exp(values - top))))


def _validate_dataset(dataset) -> None:
    if not dataset:
        raise ValueError("dataset is empty")
    for i, item in enumerate(dataset):
        model, target = item
        target = np.asarray(target)
        T, M = model.players, model.actions_per_player
        if target.shape != (T, M):
            raise ValueError(f"game {i}: outcome profile must have shape ({T}, {M})")


def simulate_likelihood(model: GameModel, theta: Theta, target, draws: list[ImportanceDraw]):
    """log of the importance-sampling likelihood estimate for one game.

    Returns log[(1/S) sum_s zeta(b_s; theta) / lambda(b_s; theta0)] with the
    sum max-shifted. Unbiased in levels for any fixed S.
    """
    if not draws:
        raise ValueError("need at least one importance draw")
    ctx = EvalContext(model, theta, require_supermodular=False)
    lo = np.stack([d.scenario.lower_levels for d in draws])
    up = np.stack([d.scenario.upper_levels for d in draws])
    log_lam = np.array([d.log_lambda for d in draws])
    lo_v, up_v = scenario_boundary_values(ctx, lo, up)
    log_z = log_zeta_values(lo_v, up_v, model.shock_family)
    out = _logmeanexp(log_z - log_lam)
    if np.isneginf(out):
        raise AllMassUnderflow(
            "every importance-sampling summand underflowed", theta=theta
        )
    return out


# ---------------------------------------------------------------------------
# scenario templates (recycling)
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GameTemplate:
    model: GameModel
    target: np.ndarray
    lower_levels: np.ndarray  # (S, T, M, 1)
    upper_levels: np.ndarray  # (S, T, M, 1)
    log_lambda: np.ndarray  # (S,)


@dataclass(frozen=True, eq=False)
class ScenarioTemplates:
    """Located scenarios for every (game, draw), reusable at any theta with delta > 0.

    Valid only for models with a single scalar strategic parameter: there the
    bucket partition is order-preserved and affine in theta, so re-pricing the
    stored levels reproduces what a fresh sampler run would locate.
    """

    theta0: Theta
    n_draws: int
    order: str
    seed: int
    games: tuple
    fingerprint: str


def _require_recyclable(dataset) -> None:
    for i, (model, _target) in enumerate(dataset):
        if model.n_action_types != 1 or model.stat_dim != 1:
            raise RecyclingUnavailable(
                f"game {i}: scenario recycling requires a single shared strategic "
                f"parameter (got {model.n_action_types} action type(s) of statistic "
                f"dimension {model.stat_dim})"
            )


def recyclable(dataset) -> bool:
    try:
        _require_recyclable(dataset)
    except RecyclingUnavailable:
        return False
    return True


def _fingerprint(dataset, theta0: Theta, n_draws: int, order: str, seed: int) -> str:
    h = hashlib.sha256()
    h.update(np.asarray(theta_to_vector(dataset[0][0], theta0)).tobytes())
    h.update(f"|S={n_draws}|order={order}|seed={seed}".encode())
    for model, target in dataset:
        h.update(model.kind.value.encode())
        h.update(np.asarray(target, dtype=np.int8).tobytes())
        h.update(model.covariates.tobytes())
        if model.adjacency is not None:
            h.update(model.adjacency.tobytes())
    return h.hexdigest()


def build_templates(dataset, theta0: Theta, crn: CrnBlock, order: str = "index"):
    """Run the sampler once per (game, draw) at theta0 and freeze the geometry."""
    _validate_dataset(dataset)
    _require_recyclable(dataset)
    games = []
    for i, (model, target) in enumerate(dataset):
        raw = sample_scenarios_raw(model, theta0, np.asarray(target), crn.blocks[i], order)
        games.append(
            GameTemplate(
                model=model,
                target=np.asarray(target),
                lower_levels=raw["lower_levels"],
                upper_levels=raw["upper_levels"],
                log_lambda=raw["log_lambda"],
            )
        )
    return ScenarioTemplates(
        theta0=theta0,
        n_draws=crn.n_draws,
        order=order,
        seed=crn.seed,
        games=tuple(games),
        fingerprint=_fingerprint(dataset, theta0, crn.n_draws, order, crn.seed),
    )


def _game_log_lik(game: GameTemplate, theta: Theta, index: int) -> float:
    ctx = EvalContext(game.model, theta, require_supermodular=False)
    lo_v, up_v = scenario_boundary_values(ctx, game.lower_levels, game.upper_levels)
    log_z = log_zeta_values(lo_v, up_v, game.model.shock_family)
    out = _logmeanexp(log_z - game.log_lambda)
    if np.isneginf(out):
        raise AllMassUnderflow(
            f"every importance-sampling summand underflowed in game {index}",
            theta=theta,
            game_index=index,
        )
    return out


def loglik_from_templates(templates: ScenarioTemplates, theta: Theta) -> float:
    """Simulated log-likelihood from frozen scenarios; no sampler or NE reruns."""
    return sum(_game_log_lik(g, theta, i) for i, g in enumerate(templates.games))


# ---------------------------------------------------------------------------
# simulated log-likelihood and analytic gradient
# ---------------------------------------------------------------------------


def simulated_loglik(
    dataset, theta: Theta, crn: CrnBlock, theta0: Theta, order: str = "index"
) -> float:
    """Sum of per-game log likelihood estimates; deterministic given (crn, theta, theta0)."""
    _validate_dataset(dataset)
    if recyclable(dataset):
        return loglik_from_templates(build_templates(dataset, theta0, crn, order), theta)
    total = 0.0
    for i, (model, target) in enumerate(dataset):
        try:
            draws = sample_scenarios(model, theta0, np.asarray(target), crn.blocks[i], order)
            total += simulate_likelihood(model, theta, target, draws)
        except AllMassUnderflow as err:
            raise AllMassUnderflow(
                f"every importance-sampling summand underflowed in game {i}",
                theta=theta,
                game_index=i,
            ) from err
    return total


def _game_gradient(
    model: GameModel,
    theta: Theta,
    lower_levels: np.ndarray,
    upper_levels: np.ndarray,
    log_lam: np.ndarray,
    index: int,
):
    """(log-lik, gradient) of one game's estimate from stored scenario levels.

    The gradient applies the product rule to each scenario mass: every bucket
    contributes [f(upper) d(upper)/dtheta - f(lower) d(lower)/dtheta] / mass,
    and boundaries are affine in theta with derivative x_tm for the beta
    block, the stored statistic level for the delta block, and unit loadings
    on the degree effects. Terms at unbounded boundaries vanish with f(+/-inf).
    """
    ctx = EvalContext(model, theta, require_supermodular=False)
    fam = model.shock_family
    lo_v, up_v = scenario_boundary_values(ctx, lower_levels, upper_levels)
    lm = dist.log_interval_mass(lo_v, up_v, fam)  # (S, T, M)
    log_z = np.asarray(lm).sum(axis=(-1, -2))
    log_w = log_z - log_lam
    top = np.max(log_w)
    if np.isneginf(top):
        raise AllMassUnderflow(
            f"every importance-sampling summand underflowed in game {index}",
            theta=theta,
            game_index=index,
        )
    w = np.exp(log_w - top)
    alpha = w / w.sum()  # (S,)

    with np.errstate(invalid="ignore"):
        r_up = np.exp(dist.log_pdf(up_v, fam) - lm)
        r_lo = np.exp(dist.log_pdf(lo_v, fam) - lm)
    r_up = np.nan_to_num(r_up, nan=0.0, posinf=0.0)
    r_lo = np.nan_to_num(r_lo, nan=0.0, posinf=0.0)

    dmat = np.einsum("s,stm->tm", alpha, r_up - r_lo)  # (T, M)
    lo_l = np.where(np.isfinite(lower_levels), lower_levels, 0.0)
    up_l = np.where(np.isfinite(upper_levels), upper_levels, 0.0)
    dlvl = np.einsum("s,stmp->tmp", alpha, r_up[..., None] * up_l - r_lo[..., None] * lo_l)

    grads = []
    M = model.actions_per_player
    for i in range(model.n_action_types):
        ms = [m for m in range(M) if model.action_type(m) == i]
        grads.append(np.einsum("tm,tmk->k", dmat[:, ms], model.covariates[:, ms, :]))
    for i in range(model.n_action_types):
        ms = [m for m in range(M) if model.action_type(m) == i]
        grads.append(dlvl[:, ms, :].sum(axis=(0, 1)))
    if theta.has_effects:
        T = model.players
        gA = np.zeros(T)
        np.add.at(gA, model._dyad_targets.ravel(), dmat.ravel())
        gB = dmat.sum(axis=1)
        grads += [gA, gB]
    loglik = float(top + np.log(np.mean(w)))
    return loglik, np.concatenate(grads)


def grad_from_templates(templates: ScenarioTemplates, theta: Theta):
    """(log-lik, gradient) of the recycled criterion; gradient is packed like theta."""
    total_ll = 0.0
    total_grad = None
    for i, g in enumerate(templates.games):
        ll, grad = _game_gradient(
            g.model, theta, g.lower_levels, g.upper_levels, g.log_lambda, i
        )
        total_ll += ll
        total_grad = grad if total_grad is None else total_grad + grad
    return total_ll, total_grad


def grad_loglik(
    dataset, theta: Theta, crn: CrnBlock, theta0: Theta, order: str = "index"
) -> np.ndarray:
    """Analytic gradient of simulated_loglik with respect to the packed theta vector."""
    _validate_dataset(dataset)
    total = None
    for i, (model, target) in enumerate(dataset):
        raw = sample_scenarios_raw(model, theta0, np.asarray(target), crn.blocks[i], order)
        _, grad = _game_gradient(
            model, theta, raw["lower_levels"], raw["upper_levels"], raw["log_lambda"], i
        )
        total = grad if total is None else total + grad
    return total
