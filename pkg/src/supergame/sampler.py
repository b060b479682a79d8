"""Scenario sampling: truncated shock draws whose minimal NE hits a target profile.

The sampler draws the shock matrix coordinate by coordinate. Coordinates where
the target plays 0 get draws above the systematic utility of the target
profile. Coordinates where the target plays 1 get draws below a threshold
that is found by a counterfactual equilibrium computation: force the current
coordinate off, resolve the sparser equilibrium that results, and read off
the systematic utility the coordinate enjoys there. Every draw lands in a
scenario consistent with the target being the minimal NE, and every such
scenario is reachable.

Internally everything is batched across simulation draws; the per-draw
functions are thin wrappers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dist
from .dist import ShockFamily, TruncationSide
from .equil import minimal_ne_batch
from .errors import DegenerateTruncation
from .model import EvalContext, GameModel, Theta, _dot_delta


@dataclass(frozen=True, eq=False)
class Scenario:
    """One bucket per coordinate, stored as strategic-statistic levels.

    A coordinate's shock bucket is (boundary(lower), boundary(upper)] where
    boundary(level) = x'beta + level'delta (+ effects). Storing levels rather
    than the boundary values keeps the bucket boundaries affine in theta, so
    the same scenario can be re-priced at new parameters. Rows of -inf/+inf
    mark the unbounded first/last buckets.
    """

    lower_levels: np.ndarray  # (T, M, P)
    upper_levels: np.ndarray  # (T, M, P)

    def __post_init__(self):
        lo, up = self.lower_levels, self.upper_levels
        if lo.shape != up.shape or lo.ndim != 3:
            raise ValueError("scenario level arrays must share a (T, M, P) shape")
        if lo.shape[2] == 1 and not np.all(lo[..., 0] < up[..., 0]):
            raise ValueError("each coordinate needs lower_level < upper_level")

    def key(self) -> bytes:
        """Hashable identity of the scenario (used to group draws in tests)."""
        return self.lower_levels.tobytes() + self.upper_levels.tobytes()


@dataclass(frozen=True, eq=False)
class ImportanceDraw:
    """A sampled shock matrix with its truncation weights and located scenario."""

    u: np.ndarray  # (T, M)
    log_omega: np.ndarray  # (T, M): log of the per-coordinate truncation weights
    scenario: Scenario
    log_lambda: float  # log sampling probability of the scenario at theta0
    theta0: Theta

    @property
    def omega(self) -> np.ndarray:
        return np.exp(self.log_omega)


# ---------------------------------------------------------------------------
# scenario geometry
# ---------------------------------------------------------------------------


def scenario_boundary_values(ctx: EvalContext, lower_levels, upper_levels):
    """Boundary values at ctx.theta for stacked levels: (..., T, M, P) -> (..., T, M)."""
    model = ctx.model
    lo_inf = np.isneginf(lower_levels[..., 0])
    up_inf = np.isposinf(upper_levels[..., 0])
    lo_f = np.where(np.isfinite(lower_levels), lower_levels, 0.0)
    up_f = np.where(np.isfinite(upper_levels), upper_levels, 0.0)
    if model.n_action_types == 1:
        lo_vals = ctx.xb + _dot_delta(lo_f, ctx.theta.delta[0])
        up_vals = ctx.xb + _dot_delta(up_f, ctx.theta.delta[0])
    else:
        lo_vals = np.empty(lo_f.shape[:-1])
        up_vals = np.empty(up_f.shape[:-1])
        for m in range(model.actions_per_player):
            d = ctx.theta.delta[model.action_type(m)]
            lo_vals[..., m] = ctx.xb[:, m] + _dot_delta(lo_f[..., m, :], d)
            up_vals[..., m] = ctx.xb[:, m] + _dot_delta(up_f[..., m, :], d)
    lo_vals = np.where(lo_inf, -np.inf, lo_vals)
    up_vals = np.where(up_inf, np.inf, up_vals)
    return lo_vals, up_vals


def log_zeta_values(lower_vals, upper_vals, fam: ShockFamily) -> np.ndarray:
    """Sum of log bucket masses over the trailing (T, M) axes: (..., T, M) -> (...)."""
    lm = dist.log_interval_mass(lower_vals, upper_vals, fam)
    return np.asarray(lm).sum(axis=(-1, -2))


def log_zeta(model: GameModel, theta: Theta, scenario: Scenario) -> float:
    """log Pr(U in scenario) at the given theta; recycling-compatible."""
    ctx = EvalContext(model, theta, require_supermodular=False)
    lo, up = scenario_boundary_values(ctx, scenario.lower_levels, scenario.upper_levels)
    return float(log_zeta_values(lo, up, model.shock_family))


def log_lambda(draw: ImportanceDraw) -> float:
    """log sampling probability of the draw's scenario at theta0.

    Equals sum(log omega) + log zeta(scenario; theta0); fixed at sampling time
    and independent of the parameter the likelihood is later evaluated at.
    """
    return draw.log_lambda


# ---------------------------------------------------------------------------
# threshold finder
# ---------------------------------------------------------------------------


def _counterfactual_base(ctx: EvalContext, target: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Replace the -inf initializers of not-yet-drawn active coordinates by g(0) - 1."""
    cu = np.array(u, dtype=float)
    not_drawn = (target == 1) & np.isneginf(cu)
    cu[not_drawn] = ctx.xb[not_drawn] - 1.0  # statistic vanishes at the zero profile
    return cu


def find_threshold(
    model: GameModel, theta: Theta, target: np.ndarray, u: np.ndarray, t: int, m: int
) -> float:
    """Largest shock at coordinate (t, m) keeping the target the minimal NE.

    `u` must hold finalized draws for every inactive coordinate and for the
    active coordinates already drawn; remaining active coordinates hold the
    -inf initializer. The counterfactual forces coordinate (t, m) off, finds
    the resulting (sparser) minimal equilibrium y~, and returns g_tm(y~).
    """
    ctx = EvalContext(model, theta)
    target = np.asarray(target)
    g_target = ctx.utilities(target[None].astype(float))[0]
    cu = _counterfactual_base(ctx, target, np.asarray(u, dtype=float))
    cu[t, m] = g_target[t, m] + 1.0
    y_tilde = minimal_ne_batch(ctx, cu[None])
    return float(ctx.utility_at(y_tilde, t, m)[0])


# ---------------------------------------------------------------------------
# the sampler
# ---------------------------------------------------------------------------


def coordinate_order(model: GameModel, xb: np.ndarray, order: str):
    """Processing order over coordinates: 'index' or 'sorted' (ascending x'beta)."""
    T, M = model.players, model.actions_per_player
    coords = [(t, m) for t in range(T) for m in range(M)]
    if order == "index":
        return coords
    if order == "sorted":
        return sorted(coords, key=lambda tm: (xb[tm], tm))
    raise ValueError(f"unknown coordinate order {order!r} (expected 'index' or 'sorted')")


def sample_scenarios_raw(
    model: GameModel,
    theta0: Theta,
    target: np.ndarray,
    uniforms: np.ndarray,
    order: str = "index",
):
    """Vectorized sampler over a block of uniform draws.

    uniforms has shape (S, T, M) with entries strictly inside (0, 1); draw s
    consumes uniforms[s, t, m] at coordinate (t, m) regardless of processing
    order. Returns a dict of stacked arrays (shocks, log weights, located
    scenario levels and boundary values, log zeta at theta0, log lambda).
    """
    ctx = EvalContext(model, theta0)
    T, M = model.players, model.actions_per_player
    target = np.asarray(target)
    if target.shape != (T, M):
        raise ValueError(f"target profile must have shape ({T}, {M})")
    uniforms = np.asarray(uniforms, dtype=float)
    if uniforms.ndim != 3 or uniforms.shape[1:] != (T, M):
        raise ValueError(f"uniforms must have shape (S, {T}, {M})")
    if np.any(uniforms <= 0.0) or np.any(uniforms >= 1.0):
        raise ValueError("uniform draws must lie strictly inside (0, 1)")
    S = uniforms.shape[0]
    fam = ctx.fam

    g_target = ctx.utilities(target[None].astype(float))[0]  # (T, M)
    coords = coordinate_order(model, ctx.xb, order)
    active = [(t, m) for (t, m) in coords if target[t, m] == 1]
    inactive = [(t, m) for (t, m) in coords if target[t, m] == 0]

    U = np.where(target == 1, -np.inf, np.inf)[None].repeat(S, axis=0)
    log_omega = np.zeros((S, T, M))

    if inactive:
        ti = np.array([t for t, _ in inactive])
        mi = np.array([m for _, m in inactive])
        bounds = g_target[ti, mi]
        U[:, ti, mi] = dist.sample_truncated(
            uniforms[:, ti, mi], bounds[None, :], TruncationSide.ABOVE, fam
        )
        log_omega[:, ti, mi] = -dist.log_sf(bounds)[None, :]

    cu = U.copy()
    for t, m in active:
        cu[:, t, m] = ctx.xb[t, m] - 1.0  # provisional "will play" initializer
    for t, m in active:
        cu[:, t, m] = g_target[t, m] + 1.0  # force the coordinate off
        y_tilde = minimal_ne_batch(ctx, cu)
        h = ctx.utility_at(y_tilde, t, m)  # (S,)
        lcdf = dist.log_cdf(h, fam)
        if np.any(np.isneginf(lcdf)):
            raise DegenerateTruncation(
                f"threshold at coordinate ({t}, {m}) carries zero shock mass; "
                "the target outcome is unreachable at theta0",
                player=t,
                action=m,
            )
        draws = dist.sample_truncated(uniforms[:, t, m], h, TruncationSide.BELOW_OR_EQUAL, fam)
        U[:, t, m] = draws
        cu[:, t, m] = draws
        log_omega[:, t, m] = -lcdf

    located = locate_scenarios_raw(ctx, U)
    log_zeta0 = log_zeta_values(located["lower_vals"], located["upper_vals"], fam)
    out = dict(located)
    out["u"] = U
    out["log_omega"] = log_omega
    out["log_zeta0"] = log_zeta0
    out["log_lambda"] = log_omega.sum(axis=(1, 2)) + log_zeta0
    return out


def locate_scenarios_raw(ctx: EvalContext, U: np.ndarray):
    """Bucket each coordinate of each shock matrix: buckets are left-open/right-closed."""
    model = ctx.model
    T, M, P = model.players, model.actions_per_player, model.stat_dim
    S = U.shape[0]
    if not np.all(np.isfinite(U)):
        raise ValueError("scenario location requires finite shocks in every coordinate")
    tables = ctx.tables()
    lower_levels = np.empty((S, T, M, P))
    upper_levels = np.empty((S, T, M, P))
    lower_vals = np.empty((S, T, M))
    upper_vals = np.empty((S, T, M))
    for t in range(T):
        for m in range(M):
            values, levels = tables[t][m]
            L = len(values)
            idx = np.searchsorted(values, U[:, t, m], side="left")
            has_lo = idx > 0
            has_up = idx < L
            lo_i = np.maximum(idx - 1, 0)
            up_i = np.minimum(idx, L - 1)
            lower_vals[:, t, m] = np.where(has_lo, values[lo_i], -np.inf)
            upper_vals[:, t, m] = np.where(has_up, values[up_i], np.inf)
            lower_levels[:, t, m] = np.where(has_lo[:, None], levels[lo_i], -np.inf)
            upper_levels[:, t, m] = np.where(has_up[:, None], levels[up_i], np.inf)
    return {
        "lower_levels": lower_levels,
        "upper_levels": upper_levels,
        "lower_vals": lower_vals,
        "upper_vals": upper_vals,
    }


def locate_scenario(model: GameModel, theta: Theta, u: np.ndarray) -> Scenario:
    """Scenario containing the (finite) shock matrix u at the given theta."""
    ctx = EvalContext(model, theta, require_supermodular=False)
    u = np.asarray(u, dtype=float)
    raw = locate_scenarios_raw(ctx, u[None])
    return Scenario(raw["lower_levels"][0], raw["upper_levels"][0])


def _draws_from_raw(theta0: Theta, raw) -> list[ImportanceDraw]:
    out = []
    for s in range(raw["u"].shape[0]):
        scenario = Scenario(raw["lower_levels"][s], raw["upper_levels"][s])
        out.append(
            ImportanceDraw(
                u=raw["u"][s],
                log_omega=raw["log_omega"][s],
                scenario=scenario,
                log_lambda=float(raw["log_lambda"][s]),
                theta0=theta0,
            )
        )
    return out


def sample_scenarios(
    model: GameModel,
    theta0: Theta,
    target: np.ndarray,
    uniforms: np.ndarray,
    order: str = "index",
) -> list[ImportanceDraw]:
    """Sample one ImportanceDraw per row of `uniforms`; see sample_scenarios_raw."""
    raw = sample_scenarios_raw(model, theta0, target, uniforms, order)
    return _draws_from_raw(theta0, raw)


def sample_scenario(
    model: GameModel,
    theta0: Theta,
    target: np.ndarray,
    uniforms: np.ndarray,
    order: str = "index",
) -> ImportanceDraw:
    """Single draw: uniforms has shape (T, M)."""
    uniforms = np.asarray(uniforms, dtype=float)
    return sample_scenarios(model, theta0, target, uniforms[None], order)[0]
