"""Independent brute-force ground truth for small games.

Everything here is deliberately exponential: exhaustive scenario enumeration,
exact likelihoods by summing bucket masses, fixed-point enumeration over all
profiles, and threshold search by bisection. These routines exist to validate
the polynomial-time sampler and are also reachable through `supergame validate`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .equil import best_response_batch, minimal_ne_batch
from .errors import NoActionRegion, TooManyScenarios
from .model import EvalContext, GameModel, Theta
from .sampler import Scenario, log_zeta_values, scenario_boundary_values

DEFAULT_SCENARIO_CAP = 1_000_000


@dataclass(frozen=True, eq=False)
class EnumeratedScenario:
    scenario: Scenario
    representative: np.ndarray  # (T, M) interior shock; play is constant on the scenario
    bucket_index: tuple


@dataclass(frozen=True)
class ExactLikelihood:
    value: float
    log_value: float
    n_scenarios: int  # cardinality of the matching scenario set


def _coordinate_buckets(values: np.ndarray, levels: np.ndarray, P: int):
    """Per-coordinate list of (lower_val, upper_val, lower_lvl, upper_lvl, representative)."""
    minus = np.full(P, -np.inf)
    plus = np.full(P, np.inf)
    L = len(values)
    buckets = []
    for i in range(L + 1):
        lo_v = -np.inf if i == 0 else float(values[i - 1])
        up_v = np.inf if i == L else float(values[i])
        lo_l = minus if i == 0 else levels[i - 1]
        up_l = plus if i == L else levels[i]
        if i == 0:
            rep = up_v - 1.0
        elif i == L:
            rep = lo_v + 1.0
        else:
            rep = 0.5 * (lo_v + up_v)
        buckets.append((lo_v, up_v, lo_l, up_l, rep))
    return buckets


def enumerate_scenarios(
    model: GameModel, theta: Theta, cap: int = DEFAULT_SCENARIO_CAP
) -> list[EnumeratedScenario]:
    """Cartesian product of per-coordinate buckets, each with an interior shock."""
    ctx = EvalContext(model, theta, require_supermodular=False)
    T, M, P = model.players, model.actions_per_player, model.stat_dim
    tables = ctx.tables()
    per_coord = []
    total = 1
    for t in range(T):
        for m in range(M):
            values, levels = tables[t][m]
            per_coord.append(_coordinate_buckets(values, levels, P))
            total *= len(values) + 1
            if total > cap:
                raise TooManyScenarios(
                    f"scenario enumeration would produce more than {cap} scenarios"
                )
    out = []
    for combo in itertools.product(*[range(len(b)) for b in per_coord]):
        lower_levels = np.empty((T, M, P))
        upper_levels = np.empty((T, M, P))
        rep = np.empty((T, M))
        k = 0
        for t in range(T):
            for m in range(M):
                _, _, lo_l, up_l, r = per_coord[k][combo[k]]
                lower_levels[t, m] = lo_l
                upper_levels[t, m] = up_l
                rep[t, m] = r
                k += 1
        out.append(
            EnumeratedScenario(
                scenario=Scenario(lower_levels, upper_levels),
                representative=rep,
                bucket_index=combo,
            )
        )
    return out


def exact_likelihood(
    model: GameModel,
    theta: Theta,
    target: np.ndarray,
    cap: int = DEFAULT_SCENARIO_CAP,
) -> ExactLikelihood:
    """Sum of scenario masses over every scenario whose minimal NE is the target."""
    ctx = EvalContext(model, theta)
    target = np.asarray(target)
    cells = enumerate_scenarios(model, theta, cap=cap)
    reps = np.stack([c.representative for c in cells])
    ne = minimal_ne_batch(ctx, reps)
    match = np.all(ne == target[None], axis=(1, 2))
    selected = [c for c, ok in zip(cells, match) if ok]
    if not selected:
        return ExactLikelihood(value=0.0, log_value=-np.inf, n_scenarios=0)
    lo = np.stack([c.scenario.lower_levels for c in selected])
    up = np.stack([c.scenario.upper_levels for c in selected])
    lo_v, up_v = scenario_boundary_values(ctx, lo, up)
    log_masses = log_zeta_values(lo_v, up_v, model.shock_family)
    top = float(np.max(log_masses))
    value = float(np.exp(top) * np.sum(np.exp(log_masses - top)))
    return ExactLikelihood(
        value=value,
        log_value=float(top + np.log(np.sum(np.exp(log_masses - top)))),
        n_scenarios=len(selected),
    )


def threshold_bisection(
    model: GameModel,
    theta: Theta,
    u: np.ndarray,
    t: int,
    m: int,
    tol: float = 1e-12,
) -> float:
    """Threshold search that only uses equilibrium computation, no payoff algebra.

    `u` follows the threshold finder's precondition (finalized draws plus -inf
    initializers for active coordinates not yet drawn). Bisects for the
    largest shock at (t, m) for which the minimal NE still plays (t, m).
    """
    ctx = EvalContext(model, theta)
    u = np.asarray(u, dtype=float)
    tables = ctx.tables()
    values, _ = tables[t][m]
    lo = float(values[0]) - 1.0
    hi = float(values[-1]) + 1.0

    def plays(x: float) -> bool:
        probe = u.copy()
        probe[t, m] = x
        return bool(minimal_ne_batch(ctx, probe[None])[0, t, m] == 1)

    if not plays(lo):
        raise NoActionRegion(
            f"coordinate ({t}, {m}) stays inactive even below every bucket boundary"
        )
    if plays(hi):
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if plays(mid):
            lo = mid
        else:
            hi = mid
    return lo


def enumerate_fixed_points(model: GameModel, theta: Theta, u: np.ndarray) -> list[np.ndarray]:
    """All pure profiles y with best_response(y) = y, by exhaustive scan (TM <= 16)."""
    T, M = model.players, model.actions_per_player
    n = T * M
    if n > 16:
        raise TooManyScenarios(f"fixed-point enumeration is limited to TM <= 16, got {n}")
    ctx = EvalContext(model, theta, require_supermodular=False)
    ids = np.arange(2**n, dtype=np.uint32)
    bits = ((ids[:, None] >> np.arange(n, dtype=np.uint32)[None, :]) & 1).astype(float)
    profiles = bits.reshape(-1, T, M)
    U = np.asarray(u, dtype=float)[None]
    responses = best_response_batch(ctx, U, profiles)
    fixed = np.all(responses == profiles, axis=(1, 2))
    return [profiles[i].astype(np.int8) for i in np.nonzero(fixed)[0]]
