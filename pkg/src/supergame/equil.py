"""Equilibrium computation and verification via Tarski fixed-point iteration.

Best-response updates are simultaneous (Jacobi-style): every coordinate of the
next profile is computed from the current one. Iterating from the all-zeros
profile reaches the minimal pure-strategy Nash equilibrium of a supermodular
game; from the all-ones profile, the maximal one. All functions also come in
batched form so that many shock matrices can be processed at once.
"""

from __future__ import annotations

import numpy as np

from .errors import NonConvergence
from .model import EvalContext, GameModel, Theta


def _as_shock_batch(u: np.ndarray, model: GameModel) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    T, M = model.players, model.actions_per_player
    if u.shape == (T, M):
        u = u[None]
    if u.ndim != 3 or u.shape[1:] != (T, M):
        raise ValueError(f"shock matrix must have shape ({T}, {M}) or (B, {T}, {M})")
    if np.any(np.isnan(u)):
        raise ValueError("shock matrix contains NaN")
    return u


def best_response_batch(ctx: EvalContext, U: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Simultaneous best responses for a batch: (B, T, M) -> (B, T, M) floats in {0, 1}."""
    g = ctx.utilities(Y)
    return (g >= U).astype(float)


def _extremal_batch(ctx: EvalContext, U: np.ndarray, start_value: float) -> np.ndarray:
    B, T, M = U.shape
    Y = np.full((B, T, M), start_value)
    for _ in range(T * M + 1):
        Yn = best_response_batch(ctx, U, Y)
        if np.array_equal(Yn, Y):
            return Yn
        Y = Yn
    raise NonConvergence(
        f"best-response iteration still changing after {T * M + 1} sweeps; "
        "this indicates a supermodularity violation",
        last_profile=Y,
        iterations=T * M + 1,
    )


def minimal_ne_batch(ctx: EvalContext, U: np.ndarray) -> np.ndarray:
    return _extremal_batch(ctx, U, 0.0)


def maximal_ne_batch(ctx: EvalContext, U: np.ndarray) -> np.ndarray:
    return _extremal_batch(ctx, U, 1.0)


def best_response(model: GameModel, theta: Theta, u: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Profile of pointwise best responses: y'_tm = 1(g_tm(y) >= u_tm)."""
    ctx = EvalContext(model, theta, require_supermodular=False)
    U = _as_shock_batch(u, model)
    Y = np.asarray(y, dtype=float)[None]
    return best_response_batch(ctx, U, Y)[0].astype(np.int8)


def minimal_ne(model: GameModel, theta: Theta, u: np.ndarray) -> np.ndarray:
    """Minimal pure-strategy NE: fixed point of the best response reached from zeros."""
    ctx = EvalContext(model, theta)
    U = _as_shock_batch(u, model)
    return minimal_ne_batch(ctx, U)[0].astype(np.int8)


def maximal_ne(model: GameModel, theta: Theta, u: np.ndarray) -> np.ndarray:
    """Maximal pure-strategy NE: fixed point of the best response reached from ones."""
    ctx = EvalContext(model, theta)
    U = _as_shock_batch(u, model)
    return maximal_ne_batch(ctx, U)[0].astype(np.int8)


def is_ne(model: GameModel, theta: Theta, u: np.ndarray, y: np.ndarray) -> bool:
    """True iff y is a fixed point of the best-response map at u."""
    y = np.asarray(y)
    return bool(np.array_equal(best_response(model, theta, u, y), y.astype(np.int8)))
