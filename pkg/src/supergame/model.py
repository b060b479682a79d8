"""Game definitions: dimensions, covariates, strategic statistics, payoffs, buckets.

Conventions used throughout the package:

* a pure strategy profile is a (T, M) array of 0/1 values;
* a shock matrix is a (T, M) float array, +/-inf sentinels permitted;
* players and actions are indexed from 0;
* for directed-network games action (t, m) is the arc from t to the m-th
  other player in increasing index order (skipping t itself).
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np

from .dist import ShockFamily
from .errors import FeasibleSetTooLarge, SupermodularityViolation

DEFAULT_LEVEL_CAP = 4096


class GameKind(enum.Enum):
    COORDINATION = "coordination"
    PEER_EFFECTS_MEAN = "peer_effects_mean"
    PEER_EFFECTS_COUNT = "peer_effects_count"
    MULTI_ACTION_PEER = "multi_action_peer"
    DIRECTED_NETWORK_SUPPORT = "directed_network_support"


def _frozen_array(x, dtype=float):
    arr = np.array(x, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GameModel:
    """Immutable description of one game: dimensions, covariates, interaction structure."""

    players: int
    actions_per_player: int
    covariates: np.ndarray  # (T, M, K)
    kind: GameKind
    adjacency: np.ndarray | None = None
    shock_family: ShockFamily = ShockFamily.NORMAL
    level_cap: int = DEFAULT_LEVEL_CAP

    def __post_init__(self):
        T, M = self.players, self.actions_per_player
        X = _frozen_array(self.covariates)
        if X.ndim != 3 or X.shape[0] != T or X.shape[1] != M:
            raise ValueError(f"covariates must have shape ({T}, {M}, K), got {X.shape}")
        object.__setattr__(self, "covariates", X)

        kind = self.kind
        adj = self.adjacency
        if kind is GameKind.COORDINATION:
            if T != 2 or M != 1:
                raise ValueError("coordination games have exactly two players and one action")
        elif kind in (GameKind.PEER_EFFECTS_MEAN, GameKind.PEER_EFFECTS_COUNT):
            if M != 1:
                raise ValueError("peer-effects games have one action per player")
            if adj is None:
                raise ValueError("peer-effects games require an adjacency matrix")
        elif kind is GameKind.MULTI_ACTION_PEER:
            if M < 2:
                raise ValueError("multi-action peer games need at least two actions")
        elif kind is GameKind.DIRECTED_NETWORK_SUPPORT:
            if M != T - 1:
                raise ValueError("directed-network games require M = T - 1 (one arc per peer)")

        if adj is not None:
            adj = _frozen_array(adj)
            if adj.shape != (T, T):
                raise ValueError(f"adjacency must be {T}x{T}, got {adj.shape}")
            if np.any(np.diag(adj) != 0):
                raise ValueError("adjacency diagonal must be zero")
            if np.any(adj < 0):
                raise ValueError("adjacency entries must be nonnegative")
            binary = np.all((adj == 0) | (adj == 1))
            if kind is GameKind.PEER_EFFECTS_COUNT and not binary:
                raise ValueError("count peer-effects games require a binary adjacency matrix")
            if kind is GameKind.PEER_EFFECTS_MEAN and not binary:
                sums = adj.sum(axis=1)
                ok = np.isclose(sums, 1.0) | (sums == 0.0)
                if not np.all(ok):
                    raise ValueError("row-normalized adjacency rows must sum to 1 or 0")
            object.__setattr__(self, "adjacency", adj)

        # binary neighbour structure shared by the peer kinds
        if adj is not None:
            D = (adj > 0).astype(float)
            D.setflags(write=False)
            J = D.sum(axis=1)
            J.setflags(write=False)
        else:
            D = None
            J = None
        object.__setattr__(self, "_neighbors", D)
        object.__setattr__(self, "_degrees", J)

        if kind is GameKind.DIRECTED_NETWORK_SUPPORT:
            targets = np.empty((T, M), dtype=np.intp)
            m_of = np.full((T, T), -1, dtype=np.intp)
            for t in range(T):
                others = [s for s in range(T) if s != t]
                targets[t] = others
                for m, s in enumerate(others):
                    m_of[t, s] = m
            targets.setflags(write=False)
            m_of.setflags(write=False)
        else:
            targets = None
            m_of = None
        object.__setattr__(self, "_dyad_targets", targets)
        object.__setattr__(self, "_m_of_dyad", m_of)

    # -- dimensions -----------------------------------------------------

    @property
    def n_covariates(self) -> int:
        return self.covariates.shape[2]

    @property
    def stat_dim(self) -> int:
        """Length of the strategic-statistic vector for each action."""
        if self.kind is GameKind.MULTI_ACTION_PEER:
            return 2 * self.actions_per_player - 1
        return 1

    @property
    def n_action_types(self) -> int:
        """Number of distinct (beta, delta) parameter blocks."""
        if self.kind is GameKind.MULTI_ACTION_PEER:
            return self.actions_per_player
        return 1

    def action_type(self, m: int) -> int:
        return m if self.kind is GameKind.MULTI_ACTION_PEER else 0

    def dyad_of(self, t: int, m: int) -> tuple[int, int]:
        """Map action (t, m) to the ordered dyad (t, s) in a network game."""
        if self._dyad_targets is None:
            raise ValueError("dyads are only defined for directed-network games")
        return t, int(self._dyad_targets[t, m])

    def action_of(self, t: int, s: int) -> int:
        """Map the ordered dyad (t, s) back to the action index m."""
        if self._m_of_dyad is None:
            raise ValueError("dyads are only defined for directed-network games")
        m = int(self._m_of_dyad[t, s])
        if m < 0:
            raise ValueError(f"no action for the diagonal dyad ({t}, {t})")
        return m


@dataclass(frozen=True, eq=False)
class Theta:
    """Payoff parameters: covariate loadings, strategic weights, optional degree effects.

    `beta` and `delta` hold one block per action type. Nonnegativity of delta
    is *not* enforced at construction (fit results may carry unconstrained
    estimates); it is enforced wherever equilibrium structure is relied upon,
    see :func:`check_supermodular`.
    """

    beta: tuple
    delta: tuple
    sender_effects: np.ndarray | None = None
    receiver_effects: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "beta", _as_blocks(self.beta))
        object.__setattr__(self, "delta", _as_blocks(self.delta))
        for name in ("sender_effects", "receiver_effects"):
            val = getattr(self, name)
            if val is not None:
                object.__setattr__(self, name, _frozen_array(np.atleast_1d(val)))

    @property
    def has_effects(self) -> bool:
        return self.sender_effects is not None or self.receiver_effects is not None


def _as_blocks(value) -> tuple:
    if isinstance(value, (int, float, np.floating)):
        return (_frozen_array([value]),)
    if isinstance(value, np.ndarray) and value.ndim <= 1:
        return (_frozen_array(np.atleast_1d(value)),)
    if isinstance(value, (list, tuple)):
        first = value[0] if len(value) else None
        if isinstance(first, (list, tuple, np.ndarray)):
            return tuple(_frozen_array(np.atleast_1d(b)) for b in value)
        return (_frozen_array(np.atleast_1d(np.asarray(value, dtype=float))),)
    raise TypeError(f"cannot interpret parameter block(s) from {type(value)!r}")


def validate_theta(model: GameModel, theta: Theta) -> None:
    """Raise if theta's block structure does not match the model."""
    n = model.n_action_types
    if len(theta.beta) != n or len(theta.delta) != n:
        raise ValueError(
            f"model expects {n} beta/delta block(s), "
            f"got {len(theta.beta)}/{len(theta.delta)}"
        )
    K = model.n_covariates
    for i, b in enumerate(theta.beta):
        if b.shape != (K,):
            raise ValueError(f"beta block {i} must have length {K}, got {b.shape}")
    P = model.stat_dim
    for i, d in enumerate(theta.delta):
        if d.shape != (P,):
            raise ValueError(f"delta block {i} must have length {P}, got {d.shape}")
    if theta.has_effects:
        if model.kind is not GameKind.DIRECTED_NETWORK_SUPPORT:
            raise ValueError("sender/receiver effects only apply to network games")
        T = model.players
        for name in ("sender_effects", "receiver_effects"):
            val = getattr(theta, name)
            if val is None or val.shape != (T,):
                raise ValueError(f"{name} must be a length-{T} vector")


def require_nonnegative_delta(theta: Theta) -> None:
    for i, block in enumerate(theta.delta):
        for j, value in enumerate(block):
            if value < 0:
                raise SupermodularityViolation(
                    f"delta block {i} component {j} is negative ({value})",
                    component=(i, j),
                )


# ---------------------------------------------------------------------------
# strategic statistics
# ---------------------------------------------------------------------------


def _dot_delta(levels: np.ndarray, delta: np.ndarray) -> np.ndarray:
    """Sum_p levels[..., p] * delta[p] with a fixed accumulation order.

    Bucket boundaries, thresholds, and best-response utilities must agree
    bitwise; they all flow through this helper.
    """
    acc = levels[..., 0] * delta[0]
    for p in range(1, delta.shape[0]):
        acc = acc + levels[..., p] * delta[p]
    return acc


def _digraph_from_profiles(model: GameModel, Y: np.ndarray) -> np.ndarray:
    """(B, T, M) arc profiles -> (B, T, T) adjacency with zero diagonal."""
    B, T, M = Y.shape
    out = np.zeros((B, T, T))
    rows = np.repeat(np.arange(T), M)
    cols = model._dyad_targets.ravel()
    out[:, rows, cols] = Y.reshape(B, T * M)
    return out


def statistic_batch(model: GameModel, Y: np.ndarray) -> np.ndarray:
    """Strategic statistics for a batch of profiles: (B, T, M) -> (B, T, M, P)."""
    Y = np.asarray(Y, dtype=float)
    B, T, M = Y.shape
    kind = model.kind
    if kind is GameKind.COORDINATION:
        return Y[:, ::-1, :][..., None]
    if kind in (GameKind.PEER_EFFECTS_MEAN, GameKind.PEER_EFFECTS_COUNT):
        counts = Y[:, :, 0] @ model._neighbors.T
        if kind is GameKind.PEER_EFFECTS_MEAN:
            J = model._degrees
            counts = np.divide(counts, J, out=np.zeros_like(counts), where=J > 0)
        return counts[:, :, None, None]
    if kind is GameKind.MULTI_ACTION_PEER:
        P = model.stat_dim
        out = np.empty((B, T, M, P))
        totals = Y.sum(axis=1)  # (B, M)
        peer_means = (totals[:, None, :] - Y) / (T - 1)  # (B, T, M)
        for m in range(M):
            others = [mm for mm in range(M) if mm != m]
            out[:, :, m, : M - 1] = Y[:, :, others]
            out[:, :, m, M - 1 :] = peer_means
        return out
    if kind is GameKind.DIRECTED_NETWORK_SUPPORT:
        Yd = _digraph_from_profiles(model, Y)
        support = np.matmul(Yd.transpose(0, 2, 1), Yd)  # (B, T, T): common in-neighbours
        rows = np.repeat(np.arange(T), M)
        cols = model._dyad_targets.ravel()
        return support[:, rows, cols].reshape(B, T, M)[..., None]
    raise ValueError(f"unknown game kind {kind!r}")  # pragma: no cover


def statistic_at(model: GameModel, Y: np.ndarray, t: int, m: int) -> np.ndarray:
    """Strategic statistic of coordinate (t, m) for a batch of profiles: (B, P)."""
    Y = np.asarray(Y, dtype=float)
    B, T, M = Y.shape
    kind = model.kind
    if kind is GameKind.COORDINATION:
        return Y[:, 1 - t, :]
    if kind in (GameKind.PEER_EFFECTS_MEAN, GameKind.PEER_EFFECTS_COUNT):
        counts = Y[:, :, 0] @ model._neighbors[t]
        if kind is GameKind.PEER_EFFECTS_MEAN and model._degrees[t] > 0:
            counts = counts / model._degrees[t]
        return counts[:, None]
    if kind is GameKind.MULTI_ACTION_PEER:
        others = [mm for mm in range(M) if mm != m]
        own = Y[:, t, others]
        peers = (Y.sum(axis=1) - Y[:, t, :]) / (T - 1)
        return np.concatenate([own, peers], axis=1)
    if kind is GameKind.DIRECTED_NETWORK_SUPPORT:
        _, s = model.dyad_of(t, m)
        col_t = _in_arcs(model, Y, t)
        col_s = _in_arcs(model, Y, s)
        return np.sum(col_t * col_s, axis=1)[:, None]
    raise ValueError(f"unknown game kind {kind!r}")  # pragma: no cover


def _in_arcs(model: GameModel, Y: np.ndarray, v: int) -> np.ndarray:
    """Column v of the digraph for each profile in the batch: (B, T)."""
    T = model.players
    m_col = model._m_of_dyad[:, v].copy()
    valid = m_col >= 0
    m_col[~valid] = 0
    col = Y[:, np.arange(T), m_col]
    col[:, ~valid] = 0.0
    return col


def strategic_statistic(model: GameModel, y: np.ndarray, t: int, m: int) -> np.ndarray:
    """Strategic statistic s_m evaluated at one profile; returns a (P,) vector."""
    y = np.asarray(y, dtype=float)
    T, M = model.players, model.actions_per_player
    if y.shape != (T, M):
        raise ValueError(f"profile must have shape ({T}, {M}), got {y.shape}")
    if not (0 <= t < T and 0 <= m < M):
        raise IndexError(f"coordinate ({t}, {m}) out of range for a {T}x{M} game")
    return statistic_at(model, y[None], t, m)[0]


# ---------------------------------------------------------------------------
# linear indices and systematic utility
# ---------------------------------------------------------------------------


def linear_index(model: GameModel, theta: Theta) -> np.ndarray:
    """x'beta for every coordinate, plus degree effects where enabled: (T, M)."""
    validate_theta(model, theta)
    T, M = model.players, model.actions_per_player
    xb = np.empty((T, M))
    for m in range(M):
        xb[:, m] = model.covariates[:, m, :] @ theta.beta[model.action_type(m)]
    if theta.has_effects:
        A = theta.sender_effects
        B = theta.receiver_effects
        if A is not None:
            xb = xb + A[model._dyad_targets]
        if B is not None:
            xb = xb + B[:, None]
    return xb


def systematic_utility(model: GameModel, theta: Theta, y: np.ndarray, t: int, m: int) -> float:
    """g_tm(y) = x_tm' beta_m + s_m(y)' delta_m (+ effects for network games)."""
    xb = linear_index(model, theta)
    s = strategic_statistic(model, y, t, m)
    return float(xb[t, m] + _dot_delta(s[None], theta.delta[model.action_type(m)])[0])


# ---------------------------------------------------------------------------
# bucket geometry
# ---------------------------------------------------------------------------


def feasible_levels(model: GameModel, t: int, m: int) -> np.ndarray:
    """All values the strategic statistic of coordinate (t, m) can take: (L, P).

    Raises FeasibleSetTooLarge when the enumeration would exceed the model's cap.
    """
    T, M = model.players, model.actions_per_player
    kind = model.kind
    if kind is GameKind.COORDINATION:
        levels = np.array([[0.0], [1.0]])
    elif kind is GameKind.PEER_EFFECTS_MEAN:
        J = int(model._degrees[t])
        levels = (np.arange(J + 1, dtype=float) / J if J else np.zeros(1))[:, None]
    elif kind is GameKind.PEER_EFFECTS_COUNT:
        J = int(model._degrees[t])
        levels = np.arange(J + 1, dtype=float)[:, None]
    elif kind is GameKind.DIRECTED_NETWORK_SUPPORT:
        levels = np.arange(T - 1, dtype=float)[:, None]
    elif kind is GameKind.MULTI_ACTION_PEER:
        count = (2 ** (M - 1)) * (T ** M)
        if count > model.level_cap:
            raise FeasibleSetTooLarge(
                f"{count} feasible statistic values at coordinate ({t}, {m}) "
                f"exceed the cap of {model.level_cap}"
            )
        own = np.array(list(itertools.product([0.0, 1.0], repeat=M - 1)))
        peer = np.array(list(itertools.product(np.arange(T, dtype=float) / (T - 1), repeat=M)))
        levels = np.hstack(
            [
                np.repeat(own, len(peer), axis=0),
                np.tile(peer, (len(own), 1)),
            ]
        )
    else:  # pragma: no cover
        raise ValueError(f"unknown game kind {kind!r}")
    if levels.shape[0] > model.level_cap:
        raise FeasibleSetTooLarge(
            f"{levels.shape[0]} feasible statistic values at coordinate ({t}, {m}) "
            f"exceed the cap of {model.level_cap}"
        )
    return levels


def _boundary_table(xb_tm: float, levels: np.ndarray, delta: np.ndarray):
    """Sorted distinct boundary values and their aligned statistic levels."""
    vals = xb_tm + _dot_delta(levels, delta)
    order = np.argsort(vals, kind="stable")
    v = vals[order]
    lv = levels[order]
    keep = np.ones(len(v), dtype=bool)
    keep[1:] = v[1:] != v[:-1]
    return v[keep], lv[keep]


def bucket_boundaries(model: GameModel, theta: Theta, t: int, m: int) -> np.ndarray:
    """Sorted distinct values x'beta + level'delta (+ effects) over feasible levels.

    The returned array defines L+1 left-open/right-closed buckets over the
    shock support of coordinate (t, m).
    """
    xb = linear_index(model, theta)
    levels = feasible_levels(model, t, m)
    values, _ = _boundary_table(float(xb[t, m]), levels, theta.delta[model.action_type(m)])
    return values


# ---------------------------------------------------------------------------
# evaluation context: the shared numeric engine
# ---------------------------------------------------------------------------


class EvalContext:
    """Precomputed (model, theta) state shared by equilibrium and sampling code.

    Construction enforces delta >= 0 unless `require_supermodular=False`:
    every guarantee downstream (Tarski iteration, threshold validity) relies
    on strategic complementarity at the evaluated parameter.
    """

    def __init__(self, model: GameModel, theta: Theta, require_supermodular: bool = True):
        validate_theta(model, theta)
        if require_supermodular:
            require_nonnegative_delta(theta)
        self.model = model
        self.theta = theta
        self.fam = model.shock_family
        self.xb = linear_index(model, theta)
        self._tables = None

    # utilities ---------------------------------------------------------

    def utilities(self, Y: np.ndarray) -> np.ndarray:
        """g_tm for every coordinate of every profile in the batch: (B, T, M)."""
        model = self.model
        stats = statistic_batch(model, Y)
        if model.n_action_types == 1:
            return self.xb[None] + _dot_delta(stats, self.theta.delta[0])
        out = np.empty(stats.shape[:3])
        for m in range(model.actions_per_player):
            out[:, :, m] = self.xb[None, :, m] + _dot_delta(
                stats[:, :, m, :], self.theta.delta[model.action_type(m)]
            )
        return out

    def utility_at(self, Y: np.ndarray, t: int, m: int) -> np.ndarray:
        """g_tm(Y_b) for each profile in the batch: (B,)."""
        s = statistic_at(self.model, Y, t, m)
        return self.xb[t, m] + _dot_delta(s, self.theta.delta[self.model.action_type(m)])

    # bucket tables -------------------------------------------------------

    def tables(self):
        """Per-coordinate (boundary values, aligned levels), built lazily."""
        if self._tables is None:
            model = self.model
            T, M = model.players, model.actions_per_player
            tabs = []
            for t in range(T):
                row = []
                for m in range(M):
                    levels = feasible_levels(model, t, m)
                    row.append(
                        _boundary_table(
                            float(self.xb[t, m]), levels, self.theta.delta[model.action_type(m)]
                        )
                    )
                tabs.append(row)
            self._tables = tabs
        return self._tables


# ---------------------------------------------------------------------------
# supermodularity checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SupermodularityReport:
    ok: bool
    message: str = "ok"
    component: tuple | None = None
    profiles: tuple | None = None


BRUTE_FORCE_LIMIT = 12


def check_supermodular(model: GameModel, theta: Theta) -> SupermodularityReport:
    """Verify delta >= 0; on small games also brute-force the payoff inequalities.

    On games with T*M <= 12 this additionally checks, over every comparable
    pair of profiles, that own actions are complements (join/meet inequality)
    and that own and peer actions satisfy increasing differences.
    """
    validate_theta(model, theta)
    for i, block in enumerate(theta.delta):
        for j, value in enumerate(block):
            if value < 0:
                return SupermodularityReport(
                    ok=False,
                    message=f"delta block {i} component {j} is negative ({value})",
                    component=(i, j),
                )
    T, M = model.players, model.actions_per_player
    if T * M > BRUTE_FORCE_LIMIT:
        return SupermodularityReport(ok=True)

    ctx = EvalContext(model, theta)
    n_own = 2**M
    n_rest = 2 ** ((T - 1) * M)
    own_bits = _bit_patterns(n_own, M)  # (n_own, M)
    rest_bits = _bit_patterns(n_rest, (T - 1) * M)  # (n_rest, (T-1)*M)

    own_pairs = [(a, b) for a in range(n_own) for b in range(n_own) if (a & b) == a]
    rest_lo, rest_hi = _comparable_pairs(n_rest)

    for t in range(T):
        # player-t utility table indexed (own profile, others' profile)
        profiles = np.empty((n_own * n_rest, T, M))
        others = [tt for tt in range(T) if tt != t]
        own_grid = np.repeat(own_bits, n_rest, axis=0)
        rest_grid = np.tile(rest_bits.reshape(n_rest, T - 1, M), (n_own, 1, 1))
        profiles[:, t, :] = own_grid
        profiles[:, others, :] = rest_grid
        g = ctx.utilities(profiles)
        util = (profiles[:, t, :] * g[:, t, :]).sum(axis=1).reshape(n_own, n_rest)

        for a, b in own_pairs:
            lhs = util[b, rest_hi] - util[a, rest_hi]
            rhs = util[b, rest_lo] - util[a, rest_lo]
            bad = np.nonzero(lhs < rhs - 1e-9)[0]
            if bad.size:
                k = int(bad[0])
                return SupermodularityReport(
                    ok=False,
                    message=f"increasing differences fails for player {t}",
                    profiles=((a, int(rest_lo[k])), (b, int(rest_hi[k]))),
                )
        for a in range(n_own):
            for b in range(n_own):
                join, meet = a | b, a & b
                bad = np.nonzero(util[join] + util[meet] < util[a] + util[b] - 1e-9)[0]
                if bad.size:
                    return SupermodularityReport(
                        ok=False,
                        message=f"own-action supermodularity fails for player {t}",
                        profiles=((a, int(bad[0])), (b, int(bad[0]))),
                    )
    return SupermodularityReport(ok=True)


def _bit_patterns(n: int, width: int) -> np.ndarray:
    ids = np.arange(n, dtype=np.uint32)
    return ((ids[:, None] >> np.arange(width, dtype=np.uint32)[None, :]) & 1).astype(float)


def _comparable_pairs(n: int):
    ids = np.arange(n, dtype=np.uint32)
    lo, hi = np.meshgrid(ids, ids, indexing="ij")
    mask = (lo & hi) == lo
    return lo[mask].astype(np.intp), hi[mask].astype(np.intp)


# ---------------------------------------------------------------------------
# flat parameter vectors (used by the optimizer and the gradient)
# ---------------------------------------------------------------------------


def theta_dim(model: GameModel, with_effects: bool = False) -> int:
    n = model.n_action_types
    dim = n * model.n_covariates + n * model.stat_dim
    if with_effects:
        dim += 2 * model.players
    return dim


def theta_to_vector(model: GameModel, theta: Theta) -> np.ndarray:
    """Pack theta as [beta blocks..., delta blocks..., A..., B...]."""
    validate_theta(model, theta)
    parts = list(theta.beta) + list(theta.delta)
    if theta.has_effects:
        parts += [theta.sender_effects, theta.receiver_effects]
    return np.concatenate(parts)


def theta_from_vector(model: GameModel, vec: np.ndarray, with_effects: bool = False) -> Theta:
    vec = np.asarray(vec, dtype=float)
    if vec.shape != (theta_dim(model, with_effects),):
        raise ValueError(
            f"expected a parameter vector of length {theta_dim(model, with_effects)}, "
            f"got {vec.shape}"
        )
    n = model.n_action_types
    K = model.n_covariates
    P = model.stat_dim
    pos = 0
    beta = []
    for _ in range(n):
        beta.append(vec[pos : pos + K])
        pos += K
    delta = []
    for _ in range(n):
        delta.append(vec[pos : pos + P])
        pos += P
    A = B = None
    if with_effects:
        T = model.players
        A = vec[pos : pos + T]
        pos += T
        B = vec[pos : pos + T]
        pos += T
    return Theta(beta=tuple(beta), delta=tuple(delta), sender_effects=A, receiver_effects=B)


def theta_labels(model: GameModel, with_effects: bool = False) -> list[str]:
    n = model.n_action_types
    labels = []
    for i in range(n):
        prefix = f"a{i + 1}_" if n > 1 else ""
        labels += [f"{prefix}beta{k + 1}" for k in range(model.n_covariates)]
    for i in range(n):
        prefix = f"a{i + 1}_" if n > 1 else ""
        if model.stat_dim == 1:
            labels.append(f"{prefix}delta")
        else:
            labels += [f"{prefix}delta{p + 1}" for p in range(model.stat_dim)]
    if with_effects:
        labels += [f"A{t + 1}" for t in range(model.players)]
        labels += [f"B{t + 1}" for t in range(model.players)]
    return labels
