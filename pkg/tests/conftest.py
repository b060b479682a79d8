import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from supergame.dist import ShockFamily
from supergame.model import GameKind, GameModel, Theta


@pytest.fixture
def coordination():
    """Two-player coordination game with x'beta = (0, 0) and delta = 1."""
    model = GameModel(
        players=2,
        actions_per_player=1,
        covariates=np.zeros((2, 1, 1)),
        kind=GameKind.COORDINATION,
    )
    theta = Theta(beta=np.zeros(1), delta=1.0)
    return model, theta


@pytest.fixture
def peer_count_triangle():
    """Three players on a complete graph, count statistic."""
    model = GameModel(
        players=3,
        actions_per_player=1,
        covariates=np.zeros((3, 1, 1)),
        adjacency=np.ones((3, 3)) - np.eye(3),
        kind=GameKind.PEER_EFFECTS_COUNT,
    )
    theta = Theta(beta=np.zeros(1), delta=0.4)
    return model, theta


@pytest.fixture
def peer_mean_triangle():
    """Three players on a complete row-normalized graph, mean statistic."""
    G = (np.ones((3, 3)) - np.eye(3)) / 2
    model = GameModel(
        players=3,
        actions_per_player=1,
        covariates=np.zeros((3, 1, 1)),
        adjacency=G,
        kind=GameKind.PEER_EFFECTS_MEAN,
    )
    theta = Theta(beta=np.zeros(1), delta=1.0)
    return model, theta


def make_network(T=4, effects=False, seed=0, delta=0.3, intercept=0.0):
    """Directed-network game; `intercept` shifts the baseline arc payoff."""
    rng = np.random.default_rng(seed)
    X = np.empty((T, T - 1, 2))
    X[:, :, 0] = 1.0
    X[:, :, 1] = rng.normal(scale=0.5, size=(T, T - 1))
    model = GameModel(
        players=T,
        actions_per_player=T - 1,
        covariates=X,
        kind=GameKind.DIRECTED_NETWORK_SUPPORT,
    )
    A = rng.normal(scale=0.3, size=T) if effects else None
    B = rng.normal(scale=0.3, size=T) if effects else None
    theta = Theta(
        beta=np.array([intercept, float(rng.normal(scale=0.4))]),
        delta=delta,
        sender_effects=A,
        receiver_effects=B,
    )
    return model, theta


def uniforms(rng, S, T, M):
    return rng.integers(1, 2**53, size=(S, T, M)) / float(2**53)
