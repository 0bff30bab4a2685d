"""Covering-based leader: discretize the parameter set, then run UCB1.

Every parameter in an ``eps``-net of the parameter set is mapped to its
optimal leader action; the distinct actions form the arm set of a finite
bandit played on the observed rewards only.
"""

from __future__ import annotations

import numpy as np

from ..envs import GameSpec, Variant
from ..geometry import MAX_NET_POINTS, build_net_sphere
from .base import Agent
from .ucb import UCB1


def default_covering_eps(d: int, horizon: int) -> float:
    """``T^{-1/(d+2)}``, balancing discretization error against arm count."""
    return float(horizon) ** (-1.0 / (d + 2))


def dedupe(points, tol: float = 1e-9) -> np.ndarray:
    """Drop rows within ``tol`` of an earlier row, preserving order."""
    points = np.atleast_2d(points)
    kept = []
    for p in points:
        if not kept or np.min(np.linalg.norm(np.asarray(kept) - p, axis=1)) > tol:
            kept.append(p)
    return np.asarray(kept)


def optimal_actions_of(spec: GameSpec, params) -> np.ndarray:
    """Optimal action for each parameter row (the parameter itself in every variant)."""
    params = np.atleast_2d(params)
    if spec.variant in (Variant.POLYNOMIAL, Variant.OPTIMISM_TRAP):
        norms = np.linalg.norm(params, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise ValueError("optimal actions are only defined for unit parameters")
    return params.copy()


class CoveringAgent(Agent):
    """UCB1 over the optimal actions of a parameter net.

    With ``eps=None`` the net resolution is ``T^{-1/(d+2)}`` for the
    parameter dimension ``d``.  The exploration constant defaults to
    ``sqrt(2) * sigma_r``.
    """

    def __init__(self, spec: GameSpec, horizon: int, rng: np.random.Generator, *,
                 sigma_r: float, eps: float | None = None, c: float | None = None,
                 max_points: int = MAX_NET_POINTS):
        self.spec = spec
        self.eps = default_covering_eps(spec.d, horizon) if eps is None else float(eps)
        # the expert-guided optimal action depends on theta_a alone
        self.net = build_net_sphere(spec.param_dim, self.eps, rng, max_points)
        self.arms = dedupe(optimal_actions_of(spec, self.net.points))
        c = np.sqrt(2.0) * sigma_r if c is None else c
        self.ucb = UCB1(self.arms, horizon, c)

    def act(self, t):
        return self.ucb.act(t)

    def observe(self, a, b_obs, r):
        self.ucb.observe(a, b_obs, r)
