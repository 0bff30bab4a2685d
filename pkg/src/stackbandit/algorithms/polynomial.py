"""Response-only leader for the polynomial game.

The best response ``b* = x^{2k-1}`` with ``x = theta . a`` is an odd,
increasing function of ``x``, so regressing the signed root
``sign(b) |b|^{1/(2k-1)}`` on ``a`` recovers the direction of ``theta``.
Rewards are never used.
"""

from __future__ import annotations

import math

import numpy as np

from ..envs import GameSpec, Variant
from ..geometry import sample_uniform_sphere
from .base import Agent


def signed_root(b, k: int) -> np.ndarray:
    """``sign(b) |b|^{1/(2k-1)}``, inverting ``x -> x^{2k-1}``."""
    b = np.asarray(b, dtype=float)
    return np.sign(b) * np.abs(b) ** (1.0 / (2 * k - 1))


class PolyProxyAgent(Agent):
    """Explore-then-commit on response observations.

    The first ``ceil(rho * T)`` rounds play uniform unit directions; the
    agent then commits to the normalized least-squares estimate.  A zero
    estimate keeps exploring.
    """

    def __init__(self, spec: GameSpec, horizon: int, rng: np.random.Generator, rho: float = 0.2):
        if spec.variant is not Variant.POLYNOMIAL:
            raise ValueError("PolyProxyAgent needs the polynomial game")
        if not 0 < rho <= 1:
            raise ValueError("rho must lie in (0, 1]")
        self.spec = spec
        self.rng = rng
        self.explore_rounds = math.ceil(rho * horizon)
        p = spec.param_dim
        self.gram = np.zeros((p, p))
        self.moment = np.zeros(p)
        self.n = 0
        self.committed = None

    def estimate(self) -> np.ndarray:
        return np.linalg.lstsq(self.gram, self.moment, rcond=None)[0]

    def act(self, t):
        if self.committed is None and self.n >= self.explore_rounds:
            theta_hat = self.estimate()
            norm = np.linalg.norm(theta_hat)
            if norm > 1e-12:
                self.committed = theta_hat / norm
        if self.committed is not None:
            return self.committed.copy()
        return sample_uniform_sphere(self.rng, self.spec.param_dim)

    def observe(self, a, b_obs, r):
        if self.committed is not None:
            return
        y = float(signed_root(b_obs[0], self.spec.k))
        self.gram += np.outer(a, a)
        self.moment += y * a
        self.n += 1
