"""Leaders that learn from the follower's responses.

``ImitationAgent`` copies the follower: in the imitation game the best
response equals the parameter, so the projected mean of observed responses
is both an estimate and the action to play.  ``ExpertGuidedAgent`` uses the
first (noiseless) response ``b1 = theta_b`` to restrict actions to the cap
``{a : a . b1 >= zeta}`` that must contain ``theta_a``.
"""

from __future__ import annotations

import numpy as np

from ..envs import GameSpec, Variant
from ..geometry import project_to_sphere, rotated_net_cap
from .base import Agent
from .ucb import UCB1, BallConfidence, LinUCB


def imitation_alpha(d: int, sigma_b: float, horizon: int, delta: float, c_alpha: float = 2.0) -> float:
    """Ball-confidence scale ``c_alpha * sigma_b * sqrt(d + log(T / delta))``."""
    return c_alpha * sigma_b * np.sqrt(d + np.log(horizon / delta))


class ImitationAgent(Agent):
    """Play the sphere projection of the mean observed response (``e1`` at round 1)."""

    def __init__(self, d: int, sigma_b: float, horizon: int, delta: float = 0.05,
                 c_alpha: float = 2.0):
        self.d = d
        self.alpha = imitation_alpha(d, sigma_b, horizon, delta, c_alpha)
        self.total = np.zeros(d)
        self.n = 0

    @property
    def estimate(self) -> np.ndarray:
        if self.n == 0:
            e1 = np.zeros(self.d)
            e1[0] = 1.0
            return e1
        return project_to_sphere(self.total / self.n)

    def confidence(self) -> BallConfidence:
        """Ball of radius ``alpha / sqrt(t - 1)`` around the current estimate."""
        if self.n == 0:
            return BallConfidence(self.estimate, np.inf)
        return BallConfidence(self.estimate, self.alpha / np.sqrt(self.n))

    def act(self, t):
        return self.estimate

    def observe(self, a, b_obs, r):
        self.total += b_obs
        self.n += 1


def strong_reduction_applies(zeta: float, delta: float) -> bool:
    """Whether ``1 - zeta <= (1 - delta) / 4``, which keeps the ReLU active on the cap."""
    return 1.0 - zeta <= (1.0 - delta) / 4.0


def weak_eps(d: int, zeta: float, horizon: int, K: float = 1.0) -> float:
    """``(K C_zeta)^{d/(d+2)} T^{-1/(d+2)}`` with ``C_zeta = sqrt(1 - zeta^2)``."""
    c_zeta = np.sqrt(1.0 - zeta**2)
    return float((K * c_zeta) ** (d / (d + 2)) * float(horizon) ** (-1.0 / (d + 2)))


class ExpertGuidedAgent(Agent):
    """Cap-restricted leader for the expert-guided game.

    Round 1 plays ``e1`` and records the response ``b1``.  In strong mode
    the reward on the cap is ``theta_a . a + 1 - delta``, so LinUCB runs on
    a cap net with that offset removed.  In weak mode UCB1 runs on a cap net
    at resolution ``weak_eps``.  ``mode="auto"`` picks strong exactly when
    ``strong_reduction_applies``.
    """

    def __init__(self, spec: GameSpec, horizon: int, *, sigma_r: float, sigma_b: float = 0.0,
                 mode: str = "auto", eps: float | None = None, K: float = 1.0,
                 c: float | None = None, net_seed: int = 0):
        if spec.variant is not Variant.EXPERT_GUIDED:
            raise ValueError("ExpertGuidedAgent needs the expert-guided game")
        if sigma_b != 0:
            raise ValueError("ExpertGuidedAgent assumes noiseless responses (sigma_b = 0)")
        strong_ok = strong_reduction_applies(spec.zeta, spec.delta)
        if mode == "auto":
            mode = "strong" if strong_ok else "weak"
        elif mode == "strong" and not strong_ok:
            raise ValueError("strong mode needs 1 - zeta <= (1 - delta) / 4")
        elif mode not in ("strong", "weak"):
            raise ValueError(f"unknown mode {mode!r}")
        self.spec = spec
        self.mode = mode
        self.horizon = horizon
        self.sigma_r = float(sigma_r)
        if eps is None:
            eps = 0.1 if mode == "strong" else weak_eps(spec.d, spec.zeta, horizon, K)
        self.eps = float(eps)
        self.c = np.sqrt(2.0) * sigma_r if c is None else c
        self.net_seed = net_seed
        self.b1 = None
        self.net = None
        self.inner = None

    def act(self, t):
        if self.inner is None:
            e1 = np.zeros(self.spec.d)
            e1[0] = 1.0
            return e1
        return self.inner.act(t)

    def observe(self, a, b_obs, r):
        if self.inner is None:
            self.b1 = project_to_sphere(b_obs)
            self.net = rotated_net_cap(self.b1, self.spec.zeta, self.eps, self.net_seed)
            if self.mode == "strong":
                self.inner = LinUCB(self.net.points, sigma_r=self.sigma_r, horizon=self.horizon,
                                    offset=1.0 - self.spec.delta)
            else:
                self.inner = UCB1(self.net.points, self.horizon, self.c)
            return
        self.inner.observe(a, b_obs, r)
