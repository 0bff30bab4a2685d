"""Agents for the optimism-trap game.

At ``a = 0`` the follower's response reveals ``theta_{-d}`` directly, but no
parameter makes an interior action look optimistic: for ``||a|| = s < 1``
every ``hbar`` is at most ``s + (1 - s) / 2 < 1``, while a unit action
still consistent with the data has optimistic value 1.  ``ProbeAgent``
exploits the reveal; ``OptimisticSphereAgent`` follows optimism and never
leaves the sphere, where responses carry almost no information.
"""

from __future__ import annotations

import numpy as np

from ..envs import GameSpec, Theta, Variant, hbar_many
from ..geometry import cached_net_sphere, project_to_sphere, sample_uniform_sphere
from .base import Agent, InconsistentEnvironmentError


class ProbeAgent(Agent):
    """Play ``0`` once, then the sphere projection of the revealed ``b_{-d}``."""

    def __init__(self, spec: GameSpec):
        if spec.variant is not Variant.OPTIMISM_TRAP:
            raise ValueError("ProbeAgent needs the optimism-trap game")
        self.spec = spec
        self.action = None

    def act(self, t):
        if self.action is None:
            return np.zeros(self.spec.leader_dim)
        return self.action.copy()

    def observe(self, a, b_obs, r):
        if self.action is not None:
            return
        head = np.asarray(b_obs[:-1], dtype=float)
        if np.linalg.norm(head) <= 1e-12:
            raise InconsistentEnvironmentError("the probe response carries no direction")
        self.action = project_to_sphere(head)


class OptimisticSphereAgent(Agent):
    """Optimism over a unit-parameter hypothesis set, evaluated on a sphere net.

    Hypotheses are ``n_particles`` random unit parameters plus the net points
    themselves.  After each round, hypotheses whose predicted ``b_d`` differs
    from the observed one are eliminated.  A candidate ``x`` has optimistic
    value 1 while ``theta = x`` is still consistent, else the largest
    ``hbar_theta(x)`` over surviving hypotheses, and at least ``1 - delta``.
    Ties go to the lowest net index.
    """

    def __init__(self, spec: GameSpec, horizon: int, rng: np.random.Generator, *,
                 eps: float = 1.0, n_particles: int = 4096, net_seed: int = 0):
        if spec.variant is not Variant.OPTIMISM_TRAP:
            raise ValueError("OptimisticSphereAgent needs the optimism-trap game")
        self.spec = spec
        self.c = 1.0 - spec.delta
        self.candidates = np.asarray(cached_net_sphere(spec.leader_dim, eps, net_seed).points)
        particles = sample_uniform_sphere(rng, spec.leader_dim, n_particles)
        self.hypotheses = np.concatenate([self.candidates, particles])
        self.alive = np.ones(len(self.hypotheses), dtype=bool)
        self._last = None

    def _values(self):
        n = len(self.candidates)
        self_ok = self.alive[:n]
        live = self.hypotheses[self.alive]
        if len(live):
            best = np.max(self.candidates @ live.T, axis=1)
        else:
            best = np.full(n, -np.inf)
        return np.where(self_ok, 1.0, np.maximum(best, self.c))

    def optimistic_value(self, a) -> float:
        """``max_theta hbar_theta(a)`` over the surviving hypotheses (any ``||a|| <= 1``)."""
        a = np.asarray(a, dtype=float)
        live = self.hypotheses[self.alive]
        if len(live) == 0:
            return float(np.linalg.norm(a) * self.c)
        vals = [hbar_many(self.spec, Theta(th), a[None, :])[0] for th in live]
        return float(max(vals))

    def act(self, t):
        self._last = int(np.argmax(self._values()))
        return self.candidates[self._last].copy()

    def observe(self, a, b_obs, r):
        below = b_obs[-1] > 0.5
        predicted = self.hypotheses @ a < self.c
        self.alive &= predicted == below
