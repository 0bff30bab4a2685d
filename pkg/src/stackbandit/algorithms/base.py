from __future__ import annotations

import numpy as np


class Agent:
    """Leader policy.

    ``act(t)`` returns the action for round ``t`` (1-indexed) and
    ``observe(a, b_obs, r)`` feeds back the noisy response and reward for that
    action.  Agents never see the true parameter.  ``empty_intersections``
    counts rounds in which a confidence-set intersection came out empty.
    """

    empty_intersections: int = 0

    def act(self, t: int) -> np.ndarray:
        raise NotImplementedError

    def observe(self, a: np.ndarray, b_obs: np.ndarray, r: float) -> None:
        raise NotImplementedError


class InconsistentEnvironmentError(RuntimeError):
    """Observations that cannot come from the assumed game."""
