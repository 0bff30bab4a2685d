"""Simulation of cooperative Stackelberg bandit games with an omniscient follower."""

from . import algorithms, envs, geometry
from .envs import GameSpec, NoiseSpec, StepOutcome, Theta, Variant

__version__ = "0.1.0"

__all__ = [
    "GameSpec",
    "NoiseSpec",
    "StepOutcome",
    "Theta",
    "Variant",
    "__version__",
    "algorithms",
    "envs",
    "geometry",
]
