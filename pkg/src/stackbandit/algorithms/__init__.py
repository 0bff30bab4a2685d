"""Leader policies."""

from .base import Agent, InconsistentEnvironmentError
from .covering import CoveringAgent, dedupe, default_covering_eps
from .imitation import (
    ExpertGuidedAgent,
    ImitationAgent,
    imitation_alpha,
    strong_reduction_applies,
    weak_eps,
)
from .optimism import OptimisticSphereAgent, ProbeAgent
from .polynomial import PolyProxyAgent, signed_root
from .ucb import (
    UCB1,
    BallConfidence,
    CapConstraint,
    EllipsoidConfidence,
    IntersectionResult,
    LinUCB,
    SphereDomain,
    confidence_intersection,
    max_norm_on_ellipsoid,
)

__all__ = [
    "UCB1",
    "Agent",
    "BallConfidence",
    "CapConstraint",
    "CoveringAgent",
    "EllipsoidConfidence",
    "ExpertGuidedAgent",
    "ImitationAgent",
    "InconsistentEnvironmentError",
    "IntersectionResult",
    "LinUCB",
    "OptimisticSphereAgent",
    "PolyProxyAgent",
    "ProbeAgent",
    "SphereDomain",
    "confidence_intersection",
    "dedupe",
    "default_covering_eps",
    "imitation_alpha",
    "max_norm_on_ellipsoid",
    "signed_root",
    "strong_reduction_applies",
    "weak_eps",
]
