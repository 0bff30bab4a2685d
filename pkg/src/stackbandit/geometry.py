"""Vectors, projections, sphere sampling and epsilon-nets on spheres and caps.

Nets are built by randomized greedy packing: candidates are drawn from the
domain and kept when they are more than ``eps`` away from every kept point.
Construction stops after a streak of ``200 * len(net)`` consecutive
rejections.  A maximal ``eps``-packing covers its domain at radius ``eps``;
nets declare ``2 * eps`` to absorb the sampling slack of the stop rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import betainc
from scipy.stats import beta as beta_dist

MAX_NET_POINTS = 2**20
STREAK_FACTOR = 200
# bound on candidate-by-point dot products held in memory per batch
_BATCH_WORK = 20_000_000


class NetSizeError(ValueError):
    """Raised when a net would exceed its configured maximum size."""


def as_vector(v, name: str = "vector") -> np.ndarray:
    """Return ``v`` as a finite 1-d float array, or raise ``ValueError``."""
    arr = np.asarray(v, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-d vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def project_to_ball(v, radius: float = 1.0) -> np.ndarray:
    """Euclidean projection of ``v`` onto the closed ball of ``radius``."""
    if not radius > 0:
        raise ValueError("radius must be positive")
    v = as_vector(v)
    norm = np.linalg.norm(v)
    if norm <= radius:
        return v.copy()
    # rounding may leave the norm one ulp above radius; exact idempotence needs <=
    scale = radius / norm
    out = v * scale
    while np.linalg.norm(out) > radius:
        scale = np.nextafter(scale, 0.0)
        out = v * scale
    return out


def project_to_sphere(v) -> np.ndarray:
    """Projection onto the unit sphere.

    The zero vector (norm at most 1e-12) has no unique projection; the first
    standard basis vector is returned.
    """
    v = as_vector(v)
    norm = np.linalg.norm(v)
    if norm <= 1e-12:
        out = np.zeros_like(v)
        out[0] = 1.0
        return out
    return v / norm


def sample_uniform_sphere(rng: np.random.Generator, d: int, size: int | None = None) -> np.ndarray:
    """Uniform draw(s) from the unit sphere in R^d (shape ``(d,)`` or ``(size, d)``)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    n = 1 if size is None else size
    x = rng.standard_normal((n, d))
    norms = np.linalg.norm(x, axis=1)
    bad = norms < 1e-300
    while np.any(bad):
        x[bad] = rng.standard_normal((int(bad.sum()), d))
        norms = np.linalg.norm(x, axis=1)
        bad = norms < 1e-300
    x /= norms[:, None]
    return x[0] if size is None else x


def cap_probability(d: int, zeta: float) -> float:
    """Uniform-measure fraction of S^{d-1} lying in ``{u : u . c >= zeta}``."""
    if zeta >= 1:
        return 0.0
    if zeta <= -1:
        return 1.0
    half = 0.5 * betainc((d - 1) / 2, 0.5, 1.0 - zeta**2)
    return float(half if zeta >= 0 else 1.0 - half)


def _tangent_directions(rng, center, n):
    x = rng.standard_normal((n, center.size))
    x -= np.outer(x @ center, center)
    norms = np.linalg.norm(x, axis=1)
    x /= np.where(norms > 0, norms, 1.0)[:, None]
    return x


def sample_cap(rng: np.random.Generator, center, zeta: float, size: int) -> np.ndarray:
    """Area-uniform draws from the cap ``{u in S^{d-1} : u . center >= zeta}``.

    For uniform ``u``, ``(1 + u . c) / 2`` is Beta((d-1)/2, (d-1)/2); the
    height is drawn from that law truncated to ``[zeta, 1]`` by inverting the
    survival function, then combined with a uniform tangent direction.
    """
    center = as_vector(center, "center")
    center = center / np.linalg.norm(center)
    d = center.size
    if d == 1:
        return np.tile(center, (size, 1))
    alpha = (d - 1) / 2.0
    tail = beta_dist.sf((1.0 + zeta) / 2.0, alpha, alpha)
    q = rng.uniform(0.0, 1.0, size) * tail
    q = np.clip(q, np.finfo(float).tiny, None)
    height = np.clip(2.0 * beta_dist.isf(q, alpha, alpha) - 1.0, zeta, 1.0)
    t = _tangent_directions(rng, center, size)
    u = height[:, None] * center + np.sqrt(1.0 - height**2)[:, None] * t
    return u / np.linalg.norm(u, axis=1, keepdims=True)


@dataclass(frozen=True)
class Net:
    """A finite point set on the sphere or on a spherical cap.

    ``radius`` is the declared covering radius; ``eps`` the packing
    separation used to build it.
    """

    points: np.ndarray
    eps: float
    radius: float
    domain: str = "sphere"
    center: np.ndarray | None = field(default=None, repr=False)
    zeta: float | None = None

    def __len__(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def distance_to(self, x) -> np.ndarray:
        """Distance from each row of ``x`` to its nearest net point."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.empty(len(x))
        step = max(1, _BATCH_WORK // max(len(self.points), 1))
        for lo in range(0, len(x), step):
            dots = x[lo:lo + step] @ self.points.T
            sq = (x[lo:lo + step] ** 2).sum(1)[:, None] + (self.points**2).sum(1)[None, :] - 2 * dots
            out[lo:lo + step] = np.sqrt(np.maximum(sq.min(axis=1), 0.0))
        return out

    def contains(self, u, tol: float = 1e-9) -> bool:
        """Whether ``u`` lies in the net's domain to within ``tol``."""
        u = as_vector(u)
        if abs(np.linalg.norm(u) - 1.0) > tol:
            return False
        if self.domain == "cap":
            return bool(u @ self.center >= self.zeta - tol)
        return True


def _greedy_pack(sampler, d, eps, rng, max_points):
    # unit vectors: ||u - v|| > eps  <=>  u . v < 1 - eps^2 / 2
    thresh = 1.0 - eps**2 / 2.0
    points = np.empty((0, d))
    streak = 0
    while True:
        n = len(points)
        batch = int(min(max(2 * n, 64), 65536))
        cand = sampler(rng, batch)
        if n:
            dist, _ = cKDTree(points).query(cand, k=1, distance_upper_bound=eps)
            passed = np.flatnonzero(dist > eps)
        else:
            passed = np.arange(batch)
        new = np.empty((len(passed), d))
        k = 0
        pos = 0
        done = False
        for i in passed:
            gap = i - pos
            if streak + gap >= STREAK_FACTOR * max(n + k, 1):
                done = True
                break
            streak += gap
            c = cand[i]
            if k and np.max(new[:k] @ c) >= thresh:
                streak += 1
            else:
                new[k] = c
                k += 1
                streak = 0
            pos = i + 1
        if not done:
            gap = batch - pos
            if streak + gap >= STREAK_FACTOR * max(n + k, 1):
                done = True
            else:
                streak += gap
        if k:
            points = np.vstack([points, new[:k]])
        if len(points) > max_points:
            raise NetSizeError(
                f"net exceeds {max_points} points (d={d}, eps={eps}); use a larger eps"
            )
        if done:
            return points


def build_net_sphere(d: int, eps: float, rng: np.random.Generator,
                     max_points: int = MAX_NET_POINTS) -> Net:
    """Greedy ``eps``-packing of S^{d-1}, declared as a ``2 * eps`` cover."""
    if d < 2:
        raise ValueError("d must be >= 2")
    if not eps > 0:
        raise ValueError("eps must be positive")
    pts = _greedy_pack(lambda r, n: sample_uniform_sphere(r, d, n), d, eps, rng, max_points)
    pts.setflags(write=False)
    return Net(points=pts, eps=eps, radius=2 * eps, domain="sphere")


def build_net_cap(center, zeta: float, eps: float, rng: np.random.Generator,
                  max_points: int = MAX_NET_POINTS) -> Net:
    """Greedy ``eps``-packing of the cap ``{u : u . center >= zeta}``."""
    center = as_vector(center, "center")
    if abs(np.linalg.norm(center) - 1.0) > 1e-9:
        raise ValueError("cap center must be a unit vector")
    if not -1.0 < zeta < 1.0:
        raise ValueError("zeta must lie in (-1, 1)")
    if not eps > 0:
        raise ValueError("eps must be positive")
    d = center.size
    center = center / np.linalg.norm(center)
    pts = _greedy_pack(lambda r, n: sample_cap(r, center, zeta, n), d, eps, rng, max_points)
    pts.setflags(write=False)
    c = center.copy()
    c.setflags(write=False)
    return Net(points=pts, eps=eps, radius=2 * eps, domain="cap", center=c, zeta=zeta)


def rotation_from_e1(center) -> np.ndarray:
    """Orthogonal (Householder) matrix ``H`` with ``H @ e1 = center`` for unit ``center``."""
    center = as_vector(center, "center")
    center = center / np.linalg.norm(center)
    e1 = np.zeros_like(center)
    e1[0] = 1.0
    w = e1 - center
    nw = np.linalg.norm(w)
    if nw <= 1e-15:
        return np.eye(center.size)
    w /= nw
    return np.eye(center.size) - 2.0 * np.outer(w, w)


@lru_cache(maxsize=32)
def cached_net_sphere(d: int, eps: float, seed: int = 0) -> Net:
    """``build_net_sphere`` with a fixed construction seed, memoized per process."""
    return build_net_sphere(d, eps, np.random.default_rng(seed))


@lru_cache(maxsize=32)
def _cached_cap_e1(d: int, zeta: float, eps: float, seed: int) -> Net:
    e1 = np.zeros(d)
    e1[0] = 1.0
    return build_net_cap(e1, zeta, eps, np.random.default_rng(seed))


def rotated_net_cap(center, zeta: float, eps: float, seed: int = 0) -> Net:
    """Cap net around ``center`` obtained by rotating a memoized net around ``e1``.

    Rotations are isometries, so separation and covering radius carry over.
    """
    center = as_vector(center, "center")
    if abs(np.linalg.norm(center) - 1.0) > 1e-9:
        raise ValueError("cap center must be a unit vector")
    base = _cached_cap_e1(center.size, float(zeta), float(eps), int(seed))
    H = rotation_from_e1(center)
    pts = base.points @ H.T
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    pts.setflags(write=False)
    c = center / np.linalg.norm(center)
    c.setflags(write=False)
    return Net(points=pts, eps=base.eps, radius=base.radius, domain="cap", center=c, zeta=zeta)
