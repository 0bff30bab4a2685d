"""Optimistic index policies and confidence sets.

``UCB1`` runs on a finite arm list.  ``LinUCB`` keeps a regularized
least-squares ellipsoid over a linear reward parameter and plays the most
optimistic candidate; with ``candidates=SphereDomain(d)`` the optimistic
action over the whole unit sphere is computed exactly instead of over a net.
``confidence_intersection`` evaluates the optimistic value over a response
set intersected with a reward ellipsoid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize

from .base import Agent


class UCB1(Agent):
    """Index policy on a finite arm set.

    Each arm is played once in index order, then the arm maximizing
    ``mean + c * sqrt(log n / pulls)`` is played, ``n`` being the number of
    observations so far.  Ties go to the lowest index.
    """

    def __init__(self, arms, horizon: int | None = None, c: float = np.sqrt(2.0)):
        arms = np.atleast_2d(np.asarray(arms, dtype=float))
        if len(arms) == 0:
            raise ValueError("UCB1 needs at least one arm")
        self.arms = arms
        self.horizon = horizon
        self.c = float(c)
        self.counts = np.zeros(len(arms))
        self.sums = np.zeros(len(arms))
        self.n = 0
        self._last = None

    def select(self) -> int:
        if self.n < len(self.arms):
            return self.n
        index = self.sums / self.counts + self.c * np.sqrt(np.log(self.n) / self.counts)
        return int(np.argmax(index))

    def act(self, t):
        self._last = self.select()
        return self.arms[self._last].copy()

    def observe(self, a, b_obs, r):
        i = self._last
        self.counts[i] += 1
        self.sums[i] += r
        self.n += 1


@dataclass(frozen=True)
class EllipsoidConfidence:
    """``{v : (v - center)^T shape (v - center) <= radius^2}``."""

    center: np.ndarray
    shape: np.ndarray
    radius: float

    def contains(self, v, tol: float = 1e-9) -> bool:
        diff = np.asarray(v, dtype=float) - self.center
        return bool(diff @ self.shape @ diff <= self.radius**2 + tol)

    def optimistic(self, x) -> np.ndarray:
        """``sup_v v . x`` over the ellipsoid, for each row of ``x``."""
        x = np.atleast_2d(x)
        inv = np.linalg.inv(self.shape)
        width = np.sqrt(np.einsum("ij,jk,ik->i", x, inv, x))
        return x @ self.center + self.radius * width


@dataclass(frozen=True)
class BallConfidence:
    """``{v : ||v - center|| <= radius}``."""

    center: np.ndarray
    radius: float

    def contains(self, v, tol: float = 1e-12) -> bool:
        return bool(np.linalg.norm(np.asarray(v, dtype=float) - self.center) <= self.radius + tol)


@dataclass(frozen=True)
class CapConstraint:
    """``{v : ||v|| <= 1, v . center >= zeta}``, the convex hull of a spherical cap."""

    center: np.ndarray
    zeta: float

    def contains(self, v, tol: float = 1e-9) -> bool:
        v = np.asarray(v, dtype=float)
        return bool(np.linalg.norm(v) <= 1 + tol and v @ self.center >= self.zeta - tol)


@dataclass(frozen=True)
class SphereDomain:
    """The whole unit sphere S^{dim-1} as a continuous candidate set."""

    dim: int


def max_norm_on_ellipsoid(center, shape, radius) -> np.ndarray:
    """Point of largest Euclidean norm in ``{v : (v-c)^T V (v-c) <= r^2}``.

    Writing ``v = c + r V^{-1/2} u`` with ``||u|| <= 1`` this maximizes a
    convex quadratic over the unit ball.  In the eigenbasis of ``V`` the
    maximizer is ``u_i = m_i c_i / (nu - m_i^2)`` with ``m_i = r / sqrt(l_i)``
    and ``nu >= max m_i^2`` chosen so that ``||u|| = 1`` (secular equation).
    """
    c = np.asarray(center, dtype=float)
    lam, Q = np.linalg.eigh(shape)
    m = radius / np.sqrt(lam)
    ct = Q.T @ c
    m2 = m**2
    top = m2.max()
    if radius == 0:
        return c.copy()
    scale = max(np.abs(ct).max(), 1.0)
    on_top = np.isclose(m2, top, rtol=1e-12, atol=0.0)
    degenerate = np.all(np.abs(ct[on_top]) <= 1e-14 * scale)

    def u_of(nu):
        den = nu - m2
        with np.errstate(divide="ignore", invalid="ignore"):
            u = np.where(ct == 0, 0.0, m * ct / den)
        return u

    if degenerate:
        u = u_of(top)
        u[on_top] = 0.0
        rest = u @ u
        if rest <= 1.0:
            # hard case: fill the remaining norm along the top eigendirection
            u[np.flatnonzero(on_top)[0]] = np.sqrt(1.0 - rest)
            return Q @ (ct + m * u)
    lo = top if degenerate else np.max(m2 + m * np.abs(ct))
    hi = top + m.max() * np.abs(ct).sum()
    live = (ct != 0) & ~(on_top & degenerate)
    mc2 = (m[live] * ct[live]) ** 2
    m2l = m2[live]

    def g(nu):
        return float(np.sum(mc2 / (nu - m2l) ** 2)) - 1.0

    if hi > lo and g(lo) > 0:
        nu = brentq(g, lo, hi, xtol=1e-13, rtol=1e-13, maxiter=200)
    else:
        nu = lo
    u = u_of(nu)
    u[~live] = 0.0
    u /= max(np.linalg.norm(u), 1e-300)
    return Q @ (ct + m * u)


class LinUCB(Agent):
    """Optimism in the face of uncertainty for linear rewards.

    Keeps ``V = lam I + sum x x^T`` and ``theta_hat = V^{-1} sum x (r - offset)``
    over features ``x = feature_map(a)`` and plays the candidate maximizing
    ``theta_hat . x + beta_n ||x||_{V^{-1}}``, with
    ``beta_n = sigma_r sqrt(p log((1 + n / lam) / delta)) + sqrt(lam)``.
    ``offset`` is a known constant subtracted from every reward.
    """

    def __init__(self, candidates, *, sigma_r: float, horizon: int, lam: float = 1.0,
                 delta: float | None = None, feature_map=None, offset: float = 0.0,
                 beta=None):
        if lam <= 0:
            raise ValueError("lam must be positive")
        self.continuous = isinstance(candidates, SphereDomain)
        if self.continuous:
            if feature_map is not None:
                raise ValueError("continuous sphere candidates need the identity feature map")
            self.p = candidates.dim
            self.candidates = None
        else:
            cand = np.atleast_2d(np.asarray(candidates, dtype=float))
            if len(cand) == 0:
                raise ValueError("LinUCB needs at least one candidate")
            self.candidates = cand
            feats = cand if feature_map is None else np.array([feature_map(a) for a in cand])
            self.features = np.atleast_2d(feats)
            self.p = self.features.shape[1]
        self.feature_map = feature_map
        self.sigma_r = float(sigma_r)
        self.horizon = horizon
        self.lam = float(lam)
        self.delta = 1.0 / horizon if delta is None else float(delta)
        self.offset = float(offset)
        self._beta = beta
        self.V = self.lam * np.eye(self.p)
        self.V_inv = np.eye(self.p) / self.lam
        self.bvec = np.zeros(self.p)
        self.n = 0

    def beta(self, n: int | None = None) -> float:
        n = self.n if n is None else n
        if self._beta is not None:
            return float(self._beta(n))
        return (self.sigma_r * np.sqrt(self.p * np.log((1.0 + n / self.lam) / self.delta))
                + np.sqrt(self.lam))

    @property
    def theta_hat(self) -> np.ndarray:
        return self.V_inv @ self.bvec

    @property
    def confidence(self) -> EllipsoidConfidence:
        return EllipsoidConfidence(self.theta_hat, self.V.copy(), self.beta())

    def optimistic_values(self) -> np.ndarray:
        F = self.features
        width = np.sqrt(np.maximum(np.einsum("ij,jk,ik->i", F, self.V_inv, F), 0.0))
        return F @ self.theta_hat + self.beta() * width + self.offset

    def act(self, t):
        if self.continuous:
            v = max_norm_on_ellipsoid(self.theta_hat, self.V, self.beta())
            nv = np.linalg.norm(v)
            if nv <= 1e-12:
                out = np.zeros(self.p)
                out[0] = 1.0
                return out
            return v / nv
        return self.candidates[int(np.argmax(self.optimistic_values()))].copy()

    def observe(self, a, b_obs, r):
        x = np.asarray(a, dtype=float) if self.feature_map is None else np.asarray(self.feature_map(a))
        Vx = self.V_inv @ x
        self.V_inv -= np.outer(Vx, Vx) / (1.0 + x @ Vx)
        self.V += np.outer(x, x)
        self.bvec += (r - self.offset) * x
        self.n += 1


@dataclass(frozen=True)
class IntersectionResult:
    values: np.ndarray
    maximizers: np.ndarray
    empty: bool


def _b_constraints(b_set):
    """Constraint list ``g(v) >= 0`` with gradients for scipy."""
    if isinstance(b_set, BallConfidence):
        c, r = np.asarray(b_set.center, float), float(b_set.radius)
        return [{"type": "ineq", "fun": lambda v: r**2 - (v - c) @ (v - c),
                 "jac": lambda v: -2.0 * (v - c)}]
    n, z = np.asarray(b_set.center, float), float(b_set.zeta)
    return [{"type": "ineq", "fun": lambda v: 1.0 - v @ v, "jac": lambda v: -2.0 * v},
            {"type": "ineq", "fun": lambda v: v @ n - z, "jac": lambda v: n}]


def _b_only_max(b_set, x):
    xn = np.linalg.norm(x)
    if isinstance(b_set, BallConfidence):
        if not np.isfinite(b_set.radius):
            return None
        return b_set.center + (b_set.radius * x / xn if xn > 0 else 0.0)
    n, z = b_set.center, b_set.zeta
    u = x / xn if xn > 0 else n
    if u @ n >= z:
        return u
    perp = u - (u @ n) * n
    pn = np.linalg.norm(perp)
    if pn <= 1e-15:
        perp = np.eye(len(n))[int(np.argmin(np.abs(n)))]
        perp = perp - (perp @ n) * n
        pn = np.linalg.norm(perp)
    return z * n + np.sqrt(max(1.0 - z**2, 0.0)) * perp / pn


def _intersection_point(b_set, r_set):
    """A point of the intersection, or ``None`` when it is empty."""
    V, c, beta = r_set.shape, r_set.center, r_set.radius
    if b_set.contains(c):
        return c.copy()
    cons = _b_constraints(b_set)
    start = b_set.center if isinstance(b_set, BallConfidence) else b_set.center * max(b_set.zeta, 0.0)
    res = minimize(lambda v: (v - c) @ V @ (v - c), start, jac=lambda v: 2 * V @ (v - c),
                   constraints=cons, method="SLSQP", options={"ftol": 1e-14, "maxiter": 500})
    v = res.x
    if b_set.contains(v, 1e-9) and (v - c) @ V @ (v - c) <= beta**2 * (1 + 1e-9) + 1e-12:
        return v
    return None


def confidence_intersection(b_set, r_set: EllipsoidConfidence, candidates,
                            offset: float = 0.0) -> IntersectionResult:
    """Optimistic value ``sup_{v in B cap R} v . x + offset`` for each candidate ``x``.

    ``b_set`` is a ``BallConfidence`` (radius may be ``inf``) or a
    ``CapConstraint``.  Each value is found from the closed-form maximizers of
    either set alone when that point lies in the other set, and otherwise by
    a constrained solve with both sets active.  An empty intersection falls
    back to ``r_set`` alone and sets ``empty``.
    """
    X = np.atleast_2d(np.asarray(candidates, dtype=float))
    V, c, beta = r_set.shape, np.asarray(r_set.center, float), float(r_set.radius)
    V_inv = np.linalg.inv(V)
    widths = np.sqrt(np.maximum(np.einsum("ij,jk,ik->i", X, V_inv, X), 0.0))
    ell_max = c + beta * (X @ V_inv) / np.where(widths > 0, widths, 1.0)[:, None]

    inside = _intersection_point(b_set, r_set)
    if inside is None:
        return IntersectionResult(np.einsum("ij,ij->i", X, ell_max) + offset, ell_max, True)
    if isinstance(b_set, BallConfidence) and b_set.radius == 0:
        pts = np.tile(b_set.center, (len(X), 1))
        return IntersectionResult(X @ b_set.center + offset, pts, False)

    values = np.empty(len(X))
    points = np.empty_like(X)
    cons = _b_constraints(b_set) + [
        {"type": "ineq", "fun": lambda v: beta**2 - (v - c) @ V @ (v - c),
         "jac": lambda v: -2.0 * V @ (v - c)}]
    for i, x in enumerate(X):
        cand = [ell_max[i]] if b_set.contains(ell_max[i]) else []
        bm = _b_only_max(b_set, x)
        if bm is not None and r_set.contains(bm):
            cand.append(bm)
        if cand:
            best = max(cand, key=lambda v: v @ x)
        else:
            best = _solve_both(x, cons, inside, b_set, r_set)
        values[i] = best @ x + offset
        points[i] = best
    return IntersectionResult(values, points, False)


def _solve_both(x, cons, start, b_set, r_set):
    best = start
    bm = _b_only_max(b_set, x)
    for x0 in (start, start if bm is None else 0.5 * (start + bm)):
        res = minimize(lambda v: -(v @ x), x0, jac=lambda v: -x, constraints=cons,
                       method="SLSQP", options={"ftol": 1e-15, "maxiter": 1000})
        v = res.x
        if b_set.contains(v, 1e-8) and r_set.contains(v, 1e-8) and v @ x > best @ x:
            best = v
    return best
