"""Five cooperative Stackelberg games with an omniscient follower.

Each game fixes a leader action set, a follower action set and a parameter
set; the shared mean reward is ``h_theta(a, b)``.  The follower always plays
a best response ``b*(a) = argmax_b h_theta(a, b)`` and the leader's value of
an action is ``hbar(a) = max_b h_theta(a, b)``.

Variants and shapes (``d`` is the ambient parameter dimension):

============== ================ ==================== ===========================
variant        leader           follower             parameter ``Theta.main``
============== ================ ==================== ===========================
relu-curse     ball B^{d-1}     [0, 1]               unit vector in R^{d-1}
imitation      sphere S^{d-1}   sphere S^{d-1}       unit vector in R^d
expert-guided  sphere S^{d-1}   sphere S^{d-1}       unit ``theta_a`` (+ ``aux``)
polynomial     ball B^{d-1}     [-1, 1]              vector in B^{d-1}
optimism-trap  ball B^{d-1}     B^{d-1} x [0, 1]     vector in B^{d-1}
============== ================ ==================== ===========================

Optimism-trap best response.  With ``x = theta . a``, ``s = ||a||`` and
``c = 1 - delta`` the reward separates as::

    h = s * b_d * (c - x) + s * x
        + m * ((1 - s) / 2 * theta . u - s * c)      (b_{-d} = m u, ||u|| = 1)

so ``b_d = 1`` iff ``s * (c - x) > 0``, ``u = theta / ||theta||`` and ``m = 1``
iff ``(1 - s) / 2 * ||theta|| > s * c``.  Ties go to zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .geometry import as_vector, sample_cap, sample_uniform_sphere

_TOL = 1e-9


class Variant(str, Enum):
    RELU_CURSE = "relu-curse"
    IMITATION = "imitation"
    EXPERT_GUIDED = "expert-guided"
    POLYNOMIAL = "polynomial"
    OPTIMISM_TRAP = "optimism-trap"


_SPHERE_LEADER = (Variant.IMITATION, Variant.EXPERT_GUIDED)
_SCALAR_FOLLOWER = (Variant.RELU_CURSE, Variant.POLYNOMIAL)


@dataclass(frozen=True)
class GameSpec:
    """Game variant plus its shape parameters."""

    variant: Variant
    d: int
    delta: float = 0.5
    zeta: float = 0.9
    k: int = 1

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        v = self.variant
        # the lower-bound construction needs d >= 4; d = 3 is still a valid game
        min_d = 3 if v is Variant.RELU_CURSE else 2
        if self.d < min_d:
            raise ValueError(f"{v.value} needs d >= {min_d}")
        if v in (Variant.RELU_CURSE, Variant.EXPERT_GUIDED, Variant.OPTIMISM_TRAP):
            if not 0 < self.delta < 1:
                raise ValueError("delta must lie in (0, 1)")
        if v is Variant.EXPERT_GUIDED and not 0 < self.zeta < 1:
            raise ValueError("zeta must lie in (0, 1)")
        if v is Variant.POLYNOMIAL and (int(self.k) != self.k or self.k < 1):
            raise ValueError("k must be a positive integer")

    @property
    def leader_dim(self) -> int:
        return self.d if self.variant in _SPHERE_LEADER else self.d - 1

    @property
    def follower_dim(self) -> int:
        return 1 if self.variant in _SCALAR_FOLLOWER else self.d

    @property
    def leader_on_sphere(self) -> bool:
        return self.variant in _SPHERE_LEADER

    @property
    def param_dim(self) -> int:
        return self.leader_dim

    def to_dict(self) -> dict:
        return {"variant": self.variant.value, "d": self.d, "delta": self.delta,
                "zeta": self.zeta, "k": self.k}


@dataclass(frozen=True)
class Theta:
    """Game parameter.

    ``main`` is ``theta_{-d}`` (relu-curse, polynomial, optimism-trap),
    ``theta`` (imitation) or ``theta_a`` (expert-guided).  ``aux`` holds
    ``theta_b`` for expert-guided and is ``None`` otherwise.  The implied last
    coordinate (``1 - delta`` or ``1``) is not stored.
    """

    main: np.ndarray
    aux: np.ndarray | None = None


@dataclass(frozen=True)
class NoiseSpec:
    """Reward and response noise scales; ``kind`` is gaussian or boundedUniform."""

    sigma_r: float = 0.0
    sigma_b: float = 0.0
    kind: str = "gaussian"

    def __post_init__(self):
        if self.sigma_r < 0 or self.sigma_b < 0:
            raise ValueError("noise scales must be nonnegative")
        if self.kind not in ("gaussian", "boundedUniform"):
            raise ValueError(f"unknown noise kind {self.kind!r}")

    def draw(self, rng: np.random.Generator, sigma: float, size: int) -> np.ndarray:
        if self.kind == "gaussian":
            return sigma * rng.standard_normal(size)
        return sigma * np.sqrt(3.0) * rng.uniform(-1.0, 1.0, size)


@dataclass(frozen=True)
class StepOutcome:
    b_true: np.ndarray
    b_obs: np.ndarray
    reward: float


# Lipschitz constants of b -> h_theta(a, b) (Euclidean norm on b), used as
# slack when comparing closed-form best responses with the grid oracle.
def response_lipschitz(spec: GameSpec) -> float:
    return {
        Variant.RELU_CURSE: 2.0,
        Variant.IMITATION: 1.0,
        Variant.EXPERT_GUIDED: 1.0,
        Variant.POLYNOMIAL: 4.0 * spec.k,
        Variant.OPTIMISM_TRAP: 3.0,
    }[spec.variant]


# Lipschitz constants of theta -> hbar_theta(a), uniformly over actions.
def parameter_lipschitz(spec: GameSpec) -> float:
    return 2.0 * spec.k if spec.variant is Variant.POLYNOMIAL else 1.0


def make_theta(spec: GameSpec, main, aux=None) -> Theta:
    """Validate and freeze a parameter for ``spec``."""
    main = as_vector(main, "theta").copy()
    v = spec.variant
    if main.size != spec.param_dim:
        raise ValueError(f"theta must have {spec.param_dim} entries for {v.value}")
    norm = np.linalg.norm(main)
    if v in (Variant.RELU_CURSE, Variant.IMITATION, Variant.EXPERT_GUIDED):
        if abs(norm - 1.0) > _TOL:
            raise ValueError(f"{v.value} needs a unit-norm parameter")
    elif norm > 1.0 + _TOL:
        raise ValueError(f"{v.value} needs a parameter in the unit ball")
    if v is Variant.EXPERT_GUIDED:
        if aux is None:
            raise ValueError("expert-guided needs theta_b (aux)")
        aux = as_vector(aux, "theta_b").copy()
        if aux.size != main.size or abs(np.linalg.norm(aux) - 1.0) > _TOL:
            raise ValueError("theta_b must be a unit vector of the same dimension")
        if main @ aux < spec.zeta - _TOL:
            raise ValueError("expert-guided needs theta_a . theta_b >= zeta")
        aux.setflags(write=False)
    elif aux is not None:
        raise ValueError(f"{v.value} takes no aux parameter")
    main.setflags(write=False)
    return Theta(main, aux)


def random_theta(spec: GameSpec, rng: np.random.Generator) -> Theta:
    """Draw a unit-norm parameter uniformly (``theta_a`` uniform on the cap for expert-guided)."""
    if spec.variant is Variant.EXPERT_GUIDED:
        tb = sample_uniform_sphere(rng, spec.d)
        ta = sample_cap(rng, tb, spec.zeta, 1)[0]
        return make_theta(spec, ta / np.linalg.norm(ta), tb)
    return make_theta(spec, sample_uniform_sphere(rng, spec.param_dim))


def full_parameter(spec: GameSpec, theta: Theta) -> np.ndarray:
    """The full linear parameter, with the implied last coordinate appended."""
    v = spec.variant
    if v is Variant.EXPERT_GUIDED:
        raise ValueError("expert-guided is not linearly parameterized")
    if v in (Variant.RELU_CURSE, Variant.OPTIMISM_TRAP):
        return np.append(theta.main, 1.0 - spec.delta)
    if v is Variant.POLYNOMIAL:
        return np.append(theta.main, 1.0)
    return theta.main.copy()


def conjugate_power(y, k: int):
    """Convex conjugate of ``x**(2k)``: ``(2k-1) * (|y| / 2k)**(2k/(2k-1))``."""
    p = 2.0 * k / (2.0 * k - 1.0)
    return (2 * k - 1) * (np.abs(y) / (2.0 * k)) ** p


def feature(spec: GameSpec, a, b) -> np.ndarray:
    """Feature map ``phi(a, b)`` of the linearly parameterized variants."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    v = spec.variant
    if v is Variant.RELU_CURSE:
        return np.append((1.0 - b[0]) * a, b[0])
    if v is Variant.IMITATION:
        return a + b
    if v is Variant.POLYNOMIAL:
        k = spec.k
        return np.append(2 * k * b[0] * a, -conjugate_power(2 * k * b[0], k))
    if v is Variant.OPTIMISM_TRAP:
        s = np.linalg.norm(a)
        bm, bd = b[:-1], b[-1]
        head = s * np.append((1.0 - bd) * a, bd - np.linalg.norm(bm))
        return head + 0.5 * (1.0 - s) * np.append(bm, 0.0)
    raise ValueError("expert-guided is not linearly parameterized")


# -- domain checks ---------------------------------------------------------

def _check_action(spec, a):
    a = as_vector(a, "action")
    if a.size != spec.leader_dim:
        raise ValueError(f"action must have {spec.leader_dim} entries")
    norm = np.linalg.norm(a)
    if spec.leader_on_sphere:
        if abs(norm - 1.0) > _TOL:
            raise ValueError("action must lie on the unit sphere")
    elif norm > 1.0 + _TOL:
        raise ValueError("action must lie in the unit ball")
    return a


def _check_response(spec, b):
    b = as_vector(b, "response")
    if b.size != spec.follower_dim:
        raise ValueError(f"response must have {spec.follower_dim} entries")
    v = spec.variant
    if v is Variant.RELU_CURSE:
        ok = -_TOL <= b[0] <= 1 + _TOL
    elif v is Variant.POLYNOMIAL:
        ok = abs(b[0]) <= 1 + _TOL
    elif v is Variant.OPTIMISM_TRAP:
        ok = np.linalg.norm(b[:-1]) <= 1 + _TOL and -_TOL <= b[-1] <= 1 + _TOL
    else:
        ok = abs(np.linalg.norm(b) - 1.0) <= _TOL
    if not ok:
        raise ValueError(f"response outside the follower set of {v.value}")
    return b


# -- closed forms (unchecked, used in inner loops) --------------------------

def _best_response(spec, theta, a):
    v = spec.variant
    if v is Variant.IMITATION:
        return theta.main.copy()
    if v is Variant.EXPERT_GUIDED:
        return theta.aux.copy()
    x = float(theta.main @ a)
    if v is Variant.RELU_CURSE:
        return np.array([1.0 if x < 1.0 - spec.delta else 0.0])
    if v is Variant.POLYNOMIAL:
        return np.array([x ** (2 * spec.k - 1)])
    s = float(np.linalg.norm(a))
    c = 1.0 - spec.delta
    tn = float(np.linalg.norm(theta.main))
    b = np.zeros(spec.follower_dim)
    if s * (c - x) > 0:
        b[-1] = 1.0
    if tn > 0 and 0.5 * (1.0 - s) * tn > s * c:
        b[:-1] = theta.main / tn
    return b


def _hbar(spec, theta, a):
    v = spec.variant
    x = float(theta.main @ a)
    if v is Variant.RELU_CURSE:
        return max(1.0 - spec.delta, x)
    if v is Variant.IMITATION:
        return x + 1.0
    if v is Variant.EXPERT_GUIDED:
        return max(x - spec.delta, 0.0) + 1.0
    if v is Variant.POLYNOMIAL:
        return x ** (2 * spec.k)
    s = float(np.linalg.norm(a))
    c = 1.0 - spec.delta
    tn = float(np.linalg.norm(theta.main))
    return s * max(x, c) + max(0.0, 0.5 * (1.0 - s) * tn - s * c)


def hbar_many(spec: GameSpec, theta: Theta, actions) -> np.ndarray:
    """Vectorized ``hbar`` over the rows of ``actions`` (no domain checks)."""
    A = np.atleast_2d(np.asarray(actions, dtype=float))
    x = A @ theta.main
    v = spec.variant
    if v is Variant.RELU_CURSE:
        return np.maximum(1.0 - spec.delta, x)
    if v is Variant.IMITATION:
        return x + 1.0
    if v is Variant.EXPERT_GUIDED:
        return np.maximum(x - spec.delta, 0.0) + 1.0
    if v is Variant.POLYNOMIAL:
        return x ** (2 * spec.k)
    s = np.linalg.norm(A, axis=1)
    c = 1.0 - spec.delta
    tn = np.linalg.norm(theta.main)
    return s * np.maximum(x, c) + np.maximum(0.0, 0.5 * (1.0 - s) * tn - s * c)


def reward_many(spec: GameSpec, theta: Theta, a, B) -> np.ndarray:
    """Mean reward ``h_theta(a, b)`` for each row ``b`` of ``B`` (no domain checks)."""
    a = np.asarray(a, dtype=float)
    B = np.atleast_2d(np.asarray(B, dtype=float))
    v = spec.variant
    if v is Variant.IMITATION:
        return theta.main @ a + B @ theta.main
    if v is Variant.EXPERT_GUIDED:
        return max(theta.main @ a - spec.delta, 0.0) + B @ theta.aux
    x = theta.main @ a
    if v is Variant.RELU_CURSE:
        b = B[:, 0]
        return (1.0 - b) * x + b * (1.0 - spec.delta)
    if v is Variant.POLYNOMIAL:
        b = B[:, 0]
        return 2 * spec.k * b * x - conjugate_power(2 * spec.k * b, spec.k)
    s = np.linalg.norm(a)
    c = 1.0 - spec.delta
    bm, bd = B[:, :-1], B[:, -1]
    return (s * ((1.0 - bd) * x + c * (bd - np.linalg.norm(bm, axis=1)))
            + 0.5 * (1.0 - s) * (bm @ theta.main))


# -- public, validated operations ------------------------------------------

def mean_reward(spec: GameSpec, theta: Theta, a, b) -> float:
    """``h_theta(a, b) = theta . phi(a, b)`` (ReLU form for expert-guided)."""
    a = _check_action(spec, a)
    b = _check_response(spec, b)
    if spec.variant is Variant.EXPERT_GUIDED:
        return float(max(theta.main @ a - spec.delta, 0.0) + theta.aux @ b)
    return float(full_parameter(spec, theta) @ feature(spec, a, b))


def best_response(spec: GameSpec, theta: Theta, a) -> np.ndarray:
    """Closed-form follower best response; ties resolve toward zero."""
    return _best_response(spec, theta, _check_action(spec, a))


def hbar(spec: GameSpec, theta: Theta, a) -> float:
    """Leader value ``max_b h_theta(a, b)`` in closed form."""
    return float(_hbar(spec, theta, _check_action(spec, a)))


def proxy_value(spec: GameSpec, theta: Theta, a) -> float:
    """Best-response magnitude used as a proxy reward in the polynomial game."""
    if spec.variant is not Variant.POLYNOMIAL:
        raise ValueError("proxy values are defined for the polynomial game only")
    return float(_best_response(spec, theta, _check_action(spec, a))[0])


def optimal_action(spec: GameSpec, theta: Theta) -> np.ndarray:
    """Maximizer of ``hbar`` over the leader's action set."""
    if spec.variant in (Variant.POLYNOMIAL, Variant.OPTIMISM_TRAP):
        if abs(np.linalg.norm(theta.main) - 1.0) > _TOL:
            raise ValueError(f"optimal_action for {spec.variant.value} needs a unit theta")
    return theta.main.copy()


def _interval(lo, hi, res):
    n = int(round((hi - lo) / res))
    return np.linspace(lo, hi, n + 1)


def _sphere_grid(m, res):
    # radial projection of a grid on the faces of [-1, 1]^m
    g = _interval(-1.0, 1.0, res)
    face = np.stack(np.meshgrid(*([g] * (m - 1)), indexing="ij"), -1).reshape(-1, m - 1)
    pts = []
    for axis in range(m):
        for sign in (-1.0, 1.0):
            p = np.insert(face, axis, sign, axis=1)
            pts.append(p)
    pts = np.concatenate(pts)
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def _ball_grid(m, res):
    g = _interval(-1.0, 1.0, res)
    cube = np.stack(np.meshgrid(*([g] * m), indexing="ij"), -1).reshape(-1, m)
    return cube[np.linalg.norm(cube, axis=1) <= 1.0 + 1e-12]


def response_grid(spec: GameSpec, resolution: float) -> np.ndarray:
    """Grid over the follower's action set, ordered so ties favour zero / small entries."""
    if not 0 < resolution <= 0.5:
        raise ValueError("resolution must lie in (0, 0.5]")
    if spec.follower_dim > 4:
        raise ValueError("grid search supports follower dimension <= 4")
    v = spec.variant
    if v is Variant.RELU_CURSE:
        return _interval(0.0, 1.0, resolution)[:, None]
    if v is Variant.POLYNOMIAL:
        g = _interval(-1.0, 1.0, resolution)
        return g[np.argsort(np.abs(g), kind="stable")][:, None]
    if v is Variant.OPTIMISM_TRAP:
        ball = _ball_grid(spec.d - 1, resolution)
        ball = ball[np.argsort(np.linalg.norm(ball, axis=1), kind="stable")]
        bd = _interval(0.0, 1.0, resolution)
        return np.concatenate([np.column_stack([ball, np.full(len(ball), t)]) for t in bd])
    return _sphere_grid(spec.d, resolution)


def _trap_grid_response(spec, theta, a, resolution):
    # h(b) = f(b_{-d}) + g(b_d) + const, so the product grid is scanned one
    # factor at a time; the result equals the full scan, ties included
    ball = _ball_grid(spec.d - 1, resolution)
    ball = ball[np.argsort(np.linalg.norm(ball, axis=1), kind="stable")]
    bd = _interval(0.0, 1.0, resolution)
    f = reward_many(spec, theta, a, np.column_stack([ball, np.zeros(len(ball))]))
    g = reward_many(spec, theta, a, np.column_stack([np.zeros((len(bd), spec.d - 1)), bd]))
    return np.append(ball[int(np.argmax(f))], bd[int(np.argmax(g))])


def best_response_grid(spec: GameSpec, theta: Theta, a, resolution: float,
                       grid: np.ndarray | None = None) -> np.ndarray:
    """Brute-force follower best response over a grid of the follower set.

    Verification oracle only.  A precomputed ``grid`` (from ``response_grid``)
    may be passed to amortize grid construction across calls.  Without one,
    the optimism-trap product grid is scanned factor by factor.
    """
    a = _check_action(spec, a)
    if grid is None and spec.variant is Variant.OPTIMISM_TRAP:
        return _trap_grid_response(spec, theta, a, resolution)
    if grid is None:
        grid = response_grid(spec, resolution)
    values = reward_many(spec, theta, a, grid)
    return grid[int(np.argmax(values))].copy()


def step(spec: GameSpec, theta: Theta, noise: NoiseSpec, a, rng: np.random.Generator) -> StepOutcome:
    """One round: follower best-responds, both players see noisy feedback.

    Reward noise is drawn before response noise; both are always drawn so the
    random stream does not depend on the noise scales.
    """
    a = _check_action(spec, a)
    return _step(spec, theta, noise, a, rng)


def _step(spec, theta, noise, a, rng):
    b = _best_response(spec, theta, a)
    z = noise.draw(rng, noise.sigma_r, 1)[0]
    w = noise.draw(rng, noise.sigma_b, b.size)
    r = float(reward_many(spec, theta, a, b[None, :])[0]) + z
    return StepOutcome(b_true=b, b_obs=b + w, reward=r)
