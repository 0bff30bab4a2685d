"""Seeded episode runner, regret accounting and multi-seed aggregation.

Regret is always computed from expected values: the per-round term is
``hbar(a*) - hbar(a_t)`` for the true parameter, never a noisy reward.
Each episode derives independent random streams for the parameter draw, the
environment noise and the agent from ``(seed, label)``, so results do not
depend on how episodes are scheduled.
"""

from __future__ import annotations

import math
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .algorithms import (
    Agent,
    CoveringAgent,
    ExpertGuidedAgent,
    ImitationAgent,
    LinUCB,
    OptimisticSphereAgent,
    PolyProxyAgent,
    ProbeAgent,
    SphereDomain,
)
from .envs import (
    GameSpec,
    NoiseSpec,
    Theta,
    Variant,
    _check_action,
    _hbar,
    _step,
    make_theta,
    optimal_action,
    random_theta,
)
from .geometry import cached_net_sphere


def stream(seed: int, label: str) -> np.random.Generator:
    """Independent generator for ``(seed, label)``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), zlib.crc32(label.encode())]))


def default_checkpoints(horizon: int) -> tuple[int, ...]:
    """``ceil(T / 2^j)`` for ``j >= 0`` together with round 1, increasing."""
    pts = {1}
    j = 0
    while True:
        c = math.ceil(horizon / 2**j)
        pts.add(c)
        if c == 1:
            break
        j += 1
    return tuple(sorted(pts))


class OracleAgent(Agent):
    """Plays the optimal action every round; it is handed the true parameter."""

    def __init__(self, action):
        self.action = np.asarray(action, dtype=float)

    def act(self, t):
        return self.action.copy()

    def observe(self, a, b_obs, r):
        pass


def _require(spec, *variants):
    if spec.variant not in variants:
        names = ", ".join(v.value for v in variants)
        raise ValueError(f"agent needs one of [{names}], got {spec.variant.value}")


# reward offsets known in advance: hbar = theta . a + offset on the sphere
def _linucb_offset(spec):
    if spec.variant is Variant.IMITATION:
        return 1.0
    if spec.variant in (Variant.RELU_CURSE, Variant.EXPERT_GUIDED):
        return 1.0 - spec.delta
    return 0.0


def _make_agent(name, spec, horizon, noise, params, rng, theta):
    p = dict(params)
    if name == "oracle":
        return OracleAgent(optimal_action(spec, theta))
    if name == "covering":
        return CoveringAgent(spec, horizon, rng, sigma_r=noise.sigma_r, **p)
    if name == "linucb":
        _require(spec, Variant.RELU_CURSE, Variant.IMITATION, Variant.POLYNOMIAL,
                 Variant.OPTIMISM_TRAP)
        eps = p.pop("eps", None)
        if eps is None:
            candidates = SphereDomain(spec.leader_dim)
        else:
            candidates = cached_net_sphere(spec.leader_dim, float(eps), p.pop("net_seed", 0)).points
        p.setdefault("offset", _linucb_offset(spec))
        return LinUCB(candidates, sigma_r=noise.sigma_r, horizon=horizon, **p)
    if name == "imitation":
        _require(spec, Variant.IMITATION)
        return ImitationAgent(spec.d, noise.sigma_b, horizon, **p)
    if name == "expert":
        _require(spec, Variant.EXPERT_GUIDED)
        return ExpertGuidedAgent(spec, horizon, sigma_r=noise.sigma_r, sigma_b=noise.sigma_b, **p)
    if name == "poly-proxy":
        _require(spec, Variant.POLYNOMIAL)
        return PolyProxyAgent(spec, horizon, rng, **p)
    if name == "probe":
        _require(spec, Variant.OPTIMISM_TRAP)
        if noise.sigma_b != 0:
            raise ValueError("the probe agent needs noiseless responses")
        return ProbeAgent(spec)
    if name == "optimistic-sphere":
        _require(spec, Variant.OPTIMISM_TRAP)
        return OptimisticSphereAgent(spec, horizon, rng, **p)
    raise ValueError(f"unknown agent {name!r}")


AGENT_NAMES = ("oracle", "covering", "linucb", "imitation", "expert", "poly-proxy", "probe",
               "optimistic-sphere")


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce a batch of episodes.

    ``theta``/``theta_aux`` fix the parameter; when ``theta`` is ``None`` a
    unit parameter is drawn per seed.  ``window`` bounds the rounds used for
    the scaling-exponent fit (default ``[ceil(T/20), T]``).  ``record``
    keeps per-round actions and regrets in each trace.
    """

    spec: GameSpec
    agent: str
    horizon: int
    seeds: tuple = (0,)
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    agent_params: dict = field(default_factory=dict)
    theta: tuple | None = None
    theta_aux: tuple | None = None
    checkpoints: tuple | None = None
    window: tuple | None = None
    record: bool = False

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be positive")
        if self.agent not in AGENT_NAMES:
            raise ValueError(f"unknown agent {self.agent!r}")
        if len(self.seeds) == 0:
            raise ValueError("at least one seed is required")
        if any(int(s) != s or s < 0 for s in self.seeds):
            raise ValueError("seeds must be nonnegative integers")
        cps = self.resolved_checkpoints
        if any(b <= a for a, b in zip(cps, cps[1:])) or cps[0] < 1 or cps[-1] != self.horizon:
            raise ValueError("checkpoints must be strictly increasing, >= 1 and end at T")

    @property
    def resolved_checkpoints(self) -> tuple[int, ...]:
        if self.checkpoints is None:
            return default_checkpoints(self.horizon)
        return tuple(int(c) for c in self.checkpoints)

    @property
    def resolved_window(self) -> tuple[int, int]:
        if self.window is None:
            return (math.ceil(self.horizon / 20), self.horizon)
        return (int(self.window[0]), int(self.window[1]))

    def theta_for(self, seed: int) -> Theta:
        if self.theta is not None:
            aux = None if self.theta_aux is None else np.asarray(self.theta_aux, float)
            return make_theta(self.spec, np.asarray(self.theta, float), aux)
        return random_theta(self.spec, stream(seed, "theta"))

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "agent": self.agent,
            "horizon": self.horizon,
            "seeds": [int(s) for s in self.seeds],
            "noise": asdict(self.noise),
            "agent_params": dict(self.agent_params),
            "theta": None if self.theta is None else [float(x) for x in self.theta],
            "theta_aux": None if self.theta_aux is None else [float(x) for x in self.theta_aux],
            "checkpoints": list(self.resolved_checkpoints),
            "window": list(self.resolved_window),
            "record": self.record,
        }

    @classmethod
    def from_dict(cls, data: dict) -> RunConfig:
        data = dict(data)
        spec = GameSpec(**data.pop("spec"))
        noise = NoiseSpec(**data.pop("noise", {}))
        for key in ("seeds", "theta", "theta_aux", "checkpoints", "window"):
            if data.get(key) is not None:
                data[key] = tuple(data[key])
        return cls(spec=spec, noise=noise, **data)


@dataclass
class RegretTrace:
    """Cumulative regret of one episode at each checkpoint.

    ``proxy_regret`` is the cumulative ``1 - b*(a_t)`` (polynomial game
    only).  ``actions`` and ``per_round`` are filled when recording.
    """

    seed: int
    checkpoints: np.ndarray
    cum_regret: np.ndarray
    empty_intersections: np.ndarray
    wall_time: float
    proxy_regret: np.ndarray | None = None
    actions: np.ndarray | None = None
    responses: np.ndarray | None = None
    per_round: np.ndarray | None = None


def run_episode(config: RunConfig, seed: int, on_round=None) -> RegretTrace:
    """Play ``config.horizon`` rounds for one seed.

    ``on_round(t, agent, theta)`` is called after the agent observes round
    ``t``.
    """
    start = time.perf_counter()
    spec, T = config.spec, config.horizon
    theta = config.theta_for(seed)
    agent = _make_agent(config.agent, spec, T, config.noise, config.agent_params,
                        stream(seed, "agent"), theta)
    noise_rng = stream(seed, "noise")
    best = _hbar(spec, theta, optimal_action(spec, theta))
    poly = spec.variant is Variant.POLYNOMIAL
    regret = np.empty(T)
    proxy = np.empty(T) if poly else None
    empty = np.empty(T, dtype=np.int64)
    actions = np.empty((T, spec.leader_dim)) if config.record else None
    responses = np.empty((T, spec.follower_dim)) if config.record else None
    for t in range(1, T + 1):
        a = _check_action(spec, agent.act(t))
        out = _step(spec, theta, config.noise, a, noise_rng)
        regret[t - 1] = best - _hbar(spec, theta, a)
        if poly:
            proxy[t - 1] = 1.0 - out.b_true[0]
        if config.record:
            actions[t - 1] = a
            responses[t - 1] = out.b_true
        agent.observe(a, out.b_obs, out.reward)
        empty[t - 1] = agent.empty_intersections
        if on_round is not None:
            on_round(t, agent, theta)
    idx = np.asarray(config.resolved_checkpoints) - 1
    return RegretTrace(
        seed=int(seed),
        checkpoints=idx + 1,
        cum_regret=np.cumsum(regret)[idx],
        empty_intersections=empty[idx],
        wall_time=time.perf_counter() - start,
        proxy_regret=None if proxy is None else np.cumsum(proxy)[idx],
        actions=actions,
        responses=responses,
        per_round=regret if config.record else None,
    )


@dataclass
class BatchSummary:
    checkpoints: np.ndarray
    mean: np.ndarray
    se: np.ndarray
    window: tuple[int, int]
    exponent: float | None
    exponent_se: float | None


def summarize(traces, checkpoints, window) -> BatchSummary:
    """Mean and standard error (``ddof=1``; zero for a single trace) per checkpoint."""
    R = np.stack([tr.cum_regret for tr in traces])
    mean = R.mean(axis=0)
    se = R.std(axis=0, ddof=1) / np.sqrt(len(R)) if len(R) > 1 else np.zeros(R.shape[1])
    summary = BatchSummary(np.asarray(checkpoints), mean, se, tuple(window), None, None)
    try:
        summary.exponent, summary.exponent_se = scaling_exponent(summary, window)
    except ValueError:
        pass
    return summary


def _episode_task(args):
    config, seed = args
    return run_episode(config, seed)


def run_batch(config: RunConfig, threads: int = 1):
    """All seeds of ``config``; returns ``(summary, traces)`` with traces in seed-list order."""
    jobs = [(config, s) for s in config.seeds]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            traces = list(pool.map(_episode_task, jobs))
    else:
        traces = [_episode_task(j) for j in jobs]
    return summarize(traces, config.resolved_checkpoints, config.resolved_window), traces


def scaling_exponent(summary, window=None) -> tuple[float, float]:
    """OLS slope (and its standard error) of ``log mean`` on ``log t`` within ``window``.

    ``summary`` is a ``BatchSummary`` or a ``(checkpoints, values)`` pair.
    """
    if isinstance(summary, BatchSummary):
        t, y = summary.checkpoints, summary.mean
        window = summary.window if window is None else window
    else:
        t, y = (np.asarray(v, dtype=float) for v in summary)
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    lo, hi = window if window is not None else (t.min(), t.max())
    mask = (t >= lo) & (t <= hi)
    if mask.sum() < 3:
        raise ValueError("need at least 3 checkpoints in the window")
    if np.any(y[mask] <= 0):
        raise ValueError("regret must be positive in the window to fit an exponent")
    x, z = np.log(t[mask]), np.log(y[mask])
    X = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(X, z, rcond=None)
    resid = z - X @ coef
    dof = len(x) - 2
    if dof > 0:
        s2 = resid @ resid / dof
        se = float(np.sqrt(s2 * np.linalg.inv(X.T @ X)[1, 1]))
    else:
        se = 0.0
    return float(coef[1]), se


def coverage_rate(config: RunConfig, seeds=None) -> float:
    """Fraction of seeds whose parameter stays inside the imitation ball at every round ``t >= 2``."""
    if config.agent != "imitation":
        raise ValueError("coverage is measured for the imitation agent")
    seeds = config.seeds if seeds is None else seeds
    hits = 0
    for seed in seeds:
        ok = [True]

        def check(t, agent, theta, ok=ok):
            if ok[0] and t < config.horizon and not agent.confidence().contains(theta.main):
                ok[0] = False

        run_episode(config, seed, on_round=check)
        hits += ok[0]
    return hits / len(seeds)


def post_commit_mean(trace: RegretTrace, start: int) -> float:
    """Mean per-round regret over rounds ``start..T`` of a recorded trace."""
    if trace.per_round is None:
        raise ValueError("trace was not recorded")
    return float(trace.per_round[start - 1:].mean())


__all__ = [
    "AGENT_NAMES",
    "BatchSummary",
    "OracleAgent",
    "RegretTrace",
    "RunConfig",
    "coverage_rate",
    "default_checkpoints",
    "post_commit_mean",
    "run_batch",
    "run_episode",
    "scaling_exponent",
    "stream",
    "summarize",
]
