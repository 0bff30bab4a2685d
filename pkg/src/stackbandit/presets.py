"""Named experiment presets.

Each preset is a ``RunConfig`` template plus the claim it exercises and the
qualitative outcome expected from it.  ``checks`` names extra property
checks the CLI runs and reports in ``summary.json``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .envs import GameSpec, NoiseSpec
from .harness import RunConfig


@dataclass(frozen=True)
class ExperimentPreset:
    name: str
    claim: str
    expected: str
    config: RunConfig
    checks: tuple = field(default=())


def _seeds(n):
    return tuple(range(n))


PRESETS: dict[str, ExperimentPreset] = {}


def _add(p: ExperimentPreset):
    if p.name in PRESETS:
        raise ValueError(f"duplicate preset {p.name}")
    PRESETS[p.name] = p


_add(ExperimentPreset(
    "relu-curse", "Theorem 3.1 (curse of expertise)",
    "per-round regret stays near delta; responses constant b=1",
    RunConfig(GameSpec("relu-curse", 10, delta=0.5), "linucb", 10_000, _seeds(10),
              NoiseSpec(0.2, 0.0), window=(1_000, 10_000)),
    checks=("curse",)))
_add(ExperimentPreset(
    "covering-relu-d3", "Theorem 3.2 / Corollary 3.3 (covering algorithm)",
    "sublinear regret, exponent in [0.45, 0.95]",
    RunConfig(GameSpec("relu-curse", 3, delta=0.5), "covering", 100_000, _seeds(10),
              NoiseSpec(0.2, 0.0), window=(10_000, 100_000))))
_add(ExperimentPreset(
    "imitation-log2", "Proposition 4.4 (log^2 regret from responses)",
    "exponent <= 0.30",
    RunConfig(GameSpec("imitation", 5), "imitation", 20_000, _seeds(20),
              NoiseSpec(0.2, 0.2), window=(1_000, 20_000))))
_add(ExperimentPreset(
    "imitation-vs-linucb", "Proposition 4.4 remark (sqrt(T) without responses)",
    "exponent in [0.35, 0.65]",
    RunConfig(GameSpec("imitation", 5), "linucb", 20_000, _seeds(20),
              NoiseSpec(0.2, 0.2), window=(1_000, 20_000))))
_add(ExperimentPreset(
    "expert-strong", "Proposition 4.6 (strong reduction to a linear bandit)",
    "exponent in [0.35, 0.65]; actions stay in the cap",
    RunConfig(GameSpec("expert-guided", 5, delta=0.5, zeta=0.95), "expert", 20_000, _seeds(20),
              NoiseSpec(0.2, 0.0), window=(1_000, 20_000)),
    checks=("cap",)))
_add(ExperimentPreset(
    "expert-weak", "Proposition 4.7 (weak reduction on a spherical cap)",
    "exponent < 0.98; fewer cap arms than sphere arms",
    RunConfig(GameSpec("expert-guided", 6, delta=0.9, zeta=0.3), "expert", 100_000,
              _seeds(10), NoiseSpec(0.2, 0.0), agent_params={"eps": 0.4},
              window=(5_000, 100_000)),
    checks=("cap",)))
_add(ExperimentPreset(
    "poly-proxy", "Proposition 5.2 (learning from responses only)",
    "post-commit per-round regret <= 0.05",
    RunConfig(GameSpec("polynomial", 4, k=2), "poly-proxy", 50_000, _seeds(20),
              NoiseSpec(0.05, 0.05), window=(10_000, 50_000)),
    checks=("proxy",)))
_add(ExperimentPreset(
    "poly-lipschitz-check", "Example 5.1 (Lipschitz proxy and Fenchel identity)",
    "zero Lipschitz violations; true regret <= 2k/(2k-1) proxy regret",
    RunConfig(GameSpec("polynomial", 4, k=3), "poly-proxy", 10_000, _seeds(5),
              NoiseSpec(0.05, 0.05)),
    checks=("proxy", "lipschitz")))
_add(ExperimentPreset(
    "optimism-trap", "Example 5.2 (optimism trap and one-round probe)",
    "probe regret constant from round 2",
    RunConfig(GameSpec("optimism-trap", 10, delta=0.5), "probe", 10_000, _seeds(10),
              NoiseSpec(0.0, 0.0), window=(1_000, 10_000))))
_add(ExperimentPreset(
    "lemma43-coverage", "Lemma 4.3 (imitation confidence ball coverage)",
    "coverage >= 0.90",
    RunConfig(GameSpec("imitation", 5), "imitation", 10_000, _seeds(200),
              NoiseSpec(0.2, 0.2), agent_params={"delta": 0.05, "c_alpha": 2.0}),
    checks=("coverage",)))
