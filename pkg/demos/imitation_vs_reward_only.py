"""Learning from the follower's responses versus from rewards alone.

In the imitation game the follower's best response is the parameter itself,
so the leader can copy its running average.  A reward-only LinUCB agent has
to explore instead.  Run with ``python demos/imitation_vs_reward_only.py``.
"""

from stackbandit import GameSpec, NoiseSpec
from stackbandit.harness import RunConfig, run_batch

T = 5_000
spec = GameSpec("imitation", 5)
noise = NoiseSpec(sigma_r=0.2, sigma_b=0.2)

for agent in ("imitation", "linucb"):
    summary, _ = run_batch(RunConfig(spec, agent, T, seeds=(0, 1, 2, 3, 4), noise=noise,
                                     window=(500, T)))
    print(f"{agent:10s} regret at T={T}: {summary.mean[-1]:8.2f}   "
          f"log-log slope on [500, {T}]: {summary.exponent:.2f}")
