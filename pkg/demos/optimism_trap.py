"""Optimism never plays the one action that reveals everything.

Playing the zero action makes the follower reveal the parameter in one
round.  An optimistic agent never picks it, because an interior action can
never look optimal.  Run with ``python demos/optimism_trap.py``.
"""

from stackbandit import GameSpec, NoiseSpec
from stackbandit.harness import RunConfig, run_batch

spec = GameSpec("optimism-trap", 6, delta=0.5)
for agent in ("probe", "optimistic-sphere"):
    summary, _ = run_batch(RunConfig(spec, agent, 2_000, seeds=(0, 1, 2), noise=NoiseSpec(0.2, 0.0)))
    curve = ", ".join(f"{c}: {m:.1f}" for c, m in zip(summary.checkpoints[-4:], summary.mean[-4:]))
    print(f"{agent:18s} cumulative regret  {curve}")
