"""An expert follower can hide information from the leader.

In the ReLU game the follower answers b = 1 whenever the leader's action is
poor, and that answer is the same for every parameter.  Per-round regret
then sits at delta until the leader stumbles into the good cap.  Run with
``python demos/curse_of_expertise.py``.
"""

import numpy as np

from stackbandit import GameSpec, NoiseSpec
from stackbandit.harness import RunConfig, run_episode

spec = GameSpec("relu-curse", 10, delta=0.5)
cfg = RunConfig(spec, "linucb", 3_000, noise=NoiseSpec(0.2, 0.0), record=True)
trace = run_episode(cfg, seed=0)
silent = trace.responses[:, 0] == 1.0
for lo, hi in ((0, 100), (100, 1_000), (1_000, 3_000)):
    print(f"rounds {lo + 1:>5}-{hi:<5} share with b = 1: {silent[lo:hi].mean():.2f}   "
          f"mean regret: {trace.per_round[lo:hi].mean():.3f}")
print(f"regret when b = 1 is always delta: {np.allclose(trace.per_round[silent], spec.delta)}")
