import dataclasses

import numpy as np
import pytest

from stackbandit.envs import GameSpec, NoiseSpec
from stackbandit.harness import (
    RunConfig,
    coverage_rate,
    default_checkpoints,
    run_batch,
    run_episode,
    scaling_exponent,
    stream,
    summarize,
)


def imitation_config(**kw):
    base = dict(spec=GameSpec("imitation", 3), agent="imitation", horizon=200,
                noise=NoiseSpec(0.2, 0.2))
    base.update(kw)
    return RunConfig(**base)


class TestCheckpoints:
    def test_geometric_grid(self):
        assert default_checkpoints(10) == (1, 2, 3, 5, 10)
        assert default_checkpoints(1) == (1,)

    def test_rejects_bad_checkpoints(self):
        with pytest.raises(ValueError):
            imitation_config(checkpoints=(1, 50, 50, 200))
        with pytest.raises(ValueError):
            imitation_config(checkpoints=(1, 50))

    def test_rejects_unknown_agent_and_empty_seeds(self):
        with pytest.raises(ValueError):
            imitation_config(agent="nope")
        with pytest.raises(ValueError):
            imitation_config(seeds=())


class TestRunEpisode:
    @pytest.mark.parametrize("variant", ["relu-curse", "imitation", "expert-guided", "polynomial",
                                         "optimism-trap"])
    def test_oracle_has_zero_regret(self, variant):
        spec = GameSpec(variant, 4, k=2)
        trace = run_episode(RunConfig(spec, "oracle", 300, noise=NoiseSpec(0.3, 0.3)), 5)
        np.testing.assert_array_equal(trace.cum_regret, 0.0)

    def test_noiseless_imitation_regret_constant_after_round_one(self):
        cfg = imitation_config(noise=NoiseSpec(0.2, 0.0), record=True)
        trace = run_episode(cfg, 3)
        assert trace.per_round[0] > 0
        np.testing.assert_allclose(trace.per_round[1:], 0.0, atol=1e-12)

    def test_rerun_is_bitwise_identical(self):
        cfg = imitation_config(record=True)
        a, b = run_episode(cfg, 11), run_episode(cfg, 11)
        np.testing.assert_array_equal(a.cum_regret, b.cum_regret)
        np.testing.assert_array_equal(a.actions, b.actions)

    def test_regret_nonnegative(self):
        for agent in ("imitation", "linucb", "covering"):
            cfg = imitation_config(agent=agent, record=True,
                                   agent_params={"eps": 0.5} if agent != "imitation" else {})
            assert run_episode(cfg, 0).per_round.min() >= -1e-9

    def test_seed_isolation(self):
        cfg = imitation_config()
        t1 = cfg.theta_for(4)
        stream(4, "agent").normal(size=100)
        np.testing.assert_array_equal(cfg.theta_for(4).main, t1.main)
        assert not np.array_equal(stream(4, "agent").normal(size=3), stream(4, "noise").normal(size=3))

    def test_explicit_theta(self):
        cfg = imitation_config(theta=(0.0, 1.0, 0.0), agent="oracle", record=True)
        trace = run_episode(cfg, 0)
        np.testing.assert_array_equal(trace.actions[0], [0.0, 1.0, 0.0])

    def test_callback_sees_every_round(self):
        seen = []
        run_episode(imitation_config(horizon=17), 0, on_round=lambda t, agent, theta: seen.append(t))
        assert seen == list(range(1, 18))


class TestSummaries:
    def test_single_seed_summary_is_the_trace(self):
        summary, traces = run_batch(imitation_config(seeds=(2,)))
        np.testing.assert_array_equal(summary.mean, traces[0].cum_regret)
        np.testing.assert_array_equal(summary.se, 0.0)

    def test_duplicated_seed_has_zero_se(self):
        summary, _ = run_batch(imitation_config(seeds=(7, 7)))
        np.testing.assert_array_equal(summary.se, 0.0)

    def test_mean_invariant_to_seed_order(self):
        s1, _ = run_batch(imitation_config(seeds=(0, 1, 2)))
        s2, _ = run_batch(imitation_config(seeds=(2, 0, 1)))
        np.testing.assert_allclose(s1.mean, s2.mean, rtol=1e-15)

    def test_summary_recomputable_from_traces(self):
        cfg = imitation_config(seeds=(0, 1, 2, 3))
        summary, traces = run_batch(cfg)
        again = summarize(traces, cfg.resolved_checkpoints, cfg.resolved_window)
        np.testing.assert_array_equal(summary.mean, again.mean)
        np.testing.assert_array_equal(summary.se, again.se)

    def test_threads_match_serial(self):
        cfg = imitation_config(seeds=(0, 1))
        s1, _ = run_batch(cfg)
        s2, _ = run_batch(cfg, threads=2)
        np.testing.assert_array_equal(s1.mean, s2.mean)

    def test_config_round_trip(self):
        cfg = imitation_config(seeds=(1, 4), agent_params={"c_alpha": 1.5}, theta=(1.0, 0.0, 0.0))
        assert RunConfig.from_dict(cfg.to_dict()).to_dict() == cfg.to_dict()
        assert dataclasses.replace(cfg, record=True).to_dict()["record"] is True


class TestScalingExponent:
    t = np.unique(np.geomspace(1e3, 1e5, 30).round())

    def test_square_root(self):
        slope, _ = scaling_exponent((self.t, np.sqrt(self.t)))
        assert slope == pytest.approx(0.5, abs=1e-9)

    def test_log_squared(self):
        slope, _ = scaling_exponent((self.t, np.log(self.t) ** 2), (1e3, 1e5))
        assert slope <= 0.3

    def test_constant(self):
        slope, _ = scaling_exponent((self.t, np.full(self.t.shape, 4.0)))
        assert slope == pytest.approx(0.0, abs=1e-9)

    def test_window_restricts_fit(self):
        y = np.where(self.t < 1e4, self.t, 1e4 * (self.t / 1e4) ** 0.25)
        slope, _ = scaling_exponent((self.t, y), (1e4, 1e5))
        assert slope == pytest.approx(0.25, abs=1e-9)

    def test_errors(self):
        with pytest.raises(ValueError):
            scaling_exponent((self.t, np.zeros_like(self.t)))
        with pytest.raises(ValueError):
            scaling_exponent(([1.0, 2.0], [1.0, 2.0]))


class TestCoverage:
    def test_noiseless_responses_always_covered(self):
        cfg = imitation_config(noise=NoiseSpec(0.2, 0.0), seeds=tuple(range(5)))
        assert coverage_rate(cfg) == 1.0

    def test_zero_radius_never_covers(self):
        cfg = imitation_config(seeds=tuple(range(10)), agent_params={"c_alpha": 0.0})
        assert coverage_rate(cfg) == 0.0

    def test_requires_imitation_agent(self):
        with pytest.raises(ValueError):
            coverage_rate(imitation_config(agent="oracle"))
