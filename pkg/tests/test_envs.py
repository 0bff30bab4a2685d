import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stackbandit.envs import (
    GameSpec,
    NoiseSpec,
    Theta,
    Variant,
    best_response,
    best_response_grid,
    conjugate_power,
    feature,
    hbar,
    hbar_many,
    make_theta,
    mean_reward,
    optimal_action,
    proxy_value,
    random_theta,
    response_grid,
    response_lipschitz,
    reward_many,
    step,
)
from stackbandit.geometry import sample_uniform_sphere

ALL = [
    GameSpec("relu-curse", 4, delta=0.5),
    GameSpec("imitation", 3),
    GameSpec("expert-guided", 3, delta=0.4, zeta=0.6),
    GameSpec("polynomial", 4, k=2),
    GameSpec("optimism-trap", 3, delta=0.3),
]


def random_action(spec, rng):
    if spec.leader_on_sphere:
        return sample_uniform_sphere(rng, spec.leader_dim)
    u = sample_uniform_sphere(rng, spec.leader_dim)
    return u * rng.uniform() ** (1.0 / spec.leader_dim)


def interior_theta(spec, rng):
    # polynomial and optimism-trap parameters may lie inside the ball
    if spec.variant in (Variant.POLYNOMIAL, Variant.OPTIMISM_TRAP):
        u = sample_uniform_sphere(rng, spec.param_dim)
        return make_theta(spec, u * rng.uniform())
    return random_theta(spec, rng)


class TestGameSpec:
    @pytest.mark.parametrize("kwargs", [
        dict(variant="relu-curse", d=2), dict(variant="imitation", d=1),
        dict(variant="relu-curse", d=4, delta=1.0), dict(variant="expert-guided", d=3, zeta=0.0),
        dict(variant="polynomial", d=3, k=0), dict(variant="polynomial", d=3, k=1.5),
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            GameSpec(**kwargs)

    def test_shapes(self):
        s = GameSpec("optimism-trap", 5)
        assert (s.leader_dim, s.follower_dim, s.param_dim) == (4, 5, 4)
        s = GameSpec("imitation", 5)
        assert (s.leader_dim, s.follower_dim, s.leader_on_sphere) == (5, 5, True)

    def test_theta_validation(self):
        with pytest.raises(ValueError):
            make_theta(GameSpec("imitation", 3), [1.0, 1.0, 0.0])
        with pytest.raises(ValueError):
            make_theta(GameSpec("polynomial", 3), [1.0, 1.0])
        spec = GameSpec("expert-guided", 2, zeta=0.9)
        with pytest.raises(ValueError):
            make_theta(spec, [1.0, 0.0], [0.0, 1.0])
        with pytest.raises(ValueError):
            make_theta(GameSpec("imitation", 2), [1.0, 0.0], [1.0, 0.0])


class TestPublishedValues:
    def test_relu_optimal_reward(self):
        spec = GameSpec("relu-curse", 4, delta=0.5)
        th = make_theta(spec, [1.0, 0.0, 0.0])
        assert mean_reward(spec, th, [1.0, 0.0, 0.0], [0.0]) == 1.0

    def test_relu_best_response_below_threshold(self):
        spec = GameSpec("relu-curse", 4, delta=0.5)
        th = make_theta(spec, [1.0, 0.0, 0.0])
        np.testing.assert_array_equal(best_response(spec, th, [-1.0, 0.0, 0.0]), [1.0])

    def test_relu_hbar(self):
        spec = GameSpec("relu-curse", 4, delta=0.5)
        th = make_theta(spec, [1.0, 0.0, 0.0])
        assert hbar(spec, th, [0.3, 0.0, 0.0]) == 0.5
        e2 = make_theta(spec, [0.0, 1.0, 0.0])
        np.testing.assert_array_equal(optimal_action(spec, e2), [0.0, 1.0, 0.0])
        assert hbar(spec, e2, optimal_action(spec, e2)) == 1.0

    def test_relu_grid_below_threshold(self):
        spec = GameSpec("relu-curse", 4, delta=0.5)
        th = make_theta(spec, [0.6, 0.8, 0.0])
        a = np.array([0.2 / 0.6, 0.0, 0.0])
        np.testing.assert_allclose(best_response_grid(spec, th, a, 0.01), [1.0])

    def test_imitation(self):
        spec = GameSpec("imitation", 2)
        th = make_theta(spec, [1.0, 0.0])
        assert mean_reward(spec, th, [1.0, 0.0], [1.0, 0.0]) == 2.0
        assert hbar(spec, th, [1.0, 0.0]) == 2.0
        up = make_theta(spec, [0.0, 1.0])
        b = best_response_grid(spec, up, [1.0, 0.0], 0.01)
        assert np.linalg.norm(b - [0.0, 1.0]) <= 0.02

    def test_polynomial_fenchel_hand_check(self):
        spec = GameSpec("polynomial", 2, k=1)
        th = make_theta(spec, [1.0])
        np.testing.assert_allclose(mean_reward(spec, th, [0.5], [0.5]), 0.25, atol=1e-15)
        np.testing.assert_allclose(hbar(spec, th, [0.5]), 0.25, atol=1e-15)

    def test_polynomial_values(self):
        spec = GameSpec("polynomial", 3, k=2)
        th = make_theta(spec, [1.0, 0.0])
        np.testing.assert_array_equal(best_response(spec, th, [0.0, 0.0]), [0.0])
        np.testing.assert_allclose(hbar(spec, th, [0.5, 0.0]), 0.0625)
        spec1 = GameSpec("polynomial", 2, k=1)
        b = best_response_grid(spec1, make_theta(spec1, [0.8]), [1.0], 1e-3)
        np.testing.assert_allclose(b, [0.8], atol=1e-3)

    def test_optimism_trap_probe_response(self):
        spec = GameSpec("optimism-trap", 4, delta=0.3)
        th = make_theta(spec, [0.9, 0.0, 0.0])
        b = best_response(spec, th, np.zeros(3))
        np.testing.assert_array_equal(b, [1.0, 0.0, 0.0, 0.0])
        grid = best_response_grid(spec, th, np.zeros(3), 0.05)
        assert np.linalg.norm(grid - b) <= 0.05 * np.sqrt(4)


class TestConjugate:
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_matches_numerical_supremum(self, k):
        x = np.linspace(-3, 3, 200_001)
        for y in (-2.5, -0.3, 0.0, 0.7, 4.0):
            numeric = np.max(x * y - x ** (2 * k))
            np.testing.assert_allclose(conjugate_power(y, k), numeric, atol=1e-6)


class TestBestResponseOracles:
    @pytest.mark.parametrize("spec", ALL, ids=lambda s: s.variant.value)
    def test_closed_form_vs_grid(self, spec):
        rng = np.random.default_rng(0)
        res = 0.05 if spec.follower_dim > 2 else 0.01
        grid = response_grid(spec, res)
        slack = response_lipschitz(spec) * res * np.sqrt(spec.follower_dim)
        for _ in range(200):
            th = interior_theta(spec, rng)
            a = random_action(spec, rng)
            closed = mean_reward(spec, th, a, best_response(spec, th, a))
            g = best_response_grid(spec, th, a, res, grid=grid)
            found = mean_reward(spec, th, a, g)
            assert closed >= found - 1e-9
            assert found >= closed - slack

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_trap_factored_scan_matches_full_scan(self, d):
        spec = GameSpec("optimism-trap", d, delta=0.3)
        rng = np.random.default_rng(d)
        grid = response_grid(spec, 0.05)
        for _ in range(200):
            th = interior_theta(spec, rng)
            a = random_action(spec, rng)
            full = best_response_grid(spec, th, a, 0.05, grid=grid)
            factored = best_response_grid(spec, th, a, 0.05)
            np.testing.assert_allclose(mean_reward(spec, th, a, factored),
                                       mean_reward(spec, th, a, full), atol=1e-12)

    @pytest.mark.parametrize("spec", ALL, ids=lambda s: s.variant.value)
    def test_hbar_consistency(self, spec):
        rng = np.random.default_rng(1)
        for _ in range(2000):
            th = interior_theta(spec, rng)
            a = random_action(spec, rng)
            np.testing.assert_allclose(hbar(spec, th, a),
                                       mean_reward(spec, th, a, best_response(spec, th, a)),
                                       atol=1e-9)

    @pytest.mark.parametrize("spec", ALL, ids=lambda s: s.variant.value)
    def test_hbar_many_matches_scalar(self, spec):
        rng = np.random.default_rng(2)
        th = interior_theta(spec, rng)
        A = np.array([random_action(spec, rng) for _ in range(100)])
        np.testing.assert_allclose(hbar_many(spec, th, A), [hbar(spec, th, a) for a in A])

    @pytest.mark.parametrize("spec", ALL, ids=lambda s: s.variant.value)
    def test_optimal_action_beats_random_search(self, spec):
        rng = np.random.default_rng(3)
        th = random_theta(spec, rng)
        A = np.array([random_action(spec, rng) for _ in range(10_000)])
        best = hbar(spec, th, optimal_action(spec, th))
        assert np.all(hbar_many(spec, th, A) <= best + 1e-12)

    def test_optimal_action_needs_unit_theta(self):
        spec = GameSpec("polynomial", 3)
        with pytest.raises(ValueError):
            optimal_action(spec, make_theta(spec, [0.5, 0.0]))

    @pytest.mark.parametrize("spec,lo,hi", [
        (GameSpec("relu-curse", 4), 0.0, 1.0), (GameSpec("imitation", 3), 0.0, 2.0),
        (GameSpec("expert-guided", 3, zeta=0.5), 0.0, 2.0), (GameSpec("polynomial", 4, k=2), 0.0, 1.0),
        (GameSpec("optimism-trap", 4), 0.0, 1.0)], ids=lambda x: getattr(x, "variant", x))
    def test_value_ranges(self, spec, lo, hi):
        rng = np.random.default_rng(4)
        for _ in range(50):
            th = interior_theta(spec, rng)
            A = np.array([random_action(spec, rng) for _ in range(100)])
            v = hbar_many(spec, th, A)
            assert v.min() >= lo - 1e-12 and v.max() <= hi + 1e-12


class TestStructure:
    def test_relu_hides_parameter_below_threshold(self):
        spec = GameSpec("relu-curse", 5, delta=0.4)
        rng = np.random.default_rng(5)
        for _ in range(2000):
            th = random_theta(spec, rng)
            a = random_action(spec, rng)
            if th.main @ a < 0.6:
                np.testing.assert_array_equal(best_response(spec, th, a), [1.0])
                assert hbar(spec, th, a) == 0.6

    def test_relu_tie_goes_to_zero(self):
        spec = GameSpec("relu-curse", 3, delta=0.5)
        th = make_theta(spec, [1.0, 0.0])
        np.testing.assert_array_equal(best_response(spec, th, [0.5, 0.0]), [0.0])

    @settings(max_examples=200)
    @given(st.integers(0, 2**32 - 1), st.floats(0.05, 0.95))
    def test_trap_boundary_matches_relu(self, seed, delta):
        rng = np.random.default_rng(seed)
        trap = GameSpec("optimism-trap", 4, delta=delta)
        relu = GameSpec("relu-curse", 4, delta=delta)
        u = sample_uniform_sphere(rng, 3)
        a = sample_uniform_sphere(rng, 3)
        tt, tr = make_theta(trap, u), make_theta(relu, u)
        np.testing.assert_allclose(hbar(trap, tt, a), hbar(relu, tr, a), atol=1e-12)
        assert best_response(trap, tt, a)[-1] == best_response(relu, tr, a)[0]
        np.testing.assert_array_equal(best_response(trap, tt, a)[:-1], 0.0)

    def test_trap_value_at_zero(self):
        spec = GameSpec("optimism-trap", 5, delta=0.2)
        th = make_theta(spec, [0.0, 0.6, 0.0, 0.0])
        assert hbar(spec, th, np.zeros(4)) == pytest.approx(0.3)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_polynomial_fenchel_on_grid(self, k):
        spec = GameSpec("polynomial", 4, k=k)
        rng = np.random.default_rng(k)
        # a 1e-4 step misses x^4 by ~1.3e-6 near x = 0.034 (b* = x^3 below one step)
        grid = np.linspace(-1, 1, 200_001)[:, None]
        for _ in range(200):
            th = interior_theta(spec, rng)
            a = random_action(spec, rng)
            np.testing.assert_allclose(reward_many(spec, th, a, grid).max(),
                                       (th.main @ a) ** (2 * k), atol=1e-6)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_polynomial_lipschitz_proxy(self, k):
        spec = GameSpec("polynomial", 4, k=k)
        rng = np.random.default_rng(10 + k)
        th = random_theta(spec, rng)
        A = np.array([random_action(spec, rng) for _ in range(20_000)])
        h = hbar_many(spec, th, A)
        b = (A @ th.main) ** (2 * k - 1)
        lhs = np.abs(h[::2] - h[1::2])
        rhs = 2 * k / (2 * k - 1) * np.abs(b[::2] - b[1::2])
        assert np.all(lhs <= rhs + 1e-9)
        assert proxy_value(spec, th, A[0]) == pytest.approx(b[0])

    def test_feature_is_linear_in_parameter(self):
        spec = GameSpec("optimism-trap", 4, delta=0.3)
        rng = np.random.default_rng(7)
        th = interior_theta(spec, rng)
        a = random_action(spec, rng)
        b = np.append(sample_uniform_sphere(rng, 3) * 0.4, 0.7)
        full = np.append(th.main, 0.7)
        assert full @ feature(spec, a, b) == pytest.approx(mean_reward(spec, th, a, b))


class TestDomainChecks:
    def test_action_outside_set(self):
        spec = GameSpec("imitation", 3)
        th = random_theta(spec, np.random.default_rng(0))
        with pytest.raises(ValueError):
            hbar(spec, th, [1.0, 1.0, 0.0])
        spec = GameSpec("polynomial", 3)
        with pytest.raises(ValueError):
            best_response(spec, make_theta(spec, [1.0, 0.0]), [2.0, 0.0])

    def test_response_outside_set(self):
        spec = GameSpec("relu-curse", 3)
        th = make_theta(spec, [1.0, 0.0])
        with pytest.raises(ValueError):
            mean_reward(spec, th, [0.0, 0.0], [1.5])

    def test_grid_dimension_guard(self):
        with pytest.raises(ValueError):
            response_grid(GameSpec("imitation", 5), 0.1)
        with pytest.raises(ValueError):
            response_grid(GameSpec("imitation", 3), 0.6)


class TestStep:
    def test_noiseless_imitation(self):
        spec = GameSpec("imitation", 3)
        th = random_theta(spec, np.random.default_rng(0))
        a = sample_uniform_sphere(np.random.default_rng(1), 3)
        out = step(spec, th, NoiseSpec(0.0, 0.0), a, np.random.default_rng(2))
        np.testing.assert_array_equal(out.b_obs, th.main)
        # theta . theta is 1 up to rounding
        np.testing.assert_allclose(out.reward, th.main @ a + 1.0, rtol=0, atol=1e-15)

    def test_deterministic(self):
        spec = GameSpec("polynomial", 4, k=2)
        th = random_theta(spec, np.random.default_rng(0))
        a = np.array([0.1, 0.2, -0.3])
        o1 = step(spec, th, NoiseSpec(0.3, 0.2), a, np.random.default_rng(5))
        o2 = step(spec, th, NoiseSpec(0.3, 0.2), a, np.random.default_rng(5))
        np.testing.assert_array_equal(o1.b_obs, o2.b_obs)
        assert o1.reward == o2.reward

    @pytest.mark.parametrize("kind", ["gaussian", "boundedUniform"])
    def test_response_noise_averages_out(self, kind):
        spec = GameSpec("optimism-trap", 3, delta=0.5)
        th = make_theta(spec, [0.6, 0.8])
        a = np.array([0.1, 0.0])
        rng = np.random.default_rng(6)
        noise = NoiseSpec(0.0, 0.1, kind)
        obs = np.array([step(spec, th, noise, a, rng).b_obs for _ in range(100_000)])
        b = best_response(spec, th, a)
        np.testing.assert_allclose(obs.mean(axis=0), b, atol=0.005)
        np.testing.assert_allclose(obs.std(axis=0), 0.1, rtol=0.02)

    def test_bounded_uniform_support(self):
        noise = NoiseSpec(0.0, 0.5, "boundedUniform")
        w = noise.draw(np.random.default_rng(0), 0.5, 100_000)
        assert np.abs(w).max() <= 0.5 * np.sqrt(3.0)

    def test_observation_not_clipped(self):
        spec = GameSpec("relu-curse", 3)
        th = make_theta(spec, [1.0, 0.0])
        outs = [step(spec, th, NoiseSpec(0.0, 0.5), [0.0, 0.0], np.random.default_rng(s))
                for s in range(50)]
        assert max(o.b_obs[0] for o in outs) > 1.0
        assert all(o.b_true[0] == 1.0 for o in outs)

    def test_invalid_noise(self):
        with pytest.raises(ValueError):
            NoiseSpec(-1.0, 0.0)
        with pytest.raises(ValueError):
            NoiseSpec(0.0, 0.0, "cauchy")


def test_theta_is_frozen():
    th = make_theta(GameSpec("imitation", 2), [1.0, 0.0])
    assert isinstance(th, Theta)
    with pytest.raises(ValueError):
        th.main[0] = 0.0
