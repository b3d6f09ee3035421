"""Radar scene: enumeration, link budget, rewards, dynamics, features."""

import numpy as np
import pytest
from scipy import stats

import radar_irl as ri
from radar_irl import radar_env as env
from radar_irl.errors import CapacityError, InvalidInputError, ValidationError


def frozen_scenario(**overrides):
    """Dynamics frozen: target and jammer never move."""
    params = dict(
        n_pos_bins=4, n_vel_bins=1, n_channels=2, n_power_levels=2,
        pos_noise_probs=(0.0, 1.0, 0.0), vel_stay_prob=1.0,
        jammer_stay_prob=1.0, drift_span=0,
    )
    params.update(overrides)
    return env.default_scenario(**params)


class TestEnumeration:
    @pytest.mark.parametrize("channels,powers,expected", [
        (5, 10, 150),
        (1, 1, 1),
        (3, 4, 24),
    ])
    def test_action_count(self, channels, powers, expected):
        cfg = env.default_scenario(n_channels=channels, n_power_levels=powers)
        actions = env.enumerate_actions(cfg)
        assert len(actions) == expected == cfg.n_actions

    def test_action_order_and_contiguity(self):
        cfg = env.default_scenario(n_channels=3, n_power_levels=2)
        actions = env.enumerate_actions(cfg)
        keys = [(a.band_lo, a.band_hi, a.power_level) for a in actions]
        assert keys == sorted(keys)
        assert all(a.band_lo <= a.band_hi < 3 for a in actions)

    @pytest.mark.parametrize("pos,vel,channels,expected", [
        (10, 5, 5, 1600),
        (2, 2, 1, 8),
    ])
    def test_state_count(self, pos, vel, channels, expected):
        cfg = env.default_scenario(n_pos_bins=pos, n_vel_bins=vel, n_channels=channels)
        states, index = env.enumerate_states(cfg)
        assert len(states) == expected == cfg.n_states
        assert len(index) == expected

    def test_index_round_trip(self):
        cfg = env.default_scenario(n_pos_bins=3, n_vel_bins=2, n_channels=2)
        for i in range(cfg.n_states):
            assert env.state_index(cfg, env.state_from_index(cfg, i)) == i

    def test_state_cap(self):
        cfg = env.default_scenario(n_pos_bins=600, n_vel_bins=600, n_channels=3)
        with pytest.raises(CapacityError):
            env.enumerate_states(cfg)


class TestSinr:
    def test_max_range_calibration(self):
        # 3 dB anchor at exact max range; the outermost bin centre sits at
        # 0.96 of max range, giving 3 + 40 log10(1/0.96) dB
        cfg = env.paper_scenario()
        state = env.EnvState(pos_bin=9, vel_bin=0, occupancy=0)
        action = env.RadarAction(band_lo=0, band_hi=0, power_level=9)
        expected = 3.0 + 40.0 * np.log10(1.0 / 0.96)
        assert env.sinr_db(cfg, state, action) == pytest.approx(expected, abs=1e-9)
        assert expected == pytest.approx(3.709, abs=5e-4)

    def test_full_overlap_penalised(self):
        cfg = env.paper_scenario()
        state = env.EnvState(pos_bin=9, vel_bin=0, occupancy=0b1)
        action = env.RadarAction(band_lo=0, band_hi=0, power_level=9)
        clear = 3.0 + 40.0 * np.log10(1.0 / 0.96)
        expected = clear - 10.0 * np.log10(1.0 + 10.0 ** 1.4)
        got = env.sinr_db(cfg, state, action)
        assert got == pytest.approx(expected, abs=1e-9)
        assert got == pytest.approx(-10.46, abs=5e-3)
        assert got < 0.0

    def test_power_term_additive(self):
        cfg = env.paper_scenario()  # 1 dB per level
        state = env.EnvState(pos_bin=4, vel_bin=2, occupancy=0b00100)
        low = env.sinr_db(cfg, state, env.RadarAction(0, 1, 0))
        high = env.sinr_db(cfg, state, env.RadarAction(0, 1, 9))
        assert high - low == pytest.approx(9.0, abs=1e-9)

    def test_monotone_in_power_and_overlap(self):
        cfg = env.default_scenario()
        state_clear = env.EnvState(pos_bin=2, vel_bin=1, occupancy=0b000)
        state_part = env.EnvState(pos_bin=2, vel_bin=1, occupancy=0b001)
        state_full = env.EnvState(pos_bin=2, vel_bin=1, occupancy=0b111)
        for lo, hi in [(0, 0), (0, 2)]:
            prev = -np.inf
            for level in range(cfg.n_power_levels):
                cur = env.sinr_db(cfg, state_clear, env.RadarAction(lo, hi, level))
                assert cur >= prev
                prev = cur
            a = env.RadarAction(lo, hi, 2)
            assert env.sinr_db(cfg, state_clear, a) >= env.sinr_db(cfg, state_part, a)
            assert env.sinr_db(cfg, state_part, a) >= env.sinr_db(cfg, state_full, a)


class TestReward:
    def test_task3_all_terms_at_one(self):
        cfg = env.paper_scenario()
        task = env.TaskWeights(1.0, 1.0, 5.0)
        best = env.EnvState(pos_bin=0, vel_bin=0, occupancy=0)
        full_band_max_power = env.RadarAction(0, 4, 9)
        value = env.reward(cfg, task, best, full_band_max_power, best)
        assert value == pytest.approx(-3.0, abs=1e-9)

    def test_penalty_branch(self):
        cfg = env.paper_scenario()
        task = cfg.task(1)
        far = env.EnvState(pos_bin=9, vel_bin=0, occupancy=0b00001)
        overlap = env.RadarAction(0, 0, 0)
        assert env.reward(cfg, task, far, overlap, far) == -10.0

    def test_all_zero_weights_rejected(self):
        with pytest.raises(InvalidInputError):
            env.TaskWeights(0.0, 0.0, 0.0)
        with pytest.raises(InvalidInputError):
            env.default_scenario(task_weights=((1, (0.0, 0.0, 0.0)),))

    def test_reward_bounds(self):
        cfg = env.default_scenario()
        for task_id in cfg.task_ids:
            task = cfg.task(task_id)
            tensor = env.reward_tensor(cfg, task)
            assert tensor.min() >= cfg.large_penalty
            assert tensor.max() <= task.w1 + task.w2 + 1e-12

    def test_tensor_matches_scalar(self):
        cfg = env.default_scenario()
        task = cfg.task(2)
        tensor = env.reward_tensor(cfg, task)
        states, _ = env.enumerate_states(cfg)
        actions = env.enumerate_actions(cfg)
        rng = np.random.default_rng(0)
        for _ in range(100):
            s, a, z = rng.integers(cfg.n_states), rng.integers(cfg.n_actions), \
                rng.integers(cfg.n_states)
            assert tensor[s, a, z] == env.reward(cfg, task, states[s], actions[a], states[z])


class TestDynamics:
    def test_frozen_dynamics_identity(self):
        cfg = frozen_scenario()
        rng = np.random.default_rng(0)
        state = env.EnvState(pos_bin=2, vel_bin=0, occupancy=0b01)
        action = env.RadarAction(0, 0, 0)
        for _ in range(10):
            assert env.step(cfg, state, action, rng) == state

    def test_seeded_step_reproducible(self):
        cfg = env.default_scenario()
        state = env.EnvState(pos_bin=3, vel_bin=1, occupancy=0b010)
        action = env.RadarAction(0, 1, 2)
        a = env.step(cfg, state, action, np.random.default_rng(7))
        b = env.step(cfg, state, action, np.random.default_rng(7))
        assert a == b

    def test_jammer_stay_frequency(self):
        cfg = env.default_scenario()
        rng = np.random.default_rng(1)
        state = env.EnvState(pos_bin=3, vel_bin=1, occupancy=0b010)
        action = env.RadarAction(0, 0, 0)
        n = 100_000
        stays = 0
        for _ in range(n):
            nxt = env.step(cfg, state, action, rng)
            stays += nxt.occupancy == state.occupancy
        # interior jammer position: stay prob is exactly 0.8
        assert abs(stays / n - 0.8) < 3.0 * np.sqrt(0.8 * 0.2 / n) + 1e-12

    def test_step_marginals_chi_squared(self):
        cfg = env.default_scenario()
        state = env.EnvState(pos_bin=2, vel_bin=1, occupancy=0b001)
        action = env.RadarAction(1, 2, 3)
        rng = np.random.default_rng(5)
        n = 100_000
        pos_counts = np.zeros(cfg.n_pos_bins)
        vel_counts = np.zeros(cfg.n_vel_bins)
        occ_counts = np.zeros(cfg.n_occupancy_words)
        for _ in range(n):
            nxt = env.step(cfg, state, action, rng)
            pos_counts[nxt.pos_bin] += 1
            vel_counts[nxt.vel_bin] += 1
            occ_counts[nxt.occupancy] += 1
        checks = [
            (pos_counts, env.position_kernel(cfg)[state.vel_bin, state.pos_bin]),
            (vel_counts, env.velocity_kernel(cfg)[state.vel_bin]),
            (occ_counts, env.jammer_kernel(cfg)[state.occupancy]),
        ]
        for counts, probs in checks:
            mask = probs > 0
            assert counts[~mask].sum() == 0
            _, p_value = stats.chisquare(counts[mask], n * probs[mask])
            assert p_value > 0.001

    def test_analytic_model_matches_sampled_estimate(self):
        cfg = frozen_scenario(
            n_pos_bins=3, n_vel_bins=2, n_channels=2,
            pos_noise_probs=(0.15, 0.7, 0.15), vel_stay_prob=0.6,
            jammer_stay_prob=0.8, drift_span=1,
        )
        mdp = env.build_mdp(cfg, 0.9)
        start = env.start_distribution(cfg)
        n = 200_000
        rollouts = ri.sample_trajectories(mdp, ri.uniform_policy(mdp), start, n, rng_seed=3)
        est = ri.estimate_transitions(rollouts, cfg.n_states, cfg.n_actions, smoothing=0.0)
        s, a, _, _ = __import__("radar_irl.mdp", fromlist=["dataset_step_arrays"]) \
            .dataset_step_arrays(rollouts)
        visits = np.zeros((cfg.n_states, cfg.n_actions))
        np.add.at(visits, (s, a), 1.0)
        # ~1000 simultaneous comparisons: 4.5 sigma keeps the familywise
        # false-alarm rate below 1% while still catching real kernel bugs
        for si in range(cfg.n_states):
            for ai in range(cfg.n_actions):
                count = visits[si, ai]
                if count < 50:
                    continue
                p = mdp.transition[si, ai]
                sigma = np.sqrt(np.maximum(p * (1 - p), 1e-12) / count)
                assert np.all(np.abs(est[si, ai] - p) <= 4.5 * sigma + 1e-9)
                assert not np.any((est[si, ai] > 0) & (p == 0))

    def test_transition_rows_valid(self):
        for cfg in (env.default_scenario(), env.paper_scenario()):
            t = env.transition_matrix(cfg)
            assert np.all(t >= 0)
            assert np.allclose(t.sum(axis=1), 1.0, atol=1e-12)


class TestFeatures:
    def test_feature_length(self):
        cfg = env.default_scenario(n_pos_bins=10, n_vel_bins=5, n_channels=5,
                                   n_power_levels=10)
        s = env.EnvState(pos_bin=1, vel_bin=2, occupancy=0b00110)
        a = env.RadarAction(1, 3, 4)
        vec = env.encode_features(cfg, s, a, s)
        assert vec.shape == (55,)
        assert env.feature_dim(cfg) == 55

    def test_zero_occupancy_bits(self):
        cfg = env.default_scenario()
        s = env.EnvState(pos_bin=0, vel_bin=0, occupancy=0)
        a = env.RadarAction(0, 0, 0)
        vec = env.encode_features(cfg, s, a, s)
        occ_block = vec[cfg.n_pos_bins + cfg.n_vel_bins:
                        cfg.n_pos_bins + cfg.n_vel_bins + cfg.n_channels]
        assert np.all(occ_block == 0)

    def test_distinct_triples_distinct_vectors(self):
        cfg = env.default_scenario(n_pos_bins=2, n_vel_bins=2, n_channels=2,
                                   n_power_levels=2)
        fmap = ri.TripleFeatureMap(env.state_feature_matrix(cfg),
                                   env.action_feature_matrix(cfg))
        mat = fmap.matrix()
        assert len({row.tobytes() for row in mat}) == fmap.n_triples


class TestExpertPolicy:
    def test_power_only_reward_prefers_min_power(self):
        # benign link budget so even min power keeps SINR >= 0 everywhere
        cfg = frozen_scenario(inr_db=0.0, r_min_frac=0.5, snr_max_db=15.0,
                              task_weights=((1, (0.0, 0.0, 5.0)),))
        tensor = env.reward_tensor(cfg, cfg.task(1))
        assert tensor.min() > cfg.large_penalty  # no penalty branch anywhere
        actions = env.enumerate_actions(cfg)
        policy = env.expert_policy(cfg, cfg.task(1), discount=0.9)
        chosen = np.argmax(policy, axis=1)
        assert all(actions[c].power_level == 0 for c in chosen)
        # brute force: no action beats the chosen one anywhere
        mdp = env.build_mdp(cfg, 0.9)
        rp = np.einsum("saz,saz->sa", mdp.transition, tensor)
        assert np.allclose(rp[np.arange(cfg.n_states), chosen], rp.max(axis=1), atol=1e-12)

    def test_identical_weights_identical_policies(self):
        cfg = env.default_scenario(
            task_weights=((1, (2.0, 1.0, 3.0)), (2, (2.0, 1.0, 3.0))))
        p1 = env.expert_policy(cfg, cfg.task(1), 0.9)
        p2 = env.expert_policy(cfg, cfg.task(2), 0.9)
        assert np.array_equal(p1, p2)

    def test_expert_beats_uniform(self):
        cfg = env.default_scenario()
        task = cfg.task(1)
        mdp = env.build_mdp(cfg, 0.9)
        tensor = env.reward_tensor(cfg, task)
        start = env.start_distribution(cfg)
        expert = env.expert_policy(cfg, task, 0.9)
        v_expert = ri.policy_value(mdp, tensor, expert, start)
        v_uniform = ri.policy_value(mdp, tensor, ri.uniform_policy(mdp), start)
        assert v_expert >= v_uniform


class TestPaperScale:
    def test_full_size_scene_constructible(self):
        cfg = env.paper_scenario()
        assert cfg.n_states == 1600 and cfg.n_actions == 150
        mdp = env.build_mdp(cfg, 0.9)
        assert mdp.transition.shape == (1600, 150, 1600)
        tensor = env.reward_tensor(cfg, cfg.task(1))
        assert tensor.shape == (1600, 150, 1600)
        fmap = __import__("radar_irl").TripleFeatureMap(
            env.state_feature_matrix(cfg), env.action_feature_matrix(cfg))
        assert fmap.input_dim == env.feature_dim(cfg) == 55
        start = env.start_distribution(cfg)
        assert start.sum() == pytest.approx(1.0)
        # value iteration on the true reward stays tractable
        v, _, policy = ri.value_iteration(mdp, tensor, tol=1e-4)
        assert np.all(np.isfinite(v))


class TestScenarioFile:
    def test_round_trip(self, tmp_path):
        cfg = env.default_scenario(snr_max_db=4.5, jammer_width=2)
        path = tmp_path / "scene.json"
        env.save_scenario(path, cfg)
        assert env.load_scenario(path) == cfg

    def test_unknown_keys_rejected(self, tmp_path):
        cfg = env.default_scenario()
        path = tmp_path / "scene.json"
        env.save_scenario(path, cfg)
        import json
        doc = json.loads(path.read_text())
        doc["mystery_knob"] = 3
        path.write_text(json.dumps(doc))
        with pytest.raises(ValidationError):
            env.load_scenario(path)

    def test_invalid_values_rejected(self, tmp_path):
        cfg = env.default_scenario()
        path = tmp_path / "scene.json"
        env.save_scenario(path, cfg)
        import json
        doc = json.loads(path.read_text())
        doc["r_min_frac"] = 1.5
        path.write_text(json.dumps(doc))
        with pytest.raises(ValidationError):
            env.load_scenario(path)
