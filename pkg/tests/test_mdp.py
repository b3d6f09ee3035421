"""MDP core: dynamic programming, sampling, visitation, estimation."""

import numpy as np
import pytest

import radar_irl as ri
from radar_irl.errors import ConvergenceError, InvalidInputError, ValidationError


def make_random_mdp(seed, n_states, n_actions, discount=0.9, horizon=8):
    rng = np.random.default_rng(seed)
    trans = rng.random((n_states, n_actions, n_states)) ** 2
    trans /= trans.sum(axis=2, keepdims=True)
    return ri.TabularMdp(n_states=n_states, n_actions=n_actions, transition=trans,
                         discount=discount, horizon=horizon)


def random_reward(seed, mdp, scale=1.0):
    rng = np.random.default_rng(seed)
    return scale * rng.standard_normal((mdp.n_states, mdp.n_actions, mdp.n_states))


def enumerate_policy_values(mdp, reward):
    """Oracle: evaluate every deterministic policy by solving its linear system."""
    n, a = mdp.n_states, mdp.n_actions
    rp = np.einsum("saz,saz->sa", mdp.transition, reward)
    best = np.full(n, -np.inf)
    grid = np.indices([a] * n).reshape(n, -1).T
    eye = np.eye(n)
    for actions in grid:
        p_pi = mdp.transition[np.arange(n), actions]
        r_pi = rp[np.arange(n), actions]
        v_pi = np.linalg.solve(eye - mdp.discount * p_pi, r_pi)
        best = np.maximum(best, v_pi)
    return best


def discounted_returns(mdp, reward, trajectories):
    gammas = mdp.discount ** np.arange(mdp.horizon)
    out = np.empty(len(trajectories))
    for i, traj in enumerate(trajectories):
        r = reward[traj.states, traj.actions, traj.next_states()]
        out[i] = gammas[: len(traj)] @ r
    return out


class TestValueIteration:
    def test_self_loop_geometric_series(self):
        mdp = ri.TabularMdp(n_states=1, n_actions=1, transition=np.ones((1, 1, 1)),
                            discount=0.5, horizon=3)
        v, q, policy = ri.value_iteration(mdp, np.ones((1, 1, 1)), tol=1e-12)
        assert v[0] == pytest.approx(2.0, abs=1e-9)

    def test_myopic_argmax(self):
        mdp = ri.TabularMdp(n_states=1, n_actions=2, transition=np.ones((1, 2, 1)),
                            discount=0.9, horizon=3)
        reward = np.zeros((1, 2, 1))
        reward[0, 0, 0] = 1.0
        _, _, policy = ri.value_iteration(mdp, reward, tol=1e-10)
        assert policy[0, 0] == 1.0 and policy[0, 1] == 0.0

    @pytest.mark.parametrize("seed", range(20))
    def test_matches_policy_enumeration(self, seed):
        mdp = make_random_mdp(seed, 6, 3)
        reward = random_reward(seed + 1000, mdp)
        v, _, _ = ri.value_iteration(mdp, reward, tol=1e-9)
        oracle = enumerate_policy_values(mdp, reward)
        assert np.abs(v - oracle).max() < 1e-6

    def test_bellman_residual(self):
        mdp = make_random_mdp(3, 7, 3)
        reward = random_reward(4, mdp)
        tol = 1e-7
        v, q, _ = ri.value_iteration(mdp, reward, tol=tol)
        backup = np.einsum("saz,saz->sa", mdp.transition, reward) \
            + mdp.discount * (mdp.transition @ v)
        assert np.abs(v - backup.max(axis=1)).max() < tol

    def test_nonfinite_reward_rejected(self):
        mdp = make_random_mdp(0, 3, 2)
        reward = random_reward(0, mdp)
        reward[0, 0, 0] = np.nan
        with pytest.raises(InvalidInputError):
            ri.value_iteration(mdp, reward)

    def test_sweep_cap_raises_with_delta(self):
        mdp = make_random_mdp(0, 4, 2, discount=0.999)
        reward = random_reward(1, mdp)
        with pytest.raises(ConvergenceError) as err:
            ri.value_iteration(mdp, reward, tol=1e-13, max_sweeps=5)
        assert err.value.last_delta > 0

    def test_tie_break_lowest_action(self):
        # both actions identical: argmax must pick action 0
        trans = np.ones((2, 2, 2)) * 0.5
        mdp = ri.TabularMdp(n_states=2, n_actions=2, transition=trans, discount=0.9, horizon=3)
        _, _, policy = ri.value_iteration(mdp, np.zeros((2, 2, 2)), tol=1e-10)
        assert np.array_equal(policy[:, 0], np.ones(2))


class TestSoftValueIteration:
    def test_one_sweep_softmax_closed_form(self):
        mdp = ri.TabularMdp(n_states=1, n_actions=2, transition=np.ones((1, 2, 1)),
                            discount=0.9, horizon=3)
        reward = np.zeros((1, 2, 1))
        reward[0, 0, 0] = 1.0
        # one sweep from Q=0: Q equals the expected reward, any discount
        _, policy = ri.soft_value_iteration(mdp, reward, beta=1.0, n_sweeps=1)
        e = np.e
        assert policy[0, 0] == pytest.approx(e / (e + 1), abs=1e-12)
        assert policy[0, 1] == pytest.approx(1 / (e + 1), abs=1e-12)

    def test_beta_zero_uniform(self):
        mdp = make_random_mdp(5, 4, 3)
        reward = random_reward(6, mdp)
        _, policy = ri.soft_value_iteration(mdp, reward, beta=0.0, n_sweeps=7)
        assert np.allclose(policy, 1.0 / 3.0)

    def test_high_beta_matches_greedy(self):
        mdp = make_random_mdp(7, 6, 3)
        reward = random_reward(8, mdp, scale=2.0)
        _, _, greedy = ri.value_iteration(mdp, reward, tol=1e-10)
        q_soft, _ = ri.soft_value_iteration(mdp, reward, beta=50.0, n_sweeps=300)
        assert np.array_equal(q_soft.argmax(axis=1), greedy.argmax(axis=1))

    def test_negative_beta_rejected(self):
        mdp = make_random_mdp(0, 2, 2)
        with pytest.raises(InvalidInputError):
            ri.soft_value_iteration(mdp, np.zeros((2, 2, 2)), beta=-1.0, n_sweeps=1)


class TestPolicyValue:
    def make_chain(self, discount):
        # deterministic cycle through 4 states, single action
        n = 4
        trans = np.zeros((n, 1, n))
        for s in range(n):
            trans[s, 0, (s + 1) % n] = 1.0
        return ri.TabularMdp(n_states=n, n_actions=1, transition=trans,
                             discount=discount, horizon=20)

    def test_unit_rewards_undiscounted(self):
        mdp = self.make_chain(1.0)
        start = np.zeros(4)
        start[0] = 1.0
        value = ri.policy_value(mdp, np.ones((4, 1, 4)), np.ones((4, 1)), start)
        assert value == pytest.approx(20.0, abs=1e-12)

    def test_unit_rewards_discounted(self):
        mdp = self.make_chain(0.5)
        start = np.zeros(4)
        start[0] = 1.0
        value = ri.policy_value(mdp, np.ones((4, 1, 4)), np.ones((4, 1)), start)
        assert value == pytest.approx(2.0 * (1.0 - 0.5 ** 20), abs=1e-12)

    def test_matches_monte_carlo(self):
        mdp = make_random_mdp(11, 4, 2, discount=0.9, horizon=6)
        reward = random_reward(12, mdp)
        rng = np.random.default_rng(13)
        policy = rng.random((4, 2))
        policy /= policy.sum(axis=1, keepdims=True)
        start = rng.random(4)
        start /= start.sum()
        exact = ri.policy_value(mdp, reward, policy, start)
        n = 1_000_000
        rollouts = ri.sample_trajectories(mdp, policy, start, n, rng_seed=14)
        returns = discounted_returns(mdp, reward, rollouts)
        sigma = returns.std(ddof=1) / np.sqrt(n)
        assert abs(returns.mean() - exact) < 3.0 * sigma


class TestSampleTrajectories:
    def test_deterministic_world_identical_rollouts(self):
        trans = np.zeros((2, 1, 2))
        trans[0, 0, 1] = 1.0
        trans[1, 0, 0] = 1.0
        mdp = ri.TabularMdp(n_states=2, n_actions=1, transition=trans, discount=0.9, horizon=4)
        start = np.array([1.0, 0.0])
        rollouts = ri.sample_trajectories(mdp, np.ones((2, 1)), start, 5, rng_seed=0)
        for traj in rollouts:
            assert np.array_equal(traj.states, rollouts[0].states)
            assert traj.terminal == rollouts[0].terminal

    def test_seed_reproducible(self):
        mdp = make_random_mdp(21, 5, 3, horizon=6)
        policy = ri.uniform_policy(mdp)
        start = np.full(5, 0.2)
        a = ri.sample_trajectories(mdp, policy, start, 50, rng_seed=9)
        b = ri.sample_trajectories(mdp, policy, start, 50, rng_seed=9)
        for ta, tb in zip(a, b):
            assert np.array_equal(ta.states, tb.states)
            assert np.array_equal(ta.actions, tb.actions)
            assert ta.terminal == tb.terminal

    def test_uniform_action_frequency(self):
        mdp = make_random_mdp(22, 3, 2, horizon=1)
        policy = ri.uniform_policy(mdp)
        start = np.full(3, 1.0 / 3.0)
        rollouts = ri.sample_trajectories(mdp, policy, start, 10_000, rng_seed=5)
        freq = np.mean([t.actions[0] for t in rollouts])
        assert abs(freq - 0.5) < 0.015  # binomial 3 sigma


class TestEstimateTransitions:
    def test_single_observation_one_hot(self):
        traj = ri.Trajectory(states=np.array([0]), actions=np.array([0]), terminal=1)
        trans = ri.estimate_transitions([traj], 2, 1, smoothing=0.0)
        assert np.array_equal(trans[0, 0], [0.0, 1.0])

    def test_unvisited_rows_uniform(self):
        traj = ri.Trajectory(states=np.array([0]), actions=np.array([0]), terminal=1)
        for smoothing in (0.0, 1e-3, 1.0):
            trans = ri.estimate_transitions([traj], 3, 2, smoothing=smoothing)
            assert np.allclose(trans[1, 1], 1.0 / 3.0)
            assert np.allclose(trans.sum(axis=2), 1.0, atol=1e-12)

    def test_binomial_consistency(self):
        # true P(s1|s0,a0) = 0.7 in a 2-state world
        trans = np.array([[[0.3, 0.7]], [[1.0, 0.0]]])
        mdp = ri.TabularMdp(n_states=2, n_actions=1, transition=trans, discount=0.9, horizon=1)
        start = np.array([1.0, 0.0])
        rollouts = ri.sample_trajectories(mdp, np.ones((2, 1)), start, 10_000, rng_seed=3)
        est = ri.estimate_transitions(rollouts, 2, 1, smoothing=0.0)
        assert abs(est[0, 0, 1] - 0.7) < 0.015

    def test_rows_are_distributions_for_any_smoothing(self):
        mdp = make_random_mdp(31, 4, 2, horizon=5)
        rollouts = ri.sample_trajectories(mdp, ri.uniform_policy(mdp), np.full(4, 0.25),
                                          200, rng_seed=1)
        for smoothing in (0.0, 1e-3, 0.5, 10.0):
            est = ri.estimate_transitions(rollouts, 4, 2, smoothing=smoothing)
            assert np.all(est >= 0.0)
            assert np.allclose(est.sum(axis=2), 1.0, atol=1e-12)


class TestEmpiricalVisitation:
    def one_step(self, s, a, z):
        return ri.Trajectory(states=np.array([s]), actions=np.array([a]), terminal=z)

    def test_single_step_mass(self):
        freq = ri.empirical_visitation([self.one_step(0, 0, 1)], 2, 1)
        expected = np.zeros((2, 1, 2))
        expected[0, 0, 1] = 1.0
        assert np.array_equal(freq, expected)

    def test_weight_linearity(self):
        a = self.one_step(0, 0, 1)
        two_unit = ri.empirical_visitation([a, a], 2, 1, weights=np.array([1.0, 1.0]))
        one_double = ri.empirical_visitation([a], 2, 1, weights=np.array([2.0]))
        assert np.allclose(two_unit, one_double)

    def test_weighted_entries(self):
        a, b = self.one_step(0, 0, 1), self.one_step(1, 0, 0)
        freq = ri.empirical_visitation([a, b], 2, 1, weights=np.array([0.8, 0.2]))
        assert freq[0, 0, 1] == pytest.approx(0.8)
        assert freq[1, 0, 0] == pytest.approx(0.2)

    def test_zero_weights_rejected(self):
        with pytest.raises(InvalidInputError):
            ri.empirical_visitation([self.one_step(0, 0, 1)], 2, 1, weights=np.zeros(1))


class TestPropagatePolicy:
    def test_deterministic_cycle(self):
        trans = np.zeros((2, 1, 2))
        trans[0, 0, 1] = 1.0
        trans[1, 0, 0] = 1.0
        mdp = ri.TabularMdp(n_states=2, n_actions=1, transition=trans, discount=0.9, horizon=2)
        freq = ri.propagate_policy(mdp, np.ones((2, 1)), np.array([1.0, 0.0]))
        assert freq[0, 0, 1] == pytest.approx(1.0)
        assert freq[1, 0, 0] == pytest.approx(1.0)

    def test_mass_equals_horizon(self):
        mdp = make_random_mdp(41, 5, 3, horizon=13)
        rng = np.random.default_rng(42)
        policy = rng.random((5, 3))
        policy /= policy.sum(axis=1, keepdims=True)
        start = rng.random(5)
        start /= start.sum()
        freq = ri.propagate_policy(mdp, policy, start)
        assert freq.sum() == pytest.approx(mdp.horizon, abs=1e-9)

    def test_matches_sampled_visitation(self):
        mdp = make_random_mdp(43, 5, 2, horizon=4)
        rng = np.random.default_rng(44)
        policy = rng.random((5, 2))
        policy /= policy.sum(axis=1, keepdims=True)
        start = rng.random(5)
        start /= start.sum()
        exact = ri.propagate_policy(mdp, policy, start)

        n = 1_000_000
        rollouts = ri.sample_trajectories(mdp, policy, start, n, rng_seed=45)
        # per-trajectory count matrix, for an honest 3-sigma bound per entry
        n_entries = 5 * 2 * 5
        counts = np.zeros((n, n_entries), dtype=np.int8)
        for offset, traj_list in ((0, rollouts),):
            states = np.concatenate([t.states for t in traj_list])
            actions = np.concatenate([t.actions for t in traj_list])
            nxt = np.concatenate([t.next_states() for t in traj_list])
            idx = np.repeat(np.arange(n), mdp.horizon)
            flat = (states * 2 + actions) * 5 + nxt
            np.add.at(counts, (idx, flat), 1)
        mean = counts.mean(axis=0)
        sigma = counts.std(axis=0, ddof=1) / np.sqrt(n)
        bound = 3.0 * sigma + 1e-9
        assert np.all(np.abs(mean - exact.ravel()) <= bound)


class TestTrajectoryLogLikelihood:
    def test_consistent_deterministic_policy(self):
        traj = ri.Trajectory(states=np.array([0, 1]), actions=np.array([0, 0]), terminal=0)
        policy = np.array([[1.0, 0.0], [1.0, 0.0]])
        assert ri.trajectory_log_policy_likelihood(traj, policy) == 0.0

    def test_uniform_policy(self):
        traj = ri.Trajectory(states=np.array([0, 0, 0]), actions=np.array([1, 2, 3]), terminal=0)
        policy = np.full((1, 4), 0.25)
        value = ri.trajectory_log_policy_likelihood(traj, policy)
        assert value == pytest.approx(3.0 * np.log(0.25), abs=1e-12)

    def test_zero_probability_clamped(self):
        traj = ri.Trajectory(states=np.array([0]), actions=np.array([1]), terminal=0)
        policy = np.array([[1.0, 0.0]])
        value = ri.trajectory_log_policy_likelihood(traj, policy)
        assert value == pytest.approx(np.log(1e-300))


class TestDatasetFileFormat:
    def test_round_trip(self, tmp_path):
        mdp = make_random_mdp(51, 4, 3, horizon=5)
        rollouts = ri.sample_trajectories(mdp, ri.uniform_policy(mdp), np.full(4, 0.25),
                                          20, rng_seed=2, task_label=2)
        path = tmp_path / "data.jsonl"
        ri.save_dataset(path, rollouts)
        loaded = ri.load_dataset(path, 4, 3)
        assert len(loaded) == 20
        for a, b in zip(rollouts, loaded):
            assert np.array_equal(a.states, b.states)
            assert np.array_equal(a.actions, b.actions)
            assert a.terminal == b.terminal
            assert a.task == b.task

    def test_out_of_range_rejected(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"id":0,"task":null,"steps":[[0,5]],"terminal":0}\n')
        with pytest.raises(ValidationError):
            ri.load_dataset(path, 4, 3)
        path.write_text('{"id":0,"task":null,"steps":[[9,0]],"terminal":0}\n')
        with pytest.raises(ValidationError):
            ri.load_dataset(path, 4, 3)
        path.write_text('{"id":0,"task":null,"steps":[[0,0]],"terminal":9}\n')
        with pytest.raises(ValidationError):
            ri.load_dataset(path, 4, 3)

    def test_horizon_cap_enforced(self, tmp_path):
        path = tmp_path / "long.jsonl"
        steps = [[0, 0]] * 6
        path.write_text(f'{{"id":0,"task":null,"steps":{steps},"terminal":0}}\n'.replace("'", '"'))
        with pytest.raises(ValidationError):
            ri.load_dataset(path, 4, 3, horizon=5)


class TestTabularMdpValidation:
    def test_bad_rows_rejected(self):
        trans = np.ones((2, 1, 2))
        with pytest.raises(InvalidInputError):
            ri.TabularMdp(n_states=2, n_actions=1, transition=trans, discount=0.9, horizon=2)

    def test_bad_discount_rejected(self):
        trans = np.full((1, 1, 1), 1.0)
        for gamma in (0.0, -0.1, 1.5):
            with pytest.raises(InvalidInputError):
                ri.TabularMdp(n_states=1, n_actions=1, transition=trans,
                              discount=gamma, horizon=2)
