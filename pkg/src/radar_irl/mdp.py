"""Enumerated-state MDP core: exact dynamic programming, trajectory sampling,
transition estimation and visitation-frequency propagation.

All operations are pure functions of their inputs (plus an explicit seed).
Reward tensors are dense float arrays of shape (S, A, S'); policies are row
stochastic (S, A) arrays; value tables are (S,) arrays.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ConvergenceError, InvalidInputError, ValidationError

LOG_PROB_FLOOR = 1e-300  # probabilities are clamped here before log

DEFAULT_VI_TOL = 1e-6
DEFAULT_VI_SWEEP_CAP = 10_000
DEFAULT_SMOOTHING = 1e-3


@dataclass(frozen=True)
class TabularMdp:
    """Finite MDP with dense transition model and fixed-length episodes.

    transition[s, a, s'] is the probability of landing in s' after taking
    action a in state s; every (s, a) row must sum to 1.  `horizon` is the
    episode length used by sampling, visitation propagation and finite
    horizon policy evaluation.
    """

    n_states: int
    n_actions: int
    transition: np.ndarray
    discount: float
    horizon: int

    def __post_init__(self):
        if self.n_states < 1 or self.n_actions < 1:
            raise InvalidInputError("n_states and n_actions must be >= 1")
        if not (0.0 < self.discount <= 1.0):
            raise InvalidInputError(f"discount must be in (0, 1], got {self.discount}")
        if self.horizon < 1:
            raise InvalidInputError(f"horizon must be >= 1, got {self.horizon}")
        t = self.transition
        if t.shape != (self.n_states, self.n_actions, self.n_states):
            raise InvalidInputError(f"transition shape {t.shape} does not match dims")
        if np.any(t < 0.0):
            raise InvalidInputError("transition entries must be >= 0")
        row_sums = t.sum(axis=2)
        if not np.allclose(row_sums, 1.0, rtol=0.0, atol=1e-9):
            worst = float(np.abs(row_sums - 1.0).max())
            raise InvalidInputError(f"transition rows must sum to 1 (worst error {worst:g})")


@dataclass(frozen=True)
class Trajectory:
    """Fixed-length episode: per-step state/action indices plus terminal state.

    `task` is an optional ground-truth label carried along for evaluation only.
    """

    states: np.ndarray
    actions: np.ndarray
    terminal: int
    task: Optional[int] = None

    def __post_init__(self):
        if len(self.states) != len(self.actions):
            raise InvalidInputError("states and actions must have equal length")
        if len(self.states) < 1:
            raise InvalidInputError("trajectory must have at least one step")

    def __len__(self) -> int:
        return len(self.states)

    @property
    def steps(self):
        return list(zip(self.states.tolist(), self.actions.tolist()))

    def next_states(self) -> np.ndarray:
        """Successor state of each step (the last step ends in `terminal`)."""
        return np.concatenate([self.states[1:], [self.terminal]]).astype(np.int64)

    def dedup_key(self) -> tuple:
        return (self.states.tobytes(), self.actions.tobytes(), self.terminal)


def validate_policy(policy: np.ndarray, mdp: TabularMdp) -> None:
    if policy.shape != (mdp.n_states, mdp.n_actions):
        raise InvalidInputError(f"policy shape {policy.shape} does not match MDP dims")
    if np.any(policy < 0.0) or not np.allclose(policy.sum(axis=1), 1.0, atol=1e-9):
        raise InvalidInputError("policy rows must be distributions")


def uniform_policy(mdp: TabularMdp) -> np.ndarray:
    return np.full((mdp.n_states, mdp.n_actions), 1.0 / mdp.n_actions)


def greedy_policy_from_q(q: np.ndarray) -> np.ndarray:
    """One-hot greedy rows; ties broken by lowest action index."""
    policy = np.zeros_like(q)
    policy[np.arange(q.shape[0]), np.argmax(q, axis=1)] = 1.0
    return policy


def boltzmann_policy(q: np.ndarray, beta: float) -> np.ndarray:
    """Row-wise softmax of beta * Q with max subtraction for stability."""
    z = beta * q
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def expected_immediate_reward(mdp: TabularMdp, reward: np.ndarray) -> np.ndarray:
    """RP[s, a] = sum_s' P(s'|s,a) R(s,a,s')."""
    return np.einsum("saz,saz->sa", mdp.transition, reward)


def value_iteration(
    mdp: TabularMdp,
    reward: np.ndarray,
    tol: float = DEFAULT_VI_TOL,
    max_sweeps: int = DEFAULT_VI_SWEEP_CAP,
    v_init: Optional[np.ndarray] = None,
):
    """Synchronous value iteration to a sup-norm tolerance.

    Returns (V, Q, policy) where the policy is greedy one-hot with ties
    broken by lowest action index.  Raises ConvergenceError (carrying the
    last delta) if `max_sweeps` Jacobi sweeps do not reach `tol`.
    """
    if tol <= 0.0:
        raise InvalidInputError("tol must be positive")
    if not np.all(np.isfinite(reward)):
        raise InvalidInputError("reward tensor contains non-finite entries")
    rp = expected_immediate_reward(mdp, reward)
    v = np.zeros(mdp.n_states) if v_init is None else np.asarray(v_init, dtype=float).copy()
    delta = np.inf
    for _ in range(max_sweeps):
        q = rp + mdp.discount * (mdp.transition @ v)
        v_new = q.max(axis=1)
        delta = float(np.abs(v_new - v).max())
        v = v_new
        if delta < tol:
            q = rp + mdp.discount * (mdp.transition @ v)
            return v, q, greedy_policy_from_q(q)
    raise ConvergenceError(
        f"value iteration did not reach tol={tol:g} in {max_sweeps} sweeps", last_delta=delta
    )


def soft_value_iteration(mdp: TabularMdp, reward: np.ndarray, beta: float, n_sweeps: int):
    """Fixed number of synchronous soft backups with Boltzmann bootstrapping.

    Starts from Q = 0 and a uniform policy; each sweep replaces the hard max
    of value iteration by the expectation under the current Boltzmann policy,
    then refreshes the policy as softmax(beta * Q).  Returns (Q, policy).
    """
    if beta < 0.0:
        raise InvalidInputError("beta must be >= 0")
    if n_sweeps < 1:
        raise InvalidInputError("n_sweeps must be >= 1")
    qs, policies = _soft_backup_stack(mdp, reward, beta, n_sweeps)
    return qs[-1], policies[-1]


def _soft_backup_stack(mdp: TabularMdp, reward: np.ndarray, beta: float, n_sweeps: int):
    """All intermediate (Q_t, pi_t) of the soft backup recursion.

    qs[t] is Q after t sweeps (qs[0] = 0); policies[t] = softmax(beta*qs[t])
    except policies[0] which is uniform.  Kept separate so that training can
    differentiate through the full recursion.
    """
    rp = expected_immediate_reward(mdp, reward)
    q = np.zeros((mdp.n_states, mdp.n_actions))
    pi = uniform_policy(mdp)
    qs, policies = [q], [pi]
    for _ in range(n_sweeps):
        v = (pi * q).sum(axis=1)
        q = rp + mdp.discount * (mdp.transition @ v)
        pi = boltzmann_policy(q, beta)
        qs.append(q)
        policies.append(pi)
    return qs, policies


def policy_value(
    mdp: TabularMdp, reward: np.ndarray, policy: np.ndarray, start_dist: np.ndarray
) -> float:
    """Exact finite-horizon discounted return of `policy` from `start_dist`.

    Computed by backward dynamic programming over `mdp.horizon` steps; no
    sampling is involved.
    """
    validate_policy(policy, mdp)
    start = np.asarray(start_dist, dtype=float)
    if start.shape != (mdp.n_states,) or abs(start.sum() - 1.0) > 1e-9:
        raise InvalidInputError("start_dist must be a distribution over states")
    rp = expected_immediate_reward(mdp, reward)
    r_pi = (policy * rp).sum(axis=1)
    m_pi = np.einsum("sa,saz->sz", policy, mdp.transition)
    w = np.zeros(mdp.n_states)
    for _ in range(mdp.horizon):
        w = r_pi + mdp.discount * (m_pi @ w)
    return float(start @ w)


def _sample_rows(cdf_rows: np.ndarray, u: np.ndarray) -> np.ndarray:
    # inverse-CDF sampling, one row per sample
    idx = (cdf_rows < u[:, None]).sum(axis=1)
    return np.minimum(idx, cdf_rows.shape[1] - 1)


def sample_trajectories(
    mdp: TabularMdp,
    policy: np.ndarray,
    start_dist: np.ndarray,
    n: int,
    rng_seed: int,
    task_label: Optional[int] = None,
) -> list[Trajectory]:
    """Sample `n` fixed-length episodes; bit-reproducible for a given seed."""
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    validate_policy(policy, mdp)
    start = np.asarray(start_dist, dtype=float)
    if start.shape != (mdp.n_states,) or abs(start.sum() - 1.0) > 1e-9:
        raise InvalidInputError("start_dist must be a distribution over states")
    rng = np.random.default_rng(rng_seed)
    policy_cdf = np.cumsum(policy, axis=1)
    start_cdf = np.cumsum(start)

    states = _sample_rows(np.broadcast_to(start_cdf, (n, mdp.n_states)), rng.random(n))
    state_hist = np.empty((mdp.horizon, n), dtype=np.int64)
    action_hist = np.empty((mdp.horizon, n), dtype=np.int64)
    for t in range(mdp.horizon):
        actions = _sample_rows(policy_cdf[states], rng.random(n))
        trans_cdf = np.cumsum(mdp.transition[states, actions], axis=1)
        nxt = _sample_rows(trans_cdf, rng.random(n))
        state_hist[t] = states
        action_hist[t] = actions
        states = nxt
    return [
        Trajectory(
            states=state_hist[:, i].copy(),
            actions=action_hist[:, i].copy(),
            terminal=int(states[i]),
            task=task_label,
        )
        for i in range(n)
    ]


def dataset_step_arrays(dataset: Sequence[Trajectory]):
    """Concatenated (states, actions, next_states, trajectory_index) arrays."""
    if len(dataset) == 0:
        raise InvalidInputError("dataset must be nonempty")
    states = np.concatenate([t.states for t in dataset]).astype(np.int64)
    actions = np.concatenate([t.actions for t in dataset]).astype(np.int64)
    nxt = np.concatenate([t.next_states() for t in dataset])
    traj_idx = np.concatenate(
        [np.full(len(t), i, dtype=np.int64) for i, t in enumerate(dataset)]
    )
    return states, actions, nxt, traj_idx


def estimate_transitions(
    dataset: Sequence[Trajectory],
    n_states: int,
    n_actions: int,
    smoothing: float = DEFAULT_SMOOTHING,
) -> np.ndarray:
    """Additively smoothed transition estimate from observed steps.

    Row (s, a) is (count(s,a,s') + smoothing) / (count(s,a) + smoothing * S);
    (s, a) pairs never visited fall back to the uniform distribution.
    """
    if len(dataset) == 0:
        raise InvalidInputError("dataset must be nonempty")
    if smoothing < 0.0:
        raise InvalidInputError("smoothing must be >= 0")
    s, a, z, _ = dataset_step_arrays(dataset)
    counts = np.zeros((n_states, n_actions, n_states))
    np.add.at(counts, (s, a, z), 1.0)
    row_totals = counts.sum(axis=2, keepdims=True)
    trans = np.empty_like(counts)
    denom = row_totals + smoothing * n_states
    with np.errstate(invalid="ignore", divide="ignore"):
        trans = (counts + smoothing) / denom
    unvisited = (row_totals == 0.0)[..., 0]
    trans[unvisited] = 1.0 / n_states
    return trans


def empirical_visitation(
    dataset: Sequence[Trajectory],
    n_states: int,
    n_actions: int,
    weights: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Weighted state-action-state visitation counts, normalised by total weight.

    freq(s,a,s') = sum_i w_i count_i(s,a,s') / sum_i w_i with default unit
    weights, so an unweighted dataset of fixed-length episodes has total mass
    equal to the horizon.
    """
    if len(dataset) == 0:
        raise InvalidInputError("dataset must be nonempty")
    if weights is None:
        w = np.ones(len(dataset))
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != (len(dataset),):
            raise InvalidInputError("weights length must match dataset")
        if np.any(w < 0.0):
            raise InvalidInputError("weights must be >= 0")
    total = w.sum()
    if total <= 0.0:
        raise InvalidInputError("weights must not all be zero")
    s, a, z, traj_idx = dataset_step_arrays(dataset)
    freq = np.zeros((n_states, n_actions, n_states))
    np.add.at(freq, (s, a, z), w[traj_idx])
    return freq / total


def propagate_policy(mdp: TabularMdp, policy: np.ndarray, start_dist: np.ndarray) -> np.ndarray:
    """Expected state-action-state visitation of `policy` over the horizon.

    Forward pass: d_0 = start_dist, d_{t+1}(s') = sum_{s,a} d_t(s) pi(a|s) P(s'|s,a);
    freq accumulates d_t(s) pi(a|s) P(s'|s,a) over t = 0..horizon-1, so the
    total mass equals the horizon.
    """
    validate_policy(policy, mdp)
    d = np.asarray(start_dist, dtype=float)
    if d.shape != (mdp.n_states,) or abs(d.sum() - 1.0) > 1e-9:
        raise InvalidInputError("start_dist must be a distribution over states")
    freq = np.zeros((mdp.n_states, mdp.n_actions, mdp.n_states))
    for _ in range(mdp.horizon):
        m = d[:, None] * policy
        freq += m[:, :, None] * mdp.transition
        d = np.einsum("sa,saz->z", m, mdp.transition)
    return freq


def trajectory_log_policy_likelihood(traj: Trajectory, policy: np.ndarray) -> float:
    """Sum of log pi(a|s) over the trajectory's steps, floored at 1e-300."""
    probs = policy[traj.states, traj.actions]
    return float(np.log(np.clip(probs, LOG_PROB_FLOOR, None)).sum())


# ---------------------------------------------------------------------------
# Trajectory dataset file format: JSON Lines, one trajectory per line.
# ---------------------------------------------------------------------------

def save_dataset(path, dataset: Sequence[Trajectory]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for i, traj in enumerate(dataset):
            rec = {
                "id": i,
                "task": None if traj.task is None else int(traj.task),
                "steps": [[int(s), int(a)] for s, a in zip(traj.states, traj.actions)],
                "terminal": int(traj.terminal),
            }
            fh.write(json.dumps(rec, separators=(",", ":")) + "\n")


def load_dataset(path, n_states: int, n_actions: int, horizon: Optional[int] = None):
    """Read a JSONL trajectory file, rejecting out-of-range indices."""
    dataset = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}:{line_no}: invalid JSON: {exc}") from exc
            steps = rec.get("steps")
            if not isinstance(steps, list) or len(steps) == 0:
                raise ValidationError(f"{path}:{line_no}: steps must be a nonempty list")
            arr = np.asarray(steps, dtype=np.int64)
            if arr.ndim != 2 or arr.shape[1] != 2:
                raise ValidationError(f"{path}:{line_no}: steps must be [s, a] pairs")
            states, actions = arr[:, 0], arr[:, 1]
            terminal = int(rec.get("terminal", -1))
            if np.any(states < 0) or np.any(states >= n_states) or not (0 <= terminal < n_states):
                raise ValidationError(f"{path}:{line_no}: state index out of range")
            if np.any(actions < 0) or np.any(actions >= n_actions):
                raise ValidationError(f"{path}:{line_no}: action index out of range")
            if horizon is not None and len(states) > horizon:
                raise ValidationError(f"{path}:{line_no}: trajectory longer than horizon")
            task = rec.get("task")
            dataset.append(
                Trajectory(
                    states=states,
                    actions=actions,
                    terminal=terminal,
                    task=None if task is None else int(task),
                )
            )
    return dataset
