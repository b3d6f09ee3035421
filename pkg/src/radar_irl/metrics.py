"""Clustering and policy-recovery metrics: ARI, NMI, APE, EVD."""

from __future__ import annotations

from typing import Sequence, Union

import numpy as np

from .errors import InvalidInputError
from .mdp import TabularMdp, Trajectory, policy_value


def _contingency(truth: np.ndarray, pred: np.ndarray) -> np.ndarray:
    _, ti = np.unique(truth, return_inverse=True)
    _, pi = np.unique(pred, return_inverse=True)
    table = np.zeros((ti.max() + 1, pi.max() + 1), dtype=np.int64)
    np.add.at(table, (ti, pi), 1)
    return table


def _check_labels(truth, pred):
    t = np.asarray(truth).ravel()
    p = np.asarray(pred).ravel()
    if t.shape != p.shape:
        raise InvalidInputError(f"label lengths differ: {t.shape[0]} vs {p.shape[0]}")
    if t.size < 1:
        raise InvalidInputError("labels must be nonempty")
    return t, p


def ari(truth, pred) -> float:
    """Adjusted Rand index between two labelings (permutation invariant)."""
    t, p = _check_labels(truth, pred)
    table = _contingency(t, p)
    n = t.size

    def comb2(x):
        return x * (x - 1) / 2.0

    sum_cells = comb2(table).sum()
    sum_rows = comb2(table.sum(axis=1)).sum()
    sum_cols = comb2(table.sum(axis=0)).sum()
    total = comb2(n)
    expected = sum_rows * sum_cols / total if total > 0 else 0.0
    max_index = (sum_rows + sum_cols) / 2.0
    if max_index == expected:
        return 1.0
    return float((sum_cells - expected) / (max_index - expected))


def nmi(truth, pred) -> float:
    """Normalized mutual information 2 I(Z; Zhat) / (H(Z) + H(Zhat)).

    Defined as 0 when the entropies sum to zero or the labelings carry no
    mutual information.
    """
    t, p = _check_labels(truth, pred)
    table = _contingency(t, p).astype(float)
    n = t.size
    pij = table / n
    pi_ = pij.sum(axis=1)
    pj_ = pij.sum(axis=0)

    nz = pij > 0
    outer = pi_[:, None] * pj_[None, :]
    info = float((pij[nz] * np.log(pij[nz] / outer[nz])).sum())
    h_t = float(-(pi_[pi_ > 0] * np.log(pi_[pi_ > 0])).sum())
    h_p = float(-(pj_[pj_ > 0] * np.log(pj_[pj_ > 0])).sum())
    if h_t + h_p <= 0.0 or info <= 0.0:
        return 0.0
    return min(1.0, 2.0 * info / (h_t + h_p))


def ape(dataset: Sequence[Trajectory],
        policies: Union[np.ndarray, Sequence[np.ndarray]]) -> float:
    """Action prediction error: fraction of observed steps where the greedy
    action of the assigned policy differs from the logged action.

    `policies` is either one policy shared by every trajectory or a sequence
    with one policy per trajectory.  Greedy ties resolve to the lowest index.
    """
    if len(dataset) == 0:
        raise InvalidInputError("dataset must be nonempty")
    shared = isinstance(policies, np.ndarray)
    if not shared and len(policies) != len(dataset):
        raise InvalidInputError("need one policy per trajectory")
    errors = 0
    total = 0
    for i, traj in enumerate(dataset):
        policy = policies if shared else policies[i]
        predicted = np.argmax(policy[traj.states], axis=1)
        errors += int((predicted != traj.actions).sum())
        total += len(traj)
    return errors / total


def evd(mdp: TabularMdp, true_reward: np.ndarray, expert_policy: np.ndarray,
        learned_policy: np.ndarray, start_dist: np.ndarray) -> float:
    """Expected value difference on the true reward, by exact DP."""
    v_expert = policy_value(mdp, true_reward, expert_policy, start_dist)
    v_learned = policy_value(mdp, true_reward, learned_policy, start_dist)
    return abs(v_expert - v_learned)
