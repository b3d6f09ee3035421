"""Non-IRL trajectory clustering baselines: histogram features, K-means and
a diagonal-covariance Gaussian mixture.

The featurization deliberately discards temporal order; these baselines see
only which actions and states a trajectory used, not why.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import InvalidInputError, NumericError
from .mdp import Trajectory

GMM_COV_FLOOR = 1e-6


def featurize(dataset: Sequence[Trajectory], n_states: int, n_actions: int) -> np.ndarray:
    """Per-trajectory [normalized action histogram | normalized state-visit
    histogram]; each block sums to 1, so rows sum to 2."""
    if len(dataset) == 0:
        raise InvalidInputError("dataset must be nonempty")
    feats = np.zeros((len(dataset), n_actions + n_states))
    for i, traj in enumerate(dataset):
        feats[i, :n_actions] = np.bincount(traj.actions, minlength=n_actions) / len(traj)
        feats[i, n_actions:] = np.bincount(traj.states, minlength=n_states) / len(traj)
    return feats


def _kmeans_pp_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centroids = np.empty((k, x.shape[1]))
    centroids[0] = x[rng.integers(n)]
    d2 = ((x - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            centroids[j] = x[rng.integers(n)]
            continue
        probs = d2 / total
        centroids[j] = x[np.searchsorted(np.cumsum(probs), rng.random())]
        d2 = np.minimum(d2, ((x - centroids[j]) ** 2).sum(axis=1))
    return centroids


def _lloyd(x: np.ndarray, centroids: np.ndarray, max_iters: int = 300):
    k = centroids.shape[0]
    labels = None
    inertia_trace = []
    for _ in range(max_iters):
        d2 = ((x[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_labels = d2.argmin(axis=1)
        inertia_trace.append(float(d2[np.arange(x.shape[0]), new_labels].sum()))
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for j in range(k):
            members = labels == j
            if members.any():
                centroids[j] = x[members].mean(axis=0)
            else:
                # re-seed an empty cluster from the farthest point
                far = d2.min(axis=1).argmax()
                centroids[j] = x[far]
    d2 = ((x[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    labels = d2.argmin(axis=1)
    inertia = float(d2[np.arange(x.shape[0]), labels].sum())
    return labels, centroids, inertia, inertia_trace


def kmeans(features: np.ndarray, k: int, seed: int, n_restarts: int = 10):
    """Lloyd's algorithm with k-means++ seeding, best inertia over restarts.

    Returns (labels, centroids).
    """
    x = np.asarray(features, dtype=float)
    if k < 1 or k > x.shape[0]:
        raise InvalidInputError(f"k={k} must be in [1, n_rows={x.shape[0]}]")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(n_restarts):
        init = _kmeans_pp_init(x, k, rng)
        labels, centroids, inertia, _ = _lloyd(x, init)
        if best is None or inertia < best[2]:
            best = (labels, centroids, inertia)
    return best[0], best[1]


def _gmm_em(x: np.ndarray, k: int, rng: np.random.Generator, max_iters: int = 200,
            tol: float = 1e-8):
    n, d = x.shape
    labels, centroids = kmeans(x, k, seed=int(rng.integers(2 ** 31)), n_restarts=3)
    means = centroids.copy()
    variances = np.empty((k, d))
    weights = np.empty(k)
    for j in range(k):
        members = labels == j
        weights[j] = max(members.sum(), 1) / n
        variances[j] = x[members].var(axis=0) + GMM_COV_FLOOR if members.any() else x.var(axis=0) + GMM_COV_FLOOR
    weights /= weights.sum()

    ll_history = []
    resp = None
    for _ in range(max_iters):
        # E-step in log space
        log_det = np.log(variances).sum(axis=1)
        diff2 = ((x[:, None, :] - means[None, :, :]) ** 2) / variances[None, :, :]
        log_prob = -0.5 * (diff2.sum(axis=2) + log_det[None, :] + d * np.log(2.0 * np.pi))
        log_weighted = log_prob + np.log(weights)[None, :]
        mx = log_weighted.max(axis=1, keepdims=True)
        log_norm = mx[:, 0] + np.log(np.exp(log_weighted - mx).sum(axis=1))
        ll = float(log_norm.sum())
        resp = np.exp(log_weighted - log_norm[:, None])
        ll_history.append(ll)
        if len(ll_history) > 1 and abs(ll_history[-1] - ll_history[-2]) < tol:
            break
        # M-step
        nk = resp.sum(axis=0)
        if np.any(nk <= 0.0):
            raise NumericError("GMM component lost all responsibility")
        weights = nk / n
        means = (resp.T @ x) / nk[:, None]
        variances = (resp.T @ (x * x)) / nk[:, None] - means ** 2
        variances = np.maximum(variances, GMM_COV_FLOOR)
    return resp, means, variances, weights, ll_history


def gmm(features: np.ndarray, k: int, seed: int, n_restarts: int = 10):
    """Diagonal-covariance Gaussian mixture fit by EM with k-means init.

    Returns (labels, params) where params is a dict with means, variances,
    weights, responsibilities and the per-step log-likelihood trace of the
    winning restart.
    """
    x = np.asarray(features, dtype=float)
    if k < 1 or k > x.shape[0]:
        raise InvalidInputError(f"k={k} must be in [1, n_rows={x.shape[0]}]")
    rng = np.random.default_rng(seed)
    best = None
    failures = 0
    for _ in range(n_restarts):
        try:
            resp, means, variances, weights, ll_history = _gmm_em(x, k, rng)
        except NumericError:
            failures += 1
            continue
        if best is None or ll_history[-1] > best[4][-1]:
            best = (resp, means, variances, weights, ll_history)
    if best is None:
        raise NumericError(f"all {failures} GMM restarts collapsed")
    resp, means, variances, weights, ll_history = best
    labels = resp.argmax(axis=1)
    params = {
        "means": means,
        "variances": variances,
        "weights": weights,
        "responsibilities": resp,
        "log_likelihood": ll_history,
    }
    return labels, params
