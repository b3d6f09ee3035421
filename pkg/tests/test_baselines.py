"""Trajectory featurization, K-means and GMM clustering baselines."""

import numpy as np
import pytest

import radar_irl as ri
from radar_irl.baselines import featurize, gmm, kmeans
from radar_irl.errors import InvalidInputError


def traj(states, actions):
    return ri.Trajectory(states=np.asarray(states), actions=np.asarray(actions), terminal=0)


class TestFeaturize:
    def test_single_action_one_hot(self):
        t = traj([0, 1, 2], [1, 1, 1])
        feats = featurize([t], n_states=4, n_actions=3)
        assert np.array_equal(feats[0, :3], [0.0, 1.0, 0.0])

    def test_identical_trajectories_identical_rows(self):
        t = traj([0, 1], [0, 1])
        feats = featurize([t, t], 3, 2)
        assert np.array_equal(feats[0], feats[1])

    def test_blocks_normalised(self):
        rng = np.random.default_rng(0)
        data = [traj(rng.integers(0, 5, 7), rng.integers(0, 3, 7)) for _ in range(10)]
        feats = featurize(data, 5, 3)
        assert np.allclose(feats[:, :3].sum(axis=1), 1.0, atol=1e-9)
        assert np.allclose(feats[:, 3:].sum(axis=1), 1.0, atol=1e-9)
        assert np.allclose(feats.sum(axis=1), 2.0, atol=1e-9)


def separable_blobs(seed, n_per=40, d=6, spread=0.05, distance=10.0):
    rng = np.random.default_rng(seed)
    a = rng.normal(0.0, spread, size=(n_per, d))
    b = rng.normal(0.0, spread, size=(n_per, d)) + distance
    x = np.vstack([a, b])
    labels = np.array([0] * n_per + [1] * n_per)
    return x, labels


class TestKmeans:
    def test_separable_clusters_exact(self):
        x, truth = separable_blobs(1)
        labels, _ = kmeans(x, 2, seed=0)
        assert ri.ari(truth, labels) == 1.0

    def test_k_one(self):
        x, _ = separable_blobs(2)
        labels, centroids = kmeans(x, 1, seed=0)
        assert np.all(labels == 0)
        assert np.allclose(centroids[0], x.mean(axis=0))

    def test_duplicated_dataset_same_labels(self):
        x, _ = separable_blobs(3, n_per=15)
        labels, _ = kmeans(x, 2, seed=4)
        labels2, _ = kmeans(np.vstack([x, x]), 2, seed=4)
        # same partition structure on the duplicated block, up to relabeling
        assert ri.ari(np.concatenate([labels, labels]), labels2) == 1.0

    def test_k_exceeds_rows(self):
        with pytest.raises(InvalidInputError):
            kmeans(np.zeros((3, 2)), 4, seed=0)

    def test_deterministic(self):
        x, _ = separable_blobs(5)
        a, ca = kmeans(x, 2, seed=9, n_restarts=5)
        b, cb = kmeans(x, 2, seed=9, n_restarts=5)
        assert np.array_equal(a, b)
        assert np.array_equal(ca, cb)

    def test_inertia_non_increasing_per_lloyd_iteration(self):
        from radar_irl.baselines import _kmeans_pp_init, _lloyd

        rng = np.random.default_rng(12)
        x = rng.random((80, 4))
        init = _kmeans_pp_init(x, 4, rng)
        _, _, _, trace = _lloyd(x, init)
        assert np.all(np.diff(trace) <= 1e-9)


class TestGmm:
    def test_separable_blobs_exact(self):
        x, truth = separable_blobs(7)
        labels, _ = gmm(x, 2, seed=0)
        assert ri.ari(truth, labels) == 1.0

    def test_k_one_matches_sample_moments(self):
        x, _ = separable_blobs(8, n_per=25)
        labels, params = gmm(x, 1, seed=0, n_restarts=1)
        assert np.all(labels == 0)
        assert np.allclose(params["means"][0], x.mean(axis=0), atol=1e-9)
        assert np.allclose(params["variances"][0],
                           np.maximum(x.var(axis=0), 1e-6), atol=1e-9)

    def test_posteriors_sum_to_one(self):
        x, _ = separable_blobs(9)
        _, params = gmm(x, 2, seed=1)
        assert np.allclose(params["responsibilities"].sum(axis=1), 1.0, atol=1e-9)

    def test_log_likelihood_non_decreasing(self):
        x, _ = separable_blobs(10, spread=1.0, distance=3.0)
        _, params = gmm(x, 2, seed=2)
        ll = np.array(params["log_likelihood"])
        assert np.all(np.diff(ll) >= -1e-8)

    def test_deterministic(self):
        x, _ = separable_blobs(11)
        a, pa = gmm(x, 2, seed=3)
        b, pb = gmm(x, 2, seed=3)
        assert np.array_equal(a, b)
        assert np.array_equal(pa["means"], pb["means"])
