"""IRL trainers over dense (s, a, s') reward grids.

Three entry points:

* maxent_irl: gradient ascent on the maximum-entropy demonstration
  likelihood, where the output-space gradient is the gap between observed
  and policy-propagated visitation frequencies.
* ml_irl: gradient ascent on the direct action likelihood of a Boltzmann
  policy obtained from a fixed number of soft value-iteration sweeps; the
  gradient is propagated analytically through every sweep.
* em_multi_intention_irl: expectation-maximization over K reward networks
  with per-trajectory responsibilities, wrapping either base trainer.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field, asdict, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InvalidInputError, NumericError
from .mdp import (
    LOG_PROB_FLOOR,
    TabularMdp,
    Trajectory,
    _soft_backup_stack,
    dataset_step_arrays,
    empirical_visitation,
    propagate_policy,
    soft_value_iteration,
    value_iteration,
)
from .reward_model import (
    AdamState,
    TripleFeatureMap,
    apply_update,
    init_model,
)

COLLAPSE_PRIOR = 1e-6


@dataclass(frozen=True)
class IrlConfig:
    """Shared trainer knobs.

    n_outer_iters counts gradient steps for the single-intention trainers
    and EM rounds for the mixture trainer; n_inner_sweeps (None = horizon)
    is the soft value-iteration depth; `tolerance` doubles as the value
    iteration stopping tolerance and the EM improvement threshold.
    """

    n_outer_iters: int = 100
    n_inner_sweeps: Optional[int] = None
    beta: float = 1.0
    discount: float = 0.9
    tolerance: float = 1e-6
    learning_rate: float = 1e-2
    lr_decay: float = 0.0
    seed: int = 0
    hidden: tuple = (64, 64)
    m_step_iters: int = 20

    def __post_init__(self):
        if self.n_outer_iters < 1:
            raise InvalidInputError("n_outer_iters must be >= 1")
        if self.n_inner_sweeps is not None and self.n_inner_sweeps < 1:
            raise InvalidInputError("n_inner_sweeps must be >= 1")
        if self.beta < 0.0:
            raise InvalidInputError("beta must be >= 0")
        if not (0.0 < self.discount <= 1.0):
            raise InvalidInputError("discount must be in (0, 1]")

    def inner_sweeps(self, mdp: TabularMdp) -> int:
        return self.n_inner_sweeps if self.n_inner_sweeps is not None else mdp.horizon

    def lr_at(self, iteration: int) -> float:
        # harmonic decay; lr_decay = 0 keeps the rate constant
        return self.learning_rate / (1.0 + self.lr_decay * iteration)


@dataclass
class TrainReport:
    """Per-iteration training trace; list lengths equal the iteration count."""

    log_likelihood: list = field(default_factory=list)
    evd: list = field(default_factory=list)
    ape: list = field(default_factory=list)
    wall_ms: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    @property
    def n_iterations(self) -> int:
        return len(self.log_likelihood)

    def append(self, log_likelihood, wall_ms, metrics: Optional[dict] = None, **extra):
        metrics = metrics or {}
        self.log_likelihood.append(log_likelihood)
        self.evd.append(metrics.get("evd", float("nan")))
        self.ape.append(metrics.get("ape", float("nan")))
        self.wall_ms.append(wall_ms)
        for key, val in {**extra, **{k: v for k, v in metrics.items() if k not in ("evd", "ape")}}.items():
            self.extras.setdefault(key, []).append(val)


@dataclass
class MixtureModel:
    """K reward models with prior weights and per-trajectory responsibilities."""

    models: list
    priors: np.ndarray
    responsibilities: np.ndarray

    def __post_init__(self):
        if len(self.models) < 1:
            raise InvalidInputError("mixture needs at least one component")
        if abs(self.priors.sum() - 1.0) > 1e-9 or np.any(self.priors < 0.0):
            raise InvalidInputError("priors must be a distribution")
        if self.responsibilities.ndim != 2 or self.responsibilities.shape[1] != len(self.models):
            raise InvalidInputError("responsibility matrix shape mismatch")
        rows = self.responsibilities.sum(axis=1)
        if self.responsibilities.size and not np.allclose(rows, 1.0, atol=1e-9):
            raise InvalidInputError("responsibility rows must sum to 1")

    @property
    def k(self) -> int:
        return len(self.models)


class _StepIndex:
    """Flattened step arrays for fast per-trajectory likelihood gathers."""

    def __init__(self, dataset: Sequence[Trajectory]):
        self.n_traj = len(dataset)
        self.states, self.actions, self.next_states, self.traj_idx = dataset_step_arrays(dataset)
        self.start_states = np.array([t.states[0] for t in dataset], dtype=np.int64)

    def pair_counts(self, n_states, n_actions, weights: np.ndarray) -> np.ndarray:
        counts = np.zeros((n_states, n_actions))
        np.add.at(counts, (self.states, self.actions), weights[self.traj_idx])
        return counts

    def per_traj_loglik(self, policy: np.ndarray) -> np.ndarray:
        logp = np.log(np.clip(policy[self.states, self.actions], LOG_PROB_FLOOR, None))
        return np.bincount(self.traj_idx, weights=logp, minlength=self.n_traj)

    def start_distribution(self, n_states: int, weights: np.ndarray) -> np.ndarray:
        d0 = np.zeros(n_states)
        np.add.at(d0, self.start_states, weights)
        return d0 / d0.sum()


def _normalize_weights(dataset, traj_weights) -> np.ndarray:
    if traj_weights is None:
        w = np.ones(len(dataset))
    else:
        w = np.asarray(traj_weights, dtype=float)
        if w.shape != (len(dataset),):
            raise InvalidInputError("traj_weights length must match dataset")
        if np.any(w < 0.0) or w.sum() <= 0.0:
            raise InvalidInputError("traj_weights must be nonnegative with positive sum")
    return w / w.sum()


def compute_trajectory_weights(dataset: Sequence[Trajectory]):
    """Deduplicate a dataset into (unique trajectories, occurrence frequencies).

    Frequencies sum to 1 over the unique trajectories.
    """
    if len(dataset) == 0:
        raise InvalidInputError("dataset must be nonempty")
    uniques: list = []
    index: dict = {}
    counts: list = []
    for traj in dataset:
        key = traj.dedup_key()
        if key in index:
            counts[index[key]] += 1
        else:
            index[key] = len(uniques)
            uniques.append(traj)
            counts.append(1)
    weights = np.asarray(counts, dtype=float) / len(dataset)
    return uniques, weights


def _weighted_mean_loglik(step_index: _StepIndex, policy: np.ndarray, weights: np.ndarray) -> float:
    return float(weights @ step_index.per_traj_loglik(policy))


def _fit_maxent(mdp, dataset, model, fmap, config, weights, opt, eval_fn, stop_fn):
    step_index = _StepIndex(dataset)
    d_obs = empirical_visitation(dataset, mdp.n_states, mdp.n_actions, weights=weights)
    start_dist = step_index.start_distribution(mdp.n_states, weights)
    n_inner = config.inner_sweeps(mdp)

    report = TrainReport()
    v_warm = None
    best = None  # (gap_l1, model, opt)

    def describe(current_model):
        nonlocal v_warm
        rewards = fmap.rewards(current_model)
        # expected visitation under the Boltzmann policy of the current
        # reward: the smooth matching distribution (beta=1 corresponds to the
        # max-entropy trajectory distribution); a one-hot greedy policy
        # cannot absorb demonstration noise and orbits instead of converging
        _, soft_policy = soft_value_iteration(mdp, rewards, config.beta, n_inner)
        d_pi = propagate_policy(mdp, soft_policy, start_dist)
        gap = d_obs - d_pi
        if not np.all(np.isfinite(gap)):
            raise NumericError("non-finite visitation gap")
        loglik = _weighted_mean_loglik(step_index, soft_policy, weights)
        metrics = {}
        if eval_fn is not None:
            v_warm, _, greedy = value_iteration(mdp, rewards, tol=config.tolerance,
                                                v_init=v_warm)
            metrics = eval_fn(rewards, greedy)
        return gap, loglik, metrics

    # rows 0..N: row i describes the model after i updates
    for it in range(config.n_outer_iters + 1):
        tic = time.perf_counter()
        gap, loglik, metrics = describe(model)
        gap_l1 = float(np.abs(gap).sum())
        if best is None or gap_l1 < best[0]:
            best = (gap_l1, model, opt)
        wall_ms = (time.perf_counter() - tic) * 1e3
        report.append(loglik, wall_ms, metrics, visitation_gap_l1=gap_l1)
        if (stop_fn is not None and stop_fn(report)) or it == config.n_outer_iters:
            break
        grads = fmap.param_grads(model, -gap)
        model, opt = apply_update(model, grads, replace(opt, lr=config.lr_at(it)))
    gap_l1, model, opt = best
    if gap_l1 < report.extras["visitation_gap_l1"][-1]:
        tic = time.perf_counter()
        gap, loglik, metrics = describe(model)
        wall_ms = (time.perf_counter() - tic) * 1e3
        report.append(loglik, wall_ms, metrics, visitation_gap_l1=float(np.abs(gap).sum()))
    return model, opt, report


def maxent_irl(
    mdp: TabularMdp,
    dataset: Sequence[Trajectory],
    model,
    fmap: TripleFeatureMap,
    config: IrlConfig,
    traj_weights: Optional[np.ndarray] = None,
    eval_fn: Optional[Callable] = None,
    stop_fn: Optional[Callable] = None,
):
    """Deep maximum-entropy IRL by visitation matching.

    Each outer iteration evaluates the reward grid, computes the expected
    visitation of the current reward's Boltzmann policy from the dataset's
    empirical start distribution, and ascends along
    (D_obs - D_pi) dR/dtheta.  The returned model is the iterate with the
    smallest L1 visitation gap (the gradient-norm proxy), and the report's
    last row describes exactly that model; with the smooth matching
    distribution this is usually just the final iterate.  The report also
    records the weighted mean per-trajectory log-likelihood under the
    Boltzmann policy and any eval_fn metrics.
    """
    if len(dataset) == 0:
        raise InvalidInputError("dataset must be nonempty")
    weights = _normalize_weights(dataset, traj_weights)
    opt = AdamState.for_model(model, config.learning_rate)
    model, _, report = _fit_maxent(mdp, dataset, model, fmap, config, weights, opt,
                                   eval_fn, stop_fn)
    return model, report


def _soft_backup_grad(mdp, qs, policies, beta, g_final):
    """Sum over sweeps of dLoss/dQ_t, backpropagated through the recursion.

    Returns the (S, A) accumulation whose product with P gives dLoss/dR.
    """
    g = g_final
    g_sum = np.zeros_like(g_final)
    for t in range(len(qs) - 1, 0, -1):
        g_sum += g
        if t - 1 == 0:
            break
        h = mdp.discount * np.einsum("saz,sa->z", mdp.transition, g)
        q_prev, pi_prev = qs[t - 1], policies[t - 1]
        v_prev = (pi_prev * q_prev).sum(axis=1, keepdims=True)
        g = h[:, None] * pi_prev * (1.0 + beta * (q_prev - v_prev))
    return g_sum


def _fit_ml(mdp, dataset, model, fmap, config, weights, opt, eval_fn, stop_fn):
    step_index = _StepIndex(dataset)
    counts = step_index.pair_counts(mdp.n_states, mdp.n_actions, weights)
    counts_per_state = counts.sum(axis=1, keepdims=True)
    n_inner = config.inner_sweeps(mdp)
    beta = config.beta

    report = TrainReport()
    v_warm = None
    # rows 0..N: row i describes the model after i updates
    for it in range(config.n_outer_iters + 1):
        tic = time.perf_counter()
        rewards = fmap.rewards(model)
        qs, policies = _soft_backup_stack(mdp, rewards, beta, n_inner)
        pi_final = policies[-1]
        loglik = float(
            (counts * np.log(np.clip(pi_final, LOG_PROB_FLOOR, None))).sum()
        )
        metrics = {}
        if eval_fn is not None:
            v_warm, _, greedy = value_iteration(mdp, rewards, tol=config.tolerance, v_init=v_warm)
            metrics = eval_fn(rewards, greedy)
        wall_ms = (time.perf_counter() - tic) * 1e3
        report.append(loglik, wall_ms, metrics)
        if (stop_fn is not None and stop_fn(report)) or it == config.n_outer_iters:
            break
        # d(-loglik)/dQ_final of the softmax cross-entropy
        g_final = beta * (counts_per_state * pi_final - counts)
        g_sum = _soft_backup_grad(mdp, qs, policies, beta, g_final)
        d_reward = g_sum[:, :, None] * mdp.transition
        grads = fmap.param_grads(model, d_reward)
        model, opt = apply_update(model, grads, replace(opt, lr=config.lr_at(it)))
    return model, opt, report


def ml_irl(
    mdp: TabularMdp,
    dataset: Sequence[Trajectory],
    model,
    fmap: TripleFeatureMap,
    config: IrlConfig,
    traj_weights: Optional[np.ndarray] = None,
    eval_fn: Optional[Callable] = None,
    stop_fn: Optional[Callable] = None,
):
    """Deep maximum-likelihood IRL through soft value iteration.

    The loss is the negative weighted log-likelihood of observed actions
    under the Boltzmann policy produced by `n_inner_sweeps` soft backups;
    gradients flow through the entire Q recursion.  When traj_weights is
    None, trajectories are deduplicated and weighted by occurrence frequency.
    """
    if len(dataset) == 0:
        raise InvalidInputError("dataset must be nonempty")
    if traj_weights is None:
        dataset, weights = compute_trajectory_weights(dataset)
    else:
        weights = _normalize_weights(dataset, traj_weights)
    opt = AdamState.for_model(model, config.learning_rate)
    model, _, report = _fit_ml(mdp, dataset, model, fmap, config, weights, opt,
                               eval_fn, stop_fn)
    return model, report


_BASE_TRAINERS = {"maxent": _fit_maxent, "ml": _fit_ml}


def _component_policies(models, mdp, fmap, config):
    n_inner = config.inner_sweeps(mdp)
    out = []
    for model in models:
        rewards = fmap.rewards(model)
        _, policy = soft_value_iteration(mdp, rewards, config.beta, n_inner)
        out.append(policy)
    return out


def _loglik_matrix(models, mdp, fmap, config, step_index: _StepIndex) -> np.ndarray:
    cols = [step_index.per_traj_loglik(pi)
            for pi in _component_policies(models, mdp, fmap, config)]
    return np.stack(cols, axis=1)


def _responsibilities_from_loglik(priors: np.ndarray, loglik: np.ndarray):
    with np.errstate(divide="ignore"):
        log_num = np.log(priors)[None, :] + loglik
    mx = log_num.max(axis=1, keepdims=True)
    if not np.all(np.isfinite(mx)):
        bad = int(np.flatnonzero(~np.isfinite(mx[:, 0]))[0])
        raise NumericError(f"responsibility row for trajectory {bad} is degenerate")
    log_norm = mx[:, 0] + np.log(np.exp(log_num - mx).sum(axis=1))
    resp = np.exp(log_num - log_norm[:, None])
    return resp, log_norm


def responsibilities(
    mixture: MixtureModel,
    dataset: Sequence[Trajectory],
    mdp: TabularMdp,
    fmap: TripleFeatureMap,
    config: IrlConfig,
) -> np.ndarray:
    """Posterior component membership of each trajectory.

    Uses policy-product likelihoods from each component's Boltzmann policy;
    shared transition factors cancel in the ratio, so they are omitted.
    Computed in log space with max subtraction.
    """
    step_index = _StepIndex(dataset)
    loglik = _loglik_matrix(mixture.models, mdp, fmap, config, step_index)
    resp, _ = _responsibilities_from_loglik(mixture.priors, loglik)
    return resp


def assign_trajectory(
    mixture: MixtureModel,
    traj: Trajectory,
    mdp: TabularMdp,
    fmap: TripleFeatureMap,
    config: IrlConfig,
) -> int:
    """Most responsible component for one trajectory; ties pick the lowest index."""
    resp = responsibilities(mixture, [traj], mdp, fmap, config)
    return int(np.argmax(resp[0]))


def em_multi_intention_irl(
    mdp: TabularMdp,
    dataset: Sequence[Trajectory],
    k: int,
    fmap: TripleFeatureMap,
    config: IrlConfig,
    base_trainer: str = "ml",
    eval_fn: Optional[Callable] = None,
    stop_on_converged: bool = True,
    model_seeds: Optional[Sequence[int]] = None,
    resp_init: Optional[np.ndarray] = None,
):
    """EM over K reward networks with latent per-trajectory assignments.

    Initialization draws K models from distinct derived seeds and perturbs
    the uniform responsibility rows with 5% Dirichlet jitter (both
    overridable, which also makes the component-permutation equivariance
    testable).  Each round runs the weighted base trainer for
    `config.m_step_iters` iterations per component, warm-started from the
    previous round (generalized EM); a component whose weighted
    policy-product likelihood would decrease keeps its previous parameters,
    so the observed-data log-likelihood is non-decreasing.  Components whose
    prior collapses below 1e-6 are reinitialized once and dropped on a
    second collapse.

    Returns (MixtureModel, TrainReport) where the report carries the
    observed-data log-likelihood per EM round.
    """
    if k < 1:
        raise InvalidInputError("k must be >= 1")
    if base_trainer not in _BASE_TRAINERS:
        raise InvalidInputError(f"base_trainer must be one of {sorted(_BASE_TRAINERS)}")
    if len(dataset) == 0:
        raise InvalidInputError("dataset must be nonempty")
    trainer = _BASE_TRAINERS[base_trainer]
    step_index = _StepIndex(dataset)
    n = len(dataset)

    master = np.random.default_rng(config.seed)
    # always advance the master generator so the jitter draw below does not
    # depend on whether seeds were overridden
    drawn_seeds = [int(s) for s in master.integers(0, 2 ** 31 - 1, size=k)]
    if model_seeds is None:
        model_seeds = drawn_seeds
    elif len(model_seeds) != k:
        raise InvalidInputError("model_seeds length must equal k")
    layer_dims = (fmap.input_dim, *config.hidden, 1)
    models = [init_model(layer_dims, seed) for seed in model_seeds]
    opts = [AdamState.for_model(m, config.learning_rate) for m in models]
    reinit_used = [False] * k

    if resp_init is None:
        resp = 0.95 / k + 0.05 * master.dirichlet(np.ones(k), size=n)
    else:
        resp = np.asarray(resp_init, dtype=float)
        if resp.shape != (n, k) or not np.allclose(resp.sum(axis=1), 1.0, atol=1e-9):
            raise InvalidInputError("resp_init must be an (n, k) row-stochastic matrix")
    priors = np.full(k, 1.0 / k)
    m_step_config = replace(config, n_outer_iters=config.m_step_iters)

    report = TrainReport()
    loglik_mat = _loglik_matrix(models, mdp, fmap, config, step_index)
    prev_ll = -np.inf
    for _ in range(config.n_outer_iters):
        tic = time.perf_counter()
        # M-step: weighted base trainer per component, reverting steps that
        # would lower the component's weighted likelihood.
        for j in range(len(models)):
            w = resp[:, j]
            if w.sum() <= 0.0:
                continue
            before = float(w @ loglik_mat[:, j])
            new_model, new_opt, _ = trainer(mdp, dataset, models[j], fmap, m_step_config,
                                            w / w.sum(), opts[j], None, None)
            rewards = fmap.rewards(new_model)
            _, policy = soft_value_iteration(mdp, rewards, config.beta, config.inner_sweeps(mdp))
            after_col = step_index.per_traj_loglik(policy)
            if float(w @ after_col) >= before:
                models[j] = new_model
                opts[j] = new_opt
                loglik_mat[:, j] = after_col
        priors = resp.mean(axis=0)
        # E-step
        resp, log_norm = _responsibilities_from_loglik(priors, loglik_mat)
        observed_ll = float(log_norm.sum())
        mixture = MixtureModel(models=list(models), priors=priors.copy(),
                               responsibilities=resp.copy())
        metrics = eval_fn(mixture) if eval_fn is not None else {}
        wall_ms = (time.perf_counter() - tic) * 1e3
        report.append(observed_ll, wall_ms, metrics,
                      priors=priors.tolist())
        # collapse handling
        collapsed = [j for j in range(len(models)) if priors[j] < COLLAPSE_PRIOR]
        dropped = []
        for j in collapsed:
            if not reinit_used[j]:
                reinit_used[j] = True
                seed = int(master.integers(0, 2 ** 31 - 1))
                models[j] = init_model(layer_dims, seed)
                opts[j] = AdamState.for_model(models[j], config.learning_rate)
                rewards = fmap.rewards(models[j])
                _, policy = soft_value_iteration(mdp, rewards, config.beta,
                                                 config.inner_sweeps(mdp))
                loglik_mat[:, j] = step_index.per_traj_loglik(policy)
            else:
                dropped.append(j)
        if dropped:
            keep = [j for j in range(len(models)) if j not in dropped]
            models = [models[j] for j in keep]
            opts = [opts[j] for j in keep]
            reinit_used = [reinit_used[j] for j in keep]
            loglik_mat = loglik_mat[:, keep]
            priors = priors[keep]
            priors = priors / priors.sum()
            resp, _ = _responsibilities_from_loglik(priors, loglik_mat)
            report.extras.setdefault("dropped_components", []).append(dropped)
        if stop_on_converged and np.isfinite(prev_ll) \
                and observed_ll - prev_ll < config.tolerance:
            break
        prev_ll = observed_ll
    mixture = MixtureModel(models=list(models), priors=priors.copy(),
                           responsibilities=resp.copy())
    return mixture, report


def merge_similar_rewards(
    mixture: MixtureModel,
    mdp: TabularMdp,
    fmap: TripleFeatureMap,
    config: IrlConfig,
    start_dist: np.ndarray,
    disagreement_threshold: float = 0.05,
) -> MixtureModel:
    """Merge components whose greedy policies agree almost everywhere.

    Disagreement between two components is the probability, under the
    mixture's state-visitation distribution, that their greedy policies pick
    different actions.  Pairs at or below the threshold are merged (keeping
    the higher-prior model) until a fixpoint.
    """
    models = list(mixture.models)
    priors = mixture.priors.copy()
    resp = mixture.responsibilities.copy()

    def greedy_and_visits(model):
        rewards = fmap.rewards(model)
        _, _, greedy = value_iteration(mdp, rewards, tol=config.tolerance)
        visits = propagate_policy(mdp, greedy, start_dist).sum(axis=(1, 2))
        return np.argmax(greedy, axis=1), visits / visits.sum()

    stats = [greedy_and_visits(m) for m in models]
    while len(models) > 1:
        d_mix = np.zeros(mdp.n_states)
        for prior, (_, visits) in zip(priors, stats):
            d_mix += prior * visits
        d_mix = d_mix / d_mix.sum()
        best = None
        for i in range(len(models)):
            for j in range(i + 1, len(models)):
                disagree = float(d_mix @ (stats[i][0] != stats[j][0]))
                if disagree <= disagreement_threshold and (best is None or disagree < best[0]):
                    best = (disagree, i, j)
        if best is None:
            break
        _, i, j = best
        keep, drop = (i, j) if priors[i] >= priors[j] else (j, i)
        priors[keep] += priors[drop]
        resp[:, keep] += resp[:, drop]
        for seq in (models, stats):
            del seq[drop]
        priors = np.delete(priors, drop)
        resp = np.delete(resp, drop, axis=1)
    priors = priors / priors.sum()
    return MixtureModel(models=models, priors=priors, responsibilities=resp)


# ---------------------------------------------------------------------------
# Mixture checkpoint: directory with one model file per component plus a
# manifest recording priors, config echo and the log-likelihood history.
# ---------------------------------------------------------------------------

def save_mixture(directory, mixture: MixtureModel, config: IrlConfig,
                 log_likelihood_history: Optional[list] = None) -> None:
    from .reward_model import save_model

    os.makedirs(directory, exist_ok=True)
    for i, model in enumerate(mixture.models):
        save_model(os.path.join(directory, f"component_{i}.json"), model)
    manifest = {
        "k": mixture.k,
        "priors": mixture.priors.tolist(),
        "config": asdict(config),
        "log_likelihood_history": log_likelihood_history or [],
    }
    with open(os.path.join(directory, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_mixture(directory):
    from .reward_model import load_model

    with open(os.path.join(directory, "manifest.json"), "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    k = manifest["k"]
    models = [load_model(os.path.join(directory, f"component_{i}.json")) for i in range(k)]
    priors = np.asarray(manifest["priors"], dtype=float)
    resp = np.full((1, k), 1.0 / k)  # placeholder; recompute against a dataset
    mixture = MixtureModel(models=models, priors=priors, responsibilities=resp)
    cfg = manifest.get("config", {})
    if "hidden" in cfg:
        cfg["hidden"] = tuple(cfg["hidden"])
    return mixture, IrlConfig(**cfg), manifest
