"""Radar/jammer spectrum-coexistence scenario.

A monostatic radar picks a contiguous block of sub-channels and a transmit
power each step while a point target drifts through quantised range/velocity
bins and a jammer block wanders over the band.  States enumerate
(position bin, velocity bin, channel-occupancy word); actions enumerate
(contiguous band, power level).  Rewards trade off SINR, bandwidth usage and
transmit power per task, with a large penalty when SINR drops below 0 dB.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict
from functools import lru_cache
from typing import Tuple

import numpy as np

from .errors import CapacityError, InvalidInputError, ValidationError
from .mdp import TabularMdp, value_iteration

STATE_CAP = 10 ** 6


@dataclass(frozen=True)
class TaskWeights:
    """Importance weights for the SINR, bandwidth and power terms."""

    w1: float
    w2: float
    w3: float

    def __post_init__(self):
        if min(self.w1, self.w2, self.w3) < 0.0:
            raise InvalidInputError("task weights must be nonnegative")
        if self.w1 == 0.0 and self.w2 == 0.0 and self.w3 == 0.0:
            raise InvalidInputError("task weights must not all be zero")


@dataclass(frozen=True)
class EnvState:
    pos_bin: int
    vel_bin: int
    occupancy: int  # bit i set = sub-channel i jammed


@dataclass(frozen=True)
class RadarAction:
    band_lo: int
    band_hi: int  # inclusive
    power_level: int


@dataclass(frozen=True)
class ScenarioConfig:
    """Scene dimensions, link-budget anchors and dynamics parameters."""

    n_channels: int = 3
    n_power_levels: int = 4
    power_min_dbm: float = 11.0
    power_max_dbm: float = 20.0
    n_pos_bins: int = 6
    n_vel_bins: int = 3
    r_min_frac: float = 0.2
    snr_max_db: float = 3.0
    inr_db: float = 14.0
    horizon: int = 20
    large_penalty: float = -10.0
    task_weights: Tuple[Tuple[int, Tuple[float, float, float]], ...] = (
        (1, (5.0, 1.0, 5.0)),
        (2, (1.0, 5.0, 5.0)),
        (3, (1.0, 1.0, 5.0)),
    )
    jammer_stay_prob: float = 0.8
    jammer_width: int = 1
    pos_noise_probs: Tuple[float, float, float] = (0.15, 0.7, 0.15)
    vel_stay_prob: float = 0.6
    drift_span: int = 2
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_channels < 1 or self.n_power_levels < 1:
            raise InvalidInputError("n_channels and n_power_levels must be >= 1")
        if self.n_pos_bins < 1 or self.n_vel_bins < 1:
            raise InvalidInputError("n_pos_bins and n_vel_bins must be >= 1")
        if not (0.0 < self.r_min_frac < 1.0):
            raise InvalidInputError("r_min_frac must be in (0, 1)")
        if not (1 <= self.jammer_width <= self.n_channels):
            raise InvalidInputError("jammer_width must be in [1, n_channels]")
        if not (0.0 <= self.jammer_stay_prob <= 1.0) or not (0.0 <= self.vel_stay_prob <= 1.0):
            raise InvalidInputError("stay probabilities must be in [0, 1]")
        if len(self.pos_noise_probs) != 3 or abs(sum(self.pos_noise_probs) - 1.0) > 1e-9:
            raise InvalidInputError("pos_noise_probs must be 3 probabilities summing to 1")
        if self.horizon < 1:
            raise InvalidInputError("horizon must be >= 1")
        if len(self.task_weights) == 0:
            raise InvalidInputError("at least one task must be configured")
        for _, w in self.task_weights:
            TaskWeights(*w)  # validates

    @property
    def n_occupancy_words(self) -> int:
        return 1 << self.n_channels

    @property
    def n_states(self) -> int:
        return self.n_pos_bins * self.n_vel_bins * self.n_occupancy_words

    @property
    def n_actions(self) -> int:
        return self.n_channels * (self.n_channels + 1) // 2 * self.n_power_levels

    def task(self, task_id: int) -> TaskWeights:
        for tid, w in self.task_weights:
            if tid == task_id:
                return TaskWeights(*w)
        raise InvalidInputError(f"unknown task id {task_id}")

    @property
    def task_ids(self):
        return [tid for tid, _ in self.task_weights]


def default_scenario(**overrides) -> ScenarioConfig:
    """Desk-scale scene: 6 x 3 x 2^3 = 144 states, 24 actions."""
    return ScenarioConfig(**overrides)


def paper_scenario(**overrides) -> ScenarioConfig:
    """Full-size scene: 10 x 5 x 2^5 = 1600 states, 150 actions."""
    params = dict(
        n_channels=5,
        n_power_levels=10,
        n_pos_bins=10,
        n_vel_bins=5,
        jammer_width=2,
    )
    params.update(overrides)
    return ScenarioConfig(**params)


# ---------------------------------------------------------------------------
# Enumeration and indexing
# ---------------------------------------------------------------------------

def state_index(config: ScenarioConfig, state: EnvState) -> int:
    return (state.pos_bin * config.n_vel_bins + state.vel_bin) * config.n_occupancy_words \
        + state.occupancy


def state_from_index(config: ScenarioConfig, idx: int) -> EnvState:
    occ = idx % config.n_occupancy_words
    rest = idx // config.n_occupancy_words
    return EnvState(pos_bin=rest // config.n_vel_bins, vel_bin=rest % config.n_vel_bins,
                    occupancy=occ)


def enumerate_states(config: ScenarioConfig):
    """All states in index order plus the index map (state -> index)."""
    if config.n_states > STATE_CAP:
        raise CapacityError(f"{config.n_states} states exceeds the cap of {STATE_CAP}")
    states = [state_from_index(config, i) for i in range(config.n_states)]
    return states, {s: i for i, s in enumerate(states)}


@lru_cache(maxsize=32)
def enumerate_actions(config: ScenarioConfig):
    """Contiguous-band actions ordered by (band_lo, band_hi, power_level)."""
    actions = []
    for lo in range(config.n_channels):
        for hi in range(lo, config.n_channels):
            for p in range(config.n_power_levels):
                actions.append(RadarAction(band_lo=lo, band_hi=hi, power_level=p))
    return actions


def action_band_mask(config: ScenarioConfig, action: RadarAction) -> int:
    width = action.band_hi - action.band_lo + 1
    return ((1 << width) - 1) << action.band_lo


def power_dbm(config: ScenarioConfig, level: int) -> float:
    if config.n_power_levels == 1:
        return config.power_max_dbm
    step = (config.power_max_dbm - config.power_min_dbm) / (config.n_power_levels - 1)
    return config.power_min_dbm + level * step


def _power_norm(config: ScenarioConfig, level: int) -> float:
    if config.power_max_dbm == config.power_min_dbm or config.n_power_levels == 1:
        return 0.0
    return (power_dbm(config, level) - config.power_min_dbm) / (
        config.power_max_dbm - config.power_min_dbm
    )


# ---------------------------------------------------------------------------
# Link budget
# ---------------------------------------------------------------------------

def _range_fraction(config: ScenarioConfig, pos_bin: int) -> float:
    # bin-centre range as a fraction of max range; max range cancels downstream
    return config.r_min_frac + (pos_bin + 0.5) * (1.0 - config.r_min_frac) / config.n_pos_bins


def sinr_db(config: ScenarioConfig, state: EnvState, action: RadarAction) -> float:
    """Received SINR in dB for transmitting `action` into `state`.

    Two-way point-target range law (40 log10) calibrated so that max power,
    zero overlap at exact maximum range gives snr_max_db; jammer overlap adds
    an interference-plus-noise term scaled by the overlapped band fraction.
    """
    k_used = action.band_hi - action.band_lo + 1
    k_overlap = bin(action_band_mask(config, action) & state.occupancy).count("1")
    inr_lin = 10.0 ** (config.inr_db / 10.0)
    return (
        config.snr_max_db
        + (power_dbm(config, action.power_level) - config.power_max_dbm)
        + 40.0 * np.log10(1.0 / _range_fraction(config, state.pos_bin))
        - 10.0 * np.log10(1.0 + inr_lin * k_overlap / k_used)
    )


@lru_cache(maxsize=32)
def max_sinr_db(config: ScenarioConfig) -> float:
    """Scenario-wide SINR maximum: nearest bin, max power, zero overlap."""
    return config.snr_max_db + 40.0 * float(np.log10(1.0 / _range_fraction(config, 0)))


def reward(config: ScenarioConfig, task: TaskWeights, s: EnvState, a: RadarAction,
           s_next: EnvState) -> float:
    """Per-step reward; SINR is evaluated against the next state's scene."""
    snr = sinr_db(config, s_next, a)
    if snr < 0.0:
        return config.large_penalty
    k_used = a.band_hi - a.band_lo + 1
    return (
        task.w1 * (snr / max_sinr_db(config))
        + task.w2 * (k_used / config.n_channels)
        - task.w3 * _power_norm(config, a.power_level)
    )


@lru_cache(maxsize=32)
def _occupancy_bits(config: ScenarioConfig) -> np.ndarray:
    words = np.arange(config.n_occupancy_words)
    return ((words[:, None] >> np.arange(config.n_channels)[None, :]) & 1).astype(float)


@lru_cache(maxsize=32)
def sinr_db_grid(config: ScenarioConfig) -> np.ndarray:
    """SINR in dB for every (action, state) pair, shape (A, S)."""
    actions = enumerate_actions(config)
    bits = _occupancy_bits(config)
    inr_lin = 10.0 ** (config.inr_db / 10.0)
    range_term = 40.0 * np.log10(
        1.0 / np.array([_range_fraction(config, p) for p in range(config.n_pos_bins)])
    )
    occ_of_state = np.arange(config.n_states) % config.n_occupancy_words
    pos_of_state = np.arange(config.n_states) // (config.n_vel_bins * config.n_occupancy_words)
    out = np.empty((len(actions), config.n_states))
    for ai, act in enumerate(actions):
        k_used = act.band_hi - act.band_lo + 1
        mask_bits = np.zeros(config.n_channels)
        mask_bits[act.band_lo:act.band_hi + 1] = 1.0
        overlap = bits @ mask_bits  # per occupancy word
        interference = -10.0 * np.log10(1.0 + inr_lin * overlap / k_used)
        out[ai] = (
            config.snr_max_db
            + (power_dbm(config, act.power_level) - config.power_max_dbm)
            + range_term[pos_of_state]
            + interference[occ_of_state]
        )
    return out


def reward_tensor(config: ScenarioConfig, task: TaskWeights) -> np.ndarray:
    """Dense true reward over (s, a, s'), broadcast from its (a, s') core.

    The reward depends only on the action and the materialised next state, so
    the returned array is a read-only broadcast view.
    """
    snr = sinr_db_grid(config)  # (A, S')
    actions = enumerate_actions(config)
    k_used = np.array([a.band_hi - a.band_lo + 1 for a in actions], dtype=float)
    p_norm = np.array([_power_norm(config, a.power_level) for a in actions])
    positive = (
        task.w1 * (snr / max_sinr_db(config))
        + task.w2 * (k_used / config.n_channels)[:, None]
        - task.w3 * p_norm[:, None]
    )
    core = np.where(snr >= 0.0, positive, config.large_penalty)  # (A, S')
    return np.broadcast_to(core[None, :, :], (config.n_states, config.n_actions, config.n_states))


# ---------------------------------------------------------------------------
# Dynamics: target drift/velocity walk and jammer block walk, all independent
# of the radar action.
# ---------------------------------------------------------------------------

def drift_of_vel(config: ScenarioConfig, vel_bin: int) -> int:
    if config.n_vel_bins == 1:
        return 0
    span = config.drift_span
    return int(np.rint(-span + 2.0 * span * vel_bin / (config.n_vel_bins - 1)))


@lru_cache(maxsize=32)
def position_kernel(config: ScenarioConfig) -> np.ndarray:
    """P(p' | p, v), shape (n_vel, n_pos, n_pos); drift plus clamped noise."""
    n = config.n_pos_bins
    kern = np.zeros((config.n_vel_bins, n, n))
    for v in range(config.n_vel_bins):
        d = drift_of_vel(config, v)
        for p in range(n):
            for eta, prob in zip((-1, 0, 1), config.pos_noise_probs):
                if prob == 0.0:
                    continue
                kern[v, p, int(np.clip(p + d + eta, 0, n - 1))] += prob
    return kern


@lru_cache(maxsize=32)
def velocity_kernel(config: ScenarioConfig) -> np.ndarray:
    """P(v' | v): lazy random walk with reflection at the edges."""
    n = config.n_vel_bins
    kern = np.zeros((n, n))
    move = (1.0 - config.vel_stay_prob) / 2.0
    for v in range(n):
        kern[v, v] += config.vel_stay_prob
        for delta in (-1, 1):
            nxt = v + delta
            if nxt < 0:
                nxt = -nxt
            elif nxt > n - 1:
                nxt = 2 * (n - 1) - nxt
            kern[v, int(np.clip(nxt, 0, n - 1))] += move
    return kern


def jam_position(config: ScenarioConfig, occupancy: int) -> int:
    """Jammer block position implied by an occupancy word.

    Reachable words are contiguous blocks whose position is the lowest set
    bit; arbitrary words (enumerable but unreachable) map to their lowest set
    bit clamped into the valid range, and the empty word maps to 0.
    """
    max_pos = config.n_channels - config.jammer_width
    if occupancy == 0:
        return 0
    low = (occupancy & -occupancy).bit_length() - 1
    return int(np.clip(low, 0, max_pos))


def jam_block_word(config: ScenarioConfig, position: int) -> int:
    return ((1 << config.jammer_width) - 1) << position


@lru_cache(maxsize=32)
def jammer_kernel(config: ScenarioConfig) -> np.ndarray:
    """P(w' | w) over occupancy words: stay or shift the block one channel."""
    n_words = config.n_occupancy_words
    max_pos = config.n_channels - config.jammer_width
    move = (1.0 - config.jammer_stay_prob) / 2.0
    kern = np.zeros((n_words, n_words))
    for w in range(n_words):
        j = jam_position(config, w)
        kern[w, jam_block_word(config, j)] += config.jammer_stay_prob
        for delta in (-1, 1):
            jn = int(np.clip(j + delta, 0, max_pos))
            kern[w, jam_block_word(config, jn)] += move
    return kern


@lru_cache(maxsize=32)
def transition_matrix(config: ScenarioConfig) -> np.ndarray:
    """Analytic state kernel P(s'|s), shape (S, S'); actions do not matter."""
    pos_k = position_kernel(config)   # (V, P, P')
    vel_k = velocity_kernel(config)   # (V, V')
    jam_k = jammer_kernel(config)     # (W, W')
    full = np.einsum("vpq,vu,wx->pvwqux", pos_k, vel_k, jam_k)
    return full.reshape(config.n_states, config.n_states)


def build_mdp(config: ScenarioConfig, discount: float) -> TabularMdp:
    """Tabular MDP with the true analytic transition model.

    The per-action transition slab is a broadcast view of the action
    independent state kernel, so memory stays O(S^2).
    """
    t = transition_matrix(config)
    trans = np.broadcast_to(t[:, None, :], (config.n_states, config.n_actions, config.n_states))
    return TabularMdp(
        n_states=config.n_states,
        n_actions=config.n_actions,
        transition=trans,
        discount=discount,
        horizon=config.horizon,
    )


@lru_cache(maxsize=32)
def _step_cdfs(config: ScenarioConfig):
    return (
        np.cumsum(position_kernel(config), axis=2),
        np.cumsum(velocity_kernel(config), axis=1),
        np.cumsum(jammer_kernel(config), axis=1),
    )


def step(config: ScenarioConfig, state: EnvState, action: RadarAction,
         rng: np.random.Generator) -> EnvState:
    """Sample the next scene state; dynamics ignore the radar action."""
    pos_cdf, vel_cdf, jam_cdf = _step_cdfs(config)
    pos = int(np.searchsorted(pos_cdf[state.vel_bin, state.pos_bin], rng.random(), side="right"))
    vel = int(np.searchsorted(vel_cdf[state.vel_bin], rng.random(), side="right"))
    occ = int(np.searchsorted(jam_cdf[state.occupancy], rng.random(), side="right"))
    return EnvState(
        pos_bin=min(pos, config.n_pos_bins - 1),
        vel_bin=min(vel, config.n_vel_bins - 1),
        occupancy=min(occ, config.n_occupancy_words - 1),
    )


@lru_cache(maxsize=32)
def start_distribution(config: ScenarioConfig) -> np.ndarray:
    """Uniform over states whose occupancy is a valid jammer block."""
    valid_words = {jam_block_word(config, j)
                   for j in range(config.n_channels - config.jammer_width + 1)}
    occ_of_state = np.arange(config.n_states) % config.n_occupancy_words
    mask = np.isin(occ_of_state, list(valid_words)).astype(float)
    return mask / mask.sum()


# ---------------------------------------------------------------------------
# Feature encoding for the reward network
# ---------------------------------------------------------------------------

@lru_cache(maxsize=32)
def state_feature_matrix(config: ScenarioConfig) -> np.ndarray:
    """Per-state block: one-hot position, one-hot velocity, occupancy bits."""
    n = config.n_states
    idx = np.arange(n)
    occ = idx % config.n_occupancy_words
    rest = idx // config.n_occupancy_words
    pos = rest // config.n_vel_bins
    vel = rest % config.n_vel_bins
    feats = np.zeros((n, config.n_pos_bins + config.n_vel_bins + config.n_channels))
    feats[idx, pos] = 1.0
    feats[idx, config.n_pos_bins + vel] = 1.0
    feats[:, config.n_pos_bins + config.n_vel_bins:] = _occupancy_bits(config)[occ]
    return feats


@lru_cache(maxsize=32)
def action_feature_matrix(config: ScenarioConfig) -> np.ndarray:
    """Per-action block: band-mask bits then one-hot power level."""
    actions = enumerate_actions(config)
    feats = np.zeros((len(actions), config.n_channels + config.n_power_levels))
    for i, a in enumerate(actions):
        feats[i, a.band_lo:a.band_hi + 1] = 1.0
        feats[i, config.n_channels + a.power_level] = 1.0
    return feats


def encode_features(config: ScenarioConfig, s: EnvState, a: RadarAction,
                    s_next: EnvState) -> np.ndarray:
    """Concatenated [state block, action block, next-state block] vector."""
    sf = state_feature_matrix(config)
    af = action_feature_matrix(config)
    actions = enumerate_actions(config)
    ai = actions.index(a)
    return np.concatenate([sf[state_index(config, s)], af[ai], sf[state_index(config, s_next)]])


def feature_dim(config: ScenarioConfig) -> int:
    return 2 * (config.n_pos_bins + config.n_vel_bins + config.n_channels) \
        + config.n_channels + config.n_power_levels


def expert_policy(config: ScenarioConfig, task: TaskWeights, discount: float,
                  tol: float = 1e-8) -> np.ndarray:
    """Greedy policy from exact value iteration on the true reward."""
    mdp = build_mdp(config, discount)
    _, _, policy = value_iteration(mdp, reward_tensor(config, task), tol=tol)
    return policy


# ---------------------------------------------------------------------------
# Scenario file format: JSON mirroring ScenarioConfig field names.
# ---------------------------------------------------------------------------

_SCENARIO_FIELDS = set(ScenarioConfig.__dataclass_fields__)


def save_scenario(path, config: ScenarioConfig) -> None:
    doc = asdict(config)
    doc["task_weights"] = {str(tid): list(w) for tid, w in config.task_weights}
    doc["pos_noise_probs"] = list(config.pos_noise_probs)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_scenario(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    unknown = set(doc) - _SCENARIO_FIELDS
    if unknown:
        raise ValidationError(f"unknown scenario keys: {sorted(unknown)}")
    if "task_weights" in doc:
        try:
            doc["task_weights"] = tuple(
                sorted((int(tid), tuple(float(x) for x in w))
                       for tid, w in doc["task_weights"].items())
            )
        except (AttributeError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed task_weights: {exc}") from exc
    if "pos_noise_probs" in doc:
        doc["pos_noise_probs"] = tuple(doc["pos_noise_probs"])
    try:
        return ScenarioConfig(**doc)
    except InvalidInputError as exc:
        raise ValidationError(str(exc)) from exc
