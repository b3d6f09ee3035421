"""Reward function parameterizations evaluated densely over encoded
(state, action, next state) triples.

Two model families: a linear model and a small feedforward network with
analytic reverse-mode gradients and an Adam-style optimizer.  No autodiff
framework is used; the backward pass is hand-written for this fixed family.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidInputError, NumericError

DEFAULT_HIDDEN = (64, 64)
DEFAULT_LEARNING_RATE = 1e-2

_ACTIVATIONS = ("relu", "tanh")


@dataclass(frozen=True)
class MlpRewardModel:
    """Feedforward reward net: scalar output, linear last layer.

    layer_dims = (input_dim, hidden..., 1); weights[l] has shape
    (layer_dims[l], layer_dims[l+1]).
    """

    layer_dims: tuple
    weights: tuple
    biases: tuple
    activation: str = "relu"

    def __post_init__(self):
        if self.activation not in _ACTIVATIONS:
            raise InvalidInputError(f"activation must be one of {_ACTIVATIONS}")
        if len(self.layer_dims) < 2 or self.layer_dims[-1] != 1:
            raise InvalidInputError("layer_dims must be (input_dim, ..., 1)")
        for l, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (self.layer_dims[l], self.layer_dims[l + 1]):
                raise InvalidInputError(f"weights[{l}] shape {w.shape} breaks the chain")
            if b.shape != (self.layer_dims[l + 1],):
                raise InvalidInputError(f"biases[{l}] shape {b.shape} breaks the chain")
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise InvalidInputError(f"non-finite parameters in layer {l}")

    @property
    def input_dim(self) -> int:
        return self.layer_dims[0]

    def param_arrays(self) -> list:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend([w, b])
        return out

    def with_params(self, arrays: Sequence[np.ndarray]) -> "MlpRewardModel":
        ws = tuple(arrays[0::2])
        bs = tuple(arrays[1::2])
        return replace(self, weights=ws, biases=bs)

    def n_params(self) -> int:
        return sum(a.size for a in self.param_arrays())


@dataclass(frozen=True)
class LinearRewardModel:
    """Reward linear in the encoded features; no bias term."""

    weights: np.ndarray

    def __post_init__(self):
        if not np.all(np.isfinite(self.weights)):
            raise InvalidInputError("non-finite linear weights")

    @property
    def input_dim(self) -> int:
        return self.weights.shape[0]

    def param_arrays(self) -> list:
        return [self.weights]

    def with_params(self, arrays) -> "LinearRewardModel":
        return LinearRewardModel(weights=arrays[0])

    def n_params(self) -> int:
        return self.weights.size

    @staticmethod
    def zeros(input_dim: int) -> "LinearRewardModel":
        return LinearRewardModel(weights=np.zeros(input_dim))


def init_model(layer_dims, seed: int, activation: str = "relu") -> MlpRewardModel:
    """Glorot-uniform weights, zero biases; deterministic per seed."""
    dims = tuple(int(d) for d in layer_dims)
    rng = np.random.default_rng(seed)
    ws, bs = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        ws.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        bs.append(np.zeros(fan_out))
    return MlpRewardModel(layer_dims=dims, weights=tuple(ws), biases=tuple(bs), activation=activation)


def _act(z: np.ndarray, kind: str) -> np.ndarray:
    return np.maximum(z, 0.0) if kind == "relu" else np.tanh(z)


def _act_grad(z: np.ndarray, kind: str) -> np.ndarray:
    if kind == "relu":
        return (z > 0.0).astype(z.dtype)
    t = np.tanh(z)
    return 1.0 - t * t


def forward_all(model, features: np.ndarray) -> np.ndarray:
    """Reward for every feature row; deterministic pure function."""
    x = np.asarray(features, dtype=float)
    if x.ndim != 2 or x.shape[1] != model.input_dim:
        raise InvalidInputError(
            f"feature width {x.shape[1] if x.ndim == 2 else x.shape} != input_dim {model.input_dim}"
        )
    if isinstance(model, LinearRewardModel):
        return x @ model.weights
    h = x
    last = len(model.weights) - 1
    for l, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = h @ w + b
        h = _act(z, model.activation) if l < last else z
    return h[:, 0]


def backward_accumulate(model, features: np.ndarray, output_grad: np.ndarray) -> list:
    """Gradient of output_grad . outputs with respect to each parameter array.

    Exact reverse-mode vector-Jacobian product; the returned list parallels
    model.param_arrays().
    """
    x = np.asarray(features, dtype=float)
    g_out = np.asarray(output_grad, dtype=float)
    if g_out.shape != (x.shape[0],):
        raise InvalidInputError("output_grad length must match the number of rows")
    if isinstance(model, LinearRewardModel):
        return [x.T @ g_out]
    # forward pass retaining pre/post activations
    hs = [x]
    zs = []
    h = x
    last = len(model.weights) - 1
    for l, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = h @ w + b
        zs.append(z)
        h = _act(z, model.activation) if l < last else z
        hs.append(h)
    g = g_out[:, None]
    grads = [None] * (2 * len(model.weights))
    for l in range(last, -1, -1):
        grads[2 * l] = hs[l].T @ g
        grads[2 * l + 1] = g.sum(axis=0)
        if l > 0:
            g = (g @ model.weights[l].T) * _act_grad(zs[l - 1], model.activation)
    return grads


@dataclass(frozen=True)
class AdamState:
    """Per-parameter first/second moment accumulators with bias correction."""

    lr: float
    beta1: float
    beta2: float
    eps: float
    step: int
    m: tuple
    v: tuple

    @staticmethod
    def for_model(model, lr: float = DEFAULT_LEARNING_RATE,
                  beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> "AdamState":
        zeros = tuple(np.zeros_like(p) for p in model.param_arrays())
        return AdamState(lr=lr, beta1=beta1, beta2=beta2, eps=eps, step=0, m=zeros, v=zeros)


def apply_update(model, grads: Sequence[np.ndarray], opt: AdamState):
    """One Adam descent step along `grads`; returns (model', opt').

    Callers wanting ascent pass the negated gradient.
    """
    params = model.param_arrays()
    if len(grads) != len(params):
        raise InvalidInputError("gradient tree does not match parameter tree")
    names = _param_names(model)
    for name, g in zip(names, grads):
        if not np.all(np.isfinite(g)):
            raise NumericError(f"non-finite gradient in {name}")
    t = opt.step + 1
    new_params, new_m, new_v = [], [], []
    for p, g, m, v in zip(params, grads, opt.m, opt.v):
        m = opt.beta1 * m + (1.0 - opt.beta1) * g
        v = opt.beta2 * v + (1.0 - opt.beta2) * (g * g)
        m_hat = m / (1.0 - opt.beta1 ** t)
        v_hat = v / (1.0 - opt.beta2 ** t)
        new_params.append(p - opt.lr * m_hat / (np.sqrt(v_hat) + opt.eps))
        new_m.append(m)
        new_v.append(v)
    return model.with_params(new_params), replace(opt, step=t, m=tuple(new_m), v=tuple(new_v))


def _param_names(model) -> list:
    if isinstance(model, LinearRewardModel):
        return ["weights"]
    names = []
    for l in range(len(model.weights)):
        names.extend([f"weights[{l}]", f"biases[{l}]"])
    return names


# ---------------------------------------------------------------------------
# Factored evaluation over the full (s, a, s') grid.
#
# The encoded features of a triple are the concatenation of a state block, an
# action block and a second state block, so the first layer of the network
# decomposes into three small per-block products.  The evaluator below
# exploits this to avoid materialising the |S||A||S'| x d feature matrix; it
# produces the same rewards and parameter gradients as forward_all /
# backward_accumulate on the dense matrix.
# ---------------------------------------------------------------------------


class TripleFeatureMap:
    """Dense (s, a, s') feature grid factored into state and action blocks.

    Triple index order is ((s * A) + a) * S + s', matching matrix().
    """

    def __init__(self, state_feats: np.ndarray, action_feats: np.ndarray):
        self.state_feats = np.asarray(state_feats, dtype=float)
        self.action_feats = np.asarray(action_feats, dtype=float)
        self.n_states = self.state_feats.shape[0]
        self.n_actions = self.action_feats.shape[0]
        self.state_dim = self.state_feats.shape[1]
        self.action_dim = self.action_feats.shape[1]
        self.input_dim = 2 * self.state_dim + self.action_dim

    @staticmethod
    def one_hot(n_states: int, n_actions: int) -> "TripleFeatureMap":
        return TripleFeatureMap(np.eye(n_states), np.eye(n_actions))

    @property
    def n_triples(self) -> int:
        return self.n_states * self.n_actions * self.n_states

    def matrix(self) -> np.ndarray:
        """Materialised feature matrix; intended for tests and small spaces."""
        s_idx, a_idx, z_idx = np.meshgrid(
            np.arange(self.n_states), np.arange(self.n_actions), np.arange(self.n_states),
            indexing="ij",
        )
        return np.hstack(
            [
                self.state_feats[s_idx.ravel()],
                self.action_feats[a_idx.ravel()],
                self.state_feats[z_idx.ravel()],
            ]
        )

    def _split_first_layer(self, w0: np.ndarray):
        ds, da = self.state_dim, self.action_dim
        return w0[:ds], w0[ds:ds + da], w0[ds + da:]

    def rewards(self, model) -> np.ndarray:
        """Reward tensor of shape (S, A, S') for `model` over the full grid."""
        S, A = self.n_states, self.n_actions
        if isinstance(model, LinearRewardModel):
            ws, wa, wz = self._split_first_layer(model.weights[:, None])
            us = (self.state_feats @ ws)[:, 0]
            ua = (self.action_feats @ wa)[:, 0]
            uz = (self.state_feats @ wz)[:, 0]
            return us[:, None, None] + ua[None, :, None] + uz[None, None, :]
        w0s, w0a, w0z = self._split_first_layer(model.weights[0])
        us = self.state_feats @ w0s
        ua = self.action_feats @ w0a
        uz = self.state_feats @ w0z
        b0 = model.biases[0]
        last = len(model.weights) - 1
        out = np.empty((S, A, S))
        for s in range(S):
            h = us[s][None, None, :] + ua[:, None, :] + uz[None, :, :] + b0
            h = _act(h, model.activation) if last > 0 else h
            for l in range(1, last + 1):
                z = h @ model.weights[l] + model.biases[l]
                h = _act(z, model.activation) if l < last else z
            out[s] = h[..., 0]
        return out

    def param_grads(self, model, out_grad: np.ndarray) -> list:
        """Gradient of sum(out_grad * rewards) w.r.t. the parameter arrays.

        Streams over first-index slices, recomputing activations, so memory
        stays O(A * S * width).
        """
        S, A = self.n_states, self.n_actions
        if out_grad.shape != (S, A, S):
            raise InvalidInputError("out_grad must have shape (S, A, S)")
        if isinstance(model, LinearRewardModel):
            gs = out_grad.sum(axis=(1, 2))
            ga = out_grad.sum(axis=(0, 2))
            gz = out_grad.sum(axis=(0, 1))
            return [
                np.concatenate(
                    [self.state_feats.T @ gs, self.action_feats.T @ ga, self.state_feats.T @ gz]
                )
            ]
        w0s, w0a, w0z = self._split_first_layer(model.weights[0])
        us = self.state_feats @ w0s
        ua = self.action_feats @ w0a
        uz = self.state_feats @ w0z
        b0 = model.biases[0]
        last = len(model.weights) - 1
        act = model.activation

        sum_s = np.zeros((S, b0.shape[0]))
        sum_a = np.zeros((A, b0.shape[0]))
        sum_z = np.zeros((S, b0.shape[0]))
        upper = [np.zeros_like(w) for w in model.weights[1:]]
        upper_b = [np.zeros_like(b) for b in model.biases[1:]]
        for s in range(S):
            z0 = us[s][None, None, :] + ua[:, None, :] + uz[None, :, :] + b0
            zs = [z0]
            h = _act(z0, act) if last > 0 else z0
            hs = [h]
            for l in range(1, last + 1):
                z = h @ model.weights[l] + model.biases[l]
                zs.append(z)
                h = _act(z, act) if l < last else z
                hs.append(h)
            g = out_grad[s][..., None]
            for l in range(last, 0, -1):
                flat_h = hs[l - 1].reshape(-1, hs[l - 1].shape[-1])
                flat_g = g.reshape(-1, g.shape[-1])
                upper[l - 1] += flat_h.T @ flat_g
                upper_b[l - 1] += flat_g.sum(axis=0)
                g = (g @ model.weights[l].T) * _act_grad(zs[l - 1], act)
            dpre0 = g
            sum_s[s] = dpre0.sum(axis=(0, 1))
            sum_a += dpre0.sum(axis=1)
            sum_z += dpre0.sum(axis=0)
        dw0 = np.vstack(
            [self.state_feats.T @ sum_s, self.action_feats.T @ sum_a, self.state_feats.T @ sum_z]
        )
        db0 = sum_s.sum(axis=0)
        grads = [dw0, db0]
        for dw, db in zip(upper, upper_b):
            grads.extend([dw, db])
        return grads


# ---------------------------------------------------------------------------
# Checkpoint file format: JSON container, bit-exact round trip.
# ---------------------------------------------------------------------------

def save_model(path, model, seed: Optional[int] = None) -> None:
    if isinstance(model, LinearRewardModel):
        doc = {"kind": "linear", "weights": model.weights.tolist(), "seed": seed}
    else:
        doc = {
            "kind": "mlp",
            "layer_dims": list(model.layer_dims),
            "activation": model.activation,
            "weights": [w.tolist() for w in model.weights],
            "biases": [b.tolist() for b in model.biases],
            "seed": seed,
        }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_model(path):
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    kind = doc.get("kind")
    if kind == "linear":
        return LinearRewardModel(weights=np.asarray(doc["weights"], dtype=float))
    if kind == "mlp":
        return MlpRewardModel(
            layer_dims=tuple(doc["layer_dims"]),
            weights=tuple(np.asarray(w, dtype=float) for w in doc["weights"]),
            biases=tuple(np.asarray(b, dtype=float) for b in doc["biases"]),
            activation=doc["activation"],
        )
    raise InvalidInputError(f"unknown model kind {kind!r} in {path}")
