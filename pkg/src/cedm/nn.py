"""Dense ReLU networks with exact reverse-mode gradients and Adam.

Deliberately minimal: fixed architecture class (linear layers with ReLU
between them, linear output), mean-squared-error loss, double precision.
Parameters are value-semantic; update steps return new objects.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import ShapeError

__all__ = [
    "MlpParams",
    "AdamState",
    "mlp_init",
    "mlp_forward",
    "mlp_grad",
    "adam_step",
    "finite_diff_check",
]


@dataclass(frozen=True)
class MlpParams:
    layer_dims: tuple
    weights: tuple           # weights[i]: (layer_dims[i+1], layer_dims[i])
    biases: tuple            # biases[i]: (layer_dims[i+1],)

    @property
    def in_dim(self) -> int:
        return self.layer_dims[0]

    @property
    def out_dim(self) -> int:
        return self.layer_dims[-1]

    def n_params(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))


@dataclass(frozen=True)
class AdamState:
    step: int
    m_weights: tuple
    v_weights: tuple
    m_biases: tuple
    v_biases: tuple
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def fresh(cls, params: MlpParams, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        zw = tuple(np.zeros_like(w) for w in params.weights)
        zb = tuple(np.zeros_like(b) for b in params.biases)
        return cls(step=0, m_weights=zw, v_weights=tuple(np.zeros_like(w) for w in params.weights),
                   m_biases=zb, v_biases=tuple(np.zeros_like(b) for b in params.biases),
                   lr=lr, beta1=beta1, beta2=beta2, eps=eps)


def mlp_init(layer_dims, seed) -> MlpParams:
    """He fan-in scaled Gaussian weights, zero biases; deterministic per seed."""
    dims = tuple(int(d) for d in layer_dims)
    if len(dims) < 2 or any(d < 1 for d in dims):
        raise ShapeError(f"need >= 2 layer dims, all >= 1, got {dims}")
    key = rng.as_key(seed)
    weights, biases = [], []
    for i in range(len(dims) - 1):
        fan_in = dims[i]
        w = rng.gaussian(rng.substream(key, "layer", i), (dims[i + 1], fan_in))
        weights.append(w * np.sqrt(2.0 / fan_in))
        biases.append(np.zeros(dims[i + 1]))
    return MlpParams(layer_dims=dims, weights=tuple(weights), biases=tuple(biases))


def _check_batch(params, x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if x.shape[1] != params.in_dim:
        raise ShapeError(f"input width {x.shape[1]} != expected {params.in_dim}")
    return x


def mlp_forward(params: MlpParams, x) -> np.ndarray:
    """Batch forward pass: ReLU after every layer except the last."""
    h = _check_batch(params, x)
    last = len(params.weights) - 1
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        h = h @ w.T + b
        if i < last:
            np.maximum(h, 0.0, out=h)
    return h


def _forward_cached(params, x):
    acts = [x]
    last = len(params.weights) - 1
    h = x
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        h = h @ w.T + b
        if i < last:
            np.maximum(h, 0.0, out=h)
        acts.append(h)
    return acts


def mlp_grad(params: MlpParams, x, targets, sample_weights=None):
    """Loss and exact gradients of mean-over-batch squared error.

    loss = mean_i w_i * ||f(x_i) - y_i||^2 (sum over output coordinates,
    weights default to 1).  Returns (loss, weight_grads, bias_grads).
    """
    x = _check_batch(params, x)
    y = np.asarray(targets, dtype=float)
    if y.ndim == 1:
        y = y[None, :]
    if y.shape != (x.shape[0], params.out_dim):
        raise ShapeError(f"targets shape {y.shape} != {(x.shape[0], params.out_dim)}")
    n = x.shape[0]
    acts = _forward_cached(params, x)
    resid = acts[-1] - y
    if sample_weights is not None:
        sw = np.asarray(sample_weights, dtype=float).reshape(n, 1)
        loss = float(np.sum(sw * resid * resid) / n)
        delta = 2.0 * sw * resid / n
    else:
        loss = float(np.sum(resid * resid) / n)
        delta = 2.0 * resid / n

    gw = [None] * len(params.weights)
    gb = [None] * len(params.biases)
    for i in range(len(params.weights) - 1, -1, -1):
        gw[i] = delta.T @ acts[i]
        gb[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ params.weights[i]) * (acts[i] > 0.0)
    return loss, tuple(gw), tuple(gb)


def adam_step(state: AdamState, params: MlpParams, weight_grads, bias_grads):
    """One bias-corrected Adam update; returns (new_state, new_params)."""
    if len(weight_grads) != len(params.weights):
        raise ShapeError("gradient/parameter layer count mismatch")
    t = state.step + 1
    c1 = 1.0 - state.beta1 ** t
    c2 = 1.0 - state.beta2 ** t

    def upd(p, g, m, v):
        if g.shape != p.shape:
            raise ShapeError(f"gradient shape {g.shape} != parameter shape {p.shape}")
        m2 = state.beta1 * m + (1.0 - state.beta1) * g
        v2 = state.beta2 * v + (1.0 - state.beta2) * (g * g)
        p2 = p - state.lr * (m2 / c1) / (np.sqrt(v2 / c2) + state.eps)
        return p2, m2, v2

    new_w, new_mw, new_vw = [], [], []
    for p, g, m, v in zip(params.weights, weight_grads, state.m_weights, state.v_weights):
        p2, m2, v2 = upd(p, g, m, v)
        new_w.append(p2); new_mw.append(m2); new_vw.append(v2)
    new_b, new_mb, new_vb = [], [], []
    for p, g, m, v in zip(params.biases, bias_grads, state.m_biases, state.v_biases):
        p2, m2, v2 = upd(p, g, m, v)
        new_b.append(p2); new_mb.append(m2); new_vb.append(v2)

    new_state = AdamState(step=t, m_weights=tuple(new_mw), v_weights=tuple(new_vw),
                          m_biases=tuple(new_mb), v_biases=tuple(new_vb),
                          lr=state.lr, beta1=state.beta1, beta2=state.beta2,
                          eps=state.eps)
    new_params = MlpParams(layer_dims=params.layer_dims, weights=tuple(new_w),
                           biases=tuple(new_b))
    return new_state, new_params


def finite_diff_check(params: MlpParams, x, targets, h=1e-4, n_coords=60, seed=0):
    """Max relative error between analytic and central-difference gradients
    on randomly chosen coordinates.  With very small h the result is
    round-off dominated; it is still returned as-is."""
    x = _check_batch(params, x)
    _, gw, gb = mlp_grad(params, x, targets)
    flat_specs = []
    for i, w in enumerate(params.weights):
        flat_specs.extend(("w", i, k) for k in range(w.size))
    for i, b in enumerate(params.biases):
        flat_specs.extend(("b", i, k) for k in range(b.size))
    key = rng.as_key(seed)
    picks = rng.permutation(rng.substream(key, "fd-coords"), len(flat_specs))
    picks = picks[:min(n_coords, len(flat_specs))]

    def loss_with(kind, layer, flat_ix, delta):
        ws = [w.copy() for w in params.weights]
        bs = [b.copy() for b in params.biases]
        if kind == "w":
            ws[layer].flat[flat_ix] += delta
        else:
            bs[layer].flat[flat_ix] += delta
        p = MlpParams(params.layer_dims, tuple(ws), tuple(bs))
        loss, _, _ = mlp_grad(p, x, targets)
        return loss

    max_rel = 0.0
    for p_ix in picks:
        kind, layer, flat_ix = flat_specs[p_ix]
        num = (loss_with(kind, layer, flat_ix, h)
               - loss_with(kind, layer, flat_ix, -h)) / (2.0 * h)
        ana = (gw if kind == "w" else gb)[layer].flat[flat_ix]
        rel = abs(num - ana) / max(1.0, abs(ana))
        max_rel = max(max_rel, rel)
    return max_rel
