"""Small dense feed-forward networks in float64 numpy.

Gradients are derived by hand per layer: ``forward`` keeps every activation
and ``backward`` walks them in reverse given the gradient of a scalar loss
with respect to some layer's output.  This is enough for every network in the
package, including losses that pass through a second, frozen network.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError

ACTIVATIONS = ("linear", "relu", "sigmoid")
PROB_EPS = 1e-7


def sigmoid(x):
    # split by sign so exp never overflows
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _activate(z, kind):
    if kind == "relu":
        return np.maximum(z, 0.0)
    if kind == "sigmoid":
        return sigmoid(z)
    return z


def _activation_grad(a, kind):
    """Derivative of the activation, written in terms of its output ``a``."""
    if kind == "relu":
        return (a > 0.0).astype(a.dtype)
    if kind == "sigmoid":
        return a * (1.0 - a)
    return np.ones_like(a)


@dataclass
class Dense:
    weights: np.ndarray  # (out, in)
    bias: np.ndarray  # (out,)
    activation: str

    @property
    def fan_in(self):
        return self.weights.shape[1]

    @property
    def fan_out(self):
        return self.weights.shape[0]


@dataclass
class Network:
    layers: list
    seed: int = None

    @property
    def input_dim(self):
        return self.layers[0].fan_in

    @property
    def output_dim(self):
        return self.layers[-1].fan_out

    def parameters(self):
        """Flat list ``[W0, b0, W1, b1, ...]`` of the underlying arrays (not copies)."""
        out = []
        for layer in self.layers:
            out.extend((layer.weights, layer.bias))
        return out

    def copy(self):
        return Network(
            [Dense(l.weights.copy(), l.bias.copy(), l.activation) for l in self.layers],
            self.seed,
        )

    def freeze(self):
        for p in self.parameters():
            p.flags.writeable = False

    @property
    def frozen(self):
        return not any(p.flags.writeable for p in self.parameters())

    def __call__(self, x):
        return forward(self, x)[-1]


def init_network(layer_spec, seed):
    """Glorot-uniform weights, zero biases.

    ``layer_spec`` is a sequence of ``(fan_in, fan_out, activation)`` triples.
    """
    rng = np.random.default_rng(seed)
    layers = []
    prev_out = None
    for fan_in, fan_out, act in layer_spec:
        if act not in ACTIVATIONS:
            raise ValueError(f"unknown activation {act!r}")
        if fan_in < 1 or fan_out < 1:
            raise ValueError("layer dimensions must be positive")
        if prev_out is not None and prev_out != fan_in:
            raise ValueError(f"layer dimensions do not chain: {prev_out} -> {fan_in}")
        a = np.sqrt(6.0 / (fan_in + fan_out))
        w = rng.uniform(-a, a, size=(fan_out, fan_in))
        layers.append(Dense(w, np.zeros(fan_out), act))
        prev_out = fan_out
    if not layers:
        raise ValueError("empty layer spec")
    return Network(layers, seed)


def mlp_spec(sizes, hidden_activation, output_activation):
    """Layer spec for a chain ``sizes[0] -> ... -> sizes[-1]``."""
    spec = []
    for i in range(len(sizes) - 1):
        act = output_activation if i == len(sizes) - 2 else hidden_activation
        spec.append((sizes[i], sizes[i + 1], act))
    return spec


def forward(net, batch):
    """Return ``[input, a_1, ..., a_L]``; the last entry is the network output."""
    x = np.asarray(batch, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != net.input_dim:
        raise ValueError(f"expected input width {net.input_dim}, got shape {x.shape}")
    acts = [x]
    for layer in net.layers:
        x = _activate(x @ layer.weights.T + layer.bias, layer.activation)
        acts.append(x)
    if not np.all(np.isfinite(x)):
        raise DivergenceError("non-finite network output")
    return acts


def backward(net, acts, grad_out, top=None, param_grads=True):
    """Back-propagate ``grad_out`` = dL/d(acts[top]) down to the input.

    ``top`` defaults to the output layer.  Returns ``(grads, grad_input)`` where
    ``grads`` is a list of ``(dW, db)`` per layer (zeros above ``top``), or
    ``None`` when ``param_grads`` is false.
    """
    n = len(net.layers)
    top = n if top is None else top
    g = np.asarray(grad_out, dtype=np.float64)
    grads = [None] * n
    for i in range(top - 1, -1, -1):
        layer = net.layers[i]
        gz = g * _activation_grad(acts[i + 1], layer.activation)
        if param_grads:
            grads[i] = (gz.T @ acts[i], gz.sum(axis=0))
        g = gz @ layer.weights
    if not param_grads:
        return None, g
    for i in range(top, n):
        layer = net.layers[i]
        grads[i] = (np.zeros_like(layer.weights), np.zeros_like(layer.bias))
    for dw, db in grads:
        if not (np.all(np.isfinite(dw)) and np.all(np.isfinite(db))):
            raise DivergenceError("non-finite gradient")
    return grads, g


def flat_grads(grads):
    out = []
    for dw, db in grads:
        out.extend((dw, db))
    return out


# -- losses -----------------------------------------------------------------

def clamp_prob(p):
    return np.clip(p, PROB_EPS, 1.0 - PROB_EPS)


def bce(p, y):
    """Mean binary cross-entropy and its gradient with respect to ``p``.

    The gradient is zero wherever clamping is active, matching the clamped loss.
    """
    p = np.asarray(p, dtype=np.float64)
    y = np.broadcast_to(np.asarray(y, dtype=np.float64), p.shape)
    pc = clamp_prob(p)
    loss = -np.mean(y * np.log(pc) + (1.0 - y) * np.log(1.0 - pc))
    inside = (p > PROB_EPS) & (p < 1.0 - PROB_EPS)
    grad = np.where(inside, -(y / pc - (1.0 - y) / (1.0 - pc)), 0.0) / p.size
    return float(loss), grad


def log_one_minus(p):
    """``log(1 - p)`` on clamped ``p`` and its derivative."""
    pc = clamp_prob(p)
    inside = (p > PROB_EPS) & (p < 1.0 - PROB_EPS)
    return np.log(1.0 - pc), np.where(inside, -1.0 / (1.0 - pc), 0.0)


def neg_log(p):
    """``-log p`` on clamped ``p`` and its derivative."""
    pc = clamp_prob(p)
    inside = (p > PROB_EPS) & (p < 1.0 - PROB_EPS)
    return -np.log(pc), np.where(inside, -1.0 / pc, 0.0)


def npair_loss(anchor, positive, negatives):
    """Softmax N-pair loss on raw dot products, averaged over the batch.

    ``anchor`` and ``positive`` are (m, d); ``negatives`` is (c, d) and shared
    by every row.  Returns ``(loss, d loss / d anchor)``.
    """
    m = anchor.shape[0]
    s_pos = np.einsum("ij,ij->i", anchor, positive)
    s_neg = anchor @ negatives.T
    logits = np.column_stack([s_pos, s_neg])
    shift = logits.max(axis=1, keepdims=True)
    e = np.exp(logits - shift)
    z = e.sum(axis=1, keepdims=True)
    soft = e / z
    loss = np.mean(np.log(z[:, 0]) + shift[:, 0] - s_pos)
    grad = (soft[:, :1] - 1.0) * positive + soft[:, 1:] @ negatives
    return float(loss), grad / m


# -- optimisation -----------------------------------------------------------

class Adam:
    """Bias-corrected Adam over a fixed list of parameter arrays (updated in place)."""

    def __init__(self, params, lr=0.001, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = list(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in self.params]
        self.v = [np.zeros_like(p) for p in self.params]

    def step(self, grads):
        self.t += 1
        bc1 = 1.0 - self.beta1 ** self.t
        bc2 = 1.0 - self.beta2 ** self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            p -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)


def adam_step(net, grads, state):
    """Apply one Adam update to ``net`` from per-layer ``(dW, db)`` grads."""
    state.step(flat_grads(grads))
    return net, state


# -- verification -----------------------------------------------------------

def finite_diff_check(params, loss_fn, analytic, h=1e-5):
    """Largest relative error between ``analytic`` and central differences.

    ``params`` is a list of arrays perturbed in place, ``loss_fn()`` re-evaluates
    the scalar loss, and ``analytic`` lists gradients aligned with ``params``.
    Relative error uses a ``max(1, |analytic|)`` denominator.
    """
    worst = 0.0
    for p, g in zip(params, analytic):
        flat = p.reshape(-1)
        gflat = np.asarray(g).reshape(-1)
        for i in range(flat.size):
            old = flat[i]
            flat[i] = old + h
            up = loss_fn()
            flat[i] = old - h
            down = loss_fn()
            flat[i] = old
            num = (up - down) / (2.0 * h)
            err = abs(num - gflat[i]) / max(1.0, abs(gflat[i]))
            worst = max(worst, err)
    return worst
