"""Small dense networks on numpy: exact backprop, Adam, and affine parameter perturbation.

Everything is float64. A network is a list of (W, b) layers with ReLU on hidden
layers and a linear output; agent-specific heads (softmax, tanh-Gaussian, ...)
live with the agents. Parameter "blocks" are the flat ordering
[W0, b0, W1, b1, ...] used by gradients, Adam, direction vectors and perturbation.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import NumericError, ValidationError

SNAPSHOT_SCHEMA = 1


class Network:
    """Fully connected ReLU network. Weights have shape (out_dim, in_dim)."""

    __slots__ = ("weights", "biases", "seed")

    def __init__(self, weights, biases, seed=None):
        if not weights or len(weights) != len(biases):
            raise ValidationError("need equal, nonzero numbers of weight and bias arrays")
        self.weights = [np.array(w, dtype=np.float64) for w in weights]
        self.biases = [np.array(b, dtype=np.float64) for b in biases]
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.ndim != 1 or b.shape[0] != w.shape[0]:
                raise ValidationError(f"layer {i}: inconsistent shapes W{w.shape} b{b.shape}")
            if i > 0 and w.shape[1] != self.weights[i - 1].shape[0]:
                raise ValidationError(
                    f"layer {i}: in-dim {w.shape[1]} != out-dim {self.weights[i - 1].shape[0]} of layer {i - 1}"
                )
        self.seed = seed

    @property
    def layer_dims(self):
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    @property
    def n_layers(self):
        return len(self.weights)

    def param_blocks(self):
        """Live views of all parameters in fixed order [W0, b0, W1, b1, ...]."""
        blocks = []
        for w, b in zip(self.weights, self.biases):
            blocks.append(w)
            blocks.append(b)
        return blocks

    def num_params(self):
        return sum(p.size for p in self.param_blocks())

    def clone(self):
        """Value-equal, storage-independent copy."""
        return Network([w.copy() for w in self.weights], [b.copy() for b in self.biases], self.seed)

    def value_equal(self, other):
        return self.layer_dims == other.layer_dims and all(
            np.array_equal(a, b) for a, b in zip(self.param_blocks(), other.param_blocks())
        )


def congruent(net, blocks):
    """True when `blocks` matches the network's block shapes one for one."""
    own = net.param_blocks()
    return len(own) == len(blocks) and all(p.shape == np.shape(q) for p, q in zip(own, blocks))


def zeros_like_blocks(net):
    return [np.zeros_like(p) for p in net.param_blocks()]


def mlp_init(layer_dims, seed):
    """Kaiming-uniform weights (bound sqrt(6/fan_in)), zero biases, deterministic in seed."""
    dims = list(layer_dims)
    if len(dims) < 2:
        raise ValidationError(f"need at least input and output dims, got {dims}")
    if any((not isinstance(d, (int, np.integer))) or d < 1 for d in dims):
        raise ValidationError(f"layer dims must be positive integers, got {dims}")
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        bound = math.sqrt(6.0 / fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return Network(weights, biases, seed=seed)


def _as_batch(net, x):
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    xb = x[None, :] if single else x
    if xb.ndim != 2 or xb.shape[1] != net.layer_dims[0]:
        raise ValidationError(f"input dim {x.shape} does not match network input {net.layer_dims[0]}")
    return xb, single


def forward(net, x):
    """Apply the network; hidden ReLU, raw linear output. Accepts (d,) or (B, d)."""
    xb, single = _as_batch(net, x)
    h = xb
    last = net.n_layers - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = h @ w.T + b
        h = np.maximum(z, 0.0) if i < last else z
    return h[0] if single else h


def forward_cached(net, x):
    """Forward pass keeping per-layer inputs and pre-activations for backprop."""
    xb, single = _as_batch(net, x)
    inputs, preacts = [], []
    h = xb
    last = net.n_layers - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        inputs.append(h)
        z = h @ w.T + b
        preacts.append(z)
        h = np.maximum(z, 0.0) if i < last else z
    return (h[0] if single else h), (inputs, preacts, single)


def backprop(net, cache, grad_out):
    """Reverse pass from d(loss)/d(outputs); returns (block gradients, d(loss)/d(inputs))."""
    inputs, preacts, single = cache
    g = np.asarray(grad_out, dtype=np.float64)
    if single:
        g = g[None, :]
    grads = [None] * (2 * net.n_layers)
    last = net.n_layers - 1
    for i in range(last, -1, -1):
        if i < last:
            g = g * (preacts[i] > 0.0)
        grads[2 * i] = g.T @ inputs[i]
        grads[2 * i + 1] = g.sum(axis=0)
        g = g @ net.weights[i]
    return grads, (g[0] if single else g)


def loss_and_grad(net, loss_fn, batch):
    """Scalar loss and exact parameter gradients.

    `loss_fn(outputs) -> (loss, d loss / d outputs)` defines the head; `batch`
    is the stacked network input.
    """
    batch = np.asarray(batch, dtype=np.float64)
    if batch.size == 0:
        raise ValidationError("empty batch")
    outputs, cache = forward_cached(net, batch)
    if not np.all(np.isfinite(outputs)):
        raise NumericError("non-finite values in forward pass")
    loss, grad_out = loss_fn(outputs)
    grads, _ = backprop(net, cache, grad_out)
    return float(loss), grads


def _direction_blocks(dirs):
    if hasattr(dirs, "x") and hasattr(dirs, "y"):
        return dirs.x, dirs.y
    x, y = dirs
    return x, y


def perturb(net, dirs, alpha, beta):
    """Fresh network at theta + alpha*x + beta*y; the source is untouched."""
    xs, ys = _direction_blocks(dirs)
    if not (congruent(net, xs) and congruent(net, ys)):
        raise ValidationError("direction blocks do not match network shapes")
    blocks = net.param_blocks()
    # summing the two scaled directions first keeps x<->y swaps bit-exact
    new = [p + (alpha * x + beta * y) for p, x, y in zip(blocks, xs, ys)]
    weights = [new[2 * i] for i in range(net.n_layers)]
    biases = [new[2 * i + 1] for i in range(net.n_layers)]
    return Network(weights, biases, net.seed)


class AdamState:
    """First/second moment accumulators per block plus the step counter."""

    __slots__ = ("lr", "beta1", "beta2", "eps", "step", "m", "v")

    def __init__(self, net, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step = 0
        self.m = zeros_like_blocks(net)
        self.v = zeros_like_blocks(net)

    def clone(self):
        out = object.__new__(AdamState)
        out.lr, out.beta1, out.beta2, out.eps, out.step = (
            self.lr, self.beta1, self.beta2, self.eps, self.step)
        out.m = [a.copy() for a in self.m]
        out.v = [a.copy() for a in self.v]
        return out


def adam_step(net, grads, state):
    """One in-place Adam update; returns (net, state)."""
    if not congruent(net, grads):
        raise ValidationError("gradient blocks do not match network shapes")
    for g in grads:
        if not np.all(np.isfinite(g)):
            raise NumericError("non-finite gradient")
    state.step += 1
    b1c = 1.0 - state.beta1 ** state.step
    b2c = 1.0 - state.beta2 ** state.step
    for p, g, m, v in zip(net.param_blocks(), grads, state.m, state.v):
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * np.square(g)
        p -= state.lr * (m / b1c) / (np.sqrt(v / b2c) + state.eps)
    return net, state


def network_to_dict(net):
    """JSON-ready snapshot; float64 repr round-trips bit-exactly."""
    blocks = net.param_blocks()
    for p in blocks:
        if not np.all(np.isfinite(p)):
            raise NumericError("refusing to serialize non-finite parameters")
    return {
        "schema": SNAPSHOT_SCHEMA,
        "layer_dims": net.layer_dims,
        "activation": "relu",
        "blocks": [p.ravel(order="C").tolist() for p in blocks],
    }


def network_from_dict(doc):
    if doc.get("schema") != SNAPSHOT_SCHEMA:
        raise ValidationError(f"unknown snapshot schema {doc.get('schema')!r}")
    dims = doc["layer_dims"]
    blocks = doc["blocks"]
    if len(blocks) != 2 * (len(dims) - 1):
        raise ValidationError("block count does not match layer dims")
    weights, biases = [], []
    for i, (fan_in, fan_out) in enumerate(zip(dims[:-1], dims[1:])):
        weights.append(np.array(blocks[2 * i], dtype=np.float64).reshape(fan_out, fan_in))
        biases.append(np.array(blocks[2 * i + 1], dtype=np.float64))
    return Network(weights, biases)


def save_network(net, path):
    with open(path, "w") as fh:
        json.dump(network_to_dict(net), fh)


def load_network(path):
    with open(path) as fh:
        return network_from_dict(json.load(fh))
