"""Small float64 neural kernel: gated recurrent cell, dense layers, loss,
hand-written gradients, finite-difference checking, Adam, checkpoints.
"""

import json
import zlib
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

CHECKPOINT_FORMAT = "lexnet-checkpoint"
CHECKPOINT_VERSION = 1


def rng_for(seed: int, stream: str) -> np.random.Generator:
    """Independent generator for a named stream under one run seed."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(zlib.crc32(stream.encode("utf-8")),))
    return np.random.Generator(np.random.PCG64(ss))


def glorot(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    bound = np.sqrt(6.0 / (rows + cols))
    return rng.uniform(-bound, bound, size=(rows, cols))


def sigmoid(z):
    # tanh form never overflows.
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def affine(W: np.ndarray, b: Optional[np.ndarray], x: np.ndarray) -> np.ndarray:
    if W.shape[1] != x.shape[0]:
        raise ValueError(f"affine: weight {W.shape} does not accept input of length {x.shape[0]}")
    z = W @ x
    if b is not None:
        if b.shape != (W.shape[0],):
            raise ValueError(f"affine: bias {b.shape} does not match weight {W.shape}")
        z = z + b
    return z


def softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - np.max(z))
    return e / e.sum()


def cross_entropy(c: np.ndarray, gold: int) -> float:
    if not 0 <= gold < len(c):
        raise ValueError(f"gold class {gold} outside 0..{len(c) - 1}")
    return float(-np.log(c[gold]))


def softmax_xent_grad(c: np.ndarray, gold: int) -> np.ndarray:
    """d(-log softmax(z)[gold]) / dz."""
    g = c.copy()
    g[gold] -= 1.0
    return g


class ParamSet:
    """Named float64 tensors with matching gradient and Adam moment buffers."""

    def __init__(self):
        self.values: Dict[str, np.ndarray] = {}
        self.grads: Dict[str, np.ndarray] = {}
        self.m: Dict[str, np.ndarray] = {}
        self.v: Dict[str, np.ndarray] = {}
        self.t = 0

    def add(self, name: str, value: np.ndarray) -> np.ndarray:
        if name in self.values:
            raise KeyError(f"duplicate parameter {name!r}")
        value = np.array(value, dtype=np.float64)
        self.values[name] = value
        self.grads[name] = np.zeros_like(value)
        self.m[name] = np.zeros_like(value)
        self.v[name] = np.zeros_like(value)
        return value

    def __getitem__(self, name):
        return self.values[name]

    def __contains__(self, name):
        return name in self.values

    def __iter__(self):
        return iter(self.values)

    def size(self) -> int:
        return sum(v.size for v in self.values.values())

    def zero_grad(self):
        for g in self.grads.values():
            g.fill(0.0)

    def assert_finite(self):
        for name, v in self.values.items():
            if not np.all(np.isfinite(v)):
                raise FloatingPointError(f"parameter {name!r} has non-finite values")

    def snapshot(self) -> Dict[str, np.ndarray]:
        return {k: v.copy() for k, v in self.values.items()}

    def restore(self, snap: Dict[str, np.ndarray]):
        for k, v in snap.items():
            self.values[k][...] = v


class Adam:
    """Adam with bias correction.

    Moments decay on every step; parameters only move where the current
    gradient is non-zero, so untouched embedding rows stay put.
    """

    def __init__(self, lr: float = 0.001, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps

    def step(self, params: ParamSet):
        params.t += 1
        t = params.t
        c1 = 1.0 - self.beta1 ** t
        c2 = 1.0 - self.beta2 ** t
        for name, p in params.values.items():
            g = params.grads[name]
            m, v = params.m[name], params.v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            update = self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)
            update[g == 0.0] = 0.0
            if not np.all(np.isfinite(update)):
                raise FloatingPointError(f"non-finite update for {name!r}")
            p -= update
            g.fill(0.0)


# Gated recurrent cell. Gate rows are stacked [input, forget, output, candidate].

def init_cell(params: ParamSet, prefix: str, input_size: int, hidden: int, rng: np.random.Generator):
    if hidden < 1:
        raise ValueError("hidden size must be >= 1")
    params.add(f"{prefix}.Wx", glorot(rng, 4 * hidden, input_size))
    params.add(f"{prefix}.Wh", glorot(rng, 4 * hidden, hidden))
    b = np.zeros(4 * hidden)
    b[hidden:2 * hidden] = 1.0
    params.add(f"{prefix}.b", b)


def _check_cell(Wx, Wh, b, x, h, c):
    H = Wh.shape[1]
    if Wh.shape != (4 * H, H) or Wx.shape[0] != 4 * H or b.shape != (4 * H,):
        raise ValueError(f"inconsistent cell shapes Wx{Wx.shape} Wh{Wh.shape} b{b.shape}")
    if x.shape != (Wx.shape[1],) or h.shape != (H,) or c.shape != (H,):
        raise ValueError(f"cell inputs x{x.shape} h{h.shape} c{c.shape} do not fit Wx{Wx.shape}")


def cell_step(Wx, Wh, b, x, h_prev, c_prev):
    """One step of the gated cell; returns (h, c)."""
    _check_cell(Wx, Wh, b, x, h_prev, c_prev)
    H = h_prev.shape[0]
    z = Wx @ x + Wh @ h_prev + b
    i, f, o = sigmoid(z[:H]), sigmoid(z[H:2 * H]), sigmoid(z[2 * H:3 * H])
    g = np.tanh(z[3 * H:])
    c = f * c_prev + i * g
    return o * np.tanh(c), c


def encode_sequence(Wx, Wh, b, inputs) -> np.ndarray:
    """Final hidden state after running the cell over ``inputs`` from zeros."""
    h, _ = run_sequence(Wx, Wh, b, inputs)
    return h


def run_sequence(Wx, Wh, b, inputs):
    """Run the cell over a (steps x input_size) matrix; returns final h and a cache."""
    X = np.asarray(inputs, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("cannot encode an empty sequence")
    H = Wh.shape[1]
    h, c = np.zeros(H), np.zeros(H)
    _check_cell(Wx, Wh, b, X[0], h, c)
    Zx = X @ Wx.T + b
    steps = []
    for t in range(X.shape[0]):
        z = Zx[t] + Wh @ h
        ifo = sigmoid(z[:3 * H])
        i, f, o = ifo[:H], ifo[H:2 * H], ifo[2 * H:]
        g = np.tanh(z[3 * H:])
        c_prev, h_prev = c, h
        c = f * c_prev + i * g
        tc = np.tanh(c)
        h = o * tc
        steps.append((h_prev, c_prev, i, f, o, g, tc))
    return h, (X, steps)


def sequence_backward(Wx, Wh, dh_final, cache, grads):
    """Backprop through time from a gradient on the final hidden state.

    Adds into ``grads`` = (dWx, dWh, db) and returns the input gradient matrix.
    """
    X, steps = cache
    dWx, dWh, db = grads
    H = Wh.shape[1]
    L = len(steps)
    dZ = np.empty((L, 4 * H))
    dh = dh_final
    dc = np.zeros(H)
    for t in range(L - 1, -1, -1):
        h_prev, c_prev, i, f, o, g, tc = steps[t]
        dc = dc + dh * o * (1.0 - tc * tc)
        dz = dZ[t]
        dz[:H] = dc * g * i * (1.0 - i)
        dz[H:2 * H] = dc * c_prev * f * (1.0 - f)
        dz[2 * H:3 * H] = dh * tc * o * (1.0 - o)
        dz[3 * H:] = dc * i * (1.0 - g * g)
        dWh += np.outer(dz, h_prev)
        dh = Wh.T @ dz
        dc = dc * f
    dWx += dZ.T @ X
    db += dZ.sum(axis=0)
    return dZ @ Wx


def grad_check(loss_and_grads: Callable[[], Tuple[float, Dict[str, np.ndarray]]],
               params: ParamSet, eps: float = 1e-5, names: Optional[List[str]] = None,
               floor: float = 1e-6) -> float:
    """Largest relative error between analytic and central-difference gradients.

    ``loss_and_grads`` evaluates the loss at the current parameter values and
    returns it with the analytic gradients. Relative error is
    |a - n| / max(|a|, |n|, floor); entries where both are exactly zero count 0.
    The floor keeps round-off in the difference quotient (about 1e-11 at
    eps=1e-5) from dominating for near-zero gradients.
    """
    _, analytic = loss_and_grads()
    analytic = {k: np.array(v, copy=True) for k, v in analytic.items()}
    worst = 0.0
    for name in names or list(params.values):
        p = params.values[name]
        a_all = analytic.get(name, np.zeros_like(p))
        flat = p.reshape(-1)
        a_flat = a_all.reshape(-1)
        for k in range(flat.size):
            orig = flat[k]
            flat[k] = orig + eps
            lp, _ = loss_and_grads()
            flat[k] = orig - eps
            lm, _ = loss_and_grads()
            flat[k] = orig
            if not (np.isfinite(lp) and np.isfinite(lm) and np.isfinite(a_flat[k])):
                raise FloatingPointError(f"non-finite value while checking {name}[{k}]")
            num = (lp - lm) / (2.0 * eps)
            a = a_flat[k]
            if a == 0.0 and num == 0.0:
                continue
            err = abs(a - num) / max(abs(a), abs(num), floor)
            worst = max(worst, err)
    return worst


def save_checkpoint(stream, tensors: Dict[str, np.ndarray], meta: dict) -> None:
    """Write a versioned JSON checkpoint; output is byte-deterministic."""
    doc = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "meta": meta,
        "tensors": {
            name: {"shape": list(t.shape), "values": [float(v) for v in t.reshape(-1)]}
            for name, t in tensors.items()
        },
    }
    json.dump(doc, stream, sort_keys=True, allow_nan=False, separators=(",", ":"))
    stream.write("\n")


def load_checkpoint(stream) -> Tuple[Dict[str, np.ndarray], dict]:
    doc = json.load(stream)
    if doc.get("format") != CHECKPOINT_FORMAT:
        raise ValueError("not a lexnet checkpoint")
    if doc.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {doc.get('version')}")
    tensors = {
        name: np.array(t["values"], dtype=np.float64).reshape(t["shape"])
        for name, t in doc["tensors"].items()
    }
    return tensors, doc["meta"]
