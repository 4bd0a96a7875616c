"""Single-layer LSTM -> dropout -> dense regressor with hand-written BPTT and Adam.

Cell equations, per step (sigma is the logistic function, * is elementwise)::

    f = sigma(W_f x + U_f h + b_f)      forget gate
    i = sigma(W_i x + U_i h + b_i)      input gate
    g = tanh (W_g x + U_g h + b_g)      candidate
    o = sigma(W_o x + U_o h + b_o)      output gate
    c = f * c_prev + i * g
    h = o * tanh(c)

Only the last hidden state feeds the head: ``pred = w . dropout(h_T) + b``.
Everything is float64. Sequences are batched as arrays of shape
(batch, steps, input_size); the batch axis is purely a vectorisation of
independent samples and gradients are the sum over it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

GATES = ("f", "i", "g", "o")
CHECKPOINT_FORMAT = "cryptolstm-checkpoint"
CHECKPOINT_VERSION = 1


class NonFiniteActivation(FloatingPointError):
    pass


class NonFiniteGradient(FloatingPointError):
    pass


@dataclass
class LstmParams:
    W_f: np.ndarray
    W_i: np.ndarray
    W_g: np.ndarray
    W_o: np.ndarray
    U_f: np.ndarray
    U_i: np.ndarray
    U_g: np.ndarray
    U_o: np.ndarray
    b_f: np.ndarray
    b_i: np.ndarray
    b_g: np.ndarray
    b_o: np.ndarray

    def __post_init__(self):
        hidden, inp = self.W_f.shape
        for k in GATES:
            if getattr(self, f"W_{k}").shape != (hidden, inp):
                raise ValueError(f"W_{k} must be {hidden}x{inp}")
            if getattr(self, f"U_{k}").shape != (hidden, hidden):
                raise ValueError(f"U_{k} must be {hidden}x{hidden}")
            if getattr(self, f"b_{k}").shape != (hidden,):
                raise ValueError(f"b_{k} must have {hidden} entries")

    @property
    def hidden_size(self) -> int:
        return self.W_f.shape[0]

    @property
    def input_size(self) -> int:
        return self.W_f.shape[1]

    @classmethod
    def zeros(cls, input_size: int, hidden_size: int) -> "LstmParams":
        kw = {}
        for k in GATES:
            kw[f"W_{k}"] = np.zeros((hidden_size, input_size))
            kw[f"U_{k}"] = np.zeros((hidden_size, hidden_size))
            kw[f"b_{k}"] = np.zeros(hidden_size)
        return cls(**kw)


@dataclass
class DenseParams:
    weight: np.ndarray  # (1, hidden)
    bias: np.ndarray  # (1,)

    def __post_init__(self):
        self.bias = np.asarray(self.bias, dtype=float).reshape(1)
        if self.weight.ndim != 2 or self.weight.shape[0] != 1:
            raise ValueError("dense weight must have shape (1, hidden)")


@dataclass(frozen=True)
class DropoutConfig:
    rate: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.rate < 1.0:
            raise ValueError("dropout rate must lie in [0, 1)")


def named_arrays(lstm: LstmParams, dense: DenseParams) -> dict[str, np.ndarray]:
    """All trainable arrays in a fixed order, keyed by name."""
    out = {f.name: getattr(lstm, f.name) for f in fields(lstm)}
    out["dense.weight"] = dense.weight
    out["dense.bias"] = dense.bias
    return out


def from_named(arrays: dict[str, np.ndarray]) -> tuple[LstmParams, DenseParams]:
    lstm = LstmParams(**{f.name: arrays[f.name] for f in fields(LstmParams)})
    return lstm, DenseParams(arrays["dense.weight"], arrays["dense.bias"])


def _glorot(rng: np.random.Generator, fan_out: int, fan_in: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_out, fan_in))


def init_params(input_size: int, hidden_size: int, seed: int) -> tuple[LstmParams, DenseParams]:
    """Glorot-uniform weights, zero biases except the forget gate (1.0)."""
    if input_size < 1 or hidden_size < 1:
        raise ValueError("sizes must be >= 1")
    rng = np.random.default_rng(seed)
    kw = {}
    for k in GATES:
        kw[f"W_{k}"] = _glorot(rng, hidden_size, input_size)
    for k in GATES:
        kw[f"U_{k}"] = _glorot(rng, hidden_size, hidden_size)
    for k in GATES:
        kw[f"b_{k}"] = np.full(hidden_size, 1.0 if k == "f" else 0.0)
    dense = DenseParams(_glorot(rng, 1, hidden_size), np.zeros(1))
    return LstmParams(**kw), dense


def _sigmoid(z):
    # split form avoids overflow in exp for large |z|
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class ForwardCache:
    xs: np.ndarray  # (steps, batch, input)
    hs: np.ndarray  # (steps + 1, batch, hidden); hs[0] is the zero state
    cs: np.ndarray
    gates: dict[str, np.ndarray]  # each (steps, batch, hidden), post-activation
    tanh_c: np.ndarray
    mask: np.ndarray  # (batch, hidden); ones in infer mode
    h_out: np.ndarray  # masked final hidden state fed to the head
    unbatched: bool = field(default=False)


def _as_batch(sequence) -> tuple[np.ndarray, bool]:
    x = np.asarray(sequence, dtype=float)
    if x.ndim == 1:  # (steps,) scalar inputs
        return x[None, :, None], True
    if x.ndim == 2:  # (steps, input)
        return x[None], True
    if x.ndim == 3:
        return x, False
    raise ValueError(f"sequence must be 1-, 2- or 3-dimensional, got shape {x.shape}")


def lstm_forward(sequence, params: LstmParams, dropout: DropoutConfig | None = None,
                 mode: str = "infer", rng: np.random.Generator | None = None):
    """Run the cell over ``sequence`` from zero initial state.

    Returns ``(h, cache)`` where ``h`` is the (dropout-masked, in train mode)
    final hidden state: shape (hidden,) for an unbatched sequence, otherwise
    (batch, hidden). In train mode the mask uses inverted scaling by
    1/(1 - rate) and is drawn from ``rng`` (or a generator seeded from
    ``dropout.seed`` when no generator is supplied).
    """
    if mode not in ("train", "infer"):
        raise ValueError("mode must be 'train' or 'infer'")
    x, unbatched = _as_batch(sequence)
    batch, steps, inp = x.shape
    if inp != params.input_size:
        raise ValueError(f"expected input_size {params.input_size}, got {inp}")
    H = params.hidden_size
    xs = np.ascontiguousarray(x.transpose(1, 0, 2))
    hs = np.zeros((steps + 1, batch, H))
    cs = np.zeros((steps + 1, batch, H))
    gates = {k: np.empty((steps, batch, H)) for k in GATES}
    tanh_c = np.empty((steps, batch, H))

    W = {k: getattr(params, f"W_{k}") for k in GATES}
    U = {k: getattr(params, f"U_{k}") for k in GATES}
    b = {k: getattr(params, f"b_{k}") for k in GATES}

    for t in range(steps):
        xt, hp = xs[t], hs[t]
        z = {k: xt @ W[k].T + hp @ U[k].T + b[k] for k in GATES}
        f, i, o = _sigmoid(z["f"]), _sigmoid(z["i"]), _sigmoid(z["o"])
        g = np.tanh(z["g"])
        cs[t + 1] = f * cs[t] + i * g
        tanh_c[t] = np.tanh(cs[t + 1])
        hs[t + 1] = o * tanh_c[t]
        gates["f"][t], gates["i"][t], gates["g"][t], gates["o"][t] = f, i, g, o

    if not np.all(np.isfinite(hs[-1])) or not np.all(np.isfinite(cs[-1])):
        raise NonFiniteActivation("LSTM produced a non-finite state")

    mask = np.ones((batch, H))
    if mode == "train" and dropout is not None and dropout.rate > 0:
        gen = rng if rng is not None else np.random.default_rng(dropout.seed)
        keep = gen.random((batch, H)) >= dropout.rate
        mask = keep / (1.0 - dropout.rate)
    h_out = hs[-1] * mask
    cache = ForwardCache(xs, hs, cs, gates, tanh_c, mask, h_out, unbatched)
    return (h_out[0] if unbatched else h_out), cache


def dense_forward(h, params: DenseParams):
    """``weight . h + bias``; a scalar for a single state, a (batch,) array for a batch."""
    h = np.asarray(h, dtype=float)
    out = h @ params.weight[0] + params.bias[0]
    return float(out) if np.ndim(out) == 0 else out


def mse_loss(predictions, targets) -> float:
    p, y = _paired(predictions, targets)
    return float(np.mean((p - y) ** 2))


def mse_grad(predictions, targets) -> np.ndarray:
    """d(mse)/d(prediction) = 2 (pred - target) / N."""
    p, y = _paired(predictions, targets)
    return 2.0 * (p - y) / p.size


class LengthMismatch(ValueError):
    pass


def _paired(a, b):
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if a.shape != b.shape:
        raise LengthMismatch(f"length mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise LengthMismatch("need at least one element")
    return a, b


def backward(cache: ForwardCache, lstm: LstmParams, dense: DenseParams,
             dpred) -> tuple[LstmParams, DenseParams]:
    """Reverse-mode gradients of the loss w.r.t. every parameter.

    ``dpred`` is dL/d(prediction) per sample (shape (batch,) or a scalar for
    an unbatched forward pass). Gradients are summed over the batch.
    """
    dpred = np.atleast_1d(np.asarray(dpred, dtype=float))
    steps, batch, _ = cache.xs.shape
    if dpred.shape != (batch,):
        raise ValueError(f"dpred must have shape ({batch},)")

    d_weight = (dpred @ cache.h_out)[None, :]
    d_bias = np.array([dpred.sum()])
    dh = (dpred[:, None] * dense.weight) * cache.mask
    dc = np.zeros_like(dh)

    grads = LstmParams.zeros(lstm.input_size, lstm.hidden_size)
    U = {k: getattr(lstm, f"U_{k}") for k in GATES}
    f_, i_, g_, o_ = (cache.gates[k] for k in GATES)

    for t in range(steps - 1, -1, -1):
        f, i, g, o, tc = f_[t], i_[t], g_[t], o_[t], cache.tanh_c[t]
        do = dh * tc
        dc = dc + dh * o * (1.0 - tc * tc)
        dz = {
            "f": dc * cache.cs[t] * f * (1.0 - f),
            "i": dc * g * i * (1.0 - i),
            "g": dc * i * (1.0 - g * g),
            "o": do * o * (1.0 - o),
        }
        xt, hp = cache.xs[t], cache.hs[t]
        dh = np.zeros_like(dh)
        for k in GATES:
            getattr(grads, f"W_{k}")[...] += dz[k].T @ xt
            getattr(grads, f"U_{k}")[...] += dz[k].T @ hp
            getattr(grads, f"b_{k}")[...] += dz[k].sum(axis=0)
            dh += dz[k] @ U[k]
        dc = dc * f

    dense_grads = DenseParams(d_weight, d_bias)
    for name, arr in named_arrays(grads, dense_grads).items():
        if not np.all(np.isfinite(arr)):
            raise NonFiniteGradient(f"non-finite gradient in {name}")
    return grads, dense_grads


@dataclass(frozen=True)
class AdamHyper:
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


@dataclass
class AdamState:
    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]
    t: int = 0

    @classmethod
    def zeros_like(cls, lstm: LstmParams, dense: DenseParams) -> "AdamState":
        arrays = named_arrays(lstm, dense)
        return cls({k: np.zeros_like(a) for k, a in arrays.items()},
                   {k: np.zeros_like(a) for k, a in arrays.items()}, 0)


def adam_step(params: tuple[LstmParams, DenseParams], grads: tuple[LstmParams, DenseParams],
              state: AdamState, hyper: AdamHyper = AdamHyper()):
    """One bias-corrected Adam update. Inputs are left untouched; returns ``(params, state)``."""
    p = named_arrays(*params)
    g = named_arrays(*grads)
    t = state.t + 1
    bc1 = 1.0 - hyper.beta1 ** t
    bc2 = 1.0 - hyper.beta2 ** t
    new_p, new_m, new_v = {}, {}, {}
    for k, w in p.items():
        if g[k].shape != w.shape:
            raise ValueError(f"gradient shape mismatch for {k}")
        m = hyper.beta1 * state.m[k] + (1.0 - hyper.beta1) * g[k]
        v = hyper.beta2 * state.v[k] + (1.0 - hyper.beta2) * g[k] * g[k]
        new_p[k] = w - hyper.lr * (m / bc1) / (np.sqrt(v / bc2) + hyper.eps)
        new_m[k], new_v[k] = m, v
    return from_named(new_p), AdamState(new_m, new_v, t)


def save_checkpoint(path, lstm: LstmParams, dense: DenseParams, seed: int | None = None) -> None:
    Path(path).write_text(checkpoint_json(lstm, dense, seed))


def checkpoint_json(lstm: LstmParams, dense: DenseParams, seed: int | None = None) -> str:
    doc = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "input_size": lstm.input_size,
        "hidden_size": lstm.hidden_size,
        "seed": seed,
        "arrays": {k: {"shape": list(a.shape), "data": a.ravel().tolist()}
                   for k, a in named_arrays(lstm, dense).items()},
    }
    return json.dumps(doc, indent=1)


def load_checkpoint(path) -> tuple[LstmParams, DenseParams, int | None]:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != CHECKPOINT_FORMAT or doc.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"{path}: not a version-{CHECKPOINT_VERSION} checkpoint")
    arrays = {k: np.asarray(e["data"], dtype=float).reshape(e["shape"])
              for k, e in doc["arrays"].items()}
    lstm, dense = from_named(arrays)
    return lstm, dense, doc.get("seed")


def copy_params(lstm: LstmParams, dense: DenseParams) -> tuple[LstmParams, DenseParams]:
    return (replace(lstm, **{f.name: getattr(lstm, f.name).copy() for f in fields(lstm)}),
            DenseParams(dense.weight.copy(), dense.bias.copy()))
