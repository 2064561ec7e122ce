"""From-scratch differentiable sequence classifiers and the training loop.

Two architectures: a small Transformer encoder (post-norm, PyTorch-style
layers, masked attention, masked mean or last-timestep pooling) and a
linear-pooled softmax classifier. Forward and backward passes are hand-derived
numpy; gradients are verified against central finite differences in the test
suite. Training is fully deterministic under the config seed.
"""

from __future__ import annotations

import dataclasses
import json
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.special import erf

from .augment import AugmentationSpec
from .core import LabeledDataset, LandmarkSequence
from .seeding import STREAM_DROPOUT, STREAM_INIT, STREAM_SHUFFLE, make_rng

__all__ = [
    "ModelConfig",
    "TrainConfig",
    "TrainedSpecialist",
    "build_network",
    "sequence_features",
    "forward",
    "loss_and_gradients",
    "adam_init",
    "adam_step",
    "train",
    "predict",
    "save_specialist",
    "load_specialist",
]

LN_EPS = 1e-5
WEIGHTS_MAGIC = b"SKWT"
WEIGHTS_VERSION = 1


@dataclass
class ModelConfig:
    """Architecture shape. model_dim defaults to heads * ceil(input_dim / heads)."""

    arch: str  # "transformer" | "linear-pooled"
    input_dim: int
    class_count: int
    seq_len: int
    model_dim: int | None = None
    encoder_layers: int = 4
    attention_heads: int = 9
    ff_dim: int = 256
    dropout: float = 0.1
    pooling: str = "mean"  # "mean" | "last"

    def __post_init__(self) -> None:
        if self.arch not in ("transformer", "linear-pooled"):
            raise ValueError(f"unknown arch {self.arch!r}")
        if self.pooling not in ("mean", "last"):
            raise ValueError(f"unknown pooling {self.pooling!r}")
        if min(self.input_dim, self.class_count, self.seq_len) < 1:
            raise ValueError("input_dim, class_count, seq_len must be >= 1")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must lie in [0, 1)")
        if self.arch == "transformer":
            if self.encoder_layers < 1 or self.attention_heads < 1 or self.ff_dim < 1:
                raise ValueError("encoder_layers, attention_heads, ff_dim must be >= 1")
            if self.model_dim is not None and self.model_dim % self.attention_heads:
                raise ValueError("model_dim must be divisible by attention_heads")

    @property
    def resolved_model_dim(self) -> int:
        if self.model_dim is not None:
            return self.model_dim
        h = self.attention_heads
        return h * math.ceil(self.input_dim / h)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class TrainConfig:
    learning_rate: float = 1e-4
    batch_size: int = 16
    max_epochs: int = 400
    patience: int = 50  # 0 disables early stopping (max-epochs run)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.learning_rate <= 0 or self.batch_size < 1 or self.max_epochs < 1 or self.patience < 0:
            raise ValueError("train config values must be positive (patience >= 0)")


# ---------------------------------------------------------------------------
# Shared pieces
# ---------------------------------------------------------------------------

def sequence_features(sequences: Sequence[LandmarkSequence]) -> tuple[np.ndarray, np.ndarray]:
    """Stack sequences into (N, T, J*3) features and an (N, T) mask."""
    if not sequences:
        raise ValueError("no sequences")
    t = sequences[0].T
    if any(s.T != t for s in sequences):
        raise ValueError("sequences must share T; run normalize_length first")
    x = np.stack([s.frames.reshape(t, -1) for s in sequences])
    m = np.stack([s.frame_mask for s in sequences])
    return x, m


def _softmax_rows(logits: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    log_probs = shifted - log_z
    return np.exp(log_probs), log_probs


def _pool(h: np.ndarray, mask: np.ndarray, pooling: str) -> tuple[np.ndarray, dict]:
    if pooling == "mean":
        denom = mask.sum(axis=1).astype(np.float64)
        if np.any(denom == 0):
            raise ValueError("sequence with no real frames")
        pooled = (h * mask[:, :, None]).sum(axis=1) / denom[:, None]
        return pooled, {"denom": denom}
    last = h.shape[1] - 1 - np.argmax(mask[:, ::-1], axis=1)
    if np.any(~mask[np.arange(h.shape[0]), last]):
        raise ValueError("sequence with no real frames")
    return h[np.arange(h.shape[0]), last], {"last": last}

def _pool_backward(dpooled: np.ndarray, mask: np.ndarray, pooling: str, aux: dict, t: int) -> np.ndarray:
    b, d = dpooled.shape
    if pooling == "mean":
        return dpooled[:, None, :] * (mask[:, :, None] / aux["denom"][:, None, None])
    dh = np.zeros((b, t, d))
    dh[np.arange(b), aux["last"]] = dpooled
    return dh


def _dropout_mask(rng: np.random.Generator | None, p: float, shape: tuple) -> np.ndarray | None:
    if rng is None or p <= 0.0:
        return None
    return (rng.random(shape) >= p) / (1.0 - p)


def _gelu(x: np.ndarray) -> np.ndarray:
    # exact (erf) form; smooth everywhere, which keeps the finite-difference
    # gradient verification well-posed at its fixed step size
    return 0.5 * x * (1.0 + erf(x / math.sqrt(2.0)))


def _gelu_prime(x: np.ndarray) -> np.ndarray:
    cdf = 0.5 * (1.0 + erf(x / math.sqrt(2.0)))
    pdf = np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
    return cdf + x * pdf


def _layer_norm(x: np.ndarray, g: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, dict]:
    mu = x.mean(axis=-1, keepdims=True)
    var = x.var(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + LN_EPS)
    xhat = (x - mu) * inv
    return g * xhat + b, {"xhat": xhat, "inv": inv}


def _layer_norm_backward(dy: np.ndarray, g: np.ndarray, cache: dict) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    xhat, inv = cache["xhat"], cache["inv"]
    dg = (dy * xhat).sum(axis=(0, 1))
    db = dy.sum(axis=(0, 1))
    dxhat = dy * g
    dx = inv * (
        dxhat
        - dxhat.mean(axis=-1, keepdims=True)
        - xhat * (dxhat * xhat).mean(axis=-1, keepdims=True)
    )
    return dx, dg, db


# ---------------------------------------------------------------------------
# Architectures
# ---------------------------------------------------------------------------

class LinearPooledNet:
    """Masked temporal pooling of raw features followed by a softmax layer."""

    def __init__(self, config: ModelConfig):
        self.config = config

    def param_specs(self) -> list[tuple[str, tuple, int]]:
        c = self.config
        return [("head.W", (c.input_dim, c.class_count), c.input_dim), ("head.b", (c.class_count,), 0)]

    def init_params(self, rng: np.random.Generator) -> dict[str, np.ndarray]:
        return _init_from_specs(self.param_specs(), rng)

    def forward(self, params, x, mask, dropout_rng=None):
        pooled, aux = _pool(x, mask, self.config.pooling)
        logits = pooled @ params["head.W"] + params["head.b"]
        probs, log_probs = _softmax_rows(logits)
        return probs, {"pooled": pooled, "aux": aux, "probs": probs, "log_probs": log_probs}

    def backward(self, params, cache, labels, x, mask):
        b = len(labels)
        loss = -cache["log_probs"][np.arange(b), labels].mean()
        dlogits = cache["probs"].copy()
        dlogits[np.arange(b), labels] -= 1.0
        dlogits /= b
        grads = {
            "head.W": cache["pooled"].T @ dlogits,
            "head.b": dlogits.sum(axis=0),
        }
        return loss, grads


class TransformerNet:
    """Post-norm Transformer encoder with masked attention and pooling."""

    def __init__(self, config: ModelConfig):
        self.config = config
        self.d = config.resolved_model_dim
        self.heads = config.attention_heads
        self.head_dim = self.d // self.heads

    def param_specs(self) -> list[tuple[str, tuple, int]]:
        c, d = self.config, self.d
        specs = [
            ("embed.W", (c.input_dim, d), c.input_dim),
            ("embed.b", (d,), 0),
            ("pos", (c.seq_len, d), d),
        ]
        for l in range(c.encoder_layers):
            p = f"layers.{l}."
            specs += [
                (p + "attn.Wq", (d, d), d), (p + "attn.bq", (d,), 0),
                # no key bias: softmax scores are invariant to a constant
                # shift per query row, so a key bias cannot train
                (p + "attn.Wk", (d, d), d),
                (p + "attn.Wv", (d, d), d), (p + "attn.bv", (d,), 0),
                (p + "attn.Wo", (d, d), d), (p + "attn.bo", (d,), 0),
                (p + "ln1.g", (d,), -1), (p + "ln1.b", (d,), 0),
                (p + "ff.W1", (d, c.ff_dim), d), (p + "ff.b1", (c.ff_dim,), 0),
                (p + "ff.W2", (c.ff_dim, d), c.ff_dim), (p + "ff.b2", (d,), 0),
                (p + "ln2.g", (d,), -1), (p + "ln2.b", (d,), 0),
            ]
        specs += [("head.W", (d, c.class_count), d), ("head.b", (c.class_count,), 0)]
        return specs

    def init_params(self, rng: np.random.Generator) -> dict[str, np.ndarray]:
        return _init_from_specs(self.param_specs(), rng)

    def _split_heads(self, x: np.ndarray) -> np.ndarray:
        b, t, _ = x.shape
        return x.reshape(b, t, self.heads, self.head_dim).transpose(0, 2, 1, 3)

    def _merge_heads(self, x: np.ndarray) -> np.ndarray:
        b, h, t, hd = x.shape
        return x.transpose(0, 2, 1, 3).reshape(b, t, h * hd)

    def forward(self, params, x, mask, dropout_rng=None):
        c = self.config
        b, t, _ = x.shape
        if t > c.seq_len:
            raise ValueError(f"input has T={t}, model built for seq_len={c.seq_len}")
        h = x @ params["embed.W"] + params["embed.b"] + params["pos"][:t]
        cache = {"x": x, "layers": []}
        scale = 1.0 / math.sqrt(self.head_dim)
        for l in range(c.encoder_layers):
            p = f"layers.{l}."
            lc: dict = {"h_in": h}
            q = self._split_heads(h @ params[p + "attn.Wq"] + params[p + "attn.bq"])
            k = self._split_heads(h @ params[p + "attn.Wk"])
            v = self._split_heads(h @ params[p + "attn.Wv"] + params[p + "attn.bv"])
            scores = (q @ k.transpose(0, 1, 3, 2)) * scale
            scores = np.where(mask[:, None, None, :], scores, -np.inf)
            shifted = scores - scores.max(axis=-1, keepdims=True)
            expd = np.exp(shifted)
            attn = expd / expd.sum(axis=-1, keepdims=True)
            ctx = self._merge_heads(attn @ v)
            attn_out = ctx @ params[p + "attn.Wo"] + params[p + "attn.bo"]
            drop1 = _dropout_mask(dropout_rng, c.dropout, attn_out.shape)
            if drop1 is not None:
                attn_out = attn_out * drop1
            h1, ln1_cache = _layer_norm(h + attn_out, params[p + "ln1.g"], params[p + "ln1.b"])
            z1 = h1 @ params[p + "ff.W1"] + params[p + "ff.b1"]
            r = _gelu(z1)
            ff_out = r @ params[p + "ff.W2"] + params[p + "ff.b2"]
            drop2 = _dropout_mask(dropout_rng, c.dropout, ff_out.shape)
            if drop2 is not None:
                ff_out = ff_out * drop2
            h2, ln2_cache = _layer_norm(h1 + ff_out, params[p + "ln2.g"], params[p + "ln2.b"])
            lc.update(q=q, k=k, v=v, attn=attn, ctx=ctx, drop1=drop1, drop2=drop2,
                      ln1=ln1_cache, h1=h1, z1=z1, r=r, ln2=ln2_cache)
            cache["layers"].append(lc)
            h = h2
        pooled, aux = _pool(h, mask, c.pooling)
        logits = pooled @ params["head.W"] + params["head.b"]
        probs, log_probs = _softmax_rows(logits)
        cache.update(pooled=pooled, aux=aux, probs=probs, log_probs=log_probs, mask=mask, t=t)
        return probs, cache

    def backward(self, params, cache, labels, x, mask):
        c = self.config
        b = len(labels)
        t = cache["t"]
        scale = 1.0 / math.sqrt(self.head_dim)
        loss = -cache["log_probs"][np.arange(b), labels].mean()
        grads: dict[str, np.ndarray] = {}
        dlogits = cache["probs"].copy()
        dlogits[np.arange(b), labels] -= 1.0
        dlogits /= b
        grads["head.W"] = cache["pooled"].T @ dlogits
        grads["head.b"] = dlogits.sum(axis=0)
        dpooled = dlogits @ params["head.W"].T
        dh = _pool_backward(dpooled, mask, c.pooling, cache["aux"], t)
        for l in reversed(range(c.encoder_layers)):
            p = f"layers.{l}."
            lc = cache["layers"][l]
            du2, dg2, db2 = _layer_norm_backward(dh, params[p + "ln2.g"], lc["ln2"])
            grads[p + "ln2.g"], grads[p + "ln2.b"] = dg2, db2
            dff = du2 if lc["drop2"] is None else du2 * lc["drop2"]
            r_flat = lc["r"].reshape(-1, c.ff_dim)
            dff_flat = dff.reshape(-1, self.d)
            grads[p + "ff.W2"] = r_flat.T @ dff_flat
            grads[p + "ff.b2"] = dff.sum(axis=(0, 1))
            dr = dff @ params[p + "ff.W2"].T
            dz1 = dr * _gelu_prime(lc["z1"])
            h1_flat = lc["h1"].reshape(-1, self.d)
            dz1_flat = dz1.reshape(-1, c.ff_dim)
            grads[p + "ff.W1"] = h1_flat.T @ dz1_flat
            grads[p + "ff.b1"] = dz1.sum(axis=(0, 1))
            dh1 = du2 + dz1 @ params[p + "ff.W1"].T
            du1, dg1, db1 = _layer_norm_backward(dh1, params[p + "ln1.g"], lc["ln1"])
            grads[p + "ln1.g"], grads[p + "ln1.b"] = dg1, db1
            dattn_out = du1 if lc["drop1"] is None else du1 * lc["drop1"]
            ctx_flat = lc["ctx"].reshape(-1, self.d)
            dattn_flat = dattn_out.reshape(-1, self.d)
            grads[p + "attn.Wo"] = ctx_flat.T @ dattn_flat
            grads[p + "attn.bo"] = dattn_out.sum(axis=(0, 1))
            dctx = self._split_heads(dattn_out @ params[p + "attn.Wo"].T)
            da = dctx @ lc["v"].transpose(0, 1, 3, 2)
            dv = lc["attn"].transpose(0, 1, 3, 2) @ dctx
            attn = lc["attn"]
            ds = attn * (da - (da * attn).sum(axis=-1, keepdims=True))
            ds *= scale
            dq = ds @ lc["k"]
            dk = ds.transpose(0, 1, 3, 2) @ lc["q"]
            h_in = lc["h_in"]
            h_flat = h_in.reshape(-1, self.d)
            dh = du1  # residual branch
            for name, dmat, has_bias in (("attn.Wq", dq, True), ("attn.Wk", dk, False), ("attn.Wv", dv, True)):
                dmerged = self._merge_heads(dmat)
                dflat = dmerged.reshape(-1, self.d)
                grads[p + name] = h_flat.T @ dflat
                if has_bias:
                    grads[p + name.replace("W", "b")] = dmerged.sum(axis=(0, 1))
                dh = dh + dmerged @ params[p + name].T
        grads["pos"] = np.zeros_like(params["pos"])
        grads["pos"][:t] = dh.sum(axis=0)
        x_flat = x.reshape(-1, c.input_dim)
        dh_flat = dh.reshape(-1, self.d)
        grads["embed.W"] = x_flat.T @ dh_flat
        grads["embed.b"] = dh.sum(axis=(0, 1))
        return loss, grads


def _init_from_specs(specs, rng: np.random.Generator) -> dict[str, np.ndarray]:
    params = {}
    for name, shape, fan_in in specs:
        if fan_in == -1:  # layer-norm gain
            params[name] = np.ones(shape)
        elif fan_in == 0:  # bias
            params[name] = np.zeros(shape)
        else:
            bound = 1.0 / math.sqrt(fan_in)
            params[name] = rng.uniform(-bound, bound, size=shape)
    return params


def build_network(config: ModelConfig):
    if config.arch == "transformer":
        return TransformerNet(config)
    return LinearPooledNet(config)


def forward(net, params: Mapping[str, np.ndarray], x: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Evaluation-mode class probabilities (dropout disabled)."""
    if x.shape[-1] != net.config.input_dim:
        raise ValueError(f"feature dim {x.shape[-1]} != model input_dim {net.config.input_dim}")
    probs, _ = net.forward(params, x, mask, dropout_rng=None)
    return probs


def loss_and_gradients(
    net,
    params: Mapping[str, np.ndarray],
    x: np.ndarray,
    mask: np.ndarray,
    labels: np.ndarray,
    dropout_rng: np.random.Generator | None = None,
) -> tuple[float, dict[str, np.ndarray]]:
    """Mean cross-entropy loss and gradients for every parameter tensor."""
    labels = np.asarray(labels)
    if labels.max(initial=0) >= net.config.class_count:
        raise ValueError("label out of range for model class_count")
    _, cache = net.forward(params, x, mask, dropout_rng=dropout_rng)
    return net.backward(params, cache, labels, x, mask)


# ---------------------------------------------------------------------------
# Adam
# ---------------------------------------------------------------------------

@dataclass
class AdamState:
    step: int
    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]


def adam_init(params: Mapping[str, np.ndarray]) -> AdamState:
    return AdamState(
        step=0,
        m={k: np.zeros_like(p) for k, p in params.items()},
        v={k: np.zeros_like(p) for k, p in params.items()},
    )


def adam_step(
    params: dict[str, np.ndarray],
    grads: Mapping[str, np.ndarray],
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> tuple[dict[str, np.ndarray], AdamState]:
    """One Adam update with bias correction; mutates params/state in place."""
    t = state.step + 1
    for k, p in params.items():
        g = grads[k]
        if g.shape != p.shape:
            raise ValueError(f"gradient shape {g.shape} != parameter shape {p.shape} for {k!r}")
        state.m[k] = beta1 * state.m[k] + (1.0 - beta1) * g
        state.v[k] = beta2 * state.v[k] + (1.0 - beta2) * g * g
        m_hat = state.m[k] / (1.0 - beta1**t)
        v_hat = state.v[k] / (1.0 - beta2**t)
        p -= lr * m_hat / (np.sqrt(v_hat) + eps)
    state.step = t
    return params, state


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------

@dataclass
class TrainedSpecialist:
    """A trained classifier bound to the augmentation it was trained under."""

    params: dict[str, np.ndarray]
    model_config: ModelConfig
    augmentation: AugmentationSpec | str
    train_loss: list[float]
    val_accuracy: list[float]  # nan entries when no validation split was given
    best_epoch: int

    @property
    def augmentation_tag(self) -> str:
        if isinstance(self.augmentation, AugmentationSpec):
            return self.augmentation.tag
        return self.augmentation


def _quantize_single(params: Mapping[str, np.ndarray]) -> dict[str, np.ndarray]:
    # storage format is single precision; keep memory and file bit-identical
    return {k: p.astype(np.float32).astype(np.float64) for k, p in params.items()}


def train(
    dataset: LabeledDataset,
    splits: Mapping[str, Sequence[int]],
    model_config: ModelConfig,
    train_config: TrainConfig,
    augmentation: AugmentationSpec | str = "baseline",
    batch_transform: Callable[[int, list[int]], tuple[np.ndarray, np.ndarray]] | None = None,
) -> TrainedSpecialist:
    """Train one classifier; return the weights of the best validation epoch.

    batch_transform(epoch, indices) -> (x, mask) replaces the stored features
    of a batch (used by the generalist's per-batch augmentation); evaluation
    always uses the untransformed features.
    """
    train_idx = [int(i) for i in splits["train"]]
    if not train_idx:
        raise ValueError("empty train split")
    val_idx = [int(i) for i in splits.get("validation", [])]
    x, m = sequence_features(dataset.sequences)
    y = dataset.labels
    if model_config.input_dim != x.shape[-1]:
        raise ValueError(f"model input_dim {model_config.input_dim} != data feature dim {x.shape[-1]}")
    if len(y) and y.max() >= model_config.class_count:
        raise ValueError("dataset labels exceed model class_count")
    net = build_network(model_config)
    seed = train_config.seed
    params = net.init_params(make_rng(STREAM_INIT, seed))
    shuffle_rng = make_rng(STREAM_SHUFFLE, seed)
    dropout_rng = make_rng(STREAM_DROPOUT, seed) if model_config.dropout > 0 else None
    state = adam_init(params)
    xv, mv, yv = (x[val_idx], m[val_idx], y[val_idx]) if val_idx else (None, None, None)
    train_loss: list[float] = []
    val_accuracy: list[float] = []
    best_acc = -np.inf
    best_epoch = -1
    best_params: dict[str, np.ndarray] | None = None
    since_best = 0
    bs = train_config.batch_size
    for epoch in range(train_config.max_epochs):
        order = shuffle_rng.permutation(len(train_idx))
        total, count = 0.0, 0
        for start in range(0, len(order), bs):
            chunk = [train_idx[i] for i in order[start : start + bs]]
            if batch_transform is not None:
                xb, mb = batch_transform(epoch, chunk)
            else:
                xb, mb = x[chunk], m[chunk]
            loss, grads = loss_and_gradients(net, params, xb, mb, y[chunk], dropout_rng)
            params, state = adam_step(params, grads, state, train_config.learning_rate)
            total += loss * len(chunk)
            count += len(chunk)
        train_loss.append(total / count)
        if val_idx:
            val_probs = forward(net, params, xv, mv)
            acc = float((val_probs.argmax(axis=1) == yv).mean())
            val_accuracy.append(acc)
            if acc > best_acc:
                best_acc = acc
                best_epoch = epoch
                best_params = {k: p.copy() for k, p in params.items()}
                since_best = 0
            else:
                since_best += 1
            if train_config.patience > 0 and since_best >= train_config.patience:
                break
        else:
            val_accuracy.append(float("nan"))
    if best_params is None:  # no validation split: keep the final epoch
        best_params = params
        best_epoch = len(train_loss) - 1
    return TrainedSpecialist(
        params=_quantize_single(best_params),
        model_config=model_config,
        augmentation=augmentation,
        train_loss=train_loss,
        val_accuracy=val_accuracy,
        best_epoch=best_epoch,
    )


def predict(
    specialist: TrainedSpecialist,
    sequences: Sequence[LandmarkSequence] | LabeledDataset,
) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic labels (argmax, lowest index on ties) and probabilities."""
    if isinstance(sequences, LabeledDataset):
        sequences = sequences.sequences
    x, m = sequence_features(sequences)
    net = build_network(specialist.model_config)
    probs = forward(net, specialist.params, x, m)
    return probs.argmax(axis=1), probs


# ---------------------------------------------------------------------------
# Weight container
# ---------------------------------------------------------------------------

def _augmentation_to_json(aug: AugmentationSpec | str):
    if isinstance(aug, AugmentationSpec):
        return {"kind": aug.kind, "params": _jsonable(aug.params), "name": aug.name}
    return aug


def _augmentation_from_json(obj) -> AugmentationSpec | str:
    if isinstance(obj, dict):
        return AugmentationSpec(kind=obj["kind"], params=obj["params"], name=obj.get("name"))
    return obj


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def save_specialist(specialist: TrainedSpecialist, path: str | Path) -> None:
    """Versioned binary weight container; payload is little-endian float32."""
    path = Path(path)
    names = sorted(specialist.params)
    tensors = []
    offset = 0
    payload_parts = []
    for name in names:
        arr = np.ascontiguousarray(specialist.params[name], dtype="<f4")
        tensors.append(
            {"name": name, "shape": list(arr.shape), "dtype": "<f4", "offset": offset, "nbytes": arr.nbytes}
        )
        payload_parts.append(arr.tobytes())
        offset += arr.nbytes
    header = {
        "format_version": WEIGHTS_VERSION,
        "model_config": specialist.model_config.to_dict(),
        "augmentation": _augmentation_to_json(specialist.augmentation),
        "best_epoch": specialist.best_epoch,
        "train_loss": specialist.train_loss,
        "val_accuracy": [None if math.isnan(v) else v for v in specialist.val_accuracy],
        "tensors": tensors,
    }
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(WEIGHTS_MAGIC)
        fh.write(struct.pack("<I", WEIGHTS_VERSION))
        fh.write(struct.pack("<Q", len(header_bytes)))
        fh.write(header_bytes)
        fh.write(b"".join(payload_parts))


def load_specialist(path: str | Path) -> TrainedSpecialist:
    path = Path(path)
    data = path.read_bytes()
    if len(data) < 16 or data[:4] != WEIGHTS_MAGIC:
        raise ValueError(f"{path}: not a skelaug weight file (bad magic)")
    (version,) = struct.unpack_from("<I", data, 4)
    if version != WEIGHTS_VERSION:
        raise ValueError(
            f"{path}: unsupported weight format version {version}, this build reads version {WEIGHTS_VERSION}"
        )
    (header_len,) = struct.unpack_from("<Q", data, 8)
    header = json.loads(data[16 : 16 + header_len].decode("utf-8"))
    payload = data[16 + header_len :]
    params = {}
    for t in header["tensors"]:
        arr = np.frombuffer(payload, dtype="<f4", count=int(np.prod(t["shape"])) or 1, offset=t["offset"])
        if t["shape"]:
            arr = arr.reshape(t["shape"])
        else:
            arr = arr.reshape(())
        params[t["name"]] = arr.astype(np.float64)
    cfg = header["model_config"]
    return TrainedSpecialist(
        params=params,
        model_config=ModelConfig(**cfg),
        augmentation=_augmentation_from_json(header["augmentation"]),
        train_loss=list(header["train_loss"]),
        val_accuracy=[float("nan") if v is None else v for v in header["val_accuracy"]],
        best_epoch=header["best_epoch"],
    )
