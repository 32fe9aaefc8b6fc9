"""Trainable text-pair similarity network.

Two embeddings are concatenated into one input row and pushed through a
dense ReLU stack with dropout after the first two hidden layers and a
sigmoid output, yielding a similarity score in (0, 1). Training is plain
backpropagation of mean binary cross-entropy with RMSProp updates.

The full-size network is 1536 -> 1024 -> 256 -> 64 -> 1 (1,852,801
parameters); ``build_model`` also makes reduced stacks for testing.
"""
from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, ModelFormatError, ValidationError

MODEL_FORMAT = "tinysearch-simnet"
MODEL_VERSION = 1

EMBED_DIM = 768
DEFAULT_HIDDEN = (1024, 256, 64)
DEFAULT_DROPOUT = 0.5

BCE_EPS = 1e-7

# Smallest/largest doubles inside the open interval (0, 1); scores are
# clamped here so sigmoid saturation can never emit an exact 0 or 1.
_SCORE_MIN = float(np.nextafter(0.0, 1.0))
_SCORE_MAX = float(np.nextafter(1.0, 0.0))

_ACTIVATIONS = ("relu", "sigmoid", "none")


@dataclass
class DenseLayer:
    """One fully connected layer; weights are (in_width, out_width)."""

    weights: np.ndarray
    bias: np.ndarray
    activation: str

    @property
    def in_width(self) -> int:
        return self.weights.shape[0]

    @property
    def out_width(self) -> int:
        return self.weights.shape[1]


@dataclass
class SimilarityModel:
    """Layer stack plus the hyperparameters baked in at init time.

    ``input_dim`` is the per-side embedding length; the first layer
    consumes the concatenated pair, width ``2 * input_dim``.
    """

    input_dim: int
    layers: list[DenseLayer]
    dropout_rate: float = DEFAULT_DROPOUT
    seed: int = 0

    @property
    def concat_dim(self) -> int:
        return 2 * self.input_dim

    def dropout_slots(self) -> tuple[int, ...]:
        """Indices of layers whose output is dropped out in train mode.

        Every hidden layer except the last one before the output: for
        the full stack that is the 1024 and 256 layers, not the 64.
        """
        n_hidden = len(self.layers) - 1
        return tuple(range(max(0, n_hidden - 1)))

    def param_count(self) -> int:
        return sum(layer.weights.size + layer.bias.size for layer in self.layers)

    def parameters(self) -> list[np.ndarray]:
        """Flat parameter list [W0, b0, W1, b1, ...] in layer order."""
        params: list[np.ndarray] = []
        for layer in self.layers:
            params.append(layer.weights)
            params.append(layer.bias)
        return params

    def set_parameters(self, params: list[np.ndarray]) -> None:
        if len(params) != 2 * len(self.layers):
            raise ValidationError(
                f"expected {2 * len(self.layers)} parameter arrays, got {len(params)}"
            )
        for i, layer in enumerate(self.layers):
            layer.weights = params[2 * i]
            layer.bias = params[2 * i + 1]


def build_model(
    input_dim: int,
    hidden_widths: tuple[int, ...] = DEFAULT_HIDDEN,
    seed: int = 0,
    dropout_rate: float = DEFAULT_DROPOUT,
) -> SimilarityModel:
    """Glorot-uniform initialized ReLU stack with a sigmoid scalar head."""
    if input_dim < 1:
        raise ValidationError(f"input_dim must be >= 1, got {input_dim}")
    if not 0.0 <= dropout_rate < 1.0:
        raise ValidationError(f"dropout_rate must be in [0, 1), got {dropout_rate}")
    rng = np.random.default_rng(seed)
    widths = [2 * input_dim, *hidden_widths, 1]
    last = len(widths) - 2
    layers = []
    for i, (fan_in, fan_out) in enumerate(zip(widths[:-1], widths[1:])):
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        weights = rng.uniform(-limit, limit, size=(fan_in, fan_out))
        bias = np.zeros(fan_out, dtype=np.float64)
        activation = "sigmoid" if i == last else "relu"
        layers.append(DenseLayer(weights, bias, activation))
    return SimilarityModel(input_dim, layers, dropout_rate, seed)


def init_model(seed: int = 0) -> SimilarityModel:
    """The full-size architecture: 1536 -> 1024 -> 256 -> 64 -> 1."""
    return build_model(EMBED_DIM, DEFAULT_HIDDEN, seed=seed)


def _relu(z: np.ndarray) -> np.ndarray:
    return np.maximum(z, 0.0)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    # split form avoids exp overflow for large |z|
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _activate(name: str, z: np.ndarray) -> np.ndarray:
    if name == "relu":
        return _relu(z)
    if name == "sigmoid":
        return _sigmoid(z)
    return z


def _activation_grad(name: str, z: np.ndarray) -> np.ndarray:
    if name == "relu":
        return (z > 0.0).astype(z.dtype)
    if name == "sigmoid":
        s = _sigmoid(z)
        return s * (1.0 - s)
    return np.ones_like(z)


@dataclass
class ForwardCache:
    """Everything backprop needs from a forward pass."""

    inputs: list[np.ndarray]  # input to each layer (post-dropout of previous)
    pre_acts: list[np.ndarray]  # z = x @ W + b per layer
    masks: dict[int, np.ndarray]  # dropout keep-masks by layer index


def _forward_batch(
    model: SimilarityModel,
    x: np.ndarray,
    train: bool = False,
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, ForwardCache]:
    """Run a (n, concat_dim) batch through the stack.

    In train mode, inverted dropout is applied after the slot layers:
    keep-probability 1 - dropout_rate, survivors scaled by its inverse,
    so inference needs no rescaling.
    """
    if x.ndim != 2 or x.shape[1] != model.concat_dim:
        raise DimensionMismatchError(
            f"expected input of width {model.concat_dim}, got shape {x.shape}"
        )
    keep = 1.0 - model.dropout_rate
    slots = set(model.dropout_slots()) if train and model.dropout_rate > 0.0 else set()
    if slots and rng is None:
        raise ValidationError("train-mode forward needs an rng for dropout masks")

    inputs: list[np.ndarray] = []
    pre_acts: list[np.ndarray] = []
    masks: dict[int, np.ndarray] = {}
    a = x
    for i, layer in enumerate(model.layers):
        inputs.append(a)
        z = a @ layer.weights + layer.bias
        pre_acts.append(z)
        a = _activate(layer.activation, z)
        if i in slots:
            mask = rng.random(a.shape) < keep
            masks[i] = mask
            a = a * mask / keep
    return a[:, 0], ForwardCache(inputs, pre_acts, masks)


def forward(
    model: SimilarityModel,
    a: np.ndarray,
    b: np.ndarray,
    mode: str = "infer",
    dropout_seed: int = 0,
) -> float:
    """Similarity score for one embedding pair, strictly inside (0, 1)."""
    if mode not in ("train", "infer"):
        raise ValidationError(f"mode must be 'train' or 'infer', got {mode!r}")
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    for name, vec in (("a", a), ("b", b)):
        if vec.shape != (model.input_dim,):
            raise DimensionMismatchError(
                f"embedding {name} has shape {vec.shape}, expected ({model.input_dim},)"
            )
    x = np.concatenate([a, b])[None, :]
    rng = np.random.default_rng(dropout_seed) if mode == "train" else None
    out, _ = _forward_batch(model, x, train=(mode == "train"), rng=rng)
    return min(max(float(out[0]), _SCORE_MIN), _SCORE_MAX)


def bce_loss(p: float, y: int) -> float:
    """Binary cross-entropy with the prediction clipped away from 0/1."""
    p = min(max(float(p), BCE_EPS), 1.0 - BCE_EPS)
    y = float(y)
    return -(y * math.log(p) + (1.0 - y) * math.log1p(-p))


def _batch_bce(p: np.ndarray, y: np.ndarray) -> float:
    p = np.clip(p, BCE_EPS, 1.0 - BCE_EPS)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log1p(-p)))


def _backward_arrays(
    model: SimilarityModel,
    y: np.ndarray,
    p: np.ndarray,
    cache: ForwardCache,
) -> list[np.ndarray]:
    """Gradients of mean BCE w.r.t. every parameter, ordered like parameters()."""
    out_layer = model.layers[-1]
    if out_layer.activation != "sigmoid":
        raise ValidationError("output layer must be sigmoid for BCE backprop")
    n = y.shape[0]
    keep = 1.0 - model.dropout_rate
    grads: list[np.ndarray | None] = [None] * (2 * len(model.layers))

    # sigmoid + BCE identity: dL/dz at the output is (p - y), / n for the mean
    delta = ((p - y) / n)[:, None]
    for i in range(len(model.layers) - 1, -1, -1):
        layer = model.layers[i]
        grads[2 * i] = cache.inputs[i].T @ delta
        grads[2 * i + 1] = delta.sum(axis=0)
        if i == 0:
            break
        d_prev = delta @ layer.weights.T
        if (i - 1) in cache.masks:
            d_prev = d_prev * cache.masks[i - 1] / keep
        delta = d_prev * _activation_grad(model.layers[i - 1].activation, cache.pre_acts[i - 1])
    return grads  # type: ignore[return-value]


def backward(
    model: SimilarityModel,
    batch: list[tuple[np.ndarray, np.ndarray, int]],
    cache: ForwardCache | None = None,
) -> list[np.ndarray]:
    """Mean-BCE gradients over a batch of (a, b, label) triples.

    When ``cache`` is given it must come from the paired forward pass so
    the same dropout masks are replayed; otherwise a fresh inference-mode
    pass (no dropout) is run.
    """
    if not batch:
        raise ValidationError("backward needs a non-empty batch")
    x, y = _stack_pairs(model, batch)
    if cache is None:
        p, cache = _forward_batch(model, x, train=False)
    else:
        p, _ = _forward_with_masks(model, x, cache)
    return _backward_arrays(model, y, p, cache)


def _forward_with_masks(
    model: SimilarityModel, x: np.ndarray, cache: ForwardCache
) -> tuple[np.ndarray, ForwardCache]:
    """Replay a forward pass under the recorded dropout masks."""
    keep = 1.0 - model.dropout_rate
    a = x
    for i, layer in enumerate(model.layers):
        cache.inputs[i] = a
        z = a @ layer.weights + layer.bias
        cache.pre_acts[i] = z
        a = _activate(layer.activation, z)
        if i in cache.masks:
            a = a * cache.masks[i] / keep
    return a[:, 0], cache


def _stack_pairs(
    model: SimilarityModel, dataset: list[tuple[np.ndarray, np.ndarray, int]]
) -> tuple[np.ndarray, np.ndarray]:
    rows = []
    labels = []
    for a, b, label in dataset:
        a = np.asarray(a, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        if a.shape != (model.input_dim,) or b.shape != (model.input_dim,):
            raise DimensionMismatchError(
                f"pair embeddings must have shape ({model.input_dim},), "
                f"got {a.shape} and {b.shape}"
            )
        rows.append(np.concatenate([a, b]))
        labels.append(float(label))
    return np.stack(rows), np.asarray(labels, dtype=np.float64)


def init_optimizer_state(params: list[np.ndarray]) -> list[np.ndarray]:
    """Zeroed RMSProp accumulators matching the parameter shapes."""
    return [np.zeros_like(p) for p in params]


def rmsprop_step(
    params: list[np.ndarray],
    grads: list[np.ndarray],
    state: list[np.ndarray],
    lr: float = 0.001,
    rho: float = 0.9,
    eps: float = 1e-7,
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """One RMSProp update: v' = rho v + (1-rho) g^2, step g / (sqrt(v') + eps)."""
    if not (len(params) == len(grads) == len(state)):
        raise ValidationError("params, grads and state must have equal lengths")
    new_params = []
    new_state = []
    for theta, g, v in zip(params, grads, state):
        if theta.shape != g.shape or theta.shape != v.shape:
            raise ValidationError(
                f"shape mismatch: param {theta.shape}, grad {g.shape}, state {v.shape}"
            )
        v_new = rho * v + (1.0 - rho) * g * g
        new_params.append(theta - lr * g / (np.sqrt(v_new) + eps))
        new_state.append(v_new)
    return new_params, new_state


@dataclass
class TrainConfig:
    epochs: int = 30
    batch_size: int = 200
    validation_split: float = 0.3
    learning_rate: float = 0.001
    rho: float = 0.9
    epsilon: float = 1e-7
    shuffle_seed: int = 0

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValidationError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValidationError(f"batch_size must be >= 1, got {self.batch_size}")
        if not 0.0 < self.validation_split < 1.0:
            raise ValidationError(
                f"validation_split must be in (0, 1), got {self.validation_split}"
            )


@dataclass
class EpochRecord:
    train_loss: float
    train_accuracy: float
    val_loss: float
    val_accuracy: float


def train(
    model: SimilarityModel,
    dataset: list[tuple[np.ndarray, np.ndarray, int]],
    config: TrainConfig,
) -> tuple[SimilarityModel, list[EpochRecord]]:
    """Train in place and return (model, per-epoch history).

    The final ``validation_split`` fraction of the dataset, in the given
    order, is held out and never touches the optimizer; the training
    portion is reshuffled every epoch from ``shuffle_seed``.
    """
    n = len(dataset)
    if n < 2:
        raise ValidationError(f"need at least 2 examples to split, got {n}")
    split_at = int(n * (1.0 - config.validation_split))
    if split_at < 1 or split_at >= n:
        raise ValidationError(
            f"validation_split {config.validation_split} leaves an empty partition "
            f"for {n} examples"
        )
    x_train, y_train = _stack_pairs(model, dataset[:split_at])
    x_val, y_val = _stack_pairs(model, dataset[split_at:])

    rng = np.random.default_rng(config.shuffle_seed)
    params = model.parameters()
    state = init_optimizer_state(params)
    history: list[EpochRecord] = []
    for _ in range(config.epochs):
        order = rng.permutation(split_at)
        loss_sum = 0.0
        hits = 0
        for start in range(0, split_at, config.batch_size):
            idx = order[start : start + config.batch_size]
            xb, yb = x_train[idx], y_train[idx]
            p, cache = _forward_batch(model, xb, train=True, rng=rng)
            loss_sum += _batch_bce(p, yb) * len(idx)
            hits += int(np.sum((p >= 0.5) == (yb == 1.0)))
            grads = _backward_arrays(model, yb, p, cache)
            params, state = rmsprop_step(
                params, grads, state, config.learning_rate, config.rho, config.epsilon
            )
            model.set_parameters(params)
        p_val, _ = _forward_batch(model, x_val, train=False)
        history.append(
            EpochRecord(
                train_loss=loss_sum / split_at,
                train_accuracy=hits / split_at,
                val_loss=_batch_bce(p_val, y_val),
                val_accuracy=float(np.mean((p_val >= 0.5) == (y_val == 1.0))),
            )
        )
    return model, history


def eval_accuracy(
    model: SimilarityModel,
    dataset: list[tuple[np.ndarray, np.ndarray, int]],
    threshold: float = 0.5,
) -> float:
    """Fraction of pairs classified correctly; a score equal to the
    threshold counts as positive. Inference mode, no dropout."""
    if not dataset:
        raise ValidationError("eval_accuracy needs a non-empty dataset")
    x, y = _stack_pairs(model, dataset)
    p, _ = _forward_batch(model, x, train=False)
    return float(np.mean((p >= threshold) == (y == 1.0)))


def save_model(model: SimilarityModel, path: str) -> None:
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "input_dim": model.input_dim,
        "dropout_rate": model.dropout_rate,
        "layers": [
            {
                "in": layer.in_width,
                "out": layer.out_width,
                "activation": layer.activation,
                "weights": layer.weights.reshape(-1).tolist(),  # row-major
                "bias": layer.bias.tolist(),
            }
            for layer in model.layers
        ],
    }
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, separators=(",", ":"))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_model(path: str) -> SimilarityModel:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise ModelFormatError(f"{path}: not a {MODEL_FORMAT} file")
    if doc.get("version") != MODEL_VERSION:
        raise ModelFormatError(f"{path}: unsupported version {doc.get('version')!r}")
    input_dim = doc.get("input_dim")
    if not isinstance(input_dim, int) or input_dim < 1:
        raise ModelFormatError(f"{path}: bad input_dim {input_dim!r}")
    dropout_rate = doc.get("dropout_rate")
    if not isinstance(dropout_rate, (int, float)) or not 0.0 <= dropout_rate < 1.0:
        raise ModelFormatError(f"{path}: bad dropout_rate {dropout_rate!r}")
    raw_layers = doc.get("layers")
    if not isinstance(raw_layers, list) or not raw_layers:
        raise ModelFormatError(f"{path}: missing layers")

    layers = []
    expected_in = 2 * input_dim
    for i, raw in enumerate(raw_layers):
        try:
            in_w, out_w = raw["in"], raw["out"]
            activation = raw["activation"]
            weights = np.asarray(raw["weights"], dtype=np.float64)
            bias = np.asarray(raw["bias"], dtype=np.float64)
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelFormatError(f"{path}: layer {i}: {exc}") from exc
        if activation not in _ACTIVATIONS:
            raise ModelFormatError(f"{path}: layer {i}: unknown activation {activation!r}")
        if in_w != expected_in:
            raise ModelFormatError(
                f"{path}: layer {i}: in width {in_w}, expected {expected_in}"
            )
        if weights.shape != (in_w * out_w,):
            raise ModelFormatError(
                f"{path}: layer {i}: {weights.size} weights for shape {in_w}x{out_w}"
            )
        if bias.shape != (out_w,):
            raise ModelFormatError(
                f"{path}: layer {i}: {bias.size} biases for width {out_w}"
            )
        if not (np.all(np.isfinite(weights)) and np.all(np.isfinite(bias))):
            raise ModelFormatError(f"{path}: layer {i}: non-finite parameters")
        layers.append(DenseLayer(weights.reshape(in_w, out_w), bias, activation))
        expected_in = out_w
    if layers[-1].out_width != 1:
        raise ModelFormatError(f"{path}: final layer width {layers[-1].out_width}, expected 1")
    return SimilarityModel(input_dim, layers, float(dropout_rate))
