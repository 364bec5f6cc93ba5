"""Random hidden layer with multi-activation units.

A network has M summation units with frozen random weights.  Each unit
computes one pre-activation a_i . x + b_i which is fanned out through all
n_acts activation functions, so the hidden feature vector has length
n_acts * M and is laid out activation-minor:

    h(x) = [g_1(z_1), ..., g_{n_acts}(z_1), g_1(z_2), ..., g_{n_acts}(z_M)]

Sharing one pre-activation across activations is what keeps the random
projection cost independent of the number of activations.  Only the
output weights (trained in closed form, see `solver`) are learned.
"""

import enum
import warnings
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import _backend
from .activations import WIRE_IDS, ActivationKind, parse_kind
from .errors import ConfigError, DataError, DimensionError

WEIGHT_LOW, WEIGHT_HIGH = -1.0, 1.0

# Receptive-field (shaped) initialization constants.  Patch sides are drawn
# uniformly from [MIN_PATCH_SIDE, min(height, width) // 2]; weights inside a
# patch are zero-mean and scaled to SHAPED_WEIGHT_NORM.  The side cap and the
# norm were fixed by a grid search on the mnist benchmark: full-image patches
# or unit-norm weights leave pre-activations so small that the sigmoid stays
# in its linear range, costing roughly half a point of test accuracy.
MIN_PATCH_SIDE = 3
SHAPED_WEIGHT_NORM = 2.0


class InitScheme(enum.Enum):
    """How the frozen hidden-layer weights are drawn."""

    UNIFORM = "uniform"
    SHAPED = "shaped"

    def __str__(self):
        return self.value


INIT_WIRE_IDS = {InitScheme.UNIFORM: 0, InitScheme.SHAPED: 1}
INIT_BY_WIRE_ID = {v: k for k, v in INIT_WIRE_IDS.items()}


@dataclass(frozen=True)
class ActivationSet:
    """Ordered activations shared by every hidden unit.

    Order matters: it fixes the interleaved layout of the feature vector.
    Duplicates are allowed but produce linearly dependent feature columns,
    so they trigger a warning.
    """

    kinds: Tuple[ActivationKind, ...]

    def __post_init__(self):
        kinds = tuple(self.kinds)
        object.__setattr__(self, "kinds", kinds)
        if len(kinds) < 1:
            raise ConfigError("activation set must contain at least one kind")
        if len(set(kinds)) != len(kinds):
            warnings.warn("duplicate activation kinds add linearly dependent "
                          "feature columns", stacklevel=3)

    @classmethod
    def parse(cls, spec: str) -> "ActivationSet":
        """Parse a '+'-joined list of canonical names, e.g. 'sigmoid+gaussian'."""
        parts = [p.strip() for p in spec.split("+")]
        if any(not p for p in parts):
            raise ConfigError("empty activation name in %r" % spec)
        try:
            return cls(tuple(parse_kind(p) for p in parts))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def name(self) -> str:
        return "+".join(k.value for k in self.kinds)

    def __len__(self):
        return len(self.kinds)

    def wire_ids(self) -> np.ndarray:
        return np.asarray([WIRE_IDS[k] for k in self.kinds], dtype=np.uint8)


@dataclass(frozen=True)
class NetworkConfig:
    n_inputs: int
    n_hidden: int
    activations: ActivationSet
    ridge_lambda: float = 0.01
    init_scheme: InitScheme = InitScheme.UNIFORM
    image_shape: Optional[Tuple[int, int]] = None  # required for SHAPED
    seed: int = 0

    def __post_init__(self):
        if self.n_inputs < 1:
            raise ConfigError("n_inputs must be positive, got %d" % self.n_inputs)
        if self.n_hidden < 1:
            raise ConfigError("n_hidden must be positive, got %d" % self.n_hidden)
        if self.ridge_lambda < 0:
            raise ConfigError("ridge_lambda must be non-negative, got %g" % self.ridge_lambda)
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must fit in 64 unsigned bits")
        # image_shape may be None on configs recovered from a model file,
        # which never re-initialize; init_shaped demands it.
        if self.image_shape is not None:
            height, width = self.image_shape
            if height * width != self.n_inputs:
                raise ConfigError(
                    "image_shape %dx%d does not factor n_inputs=%d"
                    % (height, width, self.n_inputs))
            if min(height, width) < MIN_PATCH_SIDE:
                raise ConfigError("image sides must be at least %d for shaped init"
                                  % MIN_PATCH_SIDE)

    @property
    def n_activations(self) -> int:
        return len(self.activations)


def _frozen_array(values, shape=None) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if shape is not None and arr.shape != shape:
        raise DimensionError("expected array of shape %s, got %s" % (shape, arr.shape))
    if not np.all(np.isfinite(arr)):
        raise ConfigError("array contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class HiddenLayerParams:
    """Frozen random projection: weights (M, N) and biases (M,)."""

    weights: np.ndarray
    biases: np.ndarray

    def __post_init__(self):
        weights = _frozen_array(self.weights)
        if weights.ndim != 2:
            raise DimensionError("hidden weights must be 2-D")
        biases = _frozen_array(self.biases, shape=(weights.shape[0],))
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "biases", biases)

    @property
    def n_hidden(self) -> int:
        return self.weights.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.weights.shape[1]


@dataclass(frozen=True)
class OutputWeights:
    """Trained output weights, one column per class: (n_acts * M, P)."""

    weights: np.ndarray

    def __post_init__(self):
        weights = _frozen_array(self.weights)
        if weights.ndim != 2:
            raise DimensionError("output weights must be 2-D")
        object.__setattr__(self, "weights", weights)

    @property
    def n_classes(self) -> int:
        return self.weights.shape[1]


@dataclass(frozen=True)
class Network:
    config: NetworkConfig
    hidden: HiddenLayerParams
    output: OutputWeights

    def __post_init__(self):
        cfg = self.config
        if self.hidden.weights.shape != (cfg.n_hidden, cfg.n_inputs):
            raise DimensionError(
                "hidden weights %s do not match config (%d, %d)"
                % (self.hidden.weights.shape, cfg.n_hidden, cfg.n_inputs))
        expected_rows = cfg.n_activations * cfg.n_hidden
        if self.output.weights.shape[0] != expected_rows:
            raise DimensionError(
                "output weights have %d rows, expected n_acts*M = %d"
                % (self.output.weights.shape[0], expected_rows))

    @property
    def n_classes(self) -> int:
        return self.output.n_classes

    @property
    def mac_count(self) -> int:
        cfg = self.config
        return mac_count(cfg.n_inputs, cfg.n_hidden, cfg.n_activations, self.n_classes)


def init_uniform(config: NetworkConfig) -> HiddenLayerParams:
    """Dense init: weights and biases i.i.d. uniform on [-1, 1].

    Fully determined by config.seed (one PCG64 stream; weights drawn
    first, then biases).
    """
    rng = np.random.default_rng(config.seed)
    weights = rng.uniform(WEIGHT_LOW, WEIGHT_HIGH, size=(config.n_hidden, config.n_inputs))
    biases = rng.uniform(WEIGHT_LOW, WEIGHT_HIGH, size=config.n_hidden)
    return HiddenLayerParams(weights, biases)


def max_patch_side(height: int, width: int) -> int:
    return max(MIN_PATCH_SIDE, min(height, width) // 2)


def init_shaped(config: NetworkConfig) -> HiddenLayerParams:
    """Receptive-field init for image inputs.

    Each unit sees one random square patch: side drawn uniformly from
    [MIN_PATCH_SIDE, min(height, width) // 2], position uniform among
    placements fully inside the image.  Patch weights are i.i.d. uniform
    [-1, 1], mean-subtracted over the patch, then scaled to Euclidean
    norm SHAPED_WEIGHT_NORM.  Everything outside the patch is exactly
    zero, and biases are zero.
    """
    if config.init_scheme is not InitScheme.SHAPED:
        raise ConfigError("init_shaped called with init_scheme=%s" % config.init_scheme)
    if config.image_shape is None:
        raise ConfigError("shaped init requires image_shape=(height, width)")
    height, width = config.image_shape
    side_hi = max_patch_side(height, width)
    rng = np.random.default_rng(config.seed)
    weights = np.zeros((config.n_hidden, config.n_inputs))
    for i in range(config.n_hidden):
        side = int(rng.integers(MIN_PATCH_SIDE, side_hi + 1))
        row0 = int(rng.integers(0, height - side + 1))
        col0 = int(rng.integers(0, width - side + 1))
        patch = rng.uniform(WEIGHT_LOW, WEIGHT_HIGH, size=(side, side))
        patch -= patch.mean()
        norm = np.linalg.norm(patch)
        while norm == 0.0:  # measure-zero draw; keep the stream deterministic
            patch = rng.uniform(WEIGHT_LOW, WEIGHT_HIGH, size=(side, side))
            patch -= patch.mean()
            norm = np.linalg.norm(patch)
        patch *= SHAPED_WEIGHT_NORM / norm
        unit = weights[i].reshape(height, width)
        unit[row0:row0 + side, col0:col0 + side] = patch
    biases = np.zeros(config.n_hidden)
    return HiddenLayerParams(weights, biases)


def initialize_hidden(config: NetworkConfig) -> HiddenLayerParams:
    """Dispatch on config.init_scheme."""
    if config.init_scheme is InitScheme.SHAPED:
        return init_shaped(config)
    return init_uniform(config)


def _preactivations(hidden: HiddenLayerParams, X: np.ndarray) -> np.ndarray:
    return X @ hidden.weights.T + hidden.biases


def hidden_features_batch(hidden: HiddenLayerParams, acts: ActivationSet,
                          X: np.ndarray) -> np.ndarray:
    """Feature vectors for a batch: (L, N) -> (L, n_acts * M).

    Each pre-activation is computed once and shared by all activations.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionError("X must be 2-D, got %d-D" % X.ndim)
    if X.shape[1] != hidden.n_inputs:
        raise DimensionError("X has %d columns, hidden layer expects %d"
                             % (X.shape[1], hidden.n_inputs))
    if not np.all(np.isfinite(X)):
        raise DataError("input features contain non-finite values")
    preacts = np.ascontiguousarray(_preactivations(hidden, X))
    ids = acts.wire_ids()
    if all(int(k) in _backend.SUPPORTED_IDS for k in ids):
        return _backend.feature_map(preacts, ids)
    # future activation kinds: generic per-kind vectorized path
    from .activations import KINDS_BY_WIRE_ID, evaluate_batch
    n_acts = len(ids)
    out = np.empty((X.shape[0], n_acts * hidden.n_hidden))
    for n, k in enumerate(ids):
        out[:, n::n_acts] = evaluate_batch(KINDS_BY_WIRE_ID[int(k)], preacts)
    return out


def hidden_features(hidden: HiddenLayerParams, acts: ActivationSet,
                    x: np.ndarray) -> np.ndarray:
    """Feature vector h(x) of one sample, length n_acts * M."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionError("x must be 1-D, got %d-D" % x.ndim)
    return hidden_features_batch(hidden, acts, x[np.newaxis, :])[0]


def forward_batch(net: Network, X: np.ndarray) -> np.ndarray:
    """Class scores for a batch: (L, N) -> (L, P)."""
    feats = hidden_features_batch(net.hidden, net.config.activations, X)
    return feats @ net.output.weights


def forward(net: Network, x: np.ndarray) -> np.ndarray:
    """Class scores [f_1(x), ..., f_P(x)]."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionError("x must be 1-D, got %d-D" % x.ndim)
    return forward_batch(net, x[np.newaxis, :])[0]


def predict_batch(net: Network, X: np.ndarray) -> np.ndarray:
    """Predicted class indices; ties break to the lowest index."""
    return np.argmax(forward_batch(net, X), axis=1)


def predict(net: Network, x: np.ndarray) -> int:
    """Predicted class index; ties break to the lowest index."""
    return int(np.argmax(forward(net, x)))


def mac_count(n_inputs: int, n_hidden: int, n_activations: int, n_classes: int) -> int:
    """Multiply-accumulate ops per inference, bias terms ignored.

    Exact integer N*M + M*n_acts*P: the random projection plus the output
    layer.  Applying activations is not a MAC and does not appear.
    """
    for name, v in (("n_inputs", n_inputs), ("n_hidden", n_hidden),
                    ("n_activations", n_activations), ("n_classes", n_classes)):
        if not isinstance(v, (int, np.integer)) or v < 1:
            raise ConfigError("%s must be a positive integer, got %r" % (name, v))
    return int(n_inputs) * int(n_hidden) + int(n_hidden) * int(n_activations) * int(n_classes)
