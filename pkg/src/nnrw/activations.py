"""Hidden-unit activation functions.

Three kinds are built in: the logistic sigmoid 1/(1+e^-y), the Gaussian
bump e^(-y^2), and leaky ReLU with a fixed 0.2 slope on the non-positive
side.  All are pure, stateless and safe to call concurrently.  Adding a
new kind means adding an enum member, a wire id, and a branch in
`evaluate_batch` (plus, optionally, a case in the compiled kernel).
"""

import enum

import numpy as np

from .errors import DataError

LEAKY_RELU_SLOPE = 0.2


class ActivationKind(enum.Enum):
    """Catalog of supported activations; values are the canonical names."""

    SIGMOID = "sigmoid"
    GAUSSIAN = "gaussian"
    LEAKY_RELU = "leaky_relu"

    def __str__(self):
        return self.value


# Byte ids used in the model file format and by the compiled kernel.
WIRE_IDS = {
    ActivationKind.SIGMOID: 0,
    ActivationKind.GAUSSIAN: 1,
    ActivationKind.LEAKY_RELU: 2,
}
KINDS_BY_WIRE_ID = {v: k for k, v in WIRE_IDS.items()}


def parse_kind(name: str) -> ActivationKind:
    """Parse a canonical lowercase name ('sigmoid', 'gaussian', 'leaky_relu')."""
    try:
        return ActivationKind(name)
    except ValueError:
        known = ", ".join(k.value for k in ActivationKind)
        raise ValueError("unknown activation %r (known: %s)" % (name, known)) from None


def evaluate_batch(kind: ActivationKind, ys) -> np.ndarray:
    """Apply `kind` elementwise to a vector of finite reals."""
    ys = np.asarray(ys, dtype=np.float64)
    if not np.all(np.isfinite(ys)):
        raise DataError("activation input contains non-finite values")
    # Saturation to exactly 0.0 or 1.0 for |y| beyond ~37 (sigmoid) or ~27
    # (gaussian) is the correct float64 limit, not an error.
    with np.errstate(over="ignore", under="ignore"):
        if kind is ActivationKind.SIGMOID:
            return 1.0 / (1.0 + np.exp(-ys))
        if kind is ActivationKind.GAUSSIAN:
            return np.exp(-ys * ys)
        if kind is ActivationKind.LEAKY_RELU:
            return np.where(ys > 0, ys, LEAKY_RELU_SLOPE * ys)
    raise ValueError("unhandled activation kind %r" % (kind,))


def evaluate(kind: ActivationKind, y: float) -> float:
    """Scalar version of `evaluate_batch`; exact elementwise agreement."""
    return float(evaluate_batch(kind, np.asarray([y]))[0])
