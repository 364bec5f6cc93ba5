"""Binary model persistence.

Layout (all integers little-endian, floats IEEE-754 binary64 little-endian):

    bytes 0-3   magic  b"NNRW"
    u32         format version (currently 1)
    u32 x 4     N (inputs), M (hidden units), n_acts, P (classes)
    u8  x n_acts activation ids (0=sigmoid, 1=gaussian, 2=leaky_relu)
    u8          init scheme (0=uniform, 1=shaped)
    u64         seed
    f64         ridge lambda
    f64 x M*N   hidden weights, row-major
    f64 x M     hidden biases
    f64 x (n_acts*M)*P  output weights, column by column

The loader re-derives every expected byte count from the header and
rejects bad magic, unknown versions, unknown ids, truncated or oversized
payloads, and non-finite values, each with a distinct message.
"""

import struct

import numpy as np

from .activations import KINDS_BY_WIRE_ID, WIRE_IDS
from .errors import ModelFormatError
from .network import (INIT_BY_WIRE_ID, INIT_WIRE_IDS, ActivationSet, HiddenLayerParams,
                      Network, NetworkConfig, OutputWeights)

MAGIC = b"NNRW"
FORMAT_VERSION = 1


def save_model(path, net: Network) -> None:
    """Write `net` to `path`; the round trip through `load_model` is bit-exact."""
    cfg = net.config
    n_acts = cfg.n_activations
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", FORMAT_VERSION))
        fh.write(struct.pack("<4I", cfg.n_inputs, cfg.n_hidden, n_acts, net.n_classes))
        fh.write(bytes(WIRE_IDS[k] for k in cfg.activations.kinds))
        fh.write(struct.pack("<B", INIT_WIRE_IDS[cfg.init_scheme]))
        fh.write(struct.pack("<Q", cfg.seed))
        fh.write(struct.pack("<d", cfg.ridge_lambda))
        fh.write(np.ascontiguousarray(net.hidden.weights, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(net.hidden.biases, dtype="<f8").tobytes())
        fh.write(np.asfortranarray(net.output.weights, dtype="<f8").tobytes(order="F"))


def _take(buf: bytes, offset: int, count: int, what: str):
    end = offset + count
    if end > len(buf):
        raise ModelFormatError("model file truncated in %s (need %d bytes, have %d)"
                               % (what, count, len(buf) - offset))
    return buf[offset:end], end


def load_model(path) -> Network:
    """Read a model written by `save_model`."""
    with open(path, "rb") as fh:
        buf = fh.read()

    raw, pos = _take(buf, 0, 4, "magic")
    if raw != MAGIC:
        raise ModelFormatError("bad model file: magic %r is not %r" % (raw, MAGIC))
    raw, pos = _take(buf, pos, 4, "version")
    version = struct.unpack("<I", raw)[0]
    if version != FORMAT_VERSION:
        raise ModelFormatError("unsupported model format version %d (expected %d)"
                               % (version, FORMAT_VERSION))
    raw, pos = _take(buf, pos, 16, "dimensions")
    n_inputs, n_hidden, n_acts, n_classes = struct.unpack("<4I", raw)
    if min(n_inputs, n_hidden, n_acts, n_classes) < 1:
        raise ModelFormatError("model header contains a zero dimension")

    raw, pos = _take(buf, pos, n_acts, "activation ids")
    try:
        kinds = tuple(KINDS_BY_WIRE_ID[b] for b in raw)
    except KeyError as exc:
        raise ModelFormatError("unknown activation id %s" % exc) from None
    raw, pos = _take(buf, pos, 1, "init scheme")
    try:
        scheme = INIT_BY_WIRE_ID[raw[0]]
    except KeyError:
        raise ModelFormatError("unknown init scheme id %d" % raw[0]) from None
    raw, pos = _take(buf, pos, 8, "seed")
    seed = struct.unpack("<Q", raw)[0]
    raw, pos = _take(buf, pos, 8, "lambda")
    ridge_lambda = struct.unpack("<d", raw)[0]
    if not np.isfinite(ridge_lambda) or ridge_lambda < 0:
        raise ModelFormatError("model lambda is invalid: %r" % ridge_lambda)

    raw, pos = _take(buf, pos, 8 * n_hidden * n_inputs, "hidden weights")
    weights = np.frombuffer(raw, dtype="<f8").reshape(n_hidden, n_inputs)
    raw, pos = _take(buf, pos, 8 * n_hidden, "hidden biases")
    biases = np.frombuffer(raw, dtype="<f8")
    raw, pos = _take(buf, pos, 8 * n_acts * n_hidden * n_classes, "output weights")
    beta = np.frombuffer(raw, dtype="<f8").reshape(
        (n_acts * n_hidden, n_classes), order="F")
    if pos != len(buf):
        raise ModelFormatError("model file has %d trailing bytes" % (len(buf) - pos))
    for name, arr in (("hidden weights", weights), ("hidden biases", biases),
                      ("output weights", beta)):
        if not np.all(np.isfinite(arr)):
            raise ModelFormatError("model %s contain non-finite values" % name)

    # image_shape is not part of the wire format; a loaded network never
    # re-initializes, so the shaped tag is informational only.
    config = NetworkConfig(
        n_inputs=n_inputs,
        n_hidden=n_hidden,
        activations=ActivationSet(kinds),
        ridge_lambda=ridge_lambda,
        init_scheme=scheme,
        image_shape=None,
        seed=seed,
    )
    return Network(config=config,
                   hidden=HiddenLayerParams(weights, biases),
                   output=OutputWeights(beta))
