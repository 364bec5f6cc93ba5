"""Pure-numpy fallback for the multi-activation feature-map kernel.

Mirrors `_kernels.pyx`.  Each activation makes one vectorized pass over
the pre-activation matrix and writes into an interleaved strided view of
the output, so unit i's features occupy columns [i*n_acts, (i+1)*n_acts).
"""

import numpy as np

BACKEND = "numpy"

# wire ids, kept in sync with activations.WIRE_IDS
_SIGMOID, _GAUSSIAN, _LEAKY_RELU = 0, 1, 2
SUPPORTED_IDS = frozenset((_SIGMOID, _GAUSSIAN, _LEAKY_RELU))


def feature_map(preacts: np.ndarray, kind_ids) -> np.ndarray:
    """Fan out pre-activations (L, M) into features (L, n_acts * M).

    out[l, i*n_acts + n] = g_n(preacts[l, i])
    """
    n_acts = len(kind_ids)
    n_samples, n_hidden = preacts.shape
    out = np.empty((n_samples, n_acts * n_hidden), dtype=np.float64)
    with np.errstate(over="ignore", under="ignore"):
        for n, kind_id in enumerate(kind_ids):
            view = out[:, n::n_acts]
            if kind_id == _SIGMOID:
                view[:] = 1.0 / (1.0 + np.exp(-preacts))
            elif kind_id == _GAUSSIAN:
                view[:] = np.exp(-preacts * preacts)
            elif kind_id == _LEAKY_RELU:
                view[:] = np.where(preacts > 0, preacts, 0.2 * preacts)
            else:
                raise ValueError("unknown activation wire id %d" % kind_id)
    return out
