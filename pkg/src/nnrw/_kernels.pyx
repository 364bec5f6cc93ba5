# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled multi-activation feature-map kernel.

Single fused pass over the pre-activation matrix: each value is read
once and all activations are written straight into the interleaved
output layout, with no intermediate arrays.
"""

from libc.math cimport exp

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"

SUPPORTED_IDS = frozenset((0, 1, 2))  # sigmoid, gaussian, leaky_relu


def feature_map(double[:, ::1] preacts, kind_ids):
    """Fan out pre-activations (L, M) into features (L, n_acts * M).

    out[l, i*n_acts + n] = g_n(preacts[l, i])
    """
    cdef Py_ssize_t n_samples = preacts.shape[0]
    cdef Py_ssize_t n_hidden = preacts.shape[1]
    ids = np.ascontiguousarray(kind_ids, dtype=np.uint8)
    cdef unsigned char[::1] kid = ids
    cdef Py_ssize_t n_acts = kid.shape[0]

    for k in ids:
        if k not in SUPPORTED_IDS:
            raise ValueError("unknown activation wire id %d" % k)

    out = np.empty((n_samples, n_acts * n_hidden), dtype=np.float64)
    cdef double[:, ::1] h = out
    cdef Py_ssize_t l, i, n
    cdef unsigned char kind
    cdef double z, v

    with nogil:
        for l in range(n_samples):
            for i in range(n_hidden):
                z = preacts[l, i]
                for n in range(n_acts):
                    kind = kid[n]
                    if kind == 0:
                        v = 1.0 / (1.0 + exp(-z))
                    elif kind == 1:
                        v = exp(-z * z)
                    else:
                        v = z if z > 0.0 else 0.2 * z
                    h[l, i * n_acts + n] = v
    return out
