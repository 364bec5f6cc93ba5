"""Closed-form training of the output weights.

The design matrix H stacks one hidden feature vector per training sample
(L rows, n_acts*M columns); targets T are one-hot rows (L x P).  Output
weights solve H beta = T either by ridge regression,

    beta = (H^T H + lambda I)^-1 H^T T,

via a Cholesky factorization of the regularized Gram matrix, or by the
Moore-Penrose pseudoinverse beta = pinv(H) T computed from the SVD.

The Gram-side formulation keeps the factored matrix at n_acts*M square
regardless of L, which is the right trade-off here: training sets run to
60k samples while n_acts*M stays in the thousands.  Plain ndarrays are
used for H and T; `build_design_matrix` is the one blessed constructor
for H.
"""

import numpy as np
import scipy.linalg

from .errors import ConfigError, DimensionError, NumericalError
from .network import ActivationSet, HiddenLayerParams, OutputWeights, hidden_features_batch

SVD_CUTOFF = 1e-12  # relative to the largest singular value


def build_design_matrix(hidden: HiddenLayerParams, acts: ActivationSet,
                        X: np.ndarray) -> np.ndarray:
    """Hidden feature matrix: row l equals hidden_features(hidden, acts, X[l])."""
    return hidden_features_batch(hidden, acts, X)


def _check_solve_inputs(H, T):
    H = np.asarray(H, dtype=np.float64)
    T = np.asarray(T, dtype=np.float64)
    if H.ndim != 2 or T.ndim != 2:
        raise DimensionError("H and T must be 2-D")
    if H.shape[0] != T.shape[0]:
        raise DimensionError("H has %d rows but T has %d" % (H.shape[0], T.shape[0]))
    if not np.all(np.isfinite(H)) or not np.all(np.isfinite(T)):
        raise NumericalError("H or T contains non-finite values")
    return H, T


def ridge_solve(H: np.ndarray, T: np.ndarray, ridge_lambda: float) -> OutputWeights:
    """Minimize ||H b - T||_F^2 + lambda ||b||_F^2 in closed form.

    Factors the symmetric positive (semi-)definite matrix H^T H + lambda I
    with Cholesky.  lambda = 0 is allowed only when H^T H is numerically
    nonsingular.
    """
    H, T = _check_solve_inputs(H, T)
    if ridge_lambda < 0:
        raise ConfigError("ridge_lambda must be non-negative, got %g" % ridge_lambda)
    gram = H.T @ H
    if ridge_lambda > 0:
        gram[np.diag_indices_from(gram)] += ridge_lambda
    rhs = H.T @ T
    try:
        factor = scipy.linalg.cho_factor(gram, lower=True, check_finite=False)
        beta = scipy.linalg.cho_solve(factor, rhs, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise NumericalError(
            "Gram matrix factorization failed (%s); H is rank-deficient, "
            "use ridge_lambda > 0 or pinv_solve" % exc) from None
    return OutputWeights(beta)


def pinv_solve(H: np.ndarray, T: np.ndarray) -> OutputWeights:
    """Minimum-norm least-squares solution beta = pinv(H) T via SVD.

    Singular values below SVD_CUTOFF times the largest are treated as
    exact zeros.
    """
    H, T = _check_solve_inputs(H, T)
    try:
        u, sing, vt = np.linalg.svd(H, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("SVD of the design matrix failed: %s" % exc) from None
    inv = np.zeros_like(sing)
    if sing.size:
        keep = sing > SVD_CUTOFF * sing[0]
        inv[keep] = 1.0 / sing[keep]
    beta = vt.T @ (inv[:, np.newaxis] * (u.T @ T))
    return OutputWeights(beta)
