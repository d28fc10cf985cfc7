"""Dense symmetric linear algebra: eigendecomposition, spectral norm, Procrustes alignment.

Conventions fixed here and relied on everywhere else:

* eigenvalues are ordered by descending absolute value, ties broken by
  descending signed value, then by position in the solver output;
* each eigenvector is sign-normalized so that its entry of largest absolute
  value is positive (ties go to the lowest index).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonFinite, NoConvergence, RankDeficient

SYM_TOL = 1e-12


def as_sym_matrix(M, tol: float = SYM_TOL) -> np.ndarray:
    """Validate and return M as a float symmetric matrix.

    Raises NonFinite on NaN/Inf entries and ValueError on shape or
    symmetry violations.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] < 1:
        raise ValueError("matrix must be at least 1x1")
    if not np.all(np.isfinite(M)):
        raise NonFinite("matrix has NaN or Inf entries")
    if np.abs(M - M.T).max() > tol:
        raise ValueError(f"matrix is not symmetric within {tol}")
    return M


@dataclass(frozen=True)
class EigenDecomposition:
    """Full spectrum of a symmetric matrix.

    values: eigenvalues sorted by descending |value|.
    vectors: orthonormal columns, vectors[:, j] paired with values[j].
    """

    values: np.ndarray
    vectors: np.ndarray

    def leading(self, K: int) -> np.ndarray:
        """The n x K matrix of eigenvectors for the K largest |eigenvalues|."""
        return self.vectors[:, :K]


def _order_by_abs(values: np.ndarray) -> np.ndarray:
    # descending |v|, ties by descending signed value, then solver position
    return np.lexsort((np.arange(values.size), -values, -np.abs(values)))


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    idx = np.abs(vectors).argmax(axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def eig_sym(M) -> EigenDecomposition:
    """Full eigendecomposition of a symmetric matrix.

    Parameters
    ----------
    M : (n, n) array_like, symmetric within 1e-12, finite.

    Returns
    -------
    EigenDecomposition with the ordering and sign conventions above.
    """
    M = as_sym_matrix(M)
    try:
        w, v = np.linalg.eigh(M)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    order = _order_by_abs(w)
    return EigenDecomposition(values=w[order], vectors=_fix_signs(v[:, order]))


def spectral_norm(M) -> float:
    """max_j |lambda_j(M)| for symmetric M."""
    M = as_sym_matrix(M)
    try:
        w = np.linalg.eigvalsh(M)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return float(np.abs(w).max())


def _check_orthonormal_columns(U: np.ndarray, name: str, tol: float = 1e-8) -> None:
    G = U.T @ U
    if np.abs(G - np.eye(U.shape[1])).max() > tol:
        raise ValueError(f"{name} does not have orthonormal columns within {tol}")


def orthogonal_align(U_hat, U) -> np.ndarray:
    """Orthogonal matrix aligning U_hat to U.

    Computes the SVD of U_hat^T U = Ubar Sbar Vbar^T and returns
    O = Ubar Vbar^T, the K x K orthogonal matrix such that U_hat O is the
    Procrustes alignment of U_hat onto U.

    Raises RankDeficient if any singular value of U_hat^T U is below 1e-12.
    """
    U_hat = np.asarray(U_hat, dtype=float)
    U = np.asarray(U, dtype=float)
    if U_hat.shape != U.shape:
        raise ValueError(f"shape mismatch: {U_hat.shape} vs {U.shape}")
    if not (np.all(np.isfinite(U_hat)) and np.all(np.isfinite(U))):
        raise NonFinite("alignment inputs must be finite")
    _check_orthonormal_columns(U_hat, "U_hat")
    _check_orthonormal_columns(U, "U")
    C = U_hat.T @ U
    Ubar, s, Vbar_t = np.linalg.svd(C)
    if s.min() < 1e-12:
        raise RankDeficient(f"smallest singular value {s.min():.3e} below 1e-12")
    return Ubar @ Vbar_t
