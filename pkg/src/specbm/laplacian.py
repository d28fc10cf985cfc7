"""Sample-side degrees and the four graph Laplacian variants.

Everything is dense: tau-regularization destroys sparsity anyway and the
target scale (n up to ~2000) keeps dense eigensolves cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import MissingTheta, NonFinite, SingularDegree
from .sbm import check_variant


def validate_adjacency(A) -> np.ndarray:
    """Check symmetry, zero diagonal, and 0/1 entries; return as float array."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"adjacency must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NonFinite("adjacency has NaN or Inf entries")
    if not np.array_equal(A, A.T):
        raise ValueError("adjacency must be exactly symmetric")
    if np.any(np.diag(A) != 0.0):
        raise ValueError("adjacency must have a zero diagonal")
    if not np.all((A == 0.0) | (A == 1.0)):
        raise ValueError("adjacency entries must be 0 or 1")
    return A


@dataclass(frozen=True)
class DegreeVector:
    """Node degrees d_hat_i = sum_j A_ij plus the regularizer they pair with."""

    d_hat: np.ndarray
    tau: float = 0.0

    @property
    def d_min(self) -> float:
        return float(self.d_hat.min())

    @property
    def d_max(self) -> float:
        return float(self.d_hat.max())

    @property
    def d_bar(self) -> float:
        return float(self.d_hat.mean())


def degrees(A, tau: float = 0.0) -> DegreeVector:
    """Exact row sums of the adjacency matrix."""
    A = validate_adjacency(A)
    return DegreeVector(d_hat=A.sum(axis=1), tau=float(tau))


def build_laplacian(
    A,
    variant: str = "plain",
    tau: float = 0.0,
    theta_hat: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Construct one of the four Laplacian variants from an adjacency matrix.

    plain:      D^{-1/2} A D^{-1/2}
    tau:        D_tau^{-1/2} (A + tau/n) D_tau^{-1/2}, D_tau = actual row
                sums of the regularized adjacency
    tau_prime:  (D + tau I)^{-1/2} A (D + tau I)^{-1/2}
    tau_dprime: row sums of A + tau/n theta_hat theta_hat^T on both sides
                of that same regularized adjacency

    Raises SingularDegree when the variant's degrees are not all positive
    (for plain that means a zero-degree node) and MissingTheta when
    tau_dprime is requested without theta_hat.

    One exception to the positivity rule: under tau_dprime with tau > 0 a
    node with theta_hat = 0 (an isolated node, whose estimated correction
    is necessarily zero) has a structurally zero row; that row keeps a zero
    scaling factor instead of erroring, embedding the node at the origin,
    exactly as tau_prime embeds isolated nodes.
    """
    check_variant(variant)
    A = validate_adjacency(A)
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    n = A.shape[0]
    d_hat = A.sum(axis=1)
    zero_ok = None
    if variant == "plain":
        num = A
        denom = d_hat
    elif variant == "tau":
        num = A + tau / n
        denom = num.sum(axis=1)
    elif variant == "tau_prime":
        num = A
        denom = d_hat + tau
    else:
        if theta_hat is None:
            raise MissingTheta("variant tau_dprime needs theta_hat")
        theta_hat = np.asarray(theta_hat, dtype=float)
        if theta_hat.shape != (n,):
            raise ValueError(f"theta_hat must have shape ({n},)")
        if (theta_hat < 0).any() or not np.all(np.isfinite(theta_hat)):
            raise ValueError("theta_hat entries must be nonnegative and finite")
        num = A + (tau / n) * np.outer(theta_hat, theta_hat)
        denom = num.sum(axis=1)
        if tau > 0:
            zero_ok = (theta_hat == 0) & (d_hat == 0)
    return scaled_symmetric(num, denom, variant, tau, zero_ok)


def scaled_symmetric(num, denom, variant, tau, zero_ok=None) -> np.ndarray:
    """diag(denom)^{-1/2} num diag(denom)^{-1/2}, symmetrized.

    Nonpositive entries of denom raise SingularDegree unless flagged in
    zero_ok, in which case the corresponding scaling factor is 0 (the
    structurally-zero-row convention for isolated nodes).
    """
    bad = denom <= 0
    if zero_ok is not None:
        bad = bad & ~zero_ok
    if bad.any():
        raise SingularDegree(
            f"variant {variant!r} at tau={tau:g} has a nonpositive degree"
        )
    with np.errstate(divide="ignore"):
        s = np.where(denom > 0, 1.0 / np.sqrt(np.maximum(denom, 0.0)), 0.0)
    L = s[:, None] * num * s[None, :]
    return (L + L.T) / 2
