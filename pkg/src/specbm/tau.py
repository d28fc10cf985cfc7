"""Data-driven selection of the regularization parameter tau.

The criterion compares the regularized sample Laplacian against a plug-in
population Laplacian rebuilt from the clustering that tau itself produced:

    Q(tau) = || L_tau - L_hat_tau || / sigma_hat_K(tau)

where sigma_hat_K is the K-th largest absolute eigenvalue of the plug-in
Laplacian. Small Q means the sample Laplacian concentrates around a
population with a healthy K-th eigenvalue. The minimizer over a fixed
20-point grid is the selected tau; ties go to the smaller tau.

Grid points where the criterion is undefined (an empty cluster, a community
with zero total degree, or sigma_hat below 1e-12) score +inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .clustering import ClusteringResult, KMeansConfig, _cluster_points, embed_laplacian
from .errors import (
    AllInfinite,
    DegenerateGrid,
    EmptyCluster,
    MissingTheta,
    SingularDegree,
    ZeroCommunityDegree,
)
from .graphgen import SeedLike, as_generator
from .laplacian import build_laplacian, degrees, validate_adjacency
from .linalg import eig_sym, spectral_norm
from .sbm import Membership, check_variant

GRID_SIZE = 20
SIGMA_FLOOR = 1e-12

REGULARIZED = ("tau", "tau_prime", "tau_dprime")


@dataclass(frozen=True)
class TauGrid:
    """The candidate taus, ascending, with the data-driven upper end."""

    values: np.ndarray
    tau_max: float


def tau_grid(d_bar: float) -> TauGrid:
    """20-point grid: 1e-4, 1, then tau_max^(j/18) for j = 1..18.

    tau_max is the average degree of the graph at hand; it must exceed 1
    for the geometric ladder to point upward.
    """
    if not math.isfinite(d_bar) or d_bar <= 1.0:
        raise DegenerateGrid(f"grid needs average degree > 1, got {d_bar!r}")
    values = [1e-4, 1.0] + [d_bar ** (j / 18.0) for j in range(1, 19)]
    return TauGrid(values=np.array(values), tau_max=float(d_bar))


def estimate_block_matrix(A, labels, K: Optional[int] = None) -> np.ndarray:
    """Block-wise edge frequencies: B_hat[k, l] = (edges between k and l) / (n_k n_l).

    Ordered pairs in the numerator, so diagonal entries average the full
    within-community adjacency block.
    """
    A = validate_adjacency(A)
    labels = np.asarray(labels, dtype=int)
    if labels.shape != (A.shape[0],):
        raise ValueError("labels must have one entry per node")
    K = int(labels.max()) if K is None else K
    counts = np.bincount(labels, minlength=K + 1)[1:]
    if (counts == 0).any():
        empty = int(np.flatnonzero(counts == 0)[0]) + 1
        raise EmptyCluster(f"cluster {empty} has no members")
    M = np.zeros((A.shape[0], K))
    M[np.arange(A.shape[0]), labels - 1] = 1.0
    pair_sums = M.T @ A @ M
    return pair_sums / np.outer(counts, counts)


def estimate_theta(A, labels, K: Optional[int] = None) -> np.ndarray:
    """Degree-correction estimates: theta_hat_i = n_k d_i / sum of degrees in i's cluster.

    By construction the estimates sum to n_k within each cluster.
    """
    A = validate_adjacency(A)
    labels = np.asarray(labels, dtype=int)
    if labels.shape != (A.shape[0],):
        raise ValueError("labels must have one entry per node")
    K = int(labels.max()) if K is None else K
    counts = np.bincount(labels, minlength=K + 1)[1:]
    if (counts == 0).any():
        empty = int(np.flatnonzero(counts == 0)[0]) + 1
        raise EmptyCluster(f"cluster {empty} has no members")
    d = A.sum(axis=1)
    totals = np.bincount(labels, weights=d, minlength=K + 1)[1:]
    if (totals <= 0).any():
        dead = int(np.flatnonzero(totals <= 0)[0]) + 1
        raise ZeroCommunityDegree(f"cluster {dead} has zero total degree")
    return counts[labels - 1] * d / totals[labels - 1]


@dataclass(frozen=True)
class PlugInModel:
    """Estimated membership, block matrix, and optional degree corrections."""

    Z_hat: Membership
    B_hat: np.ndarray
    theta_hat: Optional[np.ndarray] = None

    def __post_init__(self):
        B = np.asarray(self.B_hat, dtype=float)
        if B.shape != (self.Z_hat.K, self.Z_hat.K) or not np.allclose(B, B.T):
            raise ValueError("B_hat must be a symmetric K x K matrix")
        if not np.isfinite(B).all() or B.min() < 0.0 or B.max() > 1.0:
            raise ValueError("B_hat entries must lie in [0,1]")
        object.__setattr__(self, "B_hat", (B + B.T) / 2)
        if self.theta_hat is not None:
            theta = np.asarray(self.theta_hat, dtype=float)
            if theta.shape != (self.n,):
                raise ValueError("theta_hat must have one entry per node")
            if not np.isfinite(theta).all() or theta.min() < 0.0:
                raise ValueError("theta_hat entries must be nonnegative and finite")
            object.__setattr__(self, "theta_hat", theta)

    @property
    def n(self) -> int:
        return self.Z_hat.labels.shape[0]

    def _theta(self) -> np.ndarray:
        if self.theta_hat is None:
            return np.ones(self.n)
        return np.asarray(self.theta_hat, dtype=float)


def _plug_in_parts(plug: PlugInModel, tau: float, variant: str):
    """Low-rank factorization L_hat = Dinv^(1/2) Y C Y^T Dinv^(1/2).

    Returns (Y, C, denom) with denom the plug-in degree vector (plus the
    variant's regularization). The nonzero spectrum of L_hat is then the
    spectrum of M^(1/2) C M^(1/2) with M = Y^T diag(1/denom) Y, which keeps
    eigenvalue work at K x K scale.
    """
    check_variant(variant)
    g = plug.Z_hat.labels
    K = plug.Z_hat.K
    n = plug.n
    theta = plug._theta()
    B = np.asarray(plug.B_hat, dtype=float)
    if B.shape != (K, K):
        raise ValueError(f"B_hat must be {K} x {K}, got {B.shape}")
    t = np.bincount(g, weights=theta, minlength=K + 1)[1:]
    h = B @ t
    d = theta * h[g - 1]
    Y = theta[:, None] * plug.Z_hat.indicator()
    if variant == "plain":
        return Y, B, d, None
    if variant == "tau":
        if plug.theta_hat is None:
            return plug.Z_hat.indicator(), B + tau / n, d + tau, None
        C = np.zeros((K + 1, K + 1))
        C[:K, :K] = B
        C[K, K] = tau / n
        Y_ext = np.concatenate([Y, np.ones((n, 1))], axis=1)
        return Y_ext, C, d + tau, None
    if variant == "tau_prime":
        return Y, B, d + tau, None
    if plug.theta_hat is None:
        raise MissingTheta("variant tau_dprime needs theta_hat")
    # isolated nodes carry theta_hat = 0; their plug-in rows are
    # structurally zero and keep a zero scaling factor (see build_laplacian)
    zero_ok = (theta == 0) if tau > 0 else None
    return Y, B + tau / n, d + tau * theta, zero_ok


def _check_denom(denom, zero_ok):
    bad = denom <= 0
    if zero_ok is not None:
        bad = bad & ~zero_ok
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        raise SingularDegree(f"plug-in degree {denom[k]!r} at node {k} is not positive")
    with np.errstate(divide="ignore"):
        return np.where(denom > 0, 1.0 / np.sqrt(np.maximum(denom, 0.0)), 0.0)


def plug_in_laplacian(plug: PlugInModel, tau: float = 0.0, variant: str = "plain") -> np.ndarray:
    """Dense n x n plug-in Laplacian for the given variant."""
    Y, C, denom, zero_ok = _plug_in_parts(plug, tau, variant)
    scale = _check_denom(denom, zero_ok)
    half = (Y * scale[:, None]) @ C
    L = half @ (Y * scale[:, None]).T
    return (L + L.T) / 2.0


def plug_in_spectrum(plug: PlugInModel, tau: float = 0.0, variant: str = "plain", K: Optional[int] = None) -> np.ndarray:
    """Leading-K eigenvalues (by modulus) of the plug-in Laplacian.

    Computed from the K x K reduction M^(1/2) C M^(1/2), never from the
    n x n matrix.
    """
    Y, C, denom, zero_ok = _plug_in_parts(plug, tau, variant)
    scale = _check_denom(denom, zero_ok)
    K = plug.Z_hat.K if K is None else K
    M = Y.T @ (Y * (scale**2)[:, None])
    root = eig_sym((M + M.T) / 2.0)
    w = np.clip(root.values, 0.0, None)
    M_half = (root.vectors * np.sqrt(w)) @ root.vectors.T
    reduced = M_half @ C @ M_half
    values = eig_sym((reduced + reduced.T) / 2.0).values
    return values[:K]


@dataclass(frozen=True)
class TauSelection:
    """Selected tau, the grid, per-grid-point criterion values, and the
    clustering obtained at the selected tau."""

    tau_star: float
    grid: TauGrid
    qs: np.ndarray
    best_result: ClusteringResult


def _q_with_result(A, K, tau, variant, algo, config, rng, theta_hat):
    """One criterion evaluation; (+inf, None) when tau is unusable."""
    L = build_laplacian(A, variant=variant, tau=tau, theta_hat=theta_hat)
    points, degenerate = embed_laplacian(L, K, variant)
    result = _cluster_points(points, K, algo, config, rng)
    if degenerate is not None:
        result = ClusteringResult(
            labels=result.labels,
            centroids=result.centroids,
            objective=result.objective,
            iterations=result.iterations,
            converged=result.converged,
            restart_index=result.restart_index,
            degenerate_rows=degenerate,
        )
    try:
        B_hat = estimate_block_matrix(A, result.labels, K)
        membership = Membership(labels=result.labels, K=K)
        if variant == "tau":
            plug = PlugInModel(Z_hat=membership, B_hat=B_hat)
        else:
            plug = PlugInModel(Z_hat=membership, B_hat=B_hat, theta_hat=estimate_theta(A, result.labels, K))
        sigma = abs(plug_in_spectrum(plug, tau, variant)[K - 1])
        if sigma < SIGMA_FLOOR:
            return np.inf, result
        L_hat = plug_in_laplacian(plug, tau, variant)
    except (EmptyCluster, ZeroCommunityDegree, SingularDegree):
        return np.inf, result
    return spectral_norm(L - L_hat) / sigma, result


def q_criterion(
    A,
    K: int,
    tau: float,
    variant: str = "tau",
    algo: str = "modified",
    seed: Optional[SeedLike] = None,
    config: Optional[KMeansConfig] = None,
    theta_hat: Optional[np.ndarray] = None,
) -> float:
    """Q(tau) for one candidate tau (regularized variants only)."""
    if variant not in REGULARIZED:
        raise ValueError(f"q_criterion applies to {REGULARIZED}, got {variant!r}")
    rng = as_generator(seed if seed is not None else 0)
    q, _ = _q_with_result(A, K, tau, variant, algo, config, rng, theta_hat)
    return float(q)


def select_tau(
    A,
    K: int,
    variant: str = "tau",
    algo: str = "modified",
    seed: Optional[SeedLike] = None,
    config: Optional[KMeansConfig] = None,
    theta_hat: Optional[np.ndarray] = None,
) -> TauSelection:
    """Minimize Q over the grid built from the graph's average degree.

    The grid is scanned in ascending order with a single random stream, so
    ties resolve to the smaller tau and the scan is reproducible. Raises
    AllInfinite when no grid point yields a finite criterion.
    """
    if variant not in REGULARIZED:
        raise ValueError(f"select_tau applies to {REGULARIZED}, got {variant!r}")
    A = validate_adjacency(A)
    grid = tau_grid(degrees(A).d_bar)
    rng = as_generator(seed if seed is not None else 0)
    qs = np.empty(grid.values.shape[0])
    best_q = np.inf
    best_tau = None
    best_result = None
    for j, tau in enumerate(grid.values):
        q, result = _q_with_result(A, K, float(tau), variant, algo, config, rng, theta_hat)
        qs[j] = q
        if q < best_q:
            best_q = q
            best_tau = float(tau)
            best_result = result
    if best_tau is None:
        raise AllInfinite("criterion was +inf at every grid point")
    return TauSelection(tau_star=best_tau, grid=grid, qs=qs, best_result=best_result)


def write_trace(grid: TauGrid, qs, path) -> None:
    """CSV trace of the grid scan: tau,q per line."""
    qs = np.asarray(qs, dtype=float)
    with open(path, "w") as fh:
        fh.write("tau,q\n")
        for tau, q in zip(grid.values, qs):
            fh.write(f"{float(tau)!r},{'inf' if np.isinf(q) else repr(float(q))}\n")


@dataclass(frozen=True)
class AdaptiveResult:
    """Output of the two-stage adaptive pipeline.

    stage1 is the degree-corrected clustering used to estimate theta; final
    is the reclustering under the theta-adjusted regularization. sel1/sel2
    carry the two grid scans.
    """

    final: ClusteringResult
    stage1: ClusteringResult
    theta_hat: np.ndarray
    sel1: TauSelection
    sel2: TauSelection

    @property
    def labels(self) -> np.ndarray:
        return self.final.labels


def adaptive_cluster(
    A,
    K: int,
    seed: Optional[SeedLike] = None,
    algo: str = "modified",
    config: Optional[KMeansConfig] = None,
) -> AdaptiveResult:
    """Select tau for the degree-corrected Laplacian, estimate theta from
    that clustering, then select tau again for the theta-adjusted Laplacian
    and recluster."""
    A = validate_adjacency(A)
    rng = as_generator(seed if seed is not None else 0)
    sel1 = select_tau(A, K, variant="tau_prime", algo=algo, seed=rng, config=config)
    stage1 = sel1.best_result
    theta_hat = estimate_theta(A, stage1.labels, K)
    sel2 = select_tau(A, K, variant="tau_dprime", algo=algo, seed=rng, config=config, theta_hat=theta_hat)
    return AdaptiveResult(
        final=sel2.best_result,
        stage1=stage1,
        theta_hat=theta_hat,
        sel1=sel1,
        sel2=sel2,
    )
