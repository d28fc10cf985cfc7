"""K-means, modified K-means (geometric medians), medoid clustering, and the
spectral clustering pipeline.

Objectives follow the two criteria the estimators target:

* standard K-means minimizes the mean squared distance
  Q_hat = (1/n) sum_i min_l ||x_i - a_l||^2;
* modified K-means minimizes the mean distance
  Q_tilde = (1/n) sum_i min_l ||x_i - a_l||,
  whose per-cluster optimizers are geometric medians (Weiszfeld iterations).

Ties in nearest-centroid assignment (distance difference <= 1e-12) always go
to the smallest centroid index. Restarts are compared by (objective, restart
index), so results are deterministic given the seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import EmptySet, TooFewPoints
from .graphgen import SeedLike, as_generator
from .laplacian import build_laplacian
from .linalg import eig_sym

TIE_TOL = 1e-12

ALGOS = ("kmeans", "modified", "medoid")


@dataclass(frozen=True)
class KMeansConfig:
    restarts: int = 50
    max_iter: int = 300
    mode: str = "mean"  # mean | medoid

    def __post_init__(self):
        if self.restarts < 1 or self.max_iter < 1:
            raise ValueError("restarts and max_iter must be positive")
        if self.mode not in ("mean", "medoid"):
            raise ValueError(f"mode must be 'mean' or 'medoid', got {self.mode!r}")


@dataclass(frozen=True)
class ClusteringResult:
    """Labels in {1..K}, the K centroids, and the achieved objective.

    objective is Q_hat (squared) for kmeans/medoid and Q_tilde (plain
    distance) for the modified algorithm; it always equals the value
    recomputed from (labels, centroids). degenerate_rows flags embedding
    rows that had zero norm before row normalization (None when the
    pipeline did not normalize rows).
    """

    labels: np.ndarray
    centroids: np.ndarray
    objective: float
    iterations: int
    converged: bool
    restart_index: int = 0
    degenerate_rows: Optional[np.ndarray] = None


def _as_points(points) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[0] == 0 or points.shape[1] == 0:
        raise ValueError(f"points must be a nonempty 2-D array, got shape {points.shape}")
    if not np.all(np.isfinite(points)):
        raise ValueError("points must be finite")
    return points


def _dist_matrix(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centers[None, :, :]
    return np.sqrt((diff * diff).sum(axis=2))


def assign_labels(points, centroids) -> np.ndarray:
    """Nearest-centroid labels in {1..K}; ties go to the smallest index."""
    points = _as_points(points)
    centroids = np.asarray(centroids, dtype=float)
    if centroids.ndim != 2 or centroids.shape[0] == 0:
        raise ValueError("centroids must be a nonempty K x d array")
    D = _dist_matrix(points, centroids)
    d_min = D.min(axis=1)
    return (D <= (d_min + TIE_TOL)[:, None]).argmax(axis=1) + 1


def row_normalize(U):
    """Divide each row by its L2 norm.

    Rows with norm below 1e-12 are left as zero vectors; the second return
    value flags them.
    """
    U = np.asarray(U, dtype=float)
    norms = np.sqrt((U * U).sum(axis=1))
    degenerate = norms < 1e-12
    safe = np.where(degenerate, 1.0, norms)
    return U / safe[:, None], degenerate


def hausdorff(set_a, set_b) -> float:
    """Hausdorff distance between two finite point sets."""
    a = np.atleast_2d(np.asarray(set_a, dtype=float))
    b = np.atleast_2d(np.asarray(set_b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise EmptySet("hausdorff needs two nonempty sets")
    D = _dist_matrix(a, b)
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


def geometric_median(X, tol: float = 1e-10, max_iter: int = 200) -> np.ndarray:
    """Weiszfeld iteration started at the mean.

    When an iterate lands on a data point (within 1e-10) it is nudged off by
    1e-10 per coordinate and iteration continues; if all points coincide
    with the iterate, the iterate is the median. For two points the mean
    start is the midpoint, which is the returned (limit) optimizer.
    """
    X = np.asarray(X, dtype=float)
    if X.shape[0] == 1:
        return X[0].copy()
    eps = 1e-10
    y = X.mean(axis=0)
    for _ in range(max_iter):
        r = np.sqrt(((X - y) ** 2).sum(axis=1))
        on_point = r <= eps
        if on_point.all():
            return y
        if on_point.any():
            y = y + eps
            continue
        w = 1.0 / r
        y_new = (X * w[:, None]).sum(axis=0) / w.sum()
        if np.sqrt(((y_new - y) ** 2).sum()) <= tol:
            return y_new
        y = y_new
    return y


def _kmeanspp_indices(points: np.ndarray, K: int, rng: np.random.Generator, power: int) -> np.ndarray:
    # D^power sampling: power=2 for the squared objective, 1 for the
    # distance objective
    n = points.shape[0]
    chosen = [int(rng.integers(n))]
    d = np.sqrt(((points - points[chosen[0]]) ** 2).sum(axis=1))
    for _ in range(K - 1):
        w = d**power
        total = w.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=w / total))
        else:
            nxt = int(rng.integers(n))
        chosen.append(nxt)
        d = np.minimum(d, np.sqrt(((points - points[nxt]) ** 2).sum(axis=1)))
    return np.array(chosen)


def _reseed_empty(points, centers, labels):
    # empty clusters grab the point farthest from its assigned centroid,
    # one distinct point per empty cluster, then labels are recomputed
    K = centers.shape[0]
    present = np.bincount(labels, minlength=K + 1)[1:]
    if not (present == 0).any():
        return centers, labels, False
    dist_own = np.sqrt(((points - centers[labels - 1]) ** 2).sum(axis=1))
    used: set[int] = set()
    changed = False
    for k in np.flatnonzero(present == 0):
        order = np.argsort(-dist_own, kind="stable")
        pick = next((int(i) for i in order if int(i) not in used), None)
        if pick is None or dist_own[pick] == 0.0:
            continue  # nothing meaningful to reseed with (duplicate points)
        centers[k] = points[pick]
        used.add(pick)
        changed = True
    if changed:
        labels = assign_labels(points, centers)
    return centers, labels, changed


def _objective(points, centers, labels, squared: bool) -> float:
    r = np.sqrt(((points - centers[labels - 1]) ** 2).sum(axis=1))
    return float((r**2).mean() if squared else r.mean())


def _lloyd_run(points, K, rng, max_iter, squared: bool):
    n = points.shape[0]
    power = 2 if squared else 1
    centers = points[_kmeanspp_indices(points, K, rng, power)].copy()
    labels = assign_labels(points, centers)
    centers, labels, _ = _reseed_empty(points, centers, labels)
    prev_obj = np.inf
    prev_labels = None
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        if prev_labels is not None and np.array_equal(labels, prev_labels):
            converged = True
            break
        prev_labels = labels
        for k in range(1, K + 1):
            members = points[labels == k]
            if members.shape[0] == 0:
                continue
            centers[k - 1] = members.mean(axis=0) if squared else geometric_median(members)
        obj = _objective(points, centers, labels, squared)
        # Lloyd/Weiszfeld steps never increase the objective (tiny slack
        # covers the Weiszfeld nudge off data points)
        if obj > prev_obj + 1e-8 * max(1.0, prev_obj):
            raise AssertionError(
                f"objective increased: {prev_obj!r} -> {obj!r}"
            )
        prev_obj = obj
        labels = assign_labels(points, centers)
        centers, labels, _ = _reseed_empty(points, centers, labels)
    labels = assign_labels(points, centers)
    return labels, centers, _objective(points, centers, labels, squared), iterations, converged


def _pam_run(points, K, rng, max_iter):
    # medoid mode: squared objective, centers restricted to data points,
    # best-improvement swaps until a local minimum
    n = points.shape[0]
    diff = points[:, None, :] - points[None, :, :]
    D2 = (diff * diff).sum(axis=2)
    medoids = list(_kmeanspp_indices(points, K, rng, 2))
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        cur = D2[:, medoids]
        obj = cur.min(axis=1).mean()
        best = (0.0, None, None)
        for slot in range(K):
            others = [m for s, m in enumerate(medoids) if s != slot]
            rest = D2[:, others].min(axis=1) if others else np.full(n, np.inf)
            cand_obj = np.minimum(rest[:, None], D2).mean(axis=0)
            j = int(cand_obj.argmin())
            delta = cand_obj[j] - obj
            if delta < best[0] - 1e-15:
                best = (delta, slot, j)
        if best[1] is None:
            converged = True
            break
        medoids[best[1]] = best[2]
    centers = points[medoids].copy()
    labels = assign_labels(points, centers)
    return labels, centers, _objective(points, centers, labels, True), iterations, converged


def _cluster(points, K, config, seed, kind):
    points = _as_points(points)
    if K < 1:
        raise ValueError("K must be at least 1")
    if points.shape[0] < K:
        raise TooFewPoints(f"{points.shape[0]} points cannot form {K} clusters")
    config = config or KMeansConfig()
    rng = as_generator(seed if seed is not None else 0)
    best = None
    for restart in range(config.restarts):
        if kind == "medoid":
            run = _pam_run(points, K, rng, config.max_iter)
        else:
            run = _lloyd_run(points, K, rng, config.max_iter, squared=(kind == "mean"))
        labels, centers, obj, iters, conv = run
        if best is None or obj < best.objective:
            best = ClusteringResult(
                labels=labels,
                centroids=centers,
                objective=obj,
                iterations=iters,
                converged=conv,
                restart_index=restart,
            )
    return best


def kmeans(points, K: int, config: Optional[KMeansConfig] = None, seed: Optional[SeedLike] = None) -> ClusteringResult:
    """Best-of-restarts K-means (mode='mean') or PAM medoids (mode='medoid')."""
    config = config or KMeansConfig()
    return _cluster(points, K, config, seed, kind=config.mode)


def kmedians_modified(points, K: int, config: Optional[KMeansConfig] = None, seed: Optional[SeedLike] = None) -> ClusteringResult:
    """Modified K-means: distance objective, geometric-median updates."""
    return _cluster(points, K, config, seed, kind="median")


def _cluster_points(points, K, algo, config, seed):
    if algo == "kmeans":
        cfg = config or KMeansConfig()
        if cfg.mode != "mean":
            cfg = KMeansConfig(restarts=cfg.restarts, max_iter=cfg.max_iter, mode="mean")
        return _cluster(points, K, cfg, seed, kind="mean")
    if algo == "modified":
        return kmedians_modified(points, K, config, seed)
    if algo == "medoid":
        return _cluster(points, K, config, seed, kind="medoid")
    raise ValueError(f"algo must be one of {ALGOS}, got {algo!r}")


def embed_laplacian(L: np.ndarray, K: int, variant: str):
    """Leading-K spectral embedding of a prebuilt Laplacian.

    Returns (points, degenerate_flags): rows scaled by sqrt(n/K) for
    plain/tau, L2-normalized rows (with zero rows flagged) for the
    degree-corrected variants.
    """
    n = L.shape[0]
    U = eig_sym(L).leading(K)
    if variant in ("plain", "tau"):
        return U * np.sqrt(n / K), None
    points, degenerate = row_normalize(U)
    return points, degenerate


def spectral_cluster(
    A,
    K: int,
    variant: str = "plain",
    tau: float = 0.0,
    algo: str = "kmeans",
    config: Optional[KMeansConfig] = None,
    seed: Optional[SeedLike] = None,
    theta_hat: Optional[np.ndarray] = None,
) -> ClusteringResult:
    """Laplacian -> leading-K eigenvectors -> scaled/normalized rows -> cluster.

    Rows of the eigenvector matrix are scaled by sqrt(n/K) for variants
    plain/tau and L2-normalized for tau_prime/tau_dprime (the
    degree-corrected geometry). algo is one of 'kmeans', 'modified',
    'medoid'.
    """
    L = build_laplacian(A, variant=variant, tau=tau, theta_hat=theta_hat)
    points, degenerate = embed_laplacian(L, K, variant)
    result = _cluster_points(points, K, algo, config, seed)
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
    return result
