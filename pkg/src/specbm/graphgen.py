"""Seeded adjacency sampling and model presets.

Randomness is counter-based (Philox keyed by (master, stream)), so
replication r is reproducible without generating replications 0..r-1 and
parallel batches stay deterministic. Only the packed upper triangle is
drawn, in row-major (i, j) order with i < j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, TextIO, Tuple, Union

import numpy as np

from .errors import NonFinite, ProbOutOfRange
from .sbm import BlockModel, Membership


@dataclass(frozen=True)
class RngSeed:
    """(master, stream) pair; uniquely determines the full bit stream."""

    master: int
    stream: int = 0

    def __post_init__(self):
        for name in ("master", "stream"):
            v = getattr(self, name)
            if not (0 <= int(v) < 2**64):
                raise ValueError(f"{name} must be a 64-bit unsigned integer")

    def generator(self) -> np.random.Generator:
        return np.random.Generator(
            np.random.Philox(key=np.array([self.master, self.stream], dtype=np.uint64))
        )


SeedLike = Union[RngSeed, int, np.random.Generator]


def as_generator(seed: Optional[SeedLike]) -> np.random.Generator:
    """Normalize a seed argument to a Generator.

    RngSeed and plain ints create a fresh Philox stream; an existing
    Generator is returned as-is so callers can thread one stream through
    several draws.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, RngSeed):
        return seed.generator()
    if isinstance(seed, (int, np.integer)):
        return RngSeed(int(seed), 0).generator()
    raise TypeError(f"expected RngSeed, int, or Generator, got {type(seed).__name__}")


def sample_adjacency(P, seed: SeedLike) -> np.ndarray:
    """Sample a symmetric 0/1 adjacency matrix with zero diagonal.

    For i < j, A_ij ~ Bernoulli(P_ij) independently; A_ji = A_ij; A_ii = 0.
    Deterministic given the seed.
    """
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError(f"P must be square, got shape {P.shape}")
    if not np.all(np.isfinite(P)):
        raise NonFinite("P has NaN or Inf entries")
    if P.min() < 0.0 or P.max() > 1.0:
        raise ProbOutOfRange(
            f"probabilities must lie in [0,1], got range [{P.min():.6g}, {P.max():.6g}]"
        )
    n = P.shape[0]
    rng = as_generator(seed)
    iu = np.triu_indices(n, k=1)
    u = rng.random(iu[0].size)
    A = np.zeros((n, n))
    A[iu] = (u < P[iu]).astype(float)
    return A + A.T


def sampling_prob_matrix(model, membership) -> np.ndarray:
    """Edge probabilities actually used for sampling: the model's
    probability matrix with entries capped at 1.

    Degree-corrected products theta_i theta_j B can slightly exceed 1 in
    small dense designs (the per-community rescale of theta can push the
    largest parameters above 1.5); the sampling model treats such pairs as
    sure edges. The cap never binds when theta is absent.
    """
    from .sbm import edge_prob_matrix

    return np.minimum(edge_prob_matrix(model, membership), 1.0)


def _dgp_block_matrix(dgp_id: int, n: int) -> np.ndarray:
    log_n = math.log(n)
    if dgp_id in (1, 3):
        return (2.0 / n) * np.array(
            [
                [log_n**2, 0.2 * log_n],
                [0.2 * log_n, 0.8 * log_n],
            ]
        )
    lo = 0.1 * log_n ** (5.0 / 6.0)
    return (3.0 / n) * np.array(
        [
            [math.sqrt(n), lo, lo],
            [lo, log_n**1.5, lo],
            [lo, lo, 0.8 * log_n ** (5.0 / 6.0)],
        ]
    )


def _draw_theta(sizes: np.ndarray, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    # raw in {0.5, 1.5} with equal probability, then rescaled so each
    # community sums to its size
    n = int(sizes.sum())
    raw = 0.5 + rng.integers(0, 2, size=n).astype(float)
    theta = raw.copy()
    stop = np.cumsum(sizes)
    start = stop - sizes
    for k in range(sizes.size):
        seg = slice(start[k], stop[k])
        theta[seg] *= sizes[k] / theta[seg].sum()
    return raw, theta


def dgp_preset(
    dgp_id: int, n_per_community: int, seed: Optional[SeedLike] = None
) -> Tuple[BlockModel, Membership]:
    """The four simulation designs.

    1: K=2, within/between probabilities scaling as log^2(n)/n and log(n)/n.
    2: K=3, heterogeneous degrees of order n^{1/2}, log^{3/2}(n), log^{5/6}(n).
    3/4: same block matrices with degree parameters theta_i drawn i.i.d.
    from {0.5, 1.5} with equal probability, rescaled within each community
    so that sum(theta[C_k]) = n_k (raw draw kept on theta_raw).

    Natural logarithms throughout. seed is consumed only by 3 and 4.
    """
    if dgp_id not in (1, 2, 3, 4):
        raise ValueError(f"dgp_id must be 1..4, got {dgp_id}")
    if n_per_community < 2:
        raise ValueError("n_per_community must be at least 2")
    K = 2 if dgp_id in (1, 3) else 3
    sizes = np.full(K, n_per_community, dtype=int)
    n = K * n_per_community
    B = _dgp_block_matrix(dgp_id, n)
    theta = theta_raw = None
    if dgp_id in (3, 4):
        if seed is None:
            raise ValueError(f"dgp {dgp_id} draws theta and needs a seed")
        theta_raw, theta = _draw_theta(sizes, as_generator(seed))
    model = BlockModel(K=K, B=B, sizes=sizes, theta=theta, theta_raw=theta_raw)
    return model, Membership.from_sizes(sizes)


def four_param_sbm(K: int, s: int, r: float, p: float) -> Tuple[BlockModel, Membership]:
    """Equal-size SBM with B_kk = r + p and B_kl = r for k != l."""
    if s < 2:
        raise ValueError("s must be at least 2")
    if K < 1:
        raise ValueError("K must be at least 1")
    if r < 0 or p < 0 or r + p > 1:
        raise ProbOutOfRange(f"need 0 <= r, 0 <= p, r + p <= 1; got r={r}, p={p}")
    B = np.full((K, K), float(r)) + p * np.eye(K)
    sizes = np.full(K, s, dtype=int)
    return BlockModel(K=K, B=B, sizes=sizes), Membership.from_sizes(sizes)


def write_edge_list(A, out: Union[str, TextIO]) -> None:
    """Write `# n=<n>` then one `i j` line per edge, 0-based, i < j."""
    A = np.asarray(A)
    n = A.shape[0]
    i, j = np.nonzero(np.triu(A, k=1))
    lines = [f"# n={n}"]
    lines.extend(f"{a} {b}" for a, b in zip(i, j))
    text = "\n".join(lines) + "\n"
    if isinstance(out, str):
        with open(out, "w") as fh:
            fh.write(text)
    else:
        out.write(text)


def read_edge_list(path: str) -> np.ndarray:
    """Read the edge-list format produced by write_edge_list."""
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("# n="):
            raise ValueError(f"{path}: expected a '# n=<n>' header line")
        n = int(header[len("# n=") :])
        A = np.zeros((n, n))
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'i j', got {line!r}")
            i, j = int(parts[0]), int(parts[1])
            if not (0 <= i < n and 0 <= j < n) or i == j:
                raise ValueError(f"{path}:{lineno}: edge ({i},{j}) out of range")
            A[i, j] = 1.0
            A[j, i] = 1.0
    return A
