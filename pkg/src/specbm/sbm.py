"""Population-side block model objects.

Everything here is exact (no sampling): block models, edge-probability
matrices, population Laplacians for the four variants, their K-vector
spectra, and the rate/assumption diagnostics.

Variant names used throughout the package:

* ``plain``      L = D^{-1/2} A D^{-1/2}
* ``tau``        adjacency regularized: A_tau = A + tau/n (every entry)
* ``tau_prime``  degree regularized: D_tau = D + tau I, adjacency untouched
* ``tau_dprime`` degree-corrected adjacency regularization via theta
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateBlock, MissingTheta, SingularDegree
from .linalg import as_sym_matrix

VARIANTS = ("plain", "tau", "tau_prime", "tau_dprime")

THETA_SUM_TOL = 1e-9


def check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}, expected one of {VARIANTS}")


@dataclass(frozen=True)
class BlockModel:
    """Generative truth: block matrix, community sizes, optional degree parameters.

    theta, when present, must satisfy the normalization sum(theta[C_k]) = n_k
    for every community k (communities taken in the canonical contiguous
    order used by Membership.from_sizes). theta_raw optionally records the
    pre-rescale draw.
    """

    K: int
    B: np.ndarray
    sizes: np.ndarray
    theta: Optional[np.ndarray] = None
    theta_raw: Optional[np.ndarray] = None

    def __post_init__(self):
        B = as_sym_matrix(self.B)
        if B.shape != (self.K, self.K):
            raise ValueError(f"B must be {self.K}x{self.K}, got {B.shape}")
        if B.min() < 0.0 or B.max() > 1.0:
            from .errors import ProbOutOfRange

            raise ProbOutOfRange(
                f"block matrix entries must lie in [0,1], got range "
                f"[{B.min():.6g}, {B.max():.6g}]"
            )
        sizes = np.asarray(self.sizes, dtype=int)
        if sizes.shape != (self.K,) or (sizes <= 0).any():
            raise ValueError("sizes must be K positive counts")
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "sizes", sizes)
        if self.theta is not None:
            theta = np.asarray(self.theta, dtype=float)
            if theta.shape != (int(sizes.sum()),):
                raise ValueError("theta must have one entry per node")
            if (theta <= 0).any():
                raise ValueError("theta entries must be positive")
            stops = np.cumsum(sizes)
            starts = stops - sizes
            for k, (a, b) in enumerate(zip(starts, stops)):
                if abs(theta[a:b].sum() - sizes[k]) > THETA_SUM_TOL:
                    raise ValueError(
                        f"theta must sum to n_k within {THETA_SUM_TOL} in community "
                        f"{k + 1}: got {theta[a:b].sum():.12g} vs {sizes[k]}"
                    )
            object.__setattr__(self, "theta", theta)
        if self.theta_raw is not None:
            object.__setattr__(
                self, "theta_raw", np.asarray(self.theta_raw, dtype=float)
            )

    @property
    def n(self) -> int:
        return int(self.sizes.sum())


@dataclass(frozen=True)
class Membership:
    """Community labels g_i in {1..K}, every community nonempty."""

    labels: np.ndarray
    K: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=int)
        if labels.ndim != 1 or labels.size == 0:
            raise ValueError("labels must be a nonempty vector")
        if labels.min() < 1 or labels.max() > self.K:
            raise ValueError(f"labels must lie in 1..{self.K}")
        counts = np.bincount(labels, minlength=self.K + 1)[1:]
        if (counts == 0).any():
            raise ValueError("every community must be nonempty")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_sizes(cls, sizes) -> "Membership":
        """Contiguous blocks: the first n_1 nodes get label 1, and so on."""
        sizes = np.asarray(sizes, dtype=int)
        labels = np.repeat(np.arange(1, sizes.size + 1), sizes)
        return cls(labels=labels, K=sizes.size)

    @property
    def n(self) -> int:
        return self.labels.size

    def counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.K + 1)[1:]

    def indicator(self) -> np.ndarray:
        """n x K one-hot membership matrix Z."""
        Z = np.zeros((self.n, self.K))
        Z[np.arange(self.n), self.labels - 1] = 1.0
        return Z


@dataclass(frozen=True)
class PopulationSummary:
    """Identification quantities of a block model.

    W[k] = sum_l B[k,l] * Pi[l]; B0 is B rescaled by diag(W)^{-1/2} on both
    sides; sigma holds the K eigenvalues of Pi^{1/2} B0 Pi^{1/2} sorted by
    descending absolute value; d is the vector of expected degrees
    d_i = sum_j P_ij (diagonal included). theta_tau and nk_tau are the
    tau-discounted degree parameters theta_i * d_i / (d_i + tau) and their
    per-community sums; they are None when the model has no theta.
    """

    W: np.ndarray
    B0: np.ndarray
    Pi: np.ndarray
    sigma: np.ndarray
    d: np.ndarray
    theta_tau: Optional[np.ndarray]
    nk_tau: Optional[np.ndarray]


@dataclass(frozen=True)
class AssumptionReport:
    """Raw rate quantities plus the structural verdicts that are checkable.

    Rate inequalities involve unknowable absolute constants, so only their
    left-hand sides are reported; full rank of B0 and the balance ratios
    n_k K / n are structural and get actual values/verdicts.
    """

    mu_n: float
    mu_n_tau: float
    rho_n: float
    sigma_K: float
    eta_n: float
    m_bar_min: float
    balance_min: float
    balance_max: float
    full_rank_ok: bool


def _check_membership(model: BlockModel, membership: Membership) -> None:
    if membership.K != model.K:
        raise ValueError("membership K does not match model K")
    if not np.array_equal(membership.counts(), model.sizes):
        raise ValueError("membership community counts do not match model sizes")


def edge_prob_matrix(model: BlockModel, membership: Membership) -> np.ndarray:
    """P_ij = B[g_i, g_j] (times theta_i theta_j when theta is present).

    The diagonal is included: P_ii = B[g_i, g_i] * theta_i^2. Population
    degrees are row sums of this matrix.
    """
    _check_membership(model, membership)
    g = membership.labels - 1
    P = model.B[np.ix_(g, g)]
    if model.theta is not None:
        P = P * np.outer(model.theta, model.theta)
    return P


def normalized_block_matrix(
    model: BlockModel, membership: Membership, tau: float = 0.0
) -> PopulationSummary:
    """W, B0 = D_B^{-1/2} B D_B^{-1/2}, Pi, spectrum, and expected degrees."""
    _check_membership(model, membership)
    n = model.n
    Pi = model.sizes / n
    W = model.B @ Pi
    if (W <= 0).any():
        raise DegenerateBlock("some community has zero expected degree (W_k = 0)")
    B0 = model.B / np.sqrt(np.outer(W, W))
    core = np.sqrt(np.outer(Pi, Pi)) * B0
    sigma = np.linalg.eigvalsh(core)
    sigma = sigma[np.lexsort((np.arange(model.K), -sigma, -np.abs(sigma)))]
    d = edge_prob_matrix(model, membership).sum(axis=1)
    theta_tau = nk_tau = None
    if model.theta is not None:
        theta_tau = model.theta * d / (d + tau)
        Z = membership.indicator()
        nk_tau = Z.T @ theta_tau
    return PopulationSummary(
        W=W, B0=B0, Pi=Pi, sigma=sigma, d=d, theta_tau=theta_tau, nk_tau=nk_tau
    )


def population_laplacian(
    model: BlockModel, membership: Membership, tau: float = 0.0, variant: str = "plain"
) -> np.ndarray:
    """The n x n population Laplacian of the requested variant.

    plain:      D^{-1/2} P D^{-1/2}
    tau:        D_tau^{-1/2} (P + tau/n) D_tau^{-1/2}, D_tau = row sums
    tau_prime:  (D + tau I)^{-1/2} P (D + tau I)^{-1/2}
    tau_dprime: (D + tau Theta)^{-1/2} (P + tau/n theta theta^T) (...)^{-1/2}
    """
    check_variant(variant)
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    P = edge_prob_matrix(model, membership)
    n = model.n
    d = P.sum(axis=1)
    if variant == "plain":
        num = P
        denom = d
    elif variant == "tau":
        num = P + tau / n
        denom = num.sum(axis=1)
    elif variant == "tau_prime":
        num = P
        denom = d + tau
    else:
        theta = model.theta if model.theta is not None else np.ones(n)
        num = P + (tau / n) * np.outer(theta, theta)
        denom = num.sum(axis=1)
    if denom.min() <= 0:
        raise SingularDegree(
            f"variant {variant!r} needs positive regularized degrees; "
            f"min is {denom.min():.6g}"
        )
    s = 1.0 / np.sqrt(denom)
    L = s[:, None] * num * s[None, :]
    return (L + L.T) / 2


def population_spectrum(
    model: BlockModel, membership: Membership, tau: float = 0.0, variant: str = "plain"
) -> np.ndarray:
    """The K eigenvalues of the population Laplacian, by descending |value|.

    Computed from the K x K reduction rather than the n x n matrix: every
    population Laplacian here equals X C X^T with X columns supported on
    disjoint communities, so its nonzero spectrum is that of a K x K
    symmetric matrix.
    """
    check_variant(variant)
    _check_membership(model, membership)
    n = model.n
    Pi = model.sizes / n
    if variant == "tau" and model.theta is not None and tau > 0:
        # adding tau/n to every edge probability breaks the degree-corrected
        # factorization, so reduce through the bordered factor
        # P_tau = [Theta Z, iota] diag(B, tau/n) [Theta Z, iota]^T instead
        K = model.K
        theta = model.theta
        g = membership.labels - 1
        Z = membership.indicator()
        t = Z.T @ theta
        d = theta * (model.B @ t)[g]
        dt = d + tau
        if dt.min() <= 0:
            raise SingularDegree("regularized degrees must be positive")
        M = np.zeros((K + 1, K + 1))
        M[:K, :K] = np.diag(Z.T @ (theta**2 / dt))
        border = Z.T @ (theta / dt)
        M[:K, K] = border
        M[K, :K] = border
        M[K, K] = (1.0 / dt).sum()
        C = np.zeros((K + 1, K + 1))
        C[:K, :K] = model.B
        C[K, K] = tau / n
        mvals, mvecs = np.linalg.eigh(M)
        M_half = (mvecs * np.sqrt(np.maximum(mvals, 0.0))) @ mvecs.T
        sigma = np.linalg.eigvalsh(M_half @ C @ M_half)
        order = np.lexsort((np.arange(K + 1), -sigma, -np.abs(sigma)))
        return sigma[order][:K]
    if variant in ("tau", "tau_dprime"):
        B_eff = model.B + tau / n
    else:
        B_eff = model.B
    W_eff = B_eff @ Pi
    if (W_eff <= 0).any():
        raise DegenerateBlock("some community has zero expected degree (W_k = 0)")
    B0_eff = B_eff / np.sqrt(np.outer(W_eff, W_eff))
    if variant == "tau_prime":
        summary = normalized_block_matrix(model, membership, tau=tau)
        if model.theta is not None:
            nk_tau = summary.nk_tau
        else:
            d = summary.d
            Z = membership.indicator()
            nk_tau = Z.T @ (d / (d + tau))
        Pi_eff = nk_tau / n
    else:
        Pi_eff = Pi
    core = np.sqrt(np.outer(Pi_eff, Pi_eff)) * B0_eff
    sigma = np.linalg.eigvalsh(core)
    order = np.lexsort((np.arange(model.K), -sigma, -np.abs(sigma)))
    return sigma[order]


def assumption_report(
    model: BlockModel, membership: Membership, tau: float = 0.0, variant: str = "plain"
) -> AssumptionReport:
    """Rate quantities (raw) and structural verdicts for a model.

    mu_n is the minimal expected degree; mu_n_tau adds the variant's
    regularization to it; rho_n = max(max B0 entry, 1); sigma_K is the
    smallest of the K leading |eigenvalues| for the requested variant;
    eta_n is the uniform row-error rate quantity

        (rho_n sqrt(log n) / (sqrt(mu_n_tau) sigma_K^2))
        * (sqrt(1/K + log 5 / log n) sqrt(rho_n) (theta_max/theta_min)^{1/4}
           + rho_n + 1);

    m_bar_min is the minimal average community degree min_k n W_k.
    """
    check_variant(variant)
    summary = normalized_block_matrix(model, membership, tau=tau)
    n = model.n
    K = model.K
    # mu_n counts links to other nodes only, so it is the minimal row sum of
    # P with the diagonal removed (the Laplacian degree keeps the diagonal).
    P = edge_prob_matrix(model, membership)
    d_off = P.sum(axis=1) - np.diag(P)
    mu_n = float(d_off.min())
    if variant == "plain":
        mu_n_tau = mu_n
    elif variant == "tau_dprime":
        theta = model.theta if model.theta is not None else np.ones(n)
        mu_n_tau = float((d_off + tau * theta).min())
    else:
        mu_n_tau = mu_n + tau
    rho_n = float(max(summary.B0.max(), 1.0))
    sigma = population_spectrum(model, membership, tau=tau, variant=variant)
    sigma_K = float(np.abs(sigma).min())
    if model.theta is not None:
        theta_ratio = float(model.theta.max() / model.theta.min())
    else:
        theta_ratio = 1.0
    log_n = np.log(n)
    with np.errstate(divide="ignore"):
        eta_n = (
            rho_n
            * np.sqrt(log_n)
            / (np.sqrt(mu_n_tau) * sigma_K**2)
            * (
                np.sqrt(1.0 / K + np.log(5.0) / log_n)
                * np.sqrt(rho_n)
                * theta_ratio**0.25
                + rho_n
                + 1.0
            )
        )
    balance = model.sizes * K / n
    plain_sigma = summary.sigma
    return AssumptionReport(
        mu_n=mu_n,
        mu_n_tau=mu_n_tau,
        rho_n=rho_n,
        sigma_K=sigma_K,
        eta_n=float(eta_n),
        m_bar_min=float(n * summary.W.min()),
        balance_min=float(balance.min()),
        balance_max=float(balance.max()),
        full_rank_ok=bool(np.abs(plain_sigma).min() > 1e-12),
    )
