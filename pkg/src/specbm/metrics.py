"""Agreement metrics between two labelings: CCP and NMI.

CCP (correct classification proportion) maximizes accuracy over all
permutations of the predicted labels. NMI is I(X;Y)/sqrt(H(X) H(Y)) with
natural logarithms.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import LengthMismatch

PERMUTE_LIMIT = 8  # brute-force permutations up to this K, assignment solver above


def _as_labels(labels, K=None):
    labels = np.asarray(labels, dtype=int)
    if labels.ndim != 1 or labels.size == 0:
        raise ValueError("labels must be a nonempty 1-D integer array")
    if labels.min() < 1:
        raise ValueError("labels must be 1-based")
    k_seen = int(labels.max())
    if K is None:
        K = k_seen
    elif k_seen > K:
        raise ValueError(f"label {k_seen} exceeds K={K}")
    return labels, K


def _confusion(predicted, truth, K):
    # C[a, b] = #{i : predicted_i = a+1, truth_i = b+1}
    idx = (predicted - 1) * K + (truth - 1)
    return np.bincount(idx, minlength=K * K).reshape(K, K)


def ccp(predicted, truth, K=None) -> float:
    """Proportion correctly classified under the best label permutation."""
    predicted, kp = _as_labels(predicted, K)
    truth, kt = _as_labels(truth, K)
    if predicted.size != truth.size:
        raise LengthMismatch(f"{predicted.size} predicted labels vs {truth.size} truth labels")
    K = max(kp, kt) if K is None else K
    C = _confusion(predicted, truth, K)
    n = predicted.size
    if K <= PERMUTE_LIMIT:
        best = max(
            sum(C[a, perm[a]] for a in range(K)) for perm in itertools.permutations(range(K))
        )
    else:
        rows, cols = linear_sum_assignment(-C)
        best = int(C[rows, cols].sum())
    return float(best) / float(n)


def nmi(predicted, truth, K=None) -> float:
    """Normalized mutual information, natural log, clipped to [0, 1].

    Both labelings constant: 1.0 (identical trivial partitions). Exactly one
    constant: 0.0 (no information about a degenerate partition).
    """
    predicted, kp = _as_labels(predicted, K)
    truth, kt = _as_labels(truth, K)
    if predicted.size != truth.size:
        raise LengthMismatch(f"{predicted.size} predicted labels vs {truth.size} truth labels")
    K = max(kp, kt) if K is None else K
    n = predicted.size
    joint = _confusion(predicted, truth, K).astype(float) / n
    p_pred = joint.sum(axis=1)
    p_true = joint.sum(axis=0)

    def entropy(p):
        p = p[p > 0]
        return float(-(p * np.log(p)).sum())

    h_pred = entropy(p_pred)
    h_true = entropy(p_true)
    if h_pred == 0.0 and h_true == 0.0:
        return 1.0
    if h_pred == 0.0 or h_true == 0.0:
        return 0.0
    mask = joint > 0
    outer = np.outer(p_pred, p_true)
    info = float((joint[mask] * np.log(joint[mask] / outer[mask])).sum())
    value = info / math.sqrt(h_pred * h_true)
    return float(min(max(value, 0.0), 1.0))
