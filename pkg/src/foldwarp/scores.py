"""External cluster-validity indices: adjusted Rand index and V-measure."""
from __future__ import annotations

import numpy as np

from .exceptions import LengthMismatch


def _contingency(truth, pred) -> np.ndarray:
    truth = np.asarray(truth).ravel()
    pred = np.asarray(pred).ravel()
    if truth.shape[0] != pred.shape[0]:
        raise LengthMismatch(
            f"label vectors differ in length: {truth.shape[0]} vs {pred.shape[0]}"
        )
    if truth.shape[0] == 0:
        raise ValueError("label vectors must be nonempty")
    _, t_codes = np.unique(truth, return_inverse=True)
    _, p_codes = np.unique(pred, return_inverse=True)
    table = np.zeros((t_codes.max() + 1, p_codes.max() + 1), dtype=np.int64)
    np.add.at(table, (t_codes, p_codes), 1)
    return table


def _pairs(counts: np.ndarray) -> int:
    c = counts.astype(object)  # python ints: no overflow on large inputs
    return int((c * (c - 1) // 2).sum())


def ari(truth, pred) -> float:
    """Hubert-Arabie adjusted Rand index between two labelings.

    1 for identical partitions, 0 expected under independent random labelings.
    When the adjustment denominator vanishes (both partitions trivial in the
    same way), returns 1.0 if the partitions are equal and 0.0 otherwise.
    """
    table = _contingency(truth, pred)
    n = int(table.sum())
    if n < 2:
        raise ValueError("need at least two samples")
    same_both = _pairs(table.ravel())
    same_truth = _pairs(table.sum(axis=1))
    same_pred = _pairs(table.sum(axis=0))
    n_pairs = n * (n - 1) // 2
    expected = same_truth * same_pred / n_pairs
    denom = (same_truth + same_pred) / 2 - expected
    if denom == 0:
        same_partition = (
            np.count_nonzero(table) == max(table.shape)
            and (table.sum(axis=0) > 0).all()
            and (table.sum(axis=1) > 0).all()
            and table.shape[0] == table.shape[1]
        )
        return 1.0 if same_partition else 0.0
    return float((same_both - expected) / denom)


def _entropy(counts: np.ndarray, n: int) -> float:
    pk = counts[counts > 0] / n
    return float(-(pk * np.log(pk)).sum())


def v_measure(truth, pred) -> float:
    """Harmonic mean of homogeneity and completeness, in [0, 1]."""
    table = _contingency(truth, pred)
    n = int(table.sum())
    h_truth = _entropy(table.sum(axis=1), n)
    h_pred = _entropy(table.sum(axis=0), n)
    joint = table[table > 0] / n
    h_joint = float(-(joint * np.log(joint)).sum())
    h_truth_given_pred = h_joint - h_pred
    h_pred_given_truth = h_joint - h_truth
    homogeneity = 1.0 if h_truth == 0 else 1.0 - h_truth_given_pred / h_truth
    completeness = 1.0 if h_pred == 0 else 1.0 - h_pred_given_truth / h_pred
    if homogeneity + completeness == 0:
        return 0.0
    return float(2 * homogeneity * completeness / (homogeneity + completeness))
