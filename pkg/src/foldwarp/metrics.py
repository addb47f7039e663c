"""Closed-form distances between Gaussian fold-change estimators.

``d2_squared`` is the squared L2 distance E||X - Y||^2 between two jointly
Gaussian estimators; it is the only metric here that uses the cross-covariances.
``wasserstein_sq`` and ``hellinger_sq`` compare marginal distributions only and
exist as benchmark comparators.  All three return squared quantities; no square
roots are ever taken downstream, because clustering consumes squared
dissimilarities throughout.
"""
from __future__ import annotations

import numpy as np

from .dataset import FoldChange, FoldChangeSet
from .exceptions import NonPositiveVariance

_METRICS = ("d2", "wasserstein", "hellinger")


def d2_squared(fcs: FoldChangeSet, i: int, j: int) -> float:
    """Squared L2 distance between entities i and j under their joint law.

    Equals sum((mean_i - mean_j)^2) + sum(var_i) + sum(var_j)
    - 2 * sum(crosscov_ij), summed over time points.  Zero for i == j.
    """
    dm = fcs.means[i] - fcs.means[j]
    v = float(fcs.variances[i].sum()) + float(fcs.variances[j].sum())
    return float(np.dot(dm, dm)) + v - 2.0 * float(fcs.crosscov[i, j].sum())


def wasserstein_sq(a: FoldChange, b: FoldChange) -> float:
    """Squared 2-Wasserstein distance between two diagonal Gaussians.

    For commuting (diagonal) covariances the general trace formula collapses to
    ||mean_a - mean_b||^2 + sum_l (sd_a_l - sd_b_l)^2.
    """
    dm = a.mean - b.mean
    ds = np.sqrt(a.var) - np.sqrt(b.var)
    return float(np.dot(dm, dm) + np.dot(ds, ds))


def hellinger_sq(a: FoldChange, b: FoldChange) -> float:
    """Squared Hellinger distance between two diagonal Gaussians, in [0, 1].

    Computed in log space:
    1 - exp( sum_l [ (log var_a_l + log var_b_l)/4 - log((var_a_l+var_b_l)/2)/2 ]
             - (1/8) sum_l (mean_a_l - mean_b_l)^2 / ((var_a_l+var_b_l)/2) ).

    Raises
    ------
    NonPositiveVariance
        If any variance is not strictly positive.
    """
    if np.any(a.var <= 0) or np.any(b.var <= 0):
        raise NonPositiveVariance("Hellinger distance needs strictly positive variances")
    avg = (a.var + b.var) / 2.0
    log_bc = float(
        np.sum(0.25 * (np.log(a.var) + np.log(b.var)) - 0.5 * np.log(avg))
        - 0.125 * np.sum((a.mean - b.mean) ** 2 / avg)
    )
    return max(0.0, -float(np.expm1(log_bc)))


def pairwise_matrix(fcs: FoldChangeSet, metric: str = "d2") -> np.ndarray:
    """Symmetric zero-diagonal matrix of squared distances between all entities.

    ``metric`` is one of ``"d2"``, ``"wasserstein"``, ``"hellinger"``.  The
    upper triangle is computed and mirrored, so symmetry is exact.
    """
    if metric not in _METRICS:
        raise ValueError(f"unknown metric {metric!r}; choose from {_METRICS}")
    means = fcs.means
    sq = ((means[:, None, :] - means[None, :, :]) ** 2).sum(axis=-1)
    if metric == "d2":
        v = fcs.variances.sum(axis=1)
        out = (sq + (v[:, None] + v[None, :])) - 2.0 * fcs.crosscov.sum(axis=-1)
    elif metric == "wasserstein":
        sd = np.sqrt(fcs.variances)
        out = sq + ((sd[:, None, :] - sd[None, :, :]) ** 2).sum(axis=-1)
    else:
        if np.any(fcs.variances <= 0):
            raise NonPositiveVariance(
                "Hellinger distance needs strictly positive variances"
            )
        var = fcs.variances
        avg = (var[:, None, :] + var[None, :, :]) / 2.0
        logv = np.log(var)
        log_coeff = (
            0.25 * (logv[:, None, :] + logv[None, :, :]) - 0.5 * np.log(avg)
        ).sum(axis=-1)
        quad = 0.125 * (
            (means[:, None, :] - means[None, :, :]) ** 2 / avg
        ).sum(axis=-1)
        out = np.maximum(0.0, -np.expm1(log_coeff - quad))
    out = np.triu(out, k=1)
    return out + out.T
