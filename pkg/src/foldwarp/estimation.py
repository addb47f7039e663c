"""Fold-change estimation from replicates, and the two-stage scaling pipeline.

Estimation turns a validated :class:`~foldwarp.dataset.ReplicateDataset` into a
:class:`~foldwarp.dataset.FoldChangeSet`: per entity and time, the mean fold
change is the case mean minus the control mean, its variance is the sum of the
two unbiased sample variances, and for every entity pair the cross-covariance
is the sum of the two sample covariances (all with divisor n_r - 1).

Preprocessing optionally rescales the estimators in two consecutive stages:

1. standard-deviation scaling, which divides each entity-time mean by its
   standard deviation (variances become exactly 1, cross-covariances become
   per-time correlations), and
2. norm scaling, which divides each entity by its estimator norm
   sqrt(||mean||^2 + sum of variances), so every entity ends with norm 1.

When only norm scaling is requested, the norm is computed on the unscaled
estimator; when both are requested, std scaling runs first.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .dataset import CASE, CONTROL, FoldChange, FoldChangeSet, ReplicateDataset
from .exceptions import DegenerateVarianceWarning, ZeroNorm, ZeroVariance


@dataclass(frozen=True)
class PreprocessOptions:
    """Which scaling stages to apply, in the fixed order std-then-norm."""

    scale_by_std: bool = False
    scale_by_norm: bool = False


def estimate(dataset: ReplicateDataset) -> FoldChangeSet:
    """Estimate Gaussian fold-change distributions from raw replicates.

    Requires a complete dataset (run :func:`~foldwarp.dataset.validate_dataset`
    first); NaN cells would silently poison every covariance they touch.

    Emits :class:`DegenerateVarianceWarning` if any entity has zero variance at
    some time point, which later blocks standard-deviation scaling.
    """
    if not np.isfinite(dataset.values).all():
        raise ValueError("dataset contains missing values; validate it first")
    n_r = dataset.n_replicates
    per_cond_mean = dataset.values.mean(axis=2)                      # (n_e, 2, p)
    centered = dataset.values - per_cond_mean[:, :, None, :]
    means = per_cond_mean[:, CASE, :] - per_cond_mean[:, CONTROL, :]
    # Sum over condition and replicate axes at once: the case and control
    # sample (co)variances add, each with unbiased divisor n_r - 1.
    crosscov = np.einsum("ikjt,mkjt->imt", centered, centered) / (n_r - 1)
    n_e = dataset.n_entities
    variances = crosscov[np.arange(n_e), np.arange(n_e), :].copy()
    if np.any(variances == 0):
        n_zero = int((variances == 0).sum())
        warnings.warn(
            f"{n_zero} entity-time cells have zero fold-change variance",
            DegenerateVarianceWarning,
            stacklevel=2,
        )
    # Mirror the upper triangle so symmetry holds bitwise.
    iu = np.triu_indices(n_e, k=1)
    crosscov[iu[1], iu[0], :] = crosscov[iu[0], iu[1], :]
    return FoldChangeSet(dataset.entities, means, variances, crosscov, dataset.time)


def fc_norm(fc: FoldChange) -> float:
    """Norm of a fold-change estimator: sqrt(||mean||^2 + total variance)."""
    return float(np.sqrt(np.sum(fc.mean * fc.mean) + np.sum(fc.var)))


def _norms(means: np.ndarray, variances: np.ndarray) -> np.ndarray:
    return np.sqrt((means * means).sum(axis=1) + variances.sum(axis=1))


def preprocess(fcs: FoldChangeSet, opts: PreprocessOptions) -> FoldChangeSet:
    """Apply the requested scaling stages to a whole estimator set.

    Raises
    ------
    ZeroVariance
        If std scaling is requested and some variance is exactly zero.
    ZeroNorm
        If norm scaling is requested and some estimator has zero norm (only
        reachable without std scaling, whose output has norm >= sqrt(p)).
    """
    if not (opts.scale_by_std or opts.scale_by_norm):
        return fcs
    means = np.array(fcs.means, copy=True)
    variances = np.array(fcs.variances, copy=True)
    crosscov = np.array(fcs.crosscov, copy=True)
    n_e = fcs.n_entities
    diag = (np.arange(n_e), np.arange(n_e))

    if opts.scale_by_std:
        if np.any(variances == 0):
            raise ZeroVariance(
                "std scaling undefined: some fold-change variance is exactly zero"
            )
        sd = np.sqrt(variances)                               # (n_e, p)
        means /= sd
        crosscov /= sd[:, None, :] * sd[None, :, :]
        # Pin the diagonal: each variance is 1 by definition of the stage,
        # free of sqrt round-off.
        variances = np.ones_like(variances)
        crosscov[diag] = variances

    if opts.scale_by_norm:
        norms = _norms(means, variances)                      # (n_e,)
        if np.any(norms == 0):
            raise ZeroNorm("norm scaling undefined: some fold change has zero norm")
        means /= norms[:, None]
        variances /= (norms * norms)[:, None]
        crosscov /= (norms[:, None] * norms[None, :])[:, :, None]
        crosscov[diag] = variances

    return FoldChangeSet(fcs.entities, means, variances, crosscov, fcs.time)
