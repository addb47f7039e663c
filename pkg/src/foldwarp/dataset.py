"""Core immutable data types: time grids, replicate datasets, fold-change estimators.

A :class:`ReplicateDataset` holds raw responses indexed by
(entity, condition, replicate, time) on one shared time grid, with NaN marking
missing replicate slots prior to validation.  A :class:`FoldChangeSet` holds the
Gaussian fold-change estimators derived from it: per-entity mean vectors,
per-entity diagonal variances, and per-pair per-time cross-covariances.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .exceptions import EmptyAfterFiltering

CONTROL = 0
CASE = 1

# Tolerance for the positive-semidefiniteness check of per-time 2x2 blocks.
PSD_TOL = 1e-10


@dataclass(frozen=True)
class TimeVector:
    """Strictly increasing grid of measurement times (arbitrary units)."""

    points: tuple[float, ...]

    def __post_init__(self):
        pts = tuple(float(x) for x in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise ValueError("time grid cannot be empty")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError("time points must be strictly increasing")

    @property
    def n_times(self) -> int:
        return len(self.points)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float)


@dataclass(frozen=True)
class ReplicateDataset:
    """Raw responses on a shared time grid.

    Parameters
    ----------
    entities : tuple of str
        Entity identifiers, one per clustered unit.
    values : ndarray, shape (n_entities, 2, n_replicates, n_times)
        Responses; axis 1 is the condition (0 = control, 1 = case).
        NaN marks a missing replicate slot; :func:`validate_dataset` removes
        entities that have any.
    time : TimeVector
        The shared grid. Entity-specific grids are rejected upstream at
        ingestion; all in-memory datasets share one grid by construction.
    """

    entities: tuple[str, ...]
    values: np.ndarray
    time: TimeVector

    def __post_init__(self):
        object.__setattr__(self, "entities", tuple(self.entities))
        vals = np.asarray(self.values, dtype=float)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 4:
            raise ValueError("values must be 4-d (entity, condition, replicate, time)")
        n_e, n_c, n_r, p = vals.shape
        if n_e != len(self.entities):
            raise ValueError("entity axis does not match entity list")
        if n_c != 2:
            raise ValueError("condition axis must have size 2 (control, case)")
        if n_r < 2:
            raise ValueError("need at least two replicates per condition")
        if p != self.time.n_times:
            raise ValueError("time axis does not match time grid")
        if p < 2:
            raise ValueError("dataset grids need at least two time points")
        if len(set(self.entities)) != n_e:
            raise ValueError("entity identifiers must be unique")

    @property
    def n_entities(self) -> int:
        return self.values.shape[0]

    @property
    def n_replicates(self) -> int:
        return self.values.shape[2]

    @property
    def n_times(self) -> int:
        return self.values.shape[3]


@dataclass(frozen=True)
class FoldChange:
    """One entity's Gaussian fold-change estimator: mean and diagonal variance."""

    mean: np.ndarray
    var: np.ndarray
    time: TimeVector

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        var = np.asarray(self.var, dtype=float)
        if mean.shape != (self.time.n_times,) or var.shape != mean.shape:
            raise ValueError("mean and var must match the time grid length")
        if np.any(var < 0):
            raise ValueError("variances must be nonnegative")
        mean.setflags(write=False)
        var.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "var", var)


@dataclass(frozen=True)
class FoldChangeSet:
    """All entities' fold-change estimators plus pairwise cross-covariances.

    ``crosscov[i, j, t]`` is the estimated covariance between entity i's and
    entity j's fold changes at time index t.  The array is symmetric in its
    first two axes and its diagonal equals ``variances`` exactly, so self-pairs
    behave as perfectly coupled (distance zero to themselves).
    """

    entities: tuple[str, ...]
    means: np.ndarray       # (n_entities, n_times)
    variances: np.ndarray   # (n_entities, n_times), nonnegative
    crosscov: np.ndarray    # (n_entities, n_entities, n_times)
    time: TimeVector

    def __post_init__(self):
        object.__setattr__(self, "entities", tuple(self.entities))
        means = np.ascontiguousarray(self.means, dtype=float)
        variances = np.ascontiguousarray(self.variances, dtype=float)
        crosscov = np.ascontiguousarray(self.crosscov, dtype=float)
        n_e, p = means.shape
        if n_e != len(self.entities):
            raise ValueError("means rows must match entity list")
        if p != self.time.n_times:
            raise ValueError("means columns must match time grid")
        if variances.shape != (n_e, p):
            raise ValueError("variances shape must match means")
        if crosscov.shape != (n_e, n_e, p):
            raise ValueError("crosscov must be (n_entities, n_entities, n_times)")
        if p < 2:
            raise ValueError("estimator sets need at least two time points")
        if np.any(variances < 0):
            raise ValueError("variances must be nonnegative")
        diag = crosscov[np.arange(n_e), np.arange(n_e), :]
        if not np.array_equal(diag, variances):
            raise ValueError("crosscov diagonal must equal variances exactly")
        if not np.array_equal(crosscov, crosscov.transpose(1, 0, 2)):
            raise ValueError("crosscov must be symmetric in the entity axes")
        for arr in (means, variances, crosscov):
            arr.setflags(write=False)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "variances", variances)
        object.__setattr__(self, "crosscov", crosscov)

    @property
    def n_entities(self) -> int:
        return self.means.shape[0]

    @property
    def n_times(self) -> int:
        return self.means.shape[1]

    def item(self, i: int) -> FoldChange:
        """Marginal estimator of entity i."""
        return FoldChange(self.means[i], self.variances[i], self.time)

    @property
    def items(self) -> list[FoldChange]:
        return [self.item(i) for i in range(self.n_entities)]

    def index_of(self, entity: str) -> int:
        return self.entities.index(entity)

    def psd_block_violation(self) -> float:
        """Worst violation of the per-time 2x2 PSD property over all pairs.

        Returns max(0, max over pairs and times of |rho| - sigma_i * sigma_j).
        A value above ~1e-10 indicates an invalid estimator set.
        """
        bound = np.sqrt(self.variances[:, None, :] * self.variances[None, :, :])
        return float(np.maximum(np.abs(self.crosscov) - bound, 0.0).max())


def make_fold_change_set(entities, means, variances, crosscov, time) -> FoldChangeSet:
    """Assemble a :class:`FoldChangeSet`, forcing exact symmetry and diagonal.

    The upper triangle of ``crosscov`` is mirrored onto the lower one and the
    diagonal is overwritten with ``variances`` so the invariants hold bitwise.
    """
    means = np.ascontiguousarray(means, dtype=float)
    variances = np.ascontiguousarray(variances, dtype=float)
    crosscov = np.array(crosscov, dtype=float, copy=True)
    n_e = means.shape[0]
    iu = np.triu_indices(n_e, k=1)
    crosscov[iu[1], iu[0], :] = crosscov[iu[0], iu[1], :]
    crosscov[np.arange(n_e), np.arange(n_e), :] = variances
    return FoldChangeSet(tuple(entities), means, variances, crosscov, time)


def validate_dataset(raw: ReplicateDataset) -> ReplicateDataset:
    """Drop entities with incomplete replicate blocks.

    An entity survives only if every (condition, replicate, time) cell holds a
    finite value.  Dropped entities are reported through a UserWarning; the
    operation is idempotent.

    Raises
    ------
    EmptyAfterFiltering
        If no entity has a complete replicate block.
    """
    complete = np.isfinite(raw.values).all(axis=(1, 2, 3))
    if not complete.any():
        raise EmptyAfterFiltering("no entity has a complete replicate block")
    if complete.all():
        return raw
    dropped = [e for e, ok in zip(raw.entities, complete) if not ok]
    warnings.warn(
        f"dropped {len(dropped)} of {raw.n_entities} entities with missing replicates: "
        + ", ".join(dropped),
        UserWarning,
        stacklevel=2,
    )
    kept = tuple(e for e, ok in zip(raw.entities, complete) if ok)
    return ReplicateDataset(kept, raw.values[complete], raw.time)
