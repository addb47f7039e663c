"""Shared builders for randomized test inputs.

Random estimator sets are always constructed with per-time 2x2 PSD blocks
(|rho| <= sigma_i * sigma_j), matching what estimation from real replicates
guarantees, so nonnegativity properties of the dissimilarities are testable.
"""
import numpy as np
import pytest

from foldwarp import (
    FoldChangeSet,
    ReplicateDataset,
    TimeVector,
    make_fold_change_set,
)


def random_fold_change_set(
    rng: np.random.Generator,
    n_entities: int = 8,
    n_times: int = 5,
    rho_scale: float = 0.9,
    mean_scale: float = 3.0,
) -> FoldChangeSet:
    """Random estimator set with valid per-time PSD blocks."""
    time = TimeVector(tuple(np.sort(rng.uniform(0, 30, n_times))))
    means = rng.normal(0, mean_scale, (n_entities, n_times))
    variances = rng.uniform(0.2, 3.0, (n_entities, n_times))
    crosscov = np.zeros((n_entities, n_entities, n_times))
    sd = np.sqrt(variances)
    for i in range(n_entities):
        for j in range(i + 1, n_entities):
            bound = sd[i] * sd[j]
            crosscov[i, j] = rng.uniform(-rho_scale, rho_scale, n_times) * bound
    entities = tuple(f"g{i}" for i in range(n_entities))
    return make_fold_change_set(entities, means, variances, crosscov, time)


def random_replicates(
    rng: np.random.Generator,
    n_entities: int = 6,
    n_replicates: int = 3,
    n_times: int = 5,
) -> ReplicateDataset:
    time = TimeVector(tuple(np.sort(rng.uniform(0, 30, n_times))))
    values = rng.normal(2.0, 1.5, (n_entities, 2, n_replicates, n_times))
    entities = tuple(f"g{i}" for i in range(n_entities))
    return ReplicateDataset(entities, values, time)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
