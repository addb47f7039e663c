"""Joint clustering with alignment: k-medoids over optimal warped dissimilarities.

Two equivalent entry points are provided.  ``cluster_fast`` consumes the
precomputed optimal-warping matrices and runs pure table lookups inside the
loop.  ``cluster_classic`` recomputes every warped dissimilarity on the fly
inside the assign and update steps, exactly as the pre-matrix formulation of
the algorithm does.  Both share one driver, one k-means++ initializer, one RNG
substream scheme, and one dissimilarity kernel, so for equal inputs and seeds
they return identical labels, centroids, warps, and total cost; the classic
variant is simply asymptotically slower by a factor of the step-set size.

Determinism rules baked into the driver:

* each initialization draws from an independent substream spawned from the
  master seed, so results do not depend on execution order;
* assign-step ties go to the lowest centroid position, medoid-update ties to
  the lowest entity index, and optimal-step ties follow the warp module's
  preference order;
* a cluster emptied during assignment is repaired by moving in the entity
  farthest from that cluster's current centroid (among entities whose own
  cluster keeps at least one other member), lowest index on ties.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .dataset import FoldChangeSet
from .exceptions import DegenerateSamplingWarning, SingleCluster
from .warping import OWDMatrices, WarpSpec, diss_profiles, minimize_profiles


@dataclass(frozen=True)
class ClusterConfig:
    """Knobs of the k-medoids search."""

    n_clusters: int
    max_iter: int = 100
    n_init: int = 10
    tol: float = 1e-9
    seed: int | None = None

    def __post_init__(self):
        if self.n_clusters < 1:
            raise ValueError("n_clusters must be at least 1")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.n_init < 1:
            raise ValueError("n_init must be at least 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


@dataclass(frozen=True)
class ClusteringResult:
    """Best configuration over all initializations.

    ``labels`` are cluster positions 0..K-1; ``centroids[k]`` is the entity
    index serving as cluster k's medoid; ``warps[i]`` is the step aligning
    entity i against its medoid (medoids therefore have warp 0).
    ``tc_trace_per_init`` holds each initialization's accepted total-cost
    sequence, which is strictly decreasing by more than ``tol`` per entry.
    """

    centroids: np.ndarray
    labels: np.ndarray
    warps: np.ndarray
    total_cost: float
    n_iterations_per_init: tuple[int, ...]
    tc_trace_per_init: tuple[tuple[float, ...], ...]
    tc_per_init: tuple[float, ...]
    best_init: int
    converged_per_init: tuple[bool, ...]

    def __post_init__(self):
        for name in ("centroids", "labels", "warps"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.int64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


class _MatrixSource:
    """Lookup-based dissimilarities (the fast variant)."""

    def __init__(self, mats: OWDMatrices):
        self._owd = mats.owd
        self._ow = mats.ow
        self.n_entities = mats.n_entities

    def to_centroid(self, c: int) -> np.ndarray:
        return self._owd[:, c]

    def block(self, members: np.ndarray) -> np.ndarray:
        return self._owd[np.ix_(members, members)]

    def warp_steps(self, entities: np.ndarray, centroids: np.ndarray) -> np.ndarray:
        return self._ow[entities, centroids]


class _OnTheFlySource:
    """Recomputes warped dissimilarities at every use (the classic variant)."""

    def __init__(self, fcs: FoldChangeSet, spec: WarpSpec):
        spec.validate_for(fcs.n_times)
        self._fcs = fcs
        self._spec = spec
        self.n_entities = fcs.n_entities

    def _minima(self, first: np.ndarray, second: np.ndarray) -> np.ndarray:
        profiles = diss_profiles(self._fcs, first, second, self._spec)
        return minimize_profiles(profiles, self._spec)[0]

    def to_centroid(self, c: int) -> np.ndarray:
        everyone = np.arange(self.n_entities)
        return self._minima(everyone, np.full(self.n_entities, c))

    def block(self, members: np.ndarray) -> np.ndarray:
        m = len(members)
        return self._minima(np.repeat(members, m), np.tile(members, m)).reshape(m, m)

    def warp_steps(self, entities: np.ndarray, centroids: np.ndarray) -> np.ndarray:
        profiles = diss_profiles(self._fcs, entities, centroids, self._spec)
        return minimize_profiles(profiles, self._spec)[1]


def kmeanspp_init(dissim: np.ndarray, n_clusters: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding over a precomputed dissimilarity matrix.

    The first centroid is uniform; each subsequent one is sampled with
    probability proportional to its dissimilarity to the nearest centroid
    chosen so far.  When no remaining entity carries positive mass, sampling
    falls back to uniform over the remaining entities (with a warning), which
    also covers the n_clusters == n_entities case.
    """
    dissim = np.asarray(dissim, dtype=float)
    return _kmeanspp(lambda c: dissim[:, c], dissim.shape[0], n_clusters, rng)


def _kmeanspp(to_centroid, n_entities: int, n_clusters: int, rng: np.random.Generator) -> np.ndarray:
    if not 1 <= n_clusters <= n_entities:
        raise ValueError("n_clusters must be between 1 and the number of entities")
    chosen = np.empty(n_clusters, dtype=np.int64)
    chosen[0] = rng.integers(n_entities)
    nearest = np.array(to_centroid(chosen[0]), dtype=float, copy=True)
    nearest[chosen[0]] = 0.0
    for pos in range(1, n_clusters):
        total = nearest.sum()
        if total > 0:
            pick = rng.choice(n_entities, p=nearest / total)
        else:
            warnings.warn(
                "no positive dissimilarity mass left; sampling uniformly",
                DegenerateSamplingWarning,
                stacklevel=2,
            )
            remaining = np.setdiff1d(np.arange(n_entities), chosen[:pos])
            pick = rng.choice(remaining)
        chosen[pos] = pick
        nearest = np.minimum(nearest, to_centroid(pick))
        nearest[pick] = 0.0
    return chosen


def total_cost(owd: np.ndarray, labels: np.ndarray, centroids: np.ndarray) -> float:
    """Sum over entities of the dissimilarity to their cluster's medoid."""
    owd = np.asarray(owd, dtype=float)
    labels = np.asarray(labels)
    centroids = np.asarray(centroids)
    if labels.shape[0] != owd.shape[0]:
        raise ValueError("labels length must match the matrix size")
    return float(owd[np.arange(owd.shape[0]), centroids[labels]].sum())


def silhouette(dissim: np.ndarray, labels: np.ndarray) -> float:
    """Mean silhouette width of a labeling under a dissimilarity matrix.

    Per entity: a is the mean dissimilarity to its own cluster (excluding
    itself), b the smallest mean dissimilarity to another cluster, and the
    width is (b - a) / max(a, b).  Singletons contribute 0, as does any entity
    with a == b == 0.

    Raises
    ------
    SingleCluster
        If the labeling has fewer than two clusters.
    """
    dissim = np.asarray(dissim, dtype=float)
    labels = np.asarray(labels)
    n = dissim.shape[0]
    if labels.shape[0] != n:
        raise ValueError("labels length must match the matrix size")
    uniq, codes = np.unique(labels, return_inverse=True)
    k = len(uniq)
    if k < 2:
        raise SingleCluster("silhouette needs at least two clusters")
    onehot = np.zeros((n, k))
    onehot[np.arange(n), codes] = 1.0
    sums = dissim @ onehot                       # (n, k) total dissim to each cluster
    counts = onehot.sum(axis=0)
    own = codes
    own_count = counts[own]
    widths = np.zeros(n)
    non_singleton = own_count > 1
    a = np.zeros(n)
    a[non_singleton] = (
        sums[np.arange(n), own][non_singleton] / (own_count[non_singleton] - 1)
    )
    mean_other = sums / counts[None, :]
    mean_other[np.arange(n), own] = np.inf
    b = mean_other.min(axis=1)
    denom = np.maximum(a, b)
    ok = non_singleton & (denom > 0)
    widths[ok] = (b[ok] - a[ok]) / denom[ok]
    return float(widths.mean())


def _assign(source, centroids: list[int]) -> tuple[np.ndarray, np.ndarray]:
    dist = np.stack([source.to_centroid(c) for c in centroids], axis=1)
    return dist, np.argmin(dist, axis=1)


def _repair_empty(source, labels: np.ndarray, centroids: list[int], n_clusters: int) -> None:
    """Move a far-out entity into each empty cluster (in place)."""
    for k in range(n_clusters):
        if np.any(labels == k):
            continue
        sizes = np.bincount(labels, minlength=n_clusters)
        movable = sizes[labels] >= 2
        d = np.array(source.to_centroid(centroids[k]), dtype=float, copy=True)
        d[~movable] = -np.inf
        labels[int(np.argmax(d))] = k


def _single_init(source, cfg: ClusterConfig, rng: np.random.Generator):
    n_e = source.n_entities
    k = cfg.n_clusters
    centroids = [int(c) for c in _kmeanspp(source.to_centroid, n_e, k, rng)]
    tc_current = np.inf
    delta = np.inf
    iteration = 1
    labels = None
    trace: list[float] = []
    while delta > cfg.tol and iteration < cfg.max_iter:
        _, labels = _assign(source, centroids)
        _repair_empty(source, labels, centroids, k)
        tc_new = 0.0
        new_centroids = []
        for cluster in range(k):
            members = np.flatnonzero(labels == cluster)
            candidate_costs = source.block(members).sum(axis=1)
            best = int(np.argmin(candidate_costs))
            new_centroids.append(int(members[best]))
            tc_new += float(candidate_costs[best])
        delta = tc_current - tc_new
        if delta > cfg.tol:
            centroids = new_centroids
            tc_current = tc_new
            trace.append(tc_new)
        iteration += 1
    n_iterations = iteration - 1
    converged = delta <= cfg.tol
    if labels is None:  # max_iter == 1 leaves the loop before any assignment
        _, labels = _assign(source, centroids)
        _repair_empty(source, labels, centroids, k)
    dist, _ = _assign(source, centroids)
    tc_final = float(dist[np.arange(n_e), labels].sum())
    return centroids, labels, tc_final, trace, n_iterations, converged


def _drive(source, cfg: ClusterConfig) -> ClusteringResult:
    n_e = source.n_entities
    if cfg.n_clusters > n_e:
        raise ValueError("n_clusters cannot exceed the number of entities")
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.n_init)
    best = None
    best_init = -1
    traces, iters, finals, flags = [], [], [], []
    for init_idx in range(cfg.n_init):
        rng = np.random.default_rng(children[init_idx])
        outcome = _single_init(source, cfg, rng)
        traces.append(tuple(outcome[3]))
        iters.append(outcome[4])
        finals.append(outcome[2])
        flags.append(outcome[5])
        if best is None or outcome[2] < best[2]:
            best = outcome
            best_init = init_idx
    centroids, labels, tc_final = best[0], best[1], best[2]
    centroid_arr = np.asarray(centroids, dtype=np.int64)
    warps = source.warp_steps(np.arange(n_e), centroid_arr[labels])
    return ClusteringResult(
        centroids=centroid_arr,
        labels=labels,
        warps=warps,
        total_cost=tc_final,
        n_iterations_per_init=tuple(iters),
        tc_trace_per_init=tuple(traces),
        tc_per_init=tuple(finals),
        best_init=best_init,
        converged_per_init=tuple(flags),
    )


def cluster_fast(mats: OWDMatrices, cfg: ClusterConfig) -> ClusteringResult:
    """k-medoids over precomputed optimal-warping matrices."""
    return _drive(_MatrixSource(mats), cfg)


def cluster_classic(fcs: FoldChangeSet, spec: WarpSpec, cfg: ClusterConfig) -> ClusteringResult:
    """k-medoids recomputing warped dissimilarities on the fly.

    Equivalent to :func:`cluster_fast` on the matrices built from the same
    spec and seed, but without any precomputed pairwise table.
    """
    return _drive(_OnTheFlySource(fcs, spec), cfg)
