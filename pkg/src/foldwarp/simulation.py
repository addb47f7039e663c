"""Synthetic benchmark scenarios with ground-truth cluster labels.

Each scenario draws fold-change estimators directly (no replicate level): a
cluster label per entity, a mean curve from that cluster's template family with
randomly drawn coefficients, and a covariance structure.  Two mean designs are
available: ``m1`` (fixed templates: quadratic, two cubics of opposite leading
sign, quartic) on the unevenly spaced grid (0.5, 1, 2, 3, 4, 7, 14, 21), and
``m2`` (templates evaluated at a continuously shifted argument, with a sinusoid
replacing the quartic) on the near-uniform grid (0.5, 3, 6, 9, 12, 15, 18, 21),
which is the regime where alignment should pay off.

Covariance designs:

* ``c1`` (4 clusters) and ``c2`` (2 clusters): independent entities; each
  variance is the square of a N(0, 2^2) draw.
* ``c3``/``c4`` (2 clusters): within-cluster entries drawn |N(0, 2^2)|, then
  mapped through x^2 / cst with cst the largest off-diagonal draw (c3) or 20
  (c4).
* ``c5``/``c6`` (2 clusters): within-cluster entries U([0,1]) for cluster 1
  pairs and U([-1,0]) for cluster 2 pairs, mapped through x^2 / 100 (c5) or
  x^2 / 50 (c6).

Cross-cluster covariances are zero everywhere.  The independent draws do not
guarantee a valid joint Gaussian, so after assembly each variance is raised to
at least its entity's largest incident cross-covariance; that keeps the drawn
cross terms intact (they carry the structure the correlated scenarios exist to
provide) while making every per-time 2x2 block PSD.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import FoldChangeSet, TimeVector, make_fold_change_set
from .exceptions import InvalidCombination

M1_TIME = TimeVector((0.5, 1.0, 2.0, 3.0, 4.0, 7.0, 14.0, 21.0))
M2_TIME = TimeVector((0.5, 3.0, 6.0, 9.0, 12.0, 15.0, 18.0, 21.0))

SCENARIO_CODES = ("m1-c1", "m1-c2", "m1-c3", "m1-c4", "m1-c5", "m1-c6", "m2")


@dataclass(frozen=True)
class ScenarioSpec:
    """One benchmark configuration."""

    mean_mode: str               # "m1" or "m2"
    cov_mode: str                # "c1" .. "c6"
    n_entities: int = 300
    time: TimeVector | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.mean_mode not in ("m1", "m2"):
            raise InvalidCombination(f"unknown mean mode {self.mean_mode!r}")
        if self.cov_mode not in ("c1", "c2", "c3", "c4", "c5", "c6"):
            raise InvalidCombination(f"unknown covariance mode {self.cov_mode!r}")
        if self.mean_mode == "m2" and self.cov_mode != "c1":
            raise InvalidCombination("the shifted-mean scenario pairs only with c1-style covariance")
        if self.n_entities < 2:
            raise ValueError("need at least two entities")
        if self.time is None:
            default = M1_TIME if self.mean_mode == "m1" else M2_TIME
            object.__setattr__(self, "time", default)

    @classmethod
    def from_code(cls, code: str, n_entities: int = 300, seed: int | None = None) -> "ScenarioSpec":
        code = code.lower()
        if code == "m2":
            return cls("m2", "c1", n_entities=n_entities, seed=seed)
        if code in SCENARIO_CODES:
            mean_mode, cov_mode = code.split("-")
            return cls(mean_mode, cov_mode, n_entities=n_entities, seed=seed)
        raise InvalidCombination(f"unknown scenario {code!r}; choose from {SCENARIO_CODES}")

    @property
    def code(self) -> str:
        return "m2" if self.mean_mode == "m2" else f"{self.mean_mode}-{self.cov_mode}"

    @property
    def n_clusters(self) -> int:
        return 4 if self.cov_mode == "c1" else 2


@dataclass(frozen=True)
class SimulatedSet:
    """Generated estimators plus the ground truth that produced them."""

    fcs: FoldChangeSet
    truth: np.ndarray                 # 1-based cluster labels
    shifts: np.ndarray | None         # per-entity real shift, m2 only

    def __post_init__(self):
        truth = np.ascontiguousarray(self.truth, dtype=np.int64)
        truth.setflags(write=False)
        object.__setattr__(self, "truth", truth)
        if self.shifts is not None:
            shifts = np.ascontiguousarray(self.shifts, dtype=float)
            shifts.setflags(write=False)
            object.__setattr__(self, "shifts", shifts)


def _quadratic(x, a, b, c):
    return a / 2 * x**2 + b * x + c


def _cubic(x, a, r1, r2, c, d):
    return a / 3 * x**3 - a * (r1 + r2) / 2 * x**2 + (a * r1 * r2 + c) * x + d


def _quartic(x, a, r3, r4, r5, b, c):
    # Antiderivative of a*(x-r3)(x-r4)(x-r5) minus a linear tilt b*x, plus offset.
    return (
        a / 4 * x**4
        - a * (r3 + r4 + r5) / 3 * x**3
        + a * (r3 * r4 + r5 * (r3 + r4)) / 2 * x**2
        - (a * r3 * r4 * r5 + b) * x
        + c
    )


def _sinusoid(x, a, b, c):
    return a * np.sin(b * x) + c


def _m1_mean(cluster: int, x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    if cluster == 1:
        a = rng.normal(0.05, 0.005)
        a0 = rng.normal(0.05, 0.005)
        b = rng.normal(-10 * a0, 2 * abs(a0))
        c = rng.normal(2, 1)
        return _quadratic(x, a, b, c)
    if cluster in (2, 3):
        a = rng.normal(-0.01, 0.001) if cluster == 2 else rng.normal(0.01, 0.001)
        r1 = rng.normal(5, 1)
        r2 = rng.normal(15, 1)
        a0 = rng.normal(-0.01, 0.001) if cluster == 2 else rng.normal(0.01, 0.001)
        c = rng.normal(6 * a0, 2 * abs(a0))
        d = rng.normal(3, 1)
        return _cubic(x, a, r1, r2, c, d)
    a = rng.normal(5e-3, 5e-5)
    r3 = rng.normal(2, 0.2)
    r4 = rng.normal(10, 0.5)
    r5 = rng.normal(18, 0.2)
    b = rng.uniform(-0.05, 0.05)
    c = rng.normal(2, 0.5)
    return _quartic(x, a, r3, r4, r5, b, c)


def _m2_mean(cluster: int, x: np.ndarray, rng: np.random.Generator) -> tuple[np.ndarray, float]:
    if cluster == 4:
        s = rng.uniform(-7, 7)
        a = abs(rng.normal(2, 1))
        b = rng.uniform(0.3, 0.5)
        c = rng.normal(2, 0.5)
        return _sinusoid(x - s, a, b, c), s
    s = rng.uniform(-10, 10)
    if cluster == 1:
        a = rng.normal(0.05, 0.002)
        a0 = rng.normal(0.05, 0.002)
        b = rng.normal(-11 * a0, 2 * abs(a0))
        c = rng.normal(2, 0.5)
        return _quadratic(x - s, a, b, c), s
    a = rng.normal(-0.003, 1e-5) if cluster == 2 else rng.normal(0.003, 1e-5)
    r1 = rng.normal(8, 1)
    r2 = rng.normal(12, 1)
    a0 = rng.normal(-0.003, 1e-5) if cluster == 2 else rng.normal(0.003, 1e-5)
    c = rng.normal(6 * a0, 2 * abs(a0))
    d = rng.normal(3, 0.5) if cluster == 2 else rng.normal(2, 0.5)
    return _cubic(x - s, a, r1, r2, c, d), s


def simulate(spec: ScenarioSpec) -> SimulatedSet:
    """Draw one synthetic estimator set according to ``spec``.

    Each entity consumes an independent RNG substream (cluster label, template
    coefficients, own variance draws); within-cluster cross-covariances come
    from one extra substream, filled in upper-triangle order.  The result is
    bit-reproducible for a fixed spec and seed.
    """
    n_e = spec.n_entities
    p = spec.time.n_times
    x = spec.time.array
    streams = np.random.SeedSequence(spec.seed).spawn(n_e + 1)
    pair_rng = np.random.default_rng(streams[-1])

    truth = np.empty(n_e, dtype=np.int64)
    means = np.empty((n_e, p))
    raw_diag = np.empty((n_e, p))
    shifts = np.empty(n_e) if spec.mean_mode == "m2" else None

    for i in range(n_e):
        rng = np.random.default_rng(streams[i])
        cluster = int(rng.integers(spec.n_clusters)) + 1
        truth[i] = cluster
        if spec.mean_mode == "m1":
            means[i] = _m1_mean(cluster, x, rng)
        else:
            means[i], shifts[i] = _m2_mean(cluster, x, rng)
        raw_diag[i] = _draw_raw_diag(spec.cov_mode, cluster, p, rng)

    variances, crosscov = _build_covariance(spec, truth, raw_diag, pair_rng)
    entities = tuple(f"e{i:04d}" for i in range(n_e))
    fcs = make_fold_change_set(entities, means, variances, crosscov, spec.time)
    return SimulatedSet(fcs, truth, shifts)


def _draw_raw_diag(cov_mode: str, cluster: int, p: int, rng: np.random.Generator) -> np.ndarray:
    if cov_mode in ("c1", "c2"):
        return rng.normal(0, 2, size=p)
    if cov_mode in ("c3", "c4"):
        return np.abs(rng.normal(0, 2, size=p))
    return rng.uniform(0, 1, size=p) if cluster == 1 else rng.uniform(-1, 0, size=p)


def _build_covariance(spec, truth, raw_diag, pair_rng):
    n_e, p = raw_diag.shape
    raw_cross = np.zeros((n_e, n_e, p))
    rows, cols = np.triu_indices(n_e, k=1)
    same = truth[rows] == truth[cols]

    if spec.cov_mode in ("c3", "c4"):
        draws = np.abs(pair_rng.normal(0, 2, size=(int(same.sum()), p)))
        raw_cross[rows[same], cols[same]] = draws
    elif spec.cov_mode in ("c5", "c6"):
        in_first = same & (truth[rows] == 1)
        in_second = same & (truth[rows] == 2)
        raw_cross[rows[in_first], cols[in_first]] = pair_rng.uniform(
            0, 1, size=(int(in_first.sum()), p)
        )
        raw_cross[rows[in_second], cols[in_second]] = pair_rng.uniform(
            -1, 0, size=(int(in_second.sum()), p)
        )

    if spec.cov_mode in ("c1", "c2"):
        # identity scaling; squared draws keep variances nonnegative
        variances = raw_diag**2
        crosscov = raw_cross  # all zero
    else:
        if spec.cov_mode == "c3":
            off = raw_cross[rows, cols]
            if off.size == 0 or off.max() <= 0:
                raise InvalidCombination(
                    "c3 needs at least one within-cluster pair to set its scale"
                )
            cst = float(off.max())
        else:
            cst = {"c4": 20.0, "c5": 100.0, "c6": 50.0}[spec.cov_mode]
        variances = raw_diag**2 / cst
        crosscov = raw_cross**2 / cst
        # the squared-mapping loses the sign of the raw draws by construction

    crosscov[cols, rows] = crosscov[rows, cols]
    # PSD repair, preserving the drawn cross-covariances: raising each variance
    # to its entity's largest incident cross term makes every per-time 2x2
    # block PSD (sigma_i^2 >= rho and sigma_j^2 >= rho imply sigma_i sigma_j >= rho,
    # all cross terms being nonnegative after the squared mapping).
    variances = np.maximum(variances, crosscov.max(axis=1))
    return variances, crosscov
