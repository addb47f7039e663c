"""Time-warp machinery: warped dissimilarities and their optimal-step matrices.

A warp of integer step s slides one fold change against the other along the
shared time grid and trims both to the p - |s| overlapping positions.  The
warped dissimilarity generalizes the squared L2 distance: the surviving
cross-covariance terms are the ones whose original time index remains present
in both trimmed ranges, i.e. indices |s| .. p-|s|-1.

For each entity pair the dissimilarity is minimized over the allowed step set
{-s_max, ..., s_max}, giving two matrices: the optimal warped dissimilarities
(symmetric, zero diagonal) and the optimal steps (antisymmetric).  Entry
``ow[i, j]`` is the step that warps entity i against a fixed entity j; a
positive step means i leads (is predictive of) j.

Tie-breaking over steps is deterministic: candidates are scanned in the order
0, +1, -1, +2, -2, ..., and only strict improvements replace the incumbent, so
the smallest |s| wins and the positive step wins among +/-s ties.

Two options modify the minimized value:

* length normalization (on by default) divides each candidate value by its
  overlap length p - |s|, making values comparable across steps;
* a sign penalty adds ``penalty_weight`` times the proportion of overlapping
  positions where the two mean fold changes have strictly opposite signs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import FoldChangeSet, TimeVector
from .exceptions import StepTooLarge


@dataclass(frozen=True)
class WarpSpec:
    """Warp search space and dissimilarity options."""

    s_max: int = 1
    penalty_weight: float = 0.0
    normalize_by_length: bool = True

    def __post_init__(self):
        if self.s_max < 0 or int(self.s_max) != self.s_max:
            raise ValueError("s_max must be a nonnegative integer")
        object.__setattr__(self, "s_max", int(self.s_max))
        if self.penalty_weight < 0:
            raise ValueError("penalty weight must be nonnegative")

    def steps(self) -> tuple[int, ...]:
        """Allowed steps in tie-break preference order: 0, +1, -1, +2, -2, ..."""
        out = [0]
        for m in range(1, self.s_max + 1):
            out.extend((m, -m))
        return tuple(out)

    def validate_for(self, n_times: int) -> None:
        if self.s_max > n_times - 2:
            raise StepTooLarge(
                f"s_max={self.s_max} leaves fewer than two overlapping points "
                f"on a grid of {n_times}"
            )


@dataclass(frozen=True)
class OWDMatrices:
    """Optimal warped dissimilarities and the steps achieving them."""

    owd: np.ndarray  # (n_e, n_e) float, symmetric, zero diagonal
    ow: np.ndarray   # (n_e, n_e) int, antisymmetric

    def __post_init__(self):
        owd = np.ascontiguousarray(self.owd, dtype=float)
        ow = np.ascontiguousarray(self.ow, dtype=np.int64)
        if owd.ndim != 2 or owd.shape[0] != owd.shape[1] or ow.shape != owd.shape:
            raise ValueError("owd and ow must be square matrices of equal shape")
        owd.setflags(write=False)
        ow.setflags(write=False)
        object.__setattr__(self, "owd", owd)
        object.__setattr__(self, "ow", ow)

    @property
    def n_entities(self) -> int:
        return self.owd.shape[0]

    @classmethod
    def from_dissimilarity(cls, matrix: np.ndarray) -> "OWDMatrices":
        """Wrap a plain dissimilarity matrix as a no-warp instance (all steps 0)."""
        matrix = np.asarray(matrix, dtype=float)
        return cls(matrix, np.zeros(matrix.shape, dtype=np.int64))


def warp_time(t: TimeVector, s: int) -> tuple[TimeVector, TimeVector]:
    """Trimmed time-vector pair produced by an s-step warp.

    The first vector belongs to the warped (moving) series, the second to the
    fixed one; both have length p - |s|.

    Raises
    ------
    StepTooLarge
        If |s| >= p, which would leave no overlap at all.
    """
    p = t.n_times
    k = abs(int(s))
    if k >= p:
        raise StepTooLarge(f"|s|={k} leaves no overlap on a grid of {p} points")
    if s == 0:
        return t, t
    leading, trailing = TimeVector(t.points[:p - k]), TimeVector(t.points[k:])
    return (leading, trailing) if s > 0 else (trailing, leading)


def _pair_slices(p: int, s: int) -> tuple[slice, slice]:
    """Index ranges of the moving (first) and fixed (second) series after a warp."""
    return (
        slice(max(0, -s), p - max(0, s)),
        slice(max(0, s), p - max(0, -s)),
    )


def diss_profiles(
    fcs: FoldChangeSet,
    first: np.ndarray,
    second: np.ndarray,
    spec: WarpSpec,
) -> np.ndarray:
    """Warped dissimilarities for index pairs, over all steps of ``spec``.

    Returns an array of shape (n_pairs, n_steps) whose columns follow
    ``spec.steps()``.  This single kernel backs every dissimilarity evaluation
    in the package (single pairs, full matrices, and the on-the-fly clustering
    variant), so values for the same pair agree bitwise everywhere.  The
    arithmetic is arranged to be exactly symmetric: swapping the pair and
    negating the step reproduces the same float.
    """
    first = np.asarray(first, dtype=np.intp)
    second = np.asarray(second, dtype=np.intp)
    p = fcs.n_times
    spec.validate_for(p)
    steps = spec.steps()
    m_a = np.ascontiguousarray(fcs.means[first])
    m_b = np.ascontiguousarray(fcs.means[second])
    v_a = np.ascontiguousarray(fcs.variances[first])
    v_b = np.ascontiguousarray(fcs.variances[second])
    rho = np.ascontiguousarray(fcs.crosscov[first, second])
    out = np.empty((len(first), len(steps)), dtype=float)
    for col, s in enumerate(steps):
        a_sl, b_sl = _pair_slices(p, s)
        k = abs(s)
        n_overlap = p - k
        d = m_a[:, a_sl] - m_b[:, b_sl]
        mean_term = (d * d).sum(axis=1)
        var_term = v_a[:, a_sl].sum(axis=1) + v_b[:, b_sl].sum(axis=1)
        value = mean_term + var_term
        if 2 * k < p:
            value = value - 2.0 * rho[:, k:p - k].sum(axis=1)
        if spec.normalize_by_length:
            value = value / n_overlap
        if spec.penalty_weight != 0.0:
            opposite = (m_a[:, a_sl] * m_b[:, b_sl] < 0).sum(axis=1)
            value = value + spec.penalty_weight * (opposite / n_overlap)
        out[:, col] = value
    return out


def diss(fcs: FoldChangeSet, i: int, j: int, s: int, spec: WarpSpec) -> float:
    """Warped dissimilarity between entities i and j at step s."""
    if abs(s) > spec.s_max:
        raise StepTooLarge(f"|s|={abs(s)} exceeds the allowed s_max={spec.s_max}")
    profile = diss_profiles(fcs, np.array([i]), np.array([j]), spec)
    return float(profile[0, spec.steps().index(int(s))])


def sign_penalty(fcs: FoldChangeSet, i: int, j: int, s: int) -> float:
    """Proportion of overlapping positions with strictly opposite mean signs."""
    p = fcs.n_times
    k = abs(int(s))
    if k >= p:
        raise StepTooLarge(f"|s|={k} leaves no overlap on a grid of {p} points")
    a_sl, b_sl = _pair_slices(p, s)
    opposite = int((fcs.means[i, a_sl] * fcs.means[j, b_sl] < 0).sum())
    return opposite / (p - k)


def minimize_profiles(profiles: np.ndarray, spec: WarpSpec) -> tuple[np.ndarray, np.ndarray]:
    """Per-pair minimum dissimilarity and the preferred minimizing step.

    ``np.argmin`` returns the first occurrence, which in ``spec.steps()`` order
    implements the documented tie-break (smallest |s|, then the positive step).
    """
    cols = np.argmin(profiles, axis=1)
    values = profiles[np.arange(profiles.shape[0]), cols]
    step_arr = np.asarray(spec.steps(), dtype=np.int64)
    return values, step_arr[cols]


def build_owd_ow(fcs: FoldChangeSet, spec: WarpSpec) -> OWDMatrices:
    """Optimal warped dissimilarity and optimal step matrices for all pairs.

    Only the upper triangle is evaluated; the lower triangle is mirrored (with
    negation for the steps), so the symmetry properties hold exactly.
    """
    n_e = fcs.n_entities
    if n_e < 2:
        raise ValueError("need at least two entities")
    spec.validate_for(fcs.n_times)
    rows, cols = np.triu_indices(n_e, k=1)
    values, steps = minimize_profiles(diss_profiles(fcs, rows, cols, spec), spec)
    owd = np.zeros((n_e, n_e), dtype=float)
    ow = np.zeros((n_e, n_e), dtype=np.int64)
    owd[rows, cols] = values
    owd[cols, rows] = values
    ow[rows, cols] = steps
    ow[cols, rows] = -steps
    return OWDMatrices(owd, ow)
