"""Closed-form Gaussian distances against sampling, quadrature, and matrix oracles."""
import numpy as np
import pytest
from scipy.integrate import quad
from scipy.linalg import sqrtm

from foldwarp import (
    FoldChange,
    TimeVector,
    d2_squared,
    hellinger_sq,
    pairwise_matrix,
    wasserstein_sq,
)
from foldwarp.exceptions import NonPositiveVariance

from conftest import random_fold_change_set

TIME2 = TimeVector((1.0, 2.0))


def _fc(mean, var, time=None):
    mean = np.atleast_1d(np.asarray(mean, float))
    var = np.atleast_1d(np.asarray(var, float))
    if time is None:
        time = TimeVector(tuple(range(1, len(mean) + 1)))
    return FoldChange(mean, var, time)


def test_d2_zero_on_diagonal(rng):
    fcs = random_fold_change_set(rng)
    for i in range(fcs.n_entities):
        assert d2_squared(fcs, i, i) == 0.0


def test_d2_zero_variance_is_squared_euclidean(rng):
    from foldwarp import make_fold_change_set
    means = np.array([[0.0, 0.0], [3.0, 4.0]])
    zeros = np.zeros((2, 2))
    fcs = make_fold_change_set(("a", "b"), means, zeros, np.zeros((2, 2, 2)), TIME2)
    assert d2_squared(fcs, 0, 1) == pytest.approx(25.0)


def test_d2_matches_monte_carlo(rng):
    """Oracle: sample the joint Gaussian of a pair and average ||X - Y||^2."""
    fcs = random_fold_change_set(rng, n_entities=2, n_times=3)
    p = fcs.n_times
    cov = np.zeros((2 * p, 2 * p))
    cov[:p, :p] = np.diag(fcs.variances[0])
    cov[p:, p:] = np.diag(fcs.variances[1])
    cov[:p, p:] = cov[p:, :p] = np.diag(fcs.crosscov[0, 1])
    mean = np.concatenate([fcs.means[0], fcs.means[1]])
    n_draws = 1_000_000
    draws = rng.multivariate_normal(mean, cov, size=n_draws, method="cholesky")
    sq = ((draws[:, :p] - draws[:, p:]) ** 2).sum(axis=1)
    se = sq.std(ddof=1) / np.sqrt(n_draws)
    assert abs(d2_squared(fcs, 0, 1) - sq.mean()) <= 3 * se


def test_d2_symmetric_and_nonnegative(rng):
    for _ in range(20):
        fcs = random_fold_change_set(rng, n_entities=5, n_times=4)
        mat = pairwise_matrix(fcs, "d2")
        assert np.array_equal(mat, mat.T)
        assert np.all(np.diag(mat) == 0)
        assert mat.min() >= -1e-10


def test_wasserstein_examples():
    a = _fc([1.0], [4.0])
    b = _fc([1.0], [25.0])
    assert wasserstein_sq(a, a) == 0.0
    assert wasserstein_sq(a, b) == pytest.approx(9.0)  # (5 - 2)^2


def test_wasserstein_matches_general_matrix_formula(rng):
    """Oracle: trace formula with matrix square roots, diagonal covariances."""
    for _ in range(10):
        va = rng.uniform(0.3, 4.0, 4)
        vb = rng.uniform(0.3, 4.0, 4)
        ma = rng.normal(0, 2, 4)
        mb = rng.normal(0, 2, 4)
        sa, sb = np.diag(va), np.diag(vb)
        root_b = sqrtm(sb)
        cross = sqrtm(root_b @ sa @ root_b)
        expected = float((ma - mb) @ (ma - mb) + np.trace(sa + sb - 2 * cross.real))
        time = TimeVector((1, 2, 3, 4))
        got = wasserstein_sq(_fc(ma, va, time), _fc(mb, vb, time))
        assert got == pytest.approx(expected, rel=1e-9)


def test_hellinger_examples():
    a = _fc([0.0], [1.0])
    b = _fc([2.0], [1.0])
    assert hellinger_sq(a, a) == 0.0
    assert hellinger_sq(a, b) == pytest.approx(1 - np.exp(-0.5), rel=1e-12)
    far = _fc([80.0], [1.0])
    assert hellinger_sq(a, far) == pytest.approx(1.0, abs=1e-12)


def test_hellinger_matches_quadrature(rng):
    """Oracle: numerically integrate 1 - int sqrt(f g) per dimension."""
    for _ in range(5):
        ma, mb = rng.normal(0, 2, 2)
        va, vb = rng.uniform(0.3, 3.0, 2)

        def integrand(x):
            fa = np.exp(-((x - ma) ** 2) / (2 * va)) / np.sqrt(2 * np.pi * va)
            fb = np.exp(-((x - mb) ** 2) / (2 * vb)) / np.sqrt(2 * np.pi * vb)
            return np.sqrt(fa * fb)

        bc, _ = quad(integrand, -50, 50)
        got = hellinger_sq(_fc([ma], [va]), _fc([mb], [vb]))
        assert got == pytest.approx(1 - bc, abs=1e-9)


def test_hellinger_bounds_and_errors(rng):
    for _ in range(20):
        fcs = random_fold_change_set(rng, n_entities=4, n_times=3)
        mat = pairwise_matrix(fcs, "hellinger")
        assert np.all(mat >= 0) and np.all(mat <= 1)
        assert np.array_equal(mat, mat.T)
    with pytest.raises(NonPositiveVariance):
        hellinger_sq(_fc([0.0], [0.0]), _fc([1.0], [1.0]))


def test_pairwise_matrix_matches_scalar_calls(rng):
    fcs = random_fold_change_set(rng, n_entities=5, n_times=4)
    d2 = pairwise_matrix(fcs, "d2")
    ws = pairwise_matrix(fcs, "wasserstein")
    hl = pairwise_matrix(fcs, "hellinger")
    for i in range(5):
        for j in range(5):
            assert d2[i, j] == pytest.approx(d2_squared(fcs, i, j), abs=1e-10)
            if i != j:
                assert ws[i, j] == pytest.approx(
                    wasserstein_sq(fcs.item(i), fcs.item(j)), rel=1e-12
                )
                assert hl[i, j] == pytest.approx(
                    hellinger_sq(fcs.item(i), fcs.item(j)), rel=1e-9, abs=1e-12
                )
    with pytest.raises(ValueError):
        pairwise_matrix(fcs, "mahalanobis")
