"""Scenario generators: reproducibility, covariance structure, template shapes."""
import numpy as np
import pytest
from scipy.stats import chisquare

from foldwarp import ScenarioSpec, SimulatedSet, simulate
from foldwarp.exceptions import InvalidCombination
from foldwarp.simulation import M1_TIME, M2_TIME


def divided_difference(x, y):
    """Highest-order divided difference over all given points."""
    x = np.asarray(x, float)
    y = np.asarray(y, float).copy()
    for order in range(1, len(x)):
        y = (y[1:] - y[:-1]) / (x[order:] - x[:-order])
    return float(y[0])


def test_spec_codes_and_defaults():
    spec = ScenarioSpec.from_code("m1-c3", n_entities=50, seed=1)
    assert spec.n_clusters == 2 and spec.time == M1_TIME
    spec2 = ScenarioSpec.from_code("m2", seed=1)
    assert spec2.n_clusters == 4 and spec2.time == M2_TIME
    with pytest.raises(InvalidCombination):
        ScenarioSpec.from_code("m3-c1")
    with pytest.raises(InvalidCombination):
        ScenarioSpec("m2", "c4")


def test_seed_reproducibility():
    for code in ("m1-c1", "m1-c4", "m2"):
        a = simulate(ScenarioSpec.from_code(code, n_entities=25, seed=42))
        b = simulate(ScenarioSpec.from_code(code, n_entities=25, seed=42))
        assert np.array_equal(a.fcs.means, b.fcs.means)
        assert np.array_equal(a.fcs.crosscov, b.fcs.crosscov)
        assert np.array_equal(a.truth, b.truth)
        c = simulate(ScenarioSpec.from_code(code, n_entities=25, seed=43))
        assert not np.array_equal(a.fcs.means, c.fcs.means)


def test_variances_nonnegative_and_psd_everywhere():
    for code in ("m1-c1", "m1-c2", "m1-c3", "m1-c4", "m1-c5", "m1-c6", "m2"):
        sim = simulate(ScenarioSpec.from_code(code, n_entities=30, seed=7))
        assert np.all(sim.fcs.variances >= 0)
        assert sim.fcs.psd_block_violation() <= 1e-12


def test_cross_covariance_sparsity():
    # independent modes: no off-diagonal mass at all
    for code in ("m1-c1", "m1-c2", "m2"):
        sim = simulate(ScenarioSpec.from_code(code, n_entities=20, seed=3))
        off = sim.fcs.crosscov.copy()
        idx = np.arange(20)
        off[idx, idx] = 0.0
        assert np.all(off == 0)
    # correlated modes: strictly zero across clusters, mass within
    for code in ("m1-c3", "m1-c5"):
        sim = simulate(ScenarioSpec.from_code(code, n_entities=20, seed=3))
        across = sim.truth[:, None] != sim.truth[None, :]
        assert np.all(sim.fcs.crosscov[across] == 0)
        within = (sim.truth[:, None] == sim.truth[None, :]) & ~np.eye(20, dtype=bool)
        assert np.abs(sim.fcs.crosscov[within]).max() > 0


def test_truth_label_ranges():
    assert set(np.unique(simulate(ScenarioSpec.from_code("m2", n_entities=80, seed=0)).truth)) <= {1, 2, 3, 4}
    assert set(np.unique(simulate(ScenarioSpec.from_code("m1-c5", n_entities=80, seed=0)).truth)) <= {1, 2}


def test_cluster_proportions_uniform_over_seeds():
    counts = np.zeros(4)
    for seed in range(100):
        sim = simulate(ScenarioSpec.from_code("m1-c1", n_entities=300, seed=seed))
        counts += np.bincount(sim.truth, minlength=5)[1:]
    assert chisquare(counts).pvalue > 0.001


def test_m1_template_families_via_divided_differences():
    sim = simulate(ScenarioSpec.from_code("m1-c1", n_entities=400, seed=11))
    x = sim.fcs.time.array
    for i in range(400):
        y = sim.fcs.means[i]
        cluster = sim.truth[i]
        if cluster == 1:
            # quadratic with positive leading coefficient: dd2 == a/2 > 0 everywhere
            dds = [divided_difference(x[j:j + 3], y[j:j + 3]) for j in range(len(x) - 2)]
            assert all(d > 0 for d in dds)
            assert np.ptp(dds) < 1e-8
        elif cluster in (2, 3):
            dd3 = divided_difference(x[:4], y[:4])
            assert (dd3 < 0) if cluster == 2 else (dd3 > 0)
        else:
            dd4 = divided_difference(x[:5], y[:5])
            assert dd4 > 0


def test_m2_shifts_present_and_ranged():
    sim = simulate(ScenarioSpec.from_code("m2", n_entities=500, seed=5))
    assert isinstance(sim, SimulatedSet)
    assert sim.shifts is not None and sim.shifts.shape == (500,)
    wide = sim.shifts[np.isin(sim.truth, (1, 2, 3))]
    narrow = sim.shifts[sim.truth == 4]
    assert np.all(np.abs(wide) <= 10) and np.abs(wide).max() > 7
    assert np.all(np.abs(narrow) <= 7)
    # unshifted scenario carries no shift vector
    assert simulate(ScenarioSpec.from_code("m1-c1", n_entities=10, seed=1)).shifts is None


def test_m2_sinusoid_oscillates():
    sim = simulate(ScenarioSpec.from_code("m2", n_entities=400, seed=2))
    wavy = 0
    members = np.flatnonzero(sim.truth == 4)
    for i in members:
        d = np.diff(sim.fcs.means[i])
        wavy += int(np.any(d[:-1] * d[1:] < 0))
    assert wavy / len(members) > 0.9


def test_scaled_covariance_modes_bounded():
    # c5/c6 map U([0,1])-type draws through x^2/cst: tiny positive entries
    for code, cst in (("m1-c5", 100.0), ("m1-c6", 50.0)):
        sim = simulate(ScenarioSpec.from_code(code, n_entities=30, seed=9))
        assert sim.fcs.variances.max() <= 1.0 / cst + 1e-12
        assert sim.fcs.crosscov.min() >= 0.0
