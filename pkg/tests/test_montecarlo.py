import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubesep import analytic, montecarlo
from cubesep.analytic import SQRT2, SQRT3, DomainError
from cubesep.montecarlo import DataError, SimConfig


@pytest.fixture(scope="module")
def reference_run():
    config = SimConfig(150_000, 100, seed=1)
    return config, montecarlo.sample_separations(config)


@pytest.mark.parametrize("kwargs", [
    dict(sample_count=0), dict(sample_count=-5), dict(bin_count=1),
    dict(seed=-1), dict(seed=2**64),
])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        SimConfig(**kwargs)


def test_samples_within_diameter(reference_run):
    _, x = reference_run
    assert x.size == 150_000
    assert x.min() >= 0.0 and x.max() <= SQRT3


def test_deterministic(reference_run):
    config, x = reference_run
    np.testing.assert_array_equal(x, montecarlo.sample_separations(config))


def test_draw_order_documented():
    # first pair is A = u[0:3], B = u[3:6] from the raw PCG64 stream
    u = np.random.Generator(np.random.PCG64(42)).random(6)
    x = montecarlo.sample_separations(SimConfig(1, seed=42))
    assert x[0] == pytest.approx(np.linalg.norm(u[:3] - u[3:]), rel=1e-15)


def test_seeds_differ():
    a = montecarlo.sample_separations(SimConfig(1000, seed=1))
    b = montecarlo.sample_separations(SimConfig(1000, seed=2))
    assert not np.array_equal(a, b)


def test_partitioned_mode_is_deterministic():
    config = SimConfig(10_001, seed=5)
    a = montecarlo.sample_separations(config, partitions=4)
    b = montecarlo.sample_separations(config, partitions=4)
    np.testing.assert_array_equal(a, b)
    assert a.size == 10_001
    first = np.random.Generator(np.random.PCG64(np.random.SeedSequence(5, spawn_key=(0,))))
    u = first.random(6)
    assert a[0] == pytest.approx(np.linalg.norm(u[:3] - u[3:]), rel=1e-15)
    assert montecarlo.ks_test(a).pass_


def test_second_moment_of_samples():
    x = montecarlo.sample_separations(SimConfig(1_000_000, seed=8))
    sq = x * x
    se = sq.std(ddof=1) / math.sqrt(sq.size)
    assert abs(sq.mean() - 0.5) < 4 * se


def test_empty_histogram():
    h = montecarlo.build_histogram([], 10)
    assert h.total == 0 and not h.counts.any()
    assert h.edges[0] == 0.0 and h.edges[-1] == SQRT3


def test_last_bin_closed():
    h = montecarlo.build_histogram([SQRT3], 10)
    assert h.counts[-1] == 1 and h.counts.sum() == 1


def test_histogram_rejects_out_of_range():
    with pytest.raises(DataError):
        montecarlo.build_histogram([0.5, 1.8], 10)
    with pytest.raises(DataError):
        montecarlo.build_histogram([-1e-9], 10)


@given(st.lists(st.floats(0.0, SQRT3), max_size=200), st.integers(2, 50))
@settings(max_examples=50)
def test_histogram_invariants(samples, bins):
    h = montecarlo.build_histogram(samples, bins)
    assert h.edges.size == bins + 1
    assert np.all(np.diff(h.edges) > 0)
    assert h.counts.sum() == h.total == len(samples)


def test_histogram_tracks_density(reference_run):
    from scipy import stats

    _, x = reference_run
    h = montecarlo.build_histogram(x, 100)
    mass = h.expected_masses()
    expected = h.total * mass
    dense = expected >= 5
    z = np.abs(h.counts - expected)[dense] / np.sqrt(expected * (1 - mass))[dense]
    assert np.all(z < 5)
    # a normal band means nothing when < 1 count is expected; use the
    # binomial tail probability of a 5-sigma event instead
    five_sigma = 2 * stats.norm.sf(5)
    upper = stats.binom.sf(h.counts[~dense] - 1, h.total, mass[~dense])
    lower = stats.binom.cdf(h.counts[~dense], h.total, mass[~dense])
    assert np.all(np.minimum(upper, lower) > five_sigma / 2)


def test_empirical_regime_masses(reference_run):
    _, x = reference_run
    near, mid, far = analytic.regime_masses()
    assert np.mean(x < 1.0) == pytest.approx(near, abs=0.005)
    assert np.mean(x > SQRT2) == pytest.approx(far, abs=0.0005)


def test_ks_on_stratified_quantiles():
    n = 200
    ps = (np.arange(n) + 0.5) / n
    x = np.array([analytic.quantile(p) for p in ps])
    report = montecarlo.ks_test(x)
    assert report.ks_statistic <= 1 / (2 * n) + 1e-8
    assert report.pass_


def test_ks_reference_run_passes(reference_run):
    config, x = reference_run
    report = montecarlo.ks_test(x, seed=config.seed)
    assert report.pass_
    assert report.ks_threshold_1pct == pytest.approx(0.00420, abs=1e-5)
    assert report.ks_statistic >= 0 and report.chi_square >= 0
    assert report.pass_ == (report.ks_statistic < report.ks_threshold_1pct)


def test_ks_uniform_control_fails():
    x = np.random.Generator(np.random.PCG64(3)).random(150_000) * SQRT3
    report = montecarlo.ks_test(x)
    assert not report.pass_
    assert report.ks_statistic > 0.1


def test_ks_unsorted_input_is_sorted():
    x = montecarlo.sample_separations(SimConfig(2000, seed=4))
    assert montecarlo.ks_test(x).ks_statistic == montecarlo.ks_test(np.sort(x)).ks_statistic


def test_ks_statistic_matches_scipy():
    from scipy import stats

    x = montecarlo.sample_separations(SimConfig(5000, seed=6))
    expected = stats.kstest(x, lambda t: analytic.cdf_many(np.clip(t, 0, SQRT3))).statistic
    assert montecarlo.ks_test(x).ks_statistic == pytest.approx(expected, abs=1e-12)


def test_ks_empty():
    with pytest.raises(DomainError):
        montecarlo.ks_test([])


def test_chi_square_merging_keeps_expected_counts_large():
    obs, exp = montecarlo._merge_sparse([0, 1, 50, 60, 2, 0], [0.5, 3.0, 48.0, 58.0, 4.0, 0.1])
    assert np.all(exp >= 5)
    np.testing.assert_array_equal(obs, [51, 62])
    np.testing.assert_allclose(exp, [51.5, 62.1])


def test_simulate_is_deterministic():
    config = SimConfig(20_000, 50, seed=9)
    h1, r1 = montecarlo.simulate(config)
    h2, r2 = montecarlo.simulate(config)
    np.testing.assert_array_equal(h1.counts, h2.counts)
    assert r1 == r2


@pytest.mark.slow
def test_seed_sweep():
    failures = sum(
        not montecarlo.simulate(SimConfig(150_000, 100, seed=s))[1].pass_ for s in range(20)
    )
    assert failures <= 1
