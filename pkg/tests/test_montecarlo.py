import math
from collections import Counter
from fractions import Fraction
from statistics import NormalDist

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sp_stats

from gendescent.enumeration import exact_distribution
from gendescent.errors import InputError
from gendescent.montecarlo import (
    ScheduleWarning,
    SimulationConfig,
    chunk_rng,
    draw_statistics,
    growth_regime_experiment,
    growth_window,
    ks_statistic,
    ks_statistic_weighted,
    sample_permutation,
    sample_permutations,
    simulate,
    standard_normal_cdf,
    standardization,
    statistic_block,
)
from gendescent.stats import Uniform, Vector, count_statistic, eligible_pair_count, variance_closed_form


def phi_quadrature(x):
    mpmath.mp.dps = 30
    density = lambda t: mpmath.exp(-t * t / 2) / mpmath.sqrt(2 * mpmath.pi)  # noqa: E731
    return float(mpmath.quad(density, [-mpmath.inf, 0, x]))


class TestNormalCdf:
    def test_anchors(self):
        assert standard_normal_cdf(0.0) == 0.5
        assert abs(standard_normal_cdf(10.0) - 1.0) <= 1e-7
        assert standard_normal_cdf(-10.0) < 1e-7
        assert standard_normal_cdf(math.inf) == 1.0

    def test_against_quadrature(self):
        assert abs(standard_normal_cdf(1.0) - 0.8413447) <= 1e-6
        for x in np.linspace(-8, 8, 81):
            assert abs(standard_normal_cdf(float(x)) - phi_quadrature(float(x))) <= 1e-7

    def test_nan(self):
        with pytest.raises(InputError):
            standard_normal_cdf(math.nan)


def direct_sup_distance(values, weights):
    """sup_x |F(x) - Phi(x)| by scanning each atom and a point just left of it."""
    values = np.asarray(values, float)
    weights = np.asarray(weights, float) / np.sum(weights)
    best = 0.0
    for v in np.unique(values):
        for x, inclusive in ((v, True), (v, False)):
            f = weights[values <= x].sum() if inclusive else weights[values < x].sum()
            best = max(best, abs(f - standard_normal_cdf(x)))
    return best


class TestKS:
    def test_quantile_samples(self):
        t = 10**5
        nd = NormalDist()
        samples = [nd.inv_cdf((i - 0.5) / t) for i in range(1, t + 1)]
        ks = ks_statistic(samples)
        assert ks < 0.005
        assert ks == pytest.approx(0.5 / t, abs=1e-9)

    def test_single_sample(self):
        assert ks_statistic([0.0]) == 0.5

    @pytest.mark.parametrize("c", [-1.3, 0.0, 0.4, 2.0])
    def test_constant_samples(self, c):
        phi = standard_normal_cdf(c)
        assert ks_statistic([c] * 1000) == pytest.approx(max(phi, 1 - phi), abs=1e-15)

    def test_empty(self):
        with pytest.raises(InputError):
            ks_statistic([])

    def test_lattice_exact_n6_d1(self):
        table = exact_distribution(6, 1)
        mu, var = eligible_pair_count(6, 1) / 2, float(variance_closed_form(6, 1))
        z = [(k - mu) / math.sqrt(var) for k in range(len(table.counts))]
        w = [c / table.total for c in table.counts]
        assert abs(ks_statistic_weighted(z, w) - direct_sup_distance(z, w)) <= 1e-12

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=200))
    def test_matches_scipy_and_is_bounded(self, xs):
        ks = ks_statistic(xs)
        assert 0.0 <= ks <= 1.0
        if len(set(xs)) == len(xs):
            assert ks == pytest.approx(sp_stats.kstest(xs, "norm").statistic, abs=1e-9)

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.integers(-4, 4), min_size=1, max_size=100))
    def test_ties_match_direct_scan(self, xs):
        xs = [x / 2 for x in xs]
        assert ks_statistic(xs) == pytest.approx(direct_sup_distance(xs, [1] * len(xs)), abs=1e-12)


class TestSampling:
    def test_n1(self):
        rng = chunk_rng(0, 0)
        assert all(sample_permutation(1, rng).values == (1,) for _ in range(10))

    def test_n2_frequency(self):
        rng = chunk_rng(1, 0)
        hits = sum(sample_permutation(2, rng).values == (1, 2) for _ in range(10**5))
        assert abs(hits / 10**5 - 0.5) <= 0.01

    def test_n3_chi_square(self):
        rng = chunk_rng(2, 0)
        t = 6 * 10**4
        freq = Counter(sample_permutation(3, rng).values for _ in range(t))
        assert len(freq) == 6
        chi2 = sum((c - t / 6) ** 2 / (t / 6) for c in freq.values())
        assert chi2 < 20.5

    def test_block_chi_square(self):
        block = sample_permutations(3, 6 * 10**4, chunk_rng(3, 0))
        freq = Counter(map(tuple, block.tolist()))
        assert len(freq) == 6
        t = block.shape[0]
        assert sum((c - t / 6) ** 2 / (t / 6) for c in freq.values()) < 20.5

    def test_block_rows_are_permutations(self):
        block = sample_permutations(50, 200, chunk_rng(4, 0))
        assert (np.sort(block, axis=1) == np.arange(1, 51)).all()

    def test_draw_count_is_n_minus_1(self):
        a = chunk_rng(5, 0)
        sample_permutation(7, a)
        b = chunk_rng(5, 0)
        for i in range(6, 0, -1):
            b.integers(0, i + 1)
        assert a.integers(0, 2**62) == b.integers(0, 2**62)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(2, 30), st.sampled_from([1, 2, 5, 40]), st.integers(0, 2**64 - 1))
    def test_statistic_block_matches_rescan(self, n, d, seed):
        block = sample_permutations(n, 25, chunk_rng(seed, 0))
        fast = statistic_block(block, d)
        assert fast.tolist() == [count_statistic(row, d) for row in block.tolist()]

    def test_statistic_block_vector(self):
        spec = Vector((3, 1, 4, 1, 5, 9, 2))
        block = sample_permutations(8, 100, chunk_rng(6, 0))
        assert statistic_block(block, spec).tolist() == [count_statistic(r, spec) for r in block.tolist()]


class TestSimulate:
    def test_fair_indicator(self):
        r = simulate(SimulationConfig(2, 1, 10**5, seed=7))
        assert abs(r.empirical_mean - 0.5) <= 0.01
        assert abs(r.empirical_variance - 0.25) <= 0.01

    def test_n1000_variance(self):
        r = simulate(SimulationConfig(1000, 1, 10**4, seed=11))
        assert abs(r.empirical_variance / (1001 / 12) - 1) <= 0.02
        assert r.mu == Fraction(999, 2)
        assert r.sigma_sq == Fraction(1001, 12)

    @pytest.mark.parametrize("n,d", [(30, 1), (30, 5), (200, 10), (12, 8)])
    def test_mean_band(self, n, d):
        trials = 4000
        r = simulate(SimulationConfig(n, d, trials, seed=13))
        target = eligible_pair_count(n, d) / 2
        assert abs(r.empirical_mean - target) <= 4 * r.sigma / math.sqrt(trials)

    @pytest.mark.parametrize("n,d", [(3, 1), (4, 2), (5, 1), (6, 1), (6, 3)])
    def test_small_n_histogram(self, n, d):
        x = draw_statistics(SimulationConfig(n, d, 10**6, seed=17))
        table = exact_distribution(n, d)
        emp = np.bincount(x, minlength=len(table.counts)) / x.size
        exact = np.array(table.counts, float) / table.total
        assert 0.5 * np.abs(emp - exact).sum() <= 0.01

    def test_reproducible_and_worker_independent(self):
        cfg = SimulationConfig(300, 3, 3000, seed=2**63 + 5)
        a, b = simulate(cfg), simulate(cfg)
        c = simulate(SimulationConfig(300, 3, 3000, seed=2**63 + 5, workers=2))
        assert a == b == c

    def test_report_invariants(self):
        r = simulate(SimulationConfig(100, 2, 2000, seed=3))
        assert 0 <= r.ks_statistic <= 1
        assert r.sigma_source == "closed_form"
        assert r.lattice_floor == pytest.approx(1 / (r.sigma * math.sqrt(2 * math.pi)))
        assert set(r.to_json()["standardization"]) == {"mu", "sigma_sq", "sigma", "source"}

    def test_standardization_fallback(self):
        mu, var, source = standardization(5, 3)
        assert source == "pair_tally"
        assert var == Fraction(sum(
            k * k * c for k, c in enumerate(exact_distribution(5, 3).counts)
        ), 120) - mu * mu
        assert standardization(10, Vector((1,) * 9))[1] == Fraction(11, 12)

    def test_degenerate(self):
        with pytest.raises(InputError):
            simulate(SimulationConfig(1, 1, 10))

    def test_config_validation(self):
        with pytest.raises(InputError):
            SimulationConfig(5, 1, 0)
        with pytest.raises(InputError):
            SimulationConfig(5, 1, 10, seed=-1)
        with pytest.raises(InputError):
            SimulationConfig(5, Vector((1, 1)), 10)


class TestGrowth:
    def test_window(self):
        assert growth_window(10_000, 0.5) == 100
        assert growth_window(900, 0.5) == 30
        for n in (10, 1000, 10**6):
            assert growth_window(n, 0.99) == 1

    def test_experiment_rows(self):
        rows = growth_regime_experiment(0.5, [400, 100], trials=500, seed=1)
        assert [(r.n, r.d) for r in rows] == [(100, 10), (400, 20)]
        assert all(r.report.spec == Uniform(r.d) for r in rows)

    def test_skips_infeasible(self):
        with pytest.warns(ScheduleWarning):
            rows = growth_regime_experiment(0.01, [3, 50], trials=200, seed=1)
        assert [r.n for r in rows] == []

    def test_rejects_epsilon(self):
        with pytest.raises(InputError):
            growth_regime_experiment(1.0, [100], 10)
