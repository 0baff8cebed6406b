from fractions import Fraction
from itertools import permutations

import pytest

from gendescent.errors import CapacityError, InputError, UnsupportedRegimeError
from gendescent.janson import (
    Fixed,
    Power,
    auto_m,
    build_dependency_graph,
    convergence_table,
    independence_audit,
    janson_bound,
    max_degree,
)
from gendescent.montecarlo import ScheduleWarning
from gendescent.stats import eligible_pair_count


class TestGraph:
    def test_n3_d1(self):
        g = build_dependency_graph(3, 1)
        assert g.vertices == [(1, 2), (2, 3)]
        assert list(g.edges()) == [(0, 1)]

    def test_n4_d1_is_path(self):
        g = build_dependency_graph(4, 1)
        assert sorted(map(len, g.adjacency)) == [1, 1, 2]
        assert max_degree(g) == 2

    @pytest.mark.parametrize("n,d,expected", [(3, 1, 1), (2, 1, 0), (6, 2, 6), (20, 3, 10)])
    def test_max_degree(self, n, d, expected):
        assert max_degree(build_dependency_graph(n, d)) == expected

    def test_structure(self):
        for n in range(2, 12):
            for d in range(1, n):
                g = build_dependency_graph(n, d)
                assert len(g.vertices) == eligible_pair_count(n, d)
                for a, nbrs in enumerate(g.adjacency):
                    assert nbrs == sorted(nbrs) and a not in nbrs
                    for b in nbrs:
                        assert a in g.adjacency[b]
                    expected = [b for b, pb in enumerate(g.vertices)
                                if b != a and set(pb) & set(g.vertices[a])]
                    assert nbrs == expected

    def test_degree_sweep(self):
        for n in range(2, 41):
            for d in range(1, n):
                delta = max_degree(build_dependency_graph(n, d))
                assert delta <= 4 * d
                # confirmed by brute force: the interior maximum 4d-2 needs n >= 2d+2
                assert (delta == 4 * d - 2) == (n >= 2 * d + 2), (n, d, delta)

    def test_guard(self):
        with pytest.raises(CapacityError):
            build_dependency_graph(100, 10, max_vertices=500)
        with pytest.raises(InputError):
            build_dependency_graph(5, 5)


class TestBound:
    def test_n100_m3(self):
        cert = janson_bound(100, 1, 3)
        assert cert.N_n == 99 and cert.delta_used == 4 and cert.A_n == 1
        assert cert.sigma_sq == Fraction(101, 12)
        assert cert.bound_value == pytest.approx(99 * 16 * (12 / 101) ** 1.5, rel=1e-12)
        assert cert.bound_value == pytest.approx(64.9, abs=0.05)

    def test_m3_scaling(self):
        ratio = janson_bound(10_000, 1, 3).bound_value / janson_bound(100, 1, 3).bound_value
        assert ratio == pytest.approx(0.1, rel=0.05)
        for d in (1, 2, 5):
            for n in (1000, 5000, 20_000):
                r = janson_bound(4 * n, d, 3).bound_value / janson_bound(n, d, 3).bound_value
                assert r == pytest.approx(0.5, rel=0.05)

    def test_m2_does_not_vanish(self):
        assert janson_bound(100, 1, 2).bound_value == pytest.approx(99 * 4 * 12 / 101, rel=1e-12)
        assert janson_bound(10_000, 1, 2).bound_value == pytest.approx(47.99, abs=0.01)

    def test_simplified_dominates(self):
        for d in (1, 3, 7):
            for n in (2 * d, 10 * d, 1000):
                for m in (1, 3, 5):
                    cert = janson_bound(n, d, m)
                    assert cert.simplified_bound >= cert.bound_value * (1 - 1e-12)
                    assert cert.simplified_bound == pytest.approx(
                        d * n * (4 * d) ** (m - 1) * (12 / (d * n)) ** (m / 2), rel=1e-12)

    def test_exact_degree(self):
        cert = janson_bound(20, 3, 3, use_exact_degree=True)
        assert (cert.delta_exact, cert.delta_used, cert.delta_source) == (10, 10, "graph")
        assert cert.bound_value < janson_bound(20, 3, 3).bound_value
        guarded = janson_bound(2000, 10, 3, use_exact_degree=True, max_vertices=100)
        assert guarded.delta_exact is None and guarded.delta_source == "analytic_guarded"
        assert janson_bound(2, 1, 3, use_exact_degree=True).bound_value == 0.0

    def test_regime(self):
        with pytest.raises(UnsupportedRegimeError):
            janson_bound(5, 3, 3)
        with pytest.raises(InputError):
            janson_bound(100, 1, 0)

    def test_json(self):
        data = janson_bound(100, 1, 3).to_json()
        assert data["sigma_sq"] == "101/12"
        assert set(janson_bound(100, 1, 3).csv_row()) == {
            "n", "d", "m", "N_n", "delta_used", "sigma_sq", "bound_value", "simplified_bound"}


class TestConvergenceTable:
    def test_fixed_decreasing(self):
        certs = convergence_table(Fixed(1), [100, 1000, 10_000], m=3)
        values = [c.bound_value for c in certs]
        assert values[0] > values[1] > values[2]

    @pytest.mark.parametrize("eps,m", [(0.5, 5), (0.25, 9), (0.9, 3), (1 / 3, 7)])
    def test_auto_m(self, eps, m):
        assert auto_m(eps) == m
        assert (m / 2) * eps > 1 >= ((m - 1) / 2) * eps

    def test_power_decreasing(self):
        certs = convergence_table(Power(0.5), [10**3, 10**4, 10**5])
        assert [c.d for c in certs] == [31, 100, 316]
        assert {c.m for c in certs} == {5}
        values = [c.bound_value for c in certs]
        assert values[0] > values[1] > values[2]

    def test_skips(self):
        with pytest.warns(ScheduleWarning):
            certs = convergence_table(Fixed(10), [15, 100])
        assert [c.n for c in certs] == [100]

    def test_power_validation(self):
        with pytest.raises(InputError):
            Power(0.0)


def joint_expectation(n, a, b):
    hits = total = 0
    for p in permutations(range(n)):
        total += 1
        hits += p[a[0] - 1] > p[a[1] - 1] and p[b[0] - 1] > p[b[1] - 1]
    return Fraction(hits, total)


class TestAudit:
    def test_examples(self):
        assert independence_audit(4, 2)
        assert independence_audit(3, 1)
        assert joint_expectation(3, (1, 2), (2, 3)) == Fraction(1, 6)
        assert independence_audit(2, 1)

    def test_all_small(self):
        for n in range(2, 8):
            for d in range(1, n):
                assert independence_audit(n, d), (n, d)

    def test_capacity(self):
        with pytest.raises(CapacityError):
            independence_audit(10, 2)
