"""Tests for exact counting and hypergraph sampling."""

import itertools
import math

import numpy as np
import pytest

from hypergraph_spectra.combinatorics import (
    HypergraphSample,
    ModelParams,
    SamplingBudgetError,
    average_degree,
    binomial_coefficient,
    derive_seed,
    edge_overlap_count,
    enumerate_edges,
    load_hypergraph_json,
    sample_hypergraph,
    save_hypergraph_json,
)


def product_binomial(n, k):
    """Independent oracle: multiplicative evaluation with exact integers."""
    k = min(k, n - k)
    num, den = 1, 1
    for i in range(k):
        num *= n - i
        den *= i + 1
    return num // den


class TestBinomialCoefficient:
    def test_small_value(self):
        assert binomial_coefficient(8, 2) == 28 == product_binomial(8, 2)

    @pytest.mark.parametrize("n", [0, 1, 5, 17])
    def test_empty_subset(self, n):
        assert binomial_coefficient(n, 0) == 1

    def test_large_value_against_product_oracle(self):
        assert binomial_coefficient(30, 15) == 155117520
        assert product_binomial(30, 15) == 155117520

    def test_arbitrary_precision(self):
        value = binomial_coefficient(500, 250)
        assert value == product_binomial(500, 250)
        assert value > 10**100

    @pytest.mark.parametrize("n,k", [(5, -1), (5, 6), (-1, 0)])
    def test_domain_errors(self, n, k):
        with pytest.raises(ValueError):
            binomial_coefficient(n, k)


class TestModelParams:
    def test_derived_counts(self):
        params = ModelParams(6, 3, 0.5)
        assert params.num_possible_edges == 20
        assert params.edges_per_pair == 4
        assert params.size_ratio == 0.5

    def test_r2_pair_count_is_one(self):
        assert ModelParams(8, 2, 0.1).edges_per_pair == 1

    @pytest.mark.parametrize("n,r,p", [(3, 1, 0.5), (3, 4, 0.5), (5, 3, -0.1), (5, 3, 1.5)])
    def test_invalid(self, n, r, p):
        with pytest.raises(ValueError):
            ModelParams(n, r, p)


class TestAverageDegree:
    def test_example(self):
        assert average_degree(ModelParams(20, 3, 0.1)) == pytest.approx(17.1)

    def test_zero_probability(self):
        assert average_degree(ModelParams(20, 3, 0.0)) == 0.0

    def test_complete_graph_degree(self):
        assert average_degree(ModelParams(10, 2, 1.0)) == pytest.approx(9.0)

    def test_log_space_path(self):
        # C(999, 499) overflows float64; the log-space route must still give
        # a finite, consistent value for tiny p
        value = average_degree(ModelParams(1000, 500, 1e-280))
        expected = math.exp(
            math.lgamma(1000) - math.lgamma(500) - math.lgamma(501) + math.log(1e-280)
        )
        assert value == pytest.approx(expected, rel=1e-9)


class TestEdgeOverlapCount:
    def test_full_overlap_is_self(self):
        assert edge_overlap_count(8, 3, 3) == 1

    def test_disjoint(self):
        assert edge_overlap_count(8, 3, 0) == 10

    def test_single_vertex_overlap(self):
        assert edge_overlap_count(8, 3, 1) == 30

    def test_brute_force_enumeration(self):
        fixed = (1, 2, 3)
        counts = {s: 0 for s in range(4)}
        for edge in itertools.combinations(range(1, 9), 3):
            counts[len(set(edge) & set(fixed))] += 1
        for s in range(4):
            assert edge_overlap_count(8, 3, s) == counts[s]

    def test_total_is_binomial(self):
        for n in range(2, 13):
            for r in range(2, n + 1):
                total = sum(edge_overlap_count(n, r, s) for s in range(r + 1))
                assert total == binomial_coefficient(n, r)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            edge_overlap_count(8, 3, 4)


class TestDeriveSeed:
    def test_deterministic_and_distinct(self):
        seeds = [derive_seed(12345, i) for i in range(1000)]
        assert seeds == [derive_seed(12345, i) for i in range(1000)]
        assert len(set(seeds)) == 1000

    def test_uint64_range(self):
        for i in (0, 1, 10**6):
            s = derive_seed(2**63, i)
            assert 0 <= s < 2**64

    def test_negative_index_rejected(self):
        with pytest.raises(ValueError):
            derive_seed(0, -1)


class TestSampleHypergraph:
    def test_p_one_gives_all_edges(self):
        sample = sample_hypergraph(ModelParams(6, 3, 1.0), 7)
        assert len(sample.edges) == 20
        assert set(sample.edges) == set(enumerate_edges(6, 3))

    def test_p_zero_gives_no_edges(self):
        assert sample_hypergraph(ModelParams(6, 3, 0.0), 7).edges == ()

    def test_reproducible(self):
        params = ModelParams(9, 3, 0.4)
        a = sample_hypergraph(params, 123)
        b = sample_hypergraph(params, 123)
        assert a.edges == b.edges
        assert a != sample_hypergraph(params, 124) or a.edges == ()

    def test_edges_are_valid_subsets(self):
        sample = sample_hypergraph(ModelParams(12, 4, 0.3), 5)
        for edge in sample.edges:
            assert len(edge) == 4
            assert len(set(edge)) == 4
            assert all(1 <= v <= 12 for v in edge)
            assert list(edge) == sorted(edge)
        assert len(set(sample.edges)) == len(sample.edges)

    def test_edge_count_mean_matches_binomial(self):
        # Binomial(20, 0.5): mean 10, checked to +-0.3 over 10_000 seeds
        params = ModelParams(6, 3, 0.5)
        counts = [len(sample_hypergraph(params, seed).edges) for seed in range(10_000)]
        assert abs(np.mean(counts) - 10.0) < 0.3
        assert abs(np.var(counts) - 5.0) < 0.5  # 4-sigma-ish band on the variance

    def test_complement_path_high_p(self):
        # p = 0.9 forces the complement branch (edge count > M/2) regularly
        params = ModelParams(7, 3, 0.9)
        counts = [len(sample_hypergraph(params, seed).edges) for seed in range(2000)]
        band = 4.0 * math.sqrt(35 * 0.9 * 0.1) / math.sqrt(2000)
        assert abs(np.mean(counts) - 0.9 * 35) < band

    def test_budget_error_advises_surrogate(self):
        with pytest.raises(SamplingBudgetError, match="surrogate"):
            sample_hypergraph(ModelParams(60, 30, 0.5), 1)

    def test_budget_override(self):
        sample = sample_hypergraph(ModelParams(6, 3, 1.0), 0, max_expected_edges=25)
        assert len(sample.edges) == 20
        with pytest.raises(SamplingBudgetError):
            sample_hypergraph(ModelParams(6, 3, 1.0), 0, max_expected_edges=19)

    @pytest.mark.parametrize("n,r", [(6, 3), (10, 4), (8, 2), (5, 4)])
    @pytest.mark.parametrize("p", [0.3, 0.7])
    def test_per_edge_inclusion_frequency(self, n, r, p):
        # each fixed hyperedge is included with probability p: check the
        # empirical frequency of every edge against a 4-sigma binomial band
        params = ModelParams(n, r, p)
        trials = 2000
        counts = {edge: 0 for edge in enumerate_edges(n, r)}
        for i in range(trials):
            for edge in sample_hypergraph(params, derive_seed(97, i)).edges:
                counts[edge] += 1
        band = 4.0 * math.sqrt(p * (1 - p) / trials)
        freqs = np.array([c / trials for c in counts.values()])
        assert np.all(np.abs(freqs - p) <= band), (
            f"worst deviation {np.abs(freqs - p).max():.4f} vs band {band:.4f}"
        )


class TestSerialization:
    def test_round_trip(self, tmp_path):
        sample = sample_hypergraph(ModelParams(8, 3, 0.4), 99)
        path = tmp_path / "hg.json"
        save_hypergraph_json(sample, path)
        loaded = load_hypergraph_json(path)
        assert loaded == sample

    def test_byte_identical(self, tmp_path):
        sample = sample_hypergraph(ModelParams(8, 3, 0.4), 99)
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        save_hypergraph_json(sample, p1)
        save_hypergraph_json(sample_hypergraph(ModelParams(8, 3, 0.4), 99), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_invalid_sample_rejected(self):
        params = ModelParams(6, 3, 0.5)
        with pytest.raises(ValueError):
            HypergraphSample(params=params, edges=((1, 2),), seed=0)
        with pytest.raises(ValueError):
            HypergraphSample(params=params, edges=((1, 2, 3), (1, 2, 3)), seed=0)
