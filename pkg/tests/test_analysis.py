import math

import numpy as np
import pytest

from py_causal_paths.analysis import (
    AggregatedGraph, aggregate, capital_lambda, dense_lambda_max, lambda_max, measure_window_load, path_count_bound,
    spectral_report, synth_generate, verify_walk_bound, walk_counts,
)
from py_causal_paths.model import TemporalLinkSequence, format_link_record
from py_causal_paths.types import NonConvergenceError, UsageError, ValidationError

from conftest import random_records

GOLDEN_RATIO = 2 * math.cos(math.pi / 5)


def random_graph(seed: int) -> AggregatedGraph:
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 9))
    pairs = [(i, j) for i in range(n) for j in range(i, n) if rng.random() < 0.4]
    return AggregatedGraph.from_edges(n, pairs)


class TestAggregate:
    def test_toy(self, toy):
        graph = aggregate(toy)
        labels = toy.node_table.labels
        assert graph.n_nodes == 4
        assert {tuple(sorted((labels[i], labels[j]))) for i, j in graph.edge_pairs()} == {("a", "b"), ("b", "c"), ("c", "d")}
        assert (graph.dense() == graph.dense().T).all()

    def test_empty(self):
        graph = aggregate(TemporalLinkSequence([]))
        assert graph.n_nodes == 0
        assert graph.n_edges == 0

    def test_self_loop(self):
        graph = aggregate(TemporalLinkSequence.from_tuples([("a", "a", 1)]))
        assert graph.dense().tolist() == [[1]]

    def test_binary(self):
        graph = aggregate(TemporalLinkSequence.from_tuples([("a", "b", 1), ("b", "a", 2), ("a", "b", 3)]))
        assert graph.dense().tolist() == [[0, 1], [1, 0]]


class TestLambdaMax:
    def test_complete_graph(self):
        graph = AggregatedGraph.from_edges(5, [(i, j) for i in range(5) for j in range(i + 1, 5)])
        assert lambda_max(graph) == pytest.approx(4.0, rel=1e-6)

    def test_single_edge(self):
        assert lambda_max(AggregatedGraph.from_edges(2, [(0, 1)])) == pytest.approx(1.0, rel=1e-6)

    def test_toy_path_graph(self, toy):
        assert lambda_max(aggregate(toy)) == pytest.approx(GOLDEN_RATIO, rel=1e-6)

    def test_no_edges(self):
        assert lambda_max(AggregatedGraph.from_edges(3, [])) == pytest.approx(0.0, abs=1e-9)

    def test_no_nodes(self):
        with pytest.raises(ValidationError):
            lambda_max(AggregatedGraph.from_edges(0, []))

    def test_non_convergence(self):
        graph = AggregatedGraph.from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)])
        with pytest.raises(NonConvergenceError) as e:
            lambda_max(graph, tolerance=1e-15, max_iterations=2)
        assert e.value.iterations == 2

    @pytest.mark.parametrize("n, max_iterations", [(50, 10_000), (80, 10_000), (200, 100_000)])
    def test_long_path_graph_within_tolerance(self, n, max_iterations):
        # small spectral gap: the estimate stagnates long before it is accurate
        graph = AggregatedGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])
        exact = 2 * math.cos(math.pi / (n + 1))
        assert abs(lambda_max(graph, max_iterations=max_iterations) - exact) <= 4e-9

    @pytest.mark.parametrize("seed", range(60))
    def test_matches_dense_eigensolve(self, seed):
        graph = random_graph(seed)
        assert lambda_max(graph) == pytest.approx(dense_lambda_max(graph), rel=1e-6, abs=1e-6)


class TestWalkBound:
    def test_path_graph(self, toy):
        graph = aggregate(toy)
        assert walk_counts(graph, 2) == [6, 10]
        bound = path_count_bound(graph, 2)
        assert bound.per_length[1].exact == 10
        assert bound.per_length[1].spectral == pytest.approx(4 * GOLDEN_RATIO ** 2)
        assert bound.exact_total == 16
        assert bound.capital_lambda == pytest.approx(capital_lambda(4, GOLDEN_RATIO, 2), rel=1e-6)

    def test_invalid_length(self, toy):
        with pytest.raises(UsageError):
            walk_counts(aggregate(toy), 0)

    @pytest.mark.parametrize("seed", range(60))
    def test_bound_holds(self, seed):
        assert verify_walk_bound(random_graph(seed), max_length=6) == []

    def test_saturation(self):
        n = 40
        graph = AggregatedGraph.from_edges(n, [(i, j) for i in range(n) for j in range(i, n)])
        counts = walk_counts(graph, 30)
        assert counts[0] == n * n
        assert counts[-1] is None
        assert path_count_bound(graph, 30).saturated


class TestWindowLoad:
    def test_toy(self, toy):
        load = measure_window_load(toy, 2)
        assert load.m == 3
        assert load.m_delta == 5
        assert load.m_delta_open == 4
        assert load.m_delta_open <= load.m * 2

    def test_infinite_delta(self, make_sequence):
        sequence = make_sequence(1, n_links=70)
        load = measure_window_load(sequence, None)
        assert load.m_delta == sequence.n_links

    def test_empty(self):
        load = measure_window_load(TemporalLinkSequence([]), 3)
        assert (load.m, load.m_delta, load.m_delta_open) == (0, 0, 0)

    @pytest.mark.parametrize("seed", range(30))
    def test_open_window_bound(self, seed):
        sequence = TemporalLinkSequence.from_tuples(random_records(seed, 5, 200, horizon=40 + seed))
        delta = 1 + seed % 7
        load = measure_window_load(sequence, delta)
        assert load.m_delta_open <= load.m * delta
        assert load.m_delta_open <= load.m_delta <= sequence.n_links


class TestSpectralReport:
    def test_toy(self, toy):
        report = spectral_report(toy, 2, 2)
        assert report.n_nodes == 4
        assert report.m == 3
        assert report.m_delta == 5
        assert report.lambda_max == pytest.approx(GOLDEN_RATIO, rel=1e-6)
        assert report.bound_holds
        assert report.complexity_detailed is not None
        assert report.lambda_bound(2) == pytest.approx(4 * GOLDEN_RATIO ** 2, rel=1e-6)

    def test_infinite_delta(self, toy):
        report = spectral_report(toy, 3, None)
        assert report.complexity_detailed is None
        data = report.represent()
        assert data["delta"] == "inf"
        assert data["complexity_detailed"] is None
        assert len(data["walks"]["per_length"]) == 3

    def test_empty(self):
        report = spectral_report(TemporalLinkSequence([]), 2, 2)
        assert report.n_nodes == 0
        assert report.lambda_max == 0.0


class TestSynth:
    def test_deterministic(self):
        def render(sequence):
            return [format_link_record(x, sequence.node_table) for x in sequence.links]
        first = synth_generate(10, 1000, 500, 0.3, 7)
        second = synth_generate(10, 1000, 500, 0.3, 7)
        assert render(first) == render(second)
        assert first.n_links == 1000
        assert all(1 <= x.timestamp <= 500 for x in first.links)
        assert all(x.source != x.target for x in first.links)

    def test_no_links(self):
        assert synth_generate(5, 0, 10, 0.5, 1).n_links == 0

    def test_no_edges(self):
        with pytest.raises(ValidationError):
            synth_generate(1, 10, 10, 0.5, 1)

    def test_invalid_density(self):
        with pytest.raises(UsageError):
            synth_generate(5, 10, 10, 0.0, 1)
