import pytest

from py_causal_paths.counter import count_causal_paths
from py_causal_paths.enums import Multiplicity
from py_causal_paths.model import CountParameters, TemporalLinkSequence
from py_causal_paths.oracle import (
    baseline_count, brute_force_count, build_time_unfolded_dag, diff_counts, iter_maximal_paths, window_scan_count,
)
from py_causal_paths.types import EnumerationCapExceeded

from conftest import TOY_COUNTS, random_records

CHAIN = [("a", "b", 1), ("b", "c", 2), ("c", "d", 3)]


def labelled(sequence, counts):
    return counts.labelled(sequence.node_table)


class TestBruteForce:
    def test_toy(self, toy):
        assert labelled(toy, brute_force_count(toy, CountParameters(2, 2))) == TOY_COUNTS

    def test_gap_larger_than_delta(self):
        sequence = TemporalLinkSequence.from_tuples([("a", "b", 1), ("b", "c", 3)])
        assert labelled(sequence, brute_force_count(sequence, CountParameters(1, 2))) == {("a", "b"): 1, ("b", "c"): 1}

    def test_two_continuations(self):
        sequence = TemporalLinkSequence.from_tuples([("a", "b", 1), ("b", "c", 2), ("b", "c", 3)])
        assert labelled(sequence, brute_force_count(sequence, CountParameters(2, 2))) == {
            ("a", "b"): 1, ("b", "c"): 2, ("a", "b", "c"): 2,
        }

    def test_cap_refuses(self, toy):
        with pytest.raises(EnumerationCapExceeded) as e:
            brute_force_count(toy, CountParameters(2, 2), cap=5)
        assert e.value.cap == 5
        assert e.value.exit_code == 3


class TestTimeUnfoldedDag:
    def test_toy_edges(self, toy):
        dag = build_time_unfolded_dag(toy, 2)
        # (a,b,1) and (a,b,2) both continue with (b,c,3)
        assert (0, 3) in dag.dag_edges
        assert (1, 3) in dag.dag_edges
        assert {(3, 6), (4, 6), (5, 6)} <= set(dag.dag_edges)
        assert sorted(dag.roots) == [0, 1, 4, 5]
        assert sorted(dag.leaves) == [2, 6, 8]

    def test_single_link(self):
        dag = build_time_unfolded_dag(TemporalLinkSequence.from_tuples([("a", "b", 1)]), 1)
        assert dag.dag_nodes == [0]
        assert dag.dag_edges == []
        assert dag.roots == [0]
        assert dag.leaves == [0]

    def test_delta_one(self):
        dag = build_time_unfolded_dag(TemporalLinkSequence.from_tuples([("a", "b", 1), ("b", "c", 2)]), 1)
        assert dag.dag_edges == [(0, 1)]

    def test_equal_timestamps_not_connected(self):
        dag = build_time_unfolded_dag(TemporalLinkSequence.from_tuples([("a", "b", 1), ("b", "c", 1)]), 3)
        assert dag.dag_edges == []

    def test_maximal_paths_of_chain(self):
        dag = build_time_unfolded_dag(TemporalLinkSequence.from_tuples(CHAIN), 1)
        assert list(iter_maximal_paths(dag)) == [[0, 1, 2]]


class TestBaseline:
    def test_toy(self, toy):
        assert labelled(toy, baseline_count(toy, CountParameters(2, 2))) == TOY_COUNTS

    def test_empty(self):
        assert len(baseline_count(TemporalLinkSequence([]), CountParameters(2, 2))) == 0

    def test_chain(self):
        sequence = TemporalLinkSequence.from_tuples(CHAIN)
        assert labelled(sequence, baseline_count(sequence, CountParameters(1, 3))) == {
            ("a", "b"): 1, ("b", "c"): 1, ("c", "d"): 1,
            ("a", "b", "c"): 1, ("b", "c", "d"): 1, ("a", "b", "c", "d"): 1,
        }

    def test_per_maximal_path_counts_shared_instances_repeatedly(self, toy):
        counts = labelled(toy, baseline_count(toy, CountParameters(2, 2), multiplicity=Multiplicity.PER_MAXIMAL_PATH))
        # (c,d,5) lies on four root-to-leaf paths
        assert counts[("c", "d")] == 4
        assert counts[("a", "b", "c")] == 2

    def test_cap_refuses(self, toy):
        with pytest.raises(EnumerationCapExceeded):
            baseline_count(toy, CountParameters(2, 2), cap=1)

    @pytest.mark.parametrize("seed", range(40))
    def test_matches_brute_force(self, seed):
        sequence = TemporalLinkSequence.from_tuples(random_records(seed, 4 + seed % 4, 15 + seed % 15, horizon=15))
        params = CountParameters(1 + seed % 3, 1 + seed % 4)
        assert diff_counts(brute_force_count(sequence, params), baseline_count(sequence, params)) == {}


@pytest.mark.parametrize("seed", range(10))
def test_window_scan_matches_brute_force(seed):
    sequence = TemporalLinkSequence.from_tuples(random_records(seed, 4, 60))
    params = CountParameters(1 + seed % 3, 3)
    assert window_scan_count(sequence, params) == brute_force_count(sequence, params)


def test_diff_counts(toy):
    params = CountParameters(2, 2)
    counts = count_causal_paths(toy, params)
    other = counts.copy()
    path = next(iter(counts))
    other.add_path(path, 1)
    assert diff_counts(counts, other) == {path: (counts.count(path), counts.count(path) + 1)}


@pytest.mark.parametrize("seed", range(20))
def test_dag_edges_are_length_two_instances(seed):
    sequence = TemporalLinkSequence.from_tuples(random_records(seed, 3 + seed % 5, 40, horizon=20))
    delta = [1, 2, 3, 5, None][seed % 5]
    dag = build_time_unfolded_dag(sequence, delta)
    assert len(dag.dag_edges) == brute_force_count(sequence, CountParameters(delta, 2)).total(length=2)
