"""
Reference counters.

brute_force_count enumerates every link sequence that satisfies the causal path
conditions and is the ground truth for the streaming counter. baseline_count is the
time-unfolded DAG method: build a DAG over link occurrences, enumerate its maximal
root-to-leaf paths and count the subpaths they contain. window_scan_count is the
streaming algorithm written as a plain scan over the whole window.
"""
import bisect
import logging
from typing import Dict, List, Optional, Set, Tuple

import attr
import networkx as nx

from .enums import Multiplicity
from .model import CountParameters, NodeId, Path, PathCountMap, TemporalLinkSequence
from .types import Deadline, EnumerationCapExceeded

log = logging.getLogger(__name__)

DEFAULT_BRUTE_FORCE_CAP = 10 ** 7
DEFAULT_BASELINE_CAP = 10 ** 6


def _index_by(sequence: TemporalLinkSequence, attribute: str) -> Dict[NodeId, Tuple[List[int], List[int]]]:
    """node -> (timestamps, link indices) of links whose `attribute` is that node, in chronological order"""
    ret: Dict[NodeId, Tuple[List[int], List[int]]] = {}
    for i, link in enumerate(sequence.links):
        times, indices = ret.setdefault(getattr(link, attribute), ([], []))
        times.append(link.timestamp)
        indices.append(i)
    return ret


def brute_force_count(sequence: TemporalLinkSequence, params: CountParameters, cap: int = DEFAULT_BRUTE_FORCE_CAP,
                      deadline: Optional[Deadline] = None) -> PathCountMap:
    deadline = deadline or Deadline()
    links = sequence.links
    by_source = _index_by(sequence, "source")
    delta = params.delta
    max_length = params.max_length
    ret = PathCountMap()
    entries = ret.entries
    enumerated = 0

    for start, first in enumerate(links):
        stack: List[Tuple[int, Path]] = [(start, Path((first.source, first.target)))]
        while stack:
            index, path = stack.pop()
            enumerated += 1
            if enumerated > cap:
                raise EnumerationCapExceeded("link sequences", cap)
            if enumerated % 4096 == 0:
                deadline.check()
            entries[path] = entries.get(path, 0) + 1
            if len(path) > max_length:
                continue
            last = links[index]
            candidates = by_source.get(last.target)
            if candidates is None:
                continue
            times, indices = candidates
            lo = bisect.bisect_right(times, last.timestamp)
            hi = len(times) if delta is None else bisect.bisect_right(times, last.timestamp + delta)
            for k in range(lo, hi):
                following = links[indices[k]]
                stack.append((indices[k], Path(path + (following.target,))))

    log.debug("brute force enumerated %d link sequences", enumerated)
    return ret


@attr.s(repr=False)
class TimeUnfoldedDag:
    """DAG whose nodes are link occurrences (indices into the sequence) and whose edges are causal continuations."""
    sequence: TemporalLinkSequence = attr.ib()
    delta: Optional[int] = attr.ib()
    graph: nx.DiGraph = attr.ib()

    @property
    def dag_nodes(self) -> List[int]:
        return list(self.graph.nodes)

    @property
    def dag_edges(self) -> List[Tuple[int, int]]:
        return list(self.graph.edges)

    @property
    def roots(self) -> List[int]:
        return [n for n, degree in self.graph.in_degree() if degree == 0]

    @property
    def leaves(self) -> List[int]:
        return [n for n, degree in self.graph.out_degree() if degree == 0]

    def __repr__(self) -> str:
        return f"TimeUnfoldedDag(nodes={self.graph.number_of_nodes()}, edges={self.graph.number_of_edges()})"


def build_time_unfolded_dag(sequence: TemporalLinkSequence, delta: Optional[int]) -> TimeUnfoldedDag:
    graph = nx.DiGraph()
    graph.add_nodes_from(range(sequence.n_links))
    # links seen so far, grouped by target node
    by_target: Dict[NodeId, Tuple[List[int], List[int]]] = {}
    for j, link in enumerate(sequence.links):
        earlier = by_target.get(link.source)
        if earlier is not None:
            times, indices = earlier
            lo = 0 if delta is None else bisect.bisect_left(times, link.timestamp - delta)
            hi = bisect.bisect_left(times, link.timestamp)
            graph.add_edges_from((indices[k], j) for k in range(lo, hi))
        times, indices = by_target.setdefault(link.target, ([], []))
        times.append(link.timestamp)
        indices.append(j)
    ret = TimeUnfoldedDag(sequence, delta, graph)
    log.debug("built %r", ret)
    return ret


def iter_maximal_paths(dag: TimeUnfoldedDag, cap: int = DEFAULT_BASELINE_CAP, deadline: Optional[Deadline] = None):
    """Yield every root-to-leaf path of the DAG as a list of link indices."""
    deadline = deadline or Deadline()
    successors = dag.graph.succ
    produced = 0
    for root in dag.roots:
        stack: List[Tuple[int, int]] = [(root, 0)]
        trail: List[int] = []
        while stack:
            node, depth = stack.pop()
            del trail[depth:]
            trail.append(node)
            following = successors[node]
            if not following:
                produced += 1
                if produced > cap:
                    raise EnumerationCapExceeded("root-to-leaf paths", cap)
                if produced % 1024 == 0:
                    deadline.check()
                yield list(trail)
                continue
            for nxt in following:
                stack.append((nxt, depth + 1))


def baseline_count(sequence: TemporalLinkSequence, params: CountParameters, cap: int = DEFAULT_BASELINE_CAP,
                   multiplicity: Multiplicity = Multiplicity.DISTINCT, deadline: Optional[Deadline] = None) -> PathCountMap:
    """
    Count causal paths from the maximal paths of the time-unfolded DAG.

    With Multiplicity.DISTINCT an instance (a run of link indices) shared by several maximal
    paths is counted once, which reproduces the exact instance counts. With
    Multiplicity.PER_MAXIMAL_PATH it is counted once per containing maximal path.
    """
    dag = build_time_unfolded_dag(sequence, params.delta)
    links = sequence.links
    max_length = params.max_length
    ret = PathCountMap()
    entries = ret.entries
    seen: Set[Tuple[int, ...]] = set()
    distinct = multiplicity == Multiplicity.DISTINCT
    n_maximal = 0

    for trail in iter_maximal_paths(dag, cap, deadline):
        n_maximal += 1
        for begin in range(len(trail)):
            nodes = [links[trail[begin]].source]
            for end in range(begin, min(begin + max_length, len(trail))):
                nodes.append(links[trail[end]].target)
                if distinct:
                    instance = tuple(trail[begin:end + 1])
                    if instance in seen:
                        continue
                    seen.add(instance)
                path = Path(nodes)
                entries[path] = entries.get(path, 0) + 1

    log.debug("baseline counted %d maximal paths over %d roots", n_maximal, len(dag.roots))
    return ret


def window_scan_count(sequence: TemporalLinkSequence, params: CountParameters) -> PathCountMap:
    """The streaming counter with a plain list window that is scanned completely for every link."""
    delta = params.delta
    max_length = params.max_length
    window: List[Tuple[NodeId, NodeId, int, Dict[Path, int]]] = []
    c: Dict[Path, int] = {}
    for link in sequence.links:
        s, d, t = link.source, link.target, link.timestamp
        c_i: Dict[Path, int] = {Path((s, d)): 1}
        kept = []
        for s_j, d_j, t_j, c_j in window:
            if delta is not None and t_j < t - delta:
                continue
            kept.append((s_j, d_j, t_j, c_j))
            if d_j == s and t > t_j:
                for p, count in c_j.items():
                    if p.length < max_length:
                        key = p.extended(d)
                        c_i[key] = c_i.get(key, 0) + count
        for p, count in c_i.items():
            c[p] = c.get(p, 0) + count
        kept.append((s, d, t, c_i))
        window = kept
    return PathCountMap(c)


def diff_counts(expected: PathCountMap, actual: PathCountMap) -> Dict[Path, Tuple[int, int]]:
    """path -> (expected, actual) for every path whose counts differ"""
    return {
        p: (expected.count(p), actual.count(p))
        for p in set(expected) | set(actual)
        if expected.count(p) != actual.count(p)
    }
