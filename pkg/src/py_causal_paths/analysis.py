"""
Complexity instrumentation: the time-aggregated graph, its dominant adjacency eigenvalue
(called "algebraic connectivity" in the causal path literature, although that name
usually refers to the second smallest Laplacian eigenvalue), walk counts with their
spectral upper bound, window load measurements and a synthetic data generator.
"""
import logging
import math
from typing import List, Optional, Sequence, Tuple

import attr
import numpy as np
import scipy.sparse as sps

from .dto import DataModel
from .model import NodeTable, TemporalLinkSequence, TimeStampedLink
from .types import NonConvergenceError, UsageError, ValidationError

log = logging.getLogger(__name__)

INT64_MAX = np.iinfo(np.int64).max
DEFAULT_TOLERANCE = 1e-9
DEFAULT_MAX_ITERATIONS = 10_000


@attr.s(repr=False)
class AggregatedGraph:
    """Undirected, binary, time-aggregated graph; self-loops appear as A_ii = 1."""
    n_nodes: int = attr.ib()
    adjacency: sps.csr_matrix = attr.ib()

    @classmethod
    def from_edges(cls, n_nodes: int, pairs: Sequence[Tuple[int, int]]) -> "AggregatedGraph":
        undirected = {(min(i, j), max(i, j)) for i, j in pairs}
        rows: List[int] = []
        cols: List[int] = []
        for i, j in undirected:
            rows.append(i)
            cols.append(j)
            if i != j:
                rows.append(j)
                cols.append(i)
        adjacency = sps.csr_matrix(
            (np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(n_nodes, n_nodes), dtype=np.int64
        )
        return cls(n_nodes, adjacency)

    def edge_pairs(self) -> List[Tuple[int, int]]:
        upper = sps.triu(self.adjacency).tocoo()
        return sorted(zip(upper.row.tolist(), upper.col.tolist()))

    @property
    def n_edges(self) -> int:
        return len(self.edge_pairs())

    def dense(self) -> np.ndarray:
        return self.adjacency.toarray()

    def __repr__(self) -> str:
        return f"AggregatedGraph(|V|={self.n_nodes}, |E|={self.n_edges})"


def aggregate(sequence: TemporalLinkSequence) -> AggregatedGraph:
    return AggregatedGraph.from_edges(sequence.n_nodes, [(x.source, x.target) for x in sequence.links])


def lambda_max(graph: AggregatedGraph, tolerance: float = DEFAULT_TOLERANCE, max_iterations: int = DEFAULT_MAX_ITERATIONS) -> float:
    """
    Dominant eigenvalue of the symmetric adjacency matrix by power iteration from the all-ones vector.

    Stops once the residual ||(A + I) x - rho x|| is at most tolerance * max(1, |rho|); for a
    symmetric matrix the residual bounds the distance of rho to the nearest eigenvalue.
    """
    if graph.n_nodes < 1:
        raise ValidationError("lambda_max of a graph without nodes is undefined")
    if tolerance <= 0:
        raise UsageError(f"tolerance must be > 0, got {tolerance}")
    adjacency = graph.adjacency.astype(np.float64)
    x = np.full(graph.n_nodes, 1.0 / math.sqrt(graph.n_nodes))
    rayleigh = 1.0
    for iteration in range(1, max_iterations + 1):
        # iterate on A + I: on bipartite graphs -lambda_max has the same magnitude as lambda_max
        y = adjacency @ x + x
        rayleigh = float(x @ y)
        residual = float(np.linalg.norm(y - rayleigh * x))
        if residual <= tolerance * max(1.0, abs(rayleigh)):
            log.debug("power iteration converged after %d iterations (residual %.3g)", iteration, residual)
            return rayleigh - 1.0
        x = y / np.linalg.norm(y)
    raise NonConvergenceError(max_iterations, rayleigh - 1.0)


def dense_lambda_max(graph: AggregatedGraph) -> float:
    if graph.n_nodes < 1:
        raise ValidationError("lambda_max of a graph without nodes is undefined")
    return float(np.linalg.eigvalsh(graph.dense().astype(np.float64)).max())


@attr.s
class LengthBound(DataModel):
    FORCE_NONE = ["exact"]

    length: int = attr.ib()
    exact: Optional[int] = attr.ib()
    spectral: float = attr.ib()
    saturated: bool = attr.ib(default=False)


@attr.s
class WalkCountBound(DataModel):
    FORCE_NONE = ["exact_total"]

    n_nodes: int = attr.ib()
    lambda_max: float = attr.ib()
    per_length: List[LengthBound] = attr.ib()
    exact_total: Optional[int] = attr.ib()
    capital_lambda: float = attr.ib()
    saturated: bool = attr.ib(default=False)


def walk_counts(graph: AggregatedGraph, max_length: int) -> List[Optional[int]]:
    """sum_ij (A^k)_ij for k = 1..max_length via products with the all-ones vector; None once int64 would overflow."""
    if max_length < 1:
        raise UsageError(f"max_length must be >= 1, got {max_length}")
    ret: List[Optional[int]] = []
    x = np.ones(graph.n_nodes, dtype=np.int64)
    max_degree = int(graph.adjacency.sum(axis=1).max()) if graph.n_nodes else 0
    saturated = False
    for k in range(1, max_length + 1):
        if not saturated:
            largest = int(x.max()) if graph.n_nodes else 0
            if largest * max_degree * max(graph.n_nodes, 1) > INT64_MAX:
                saturated = True
                log.warning("exact walk counts saturate int64 at length %d", k)
            else:
                x = graph.adjacency @ x
        ret.append(None if saturated else int(x.sum()))
    return ret


def path_count_bound(graph: AggregatedGraph, max_length: int, lambda_value: Optional[float] = None) -> WalkCountBound:
    if lambda_value is None:
        lambda_value = lambda_max(graph) if graph.n_nodes else 0.0
    exact = walk_counts(graph, max_length)
    per_length = [
        LengthBound(length=k, exact=e, spectral=graph.n_nodes * lambda_value ** k, saturated=e is None)
        for k, e in enumerate(exact, start=1)
    ]
    saturated = any(x.saturated for x in per_length)
    return WalkCountBound(
        n_nodes=graph.n_nodes,
        lambda_max=lambda_value,
        per_length=per_length,
        exact_total=None if saturated else sum(e for e in exact if e is not None),
        capital_lambda=sum(x.spectral for x in per_length),
        saturated=saturated,
    )


def verify_walk_bound(graph: AggregatedGraph, max_length: int = 6, relative_slack: float = 1e-6,
                      lambda_value: Optional[float] = None) -> List[LengthBound]:
    """Lengths at which the exact walk count exceeds |V| * lambda_max^k; each one is logged."""
    bound = path_count_bound(graph, max_length, lambda_value)
    violations = [
        x for x in bound.per_length
        if x.exact is not None and x.exact > x.spectral * (1 + relative_slack)
    ]
    for x in violations:
        log.warning("walk count %d at length %d exceeds spectral bound %.6g", x.exact, x.length, x.spectral)
    return violations


@attr.s(frozen=True)
class WindowLoad:
    m: int = attr.ib()
    m_delta: int = attr.ib()
    m_delta_open: int = attr.ib()


def measure_window_load(sequence: TemporalLinkSequence, delta: Optional[int]) -> WindowLoad:
    """
    m: most links sharing one timestamp. m_delta: peak number of links the counter holds in
    its window [t - delta, t] right after processing a link. m_delta_open: the same for the
    half-open window (t - delta, t], which never exceeds m * delta.
    """
    links = sequence.links
    m = 0
    run = 0
    closed_start = 0
    open_start = 0
    m_delta = 0
    m_delta_open = 0
    for i, link in enumerate(links):
        t = link.timestamp
        run = run + 1 if i and links[i - 1].timestamp == t else 1
        m = max(m, run)
        if delta is not None:
            while links[closed_start].timestamp < t - delta:
                closed_start += 1
            while links[open_start].timestamp <= t - delta:
                open_start += 1
        m_delta = max(m_delta, i + 1 - closed_start)
        m_delta_open = max(m_delta_open, i + 1 - open_start)
    return WindowLoad(m, m_delta, m_delta_open)


def capital_lambda(n_nodes: int, lambda_value: float, max_length: int) -> float:
    """Upper bound on the number of paths of length 1..max_length: sum of |V| * lambda^l."""
    return sum(n_nodes * lambda_value ** l for l in range(1, max_length + 1))


@attr.s
class SpectralBound(DataModel):
    FORCE_NONE = ["delta", "complexity_detailed"]
    CUSTOM_REPRESENTATION = {"delta": lambda v: "inf" if v is None else v}

    n_nodes: int = attr.ib()
    n_links: int = attr.ib()
    delta: Optional[int] = attr.ib()
    max_length: int = attr.ib()
    lambda_max: float = attr.ib()
    m: int = attr.ib()
    m_delta: int = attr.ib()
    m_delta_open: int = attr.ib()
    walks: WalkCountBound = attr.ib()
    complexity_headline: float = attr.ib()
    complexity_detailed: Optional[float] = attr.ib()
    bound_holds: bool = attr.ib()

    def lambda_bound(self, k: int) -> float:
        return self.n_nodes * self.lambda_max ** k

    def capital_lambda(self, k: Optional[int] = None) -> float:
        return capital_lambda(self.n_nodes, self.lambda_max, self.max_length if k is None else k)


def spectral_report(sequence: TemporalLinkSequence, max_length: int, delta: Optional[int]) -> SpectralBound:
    """Aggregated-graph statistics and both forms of the counter's complexity bound evaluated for the data."""
    graph = aggregate(sequence)
    lam = lambda_max(graph) if graph.n_nodes else 0.0
    walks = path_count_bound(graph, max_length, lam)
    load = measure_window_load(sequence, delta)
    n, v, k = sequence.n_links, graph.n_nodes, max_length
    # O(N |V| K^2 [m_delta lambda^(K-2) + lambda^K])
    headline = n * v * k ** 2 * (load.m_delta * lam ** max(k - 2, 0) + lam ** k)
    # O(N K [m_delta delta Lambda(K-2) + Lambda(K)]), undefined for an infinite delta
    detailed = None
    if delta is not None:
        detailed = n * k * (load.m_delta * delta * capital_lambda(v, lam, k - 2) + capital_lambda(v, lam, k))
    violations = verify_walk_bound(graph, max_length, lambda_value=lam)
    return SpectralBound(
        n_nodes=v,
        n_links=n,
        delta=delta,
        max_length=max_length,
        lambda_max=lam,
        m=load.m,
        m_delta=load.m_delta,
        m_delta_open=load.m_delta_open,
        walks=walks,
        complexity_headline=float(headline),
        complexity_detailed=None if detailed is None else float(detailed),
        bound_holds=not violations,
    )


def synth_generate(n_nodes: int, n_links: int, time_horizon: int, edge_density: float, seed: int) -> TemporalLinkSequence:
    """
    Random temporal network: a directed graph with each ordered pair (no self-loops) present
    with probability edge_density, then n_links events on uniformly chosen edges at uniform
    times 1..time_horizon, in chronological order.
    """
    if n_nodes < 1 or time_horizon < 1 or n_links < 0:
        raise UsageError(f"invalid generator sizes: nodes={n_nodes}, links={n_links}, horizon={time_horizon}")
    if not 0 < edge_density <= 1:
        raise UsageError(f"edge_density must be in (0, 1], got {edge_density}")
    rng = np.random.default_rng(seed)
    mask = rng.random((n_nodes, n_nodes)) < edge_density
    np.fill_diagonal(mask, False)
    sources, targets = np.nonzero(mask)
    if len(sources) == 0:
        raise ValidationError(f"edge_density {edge_density} yields no edges on {n_nodes} nodes")
    chosen = rng.integers(0, len(sources), size=n_links)
    times = rng.integers(1, time_horizon + 1, size=n_links)
    order = np.argsort(times, kind="stable")

    table = NodeTable()
    links = [
        TimeStampedLink(table.intern(f"v{s}"), table.intern(f"v{d}"), t)
        for s, d, t in zip(sources[chosen[order]].tolist(), targets[chosen[order]].tolist(), times[order].tolist())
    ]
    log.info("generated %d links on %d aggregated edges between %d nodes", n_links, len(sources), n_nodes)
    return TemporalLinkSequence(links, table)
