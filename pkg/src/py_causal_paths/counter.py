"""
Streaming causal path counter.

Links are consumed in chronological order. Every link keeps the counter of all causal
path instances that end with it for as long as it stays within delta of the newest link;
a new link (s, d, t) extends the counters of window links that end in s and happened
strictly before t.
"""
import collections
import json
import logging
from typing import Deque, Dict, Iterable, List, Optional, TextIO, Tuple

import attr

from .dto import DataModel
from .model import (
    CountParameters, MAX_COUNT, NodeId, NodeTable, Path, PathCountMap, TemporalLinkSequence, TimeStampedLink,
)
from .types import CountOverflowError, Deadline, LoadError, OrderViolationError, UsageError

log = logging.getLogger(__name__)

SNAPSHOT_VERSION = 1
DEADLINE_CHECK_EVERY = 1024


def counter_sum(a: PathCountMap, b: PathCountMap) -> PathCountMap:
    return a + b


def counter_extend(c: PathCountMap, n: NodeId, max_length: int) -> PathCountMap:
    if max_length < 1:
        raise UsageError(f"max_length must be >= 1, got {max_length}")
    return c.extended(n, max_length)


@attr.s(slots=True)
class WindowEntry:
    link: TimeStampedLink = attr.ib()
    counts: PathCountMap = attr.ib()


@attr.s(repr=False)
class CounterState:
    params: CountParameters = attr.ib()
    window: Deque[WindowEntry] = attr.ib(factory=collections.deque)
    counts: PathCountMap = attr.ib(factory=PathCountMap)
    links_processed: int = attr.ib(default=0)
    last_timestamp: Optional[int] = attr.ib(default=None)
    peak_window: int = attr.ib(default=0)
    # window entries grouped by the node their link points to, in arrival order
    _by_head: Dict[NodeId, Deque[WindowEntry]] = attr.ib(factory=dict, init=False)

    def __attrs_post_init__(self):
        for entry in self.window:
            self._by_head.setdefault(entry.link.target, collections.deque()).append(entry)

    def _evict(self, timestamp: int) -> None:
        if self.params.delta is None:
            return
        horizon = timestamp - self.params.delta
        window = self.window
        while window and window[0].link.timestamp < horizon:
            entry = window.popleft()
            heads = self._by_head[entry.link.target]
            heads.popleft()
            if not heads:
                del self._by_head[entry.link.target]

    def process_link(self, link: TimeStampedLink) -> PathCountMap:
        """Count the causal path instances ending with `link` and fold them into the totals."""
        t = link.timestamp
        if self.last_timestamp is not None and t < self.last_timestamp:
            raise OrderViolationError(self.links_processed, t, self.last_timestamp)

        # nothing is changed until c_i is known to fit into the totals
        horizon = None if self.params.delta is None else t - self.params.delta
        max_length = self.params.max_length
        target = link.target
        c_i = PathCountMap({Path((link.source, target)): 1})
        entries = c_i.entries
        for entry in self._by_head.get(link.source, ()):
            if horizon is not None and entry.link.timestamp < horizon:
                continue
            if entry.link.timestamp >= t:
                # same timestamp: links at equal times never continue each other
                break
            for path, count in entry.counts.entries.items():
                if len(path) <= max_length:
                    key = Path(path + (target,))
                    total = entries.get(key, 0) + count
                    if total > MAX_COUNT:
                        raise CountOverflowError(f"count of path {tuple(key)} exceeds {MAX_COUNT}")
                    entries[key] = total

        self.counts.add(c_i)
        self._evict(t)
        entry = WindowEntry(link, c_i)
        self.window.append(entry)
        self._by_head.setdefault(target, collections.deque()).append(entry)
        if len(self.window) > self.peak_window:
            self.peak_window = len(self.window)
        self.links_processed += 1
        self.last_timestamp = t
        return c_i

    def process_links(self, links: Iterable[TimeStampedLink], deadline: Optional[Deadline] = None) -> "CounterState":
        deadline = deadline or Deadline()
        for i, link in enumerate(links):
            self.process_link(link)
            if i % DEADLINE_CHECK_EVERY == 0:
                deadline.check()
                if i and i % (DEADLINE_CHECK_EVERY * 256) == 0:
                    log.debug("processed %d links, window size %d, %d distinct paths", self.links_processed, len(self.window), len(self.counts))
        return self

    def snapshot(self, table: NodeTable) -> "StateSnapshot":
        return StateSnapshot(
            version=SNAPSHOT_VERSION,
            delta=self.params.delta,
            max_length=self.params.max_length,
            links_processed=self.links_processed,
            last_timestamp=self.last_timestamp,
            peak_window=self.peak_window,
            nodes=list(table.labels),
            window=[
                WindowSnapshot(
                    source=e.link.source, target=e.link.target, timestamp=e.link.timestamp,
                    counts=CountsSnapshot.of(e.counts)
                ) for e in self.window
            ],
            totals=CountsSnapshot.of(self.counts),
        )

    @classmethod
    def restore(cls, snapshot: "StateSnapshot") -> Tuple["CounterState", NodeTable]:
        if snapshot.version != SNAPSHOT_VERSION:
            raise LoadError(f"unsupported counter snapshot version {snapshot.version} (expected {SNAPSHOT_VERSION})")
        table = NodeTable(list(snapshot.nodes))
        n_nodes = len(table)
        previous: Optional[int] = None
        for w in snapshot.window:
            if not (0 <= w.source < n_nodes and 0 <= w.target < n_nodes):
                raise LoadError(f"snapshot window link ({w.source}, {w.target}, {w.timestamp}) refers to an unknown node")
            if previous is not None and w.timestamp < previous:
                raise LoadError(f"snapshot window is not chronological: {w.timestamp} follows {previous}")
            if snapshot.last_timestamp is None or w.timestamp > snapshot.last_timestamp:
                raise LoadError(f"snapshot window link at {w.timestamp} is newer than the last processed link "
                                f"({snapshot.last_timestamp})")
            previous = w.timestamp
        window = collections.deque(
            WindowEntry(TimeStampedLink(w.source, w.target, w.timestamp), w.counts.to_map()) for w in snapshot.window
        )
        counts = snapshot.totals.to_map()
        for where, c in [("totals", counts)] + [(f"window entry {i}", e.counts) for i, e in enumerate(window)]:
            unknown = next((p for p in c if not all(0 <= n < n_nodes for n in p)), None)
            if unknown is not None:
                raise LoadError(f"snapshot {where} path {tuple(unknown)} refers to an unknown node")
        state = cls(
            params=CountParameters(snapshot.delta, snapshot.max_length),
            window=window,
            counts=counts,
            links_processed=snapshot.links_processed,
            last_timestamp=snapshot.last_timestamp,
            peak_window=snapshot.peak_window,
        )
        return state, table

    def __repr__(self) -> str:
        return (f"CounterState({self.params}, links={self.links_processed}, window={len(self.window)}, "
                f"paths={len(self.counts)})")


def _load_int_rows(name: str):
    def load(data: dict) -> list:
        rows = data.get(name)
        if not isinstance(rows, list) or not all(
            isinstance(r, list) and all(isinstance(x, int) and not isinstance(x, bool) for x in r) for r in rows
        ):
            raise LoadError(f"CountsSnapshot -> {name}: expected a list of integer lists")
        return rows
    return load


def _load_ints(name: str):
    def load(data: dict) -> list:
        values = data.get(name)
        if not isinstance(values, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in values):
            raise LoadError(f"CountsSnapshot -> {name}: expected a list of integers")
        return values
    return load


@attr.s
class CountsSnapshot(DataModel):
    # counters can hold millions of entries; bypass per-element field processing
    CUSTOM_LOAD = {"paths": _load_int_rows("paths"), "counts": _load_ints("counts")}
    CUSTOM_REPRESENTATION = {"paths": list, "counts": list}

    paths: List[List[int]] = attr.ib()
    counts: List[int] = attr.ib()

    @classmethod
    def of(cls, counts: PathCountMap) -> "CountsSnapshot":
        return cls(paths=[list(p) for p in counts], counts=list(counts.entries.values()))

    def to_map(self) -> PathCountMap:
        if len(self.paths) != len(self.counts):
            raise LoadError(f"snapshot holds {len(self.paths)} paths but {len(self.counts)} counts")
        if any(c > MAX_COUNT for c in self.counts):
            raise CountOverflowError(f"snapshot count exceeds {MAX_COUNT}")
        return PathCountMap.from_counts(zip(self.paths, self.counts))


@attr.s
class WindowSnapshot(DataModel):
    source: int = attr.ib()
    target: int = attr.ib()
    timestamp: int = attr.ib()
    counts: CountsSnapshot = attr.ib()


@attr.s
class StateSnapshot(DataModel):
    FORCE_NONE = ["delta", "last_timestamp"]

    version: int = attr.ib()
    delta: Optional[int] = attr.ib()
    max_length: int = attr.ib()
    links_processed: int = attr.ib()
    last_timestamp: Optional[int] = attr.ib()
    peak_window: int = attr.ib()
    nodes: List[str] = attr.ib()
    window: List[WindowSnapshot] = attr.ib()
    totals: CountsSnapshot = attr.ib()


def dump_state(state: CounterState, table: NodeTable, fp: TextIO) -> None:
    json.dump(state.snapshot(table).represent(), fp, separators=(",", ":"))
    fp.write("\n")


def load_state(fp: TextIO) -> Tuple[CounterState, NodeTable]:
    try:
        data = json.load(fp)
    except json.JSONDecodeError as e:
        raise LoadError(f"counter snapshot is not valid JSON: {e}") from e
    return CounterState.restore(StateSnapshot.load_from_dict(data))


def run_counter(sequence: Iterable[TimeStampedLink], params: CountParameters, deadline: Optional[Deadline] = None) -> CounterState:
    return CounterState(params).process_links(sequence, deadline)


def count_causal_paths(sequence: TemporalLinkSequence, params: CountParameters, deadline: Optional[Deadline] = None) -> PathCountMap:
    """Count all instances of causal paths of length <= K with consecutive gaps <= delta."""
    state = run_counter(sequence, params, deadline)
    log.info("counted %d distinct paths (%d instances) in %d links, peak window %d",
             len(state.counts), state.counts.total(), state.links_processed, state.peak_window)
    return state.counts
