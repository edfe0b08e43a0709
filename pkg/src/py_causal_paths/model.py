"""
Domain types for time-stamped link data: interned nodes, links, link sequences,
paths and path counters, plus edge-list parsing.
"""
import contextlib
import logging
import sys
from pathlib import Path as FilePath
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, TextIO, Tuple, Union

import attr

from .enums import SortMode
from .types import OrderViolationError, ParseError, UsageError, ValidationError, CountOverflowError

log = logging.getLogger(__name__)

NodeId = int

MAX_COUNT = 2 ** 64 - 1
INFINITE_DELTA_LABELS = ("inf", "infinite", "infinity", "∞")


@attr.s(repr=False)
class NodeTable:
    """Bijection between external node labels and dense ids 0..|V|-1."""
    labels: List[str] = attr.ib(factory=list)
    _ids: Dict[str, NodeId] = attr.ib(factory=dict, init=False, eq=False)

    def __attrs_post_init__(self):
        for node_id, label in enumerate(self.labels):
            if label in self._ids:
                raise ValidationError(f"duplicate node label {label!r}")
            self._ids[label] = node_id

    def intern(self, label: str) -> NodeId:
        node_id = self._ids.get(label)
        if node_id is None:
            node_id = len(self.labels)
            self._ids[label] = node_id
            self.labels.append(label)
        return node_id

    def lookup(self, label: str) -> NodeId:
        try:
            return self._ids[label]
        except KeyError:
            raise ValidationError(f"unknown node label {label!r}") from None

    def resolve(self, node_id: NodeId) -> str:
        return self.labels[node_id]

    def copy(self) -> "NodeTable":
        return NodeTable(list(self.labels))

    def __contains__(self, label: object) -> bool:
        return label in self._ids

    def __len__(self) -> int:
        return len(self.labels)

    def __repr__(self) -> str:
        return f"NodeTable({len(self.labels)} nodes)"


def _non_negative(instance, attribute, value):
    if value < 0:
        raise ValidationError(f"{attribute.name} must be >= 0, got {value}")


@attr.s(frozen=True, slots=True)
class TimeStampedLink:
    source: NodeId = attr.ib()
    target: NodeId = attr.ib()
    timestamp: int = attr.ib(validator=_non_negative)


class Path(tuple):
    """
    Node sequence <n0 ... nl> of a causal path. Equality and hashing are those of the
    underlying tuple, so paths are cheap dictionary keys.
    """
    __slots__ = ()

    @classmethod
    def of(cls, nodes: Iterable[NodeId]) -> "Path":
        ret = cls(nodes)
        if len(ret) < 2:
            raise ValidationError(f"a path needs at least 2 nodes, got {len(ret)}")
        return ret

    @property
    def length(self) -> int:
        return len(self) - 1

    def extended(self, node: NodeId) -> "Path":
        return Path(self + (node,))

    def labels(self, table: NodeTable) -> Tuple[str, ...]:
        return tuple(table.labels[n] for n in self)

    def __repr__(self) -> str:
        return f"Path{tuple.__repr__(self)}"


@attr.s(repr=False)
class PathCountMap:
    """
    Path -> number of instances. Zero counts are never stored. A map is mutated only while
    it is being accumulated; maps handed out by the counters are not changed afterwards.
    """
    entries: Dict[Path, int] = attr.ib(factory=dict)

    @classmethod
    def from_counts(cls, counts: Union[Dict[Tuple[NodeId, ...], int], Iterable[Tuple[Sequence[NodeId], int]]]) -> "PathCountMap":
        items = counts.items() if isinstance(counts, dict) else counts
        ret = cls()
        for nodes, count in items:
            if count < 0:
                raise ValidationError(f"negative count {count} for {tuple(nodes)}")
            if count:
                ret.add_path(Path.of(nodes), count)
        return ret

    def add_path(self, path: Path, count: int = 1) -> None:
        total = self.entries.get(path, 0) + count
        if total > MAX_COUNT:
            raise CountOverflowError(f"count of path {tuple(path)} exceeds {MAX_COUNT}")
        self.entries[path] = total

    def add(self, other: "PathCountMap") -> "PathCountMap":
        """Fold `other` into this map; on overflow nothing is written."""
        entries = self.entries
        totals = [(path, entries.get(path, 0) + count) for path, count in other.entries.items()]
        for path, total in totals:
            if total > MAX_COUNT:
                raise CountOverflowError(f"count of path {tuple(path)} exceeds {MAX_COUNT}")
        entries.update(totals)
        return self

    def __add__(self, other: "PathCountMap") -> "PathCountMap":
        return self.copy().add(other)

    def extended(self, node: NodeId, max_length: int) -> "PathCountMap":
        # len(path) <= K  <=>  ||path|| < K
        return PathCountMap({Path(path + (node,)): count for path, count in self.entries.items() if len(path) <= max_length})

    def count(self, path: Sequence[NodeId]) -> int:
        return self.entries.get(path, 0)  # type: ignore[call-overload]

    def copy(self) -> "PathCountMap":
        return PathCountMap(dict(self.entries))

    def restricted(self, max_length: int) -> "PathCountMap":
        return PathCountMap({p: c for p, c in self.entries.items() if len(p) - 1 <= max_length})

    def distinct(self) -> int:
        return len(self.entries)

    def total(self, length: Optional[int] = None) -> int:
        if length is None:
            return sum(self.entries.values())
        return sum(c for p, c in self.entries.items() if len(p) - 1 == length)

    def by_length(self) -> Dict[int, Tuple[int, int]]:
        """length -> (distinct paths, instances)"""
        ret: Dict[int, Tuple[int, int]] = {}
        for path, count in self.entries.items():
            distinct, instances = ret.get(len(path) - 1, (0, 0))
            ret[len(path) - 1] = (distinct + 1, instances + count)
        return dict(sorted(ret.items()))

    def labelled(self, table: NodeTable) -> Dict[Tuple[str, ...], int]:
        return {path.labels(table): count for path, count in self.entries.items()}

    def items(self):
        return self.entries.items()

    def __contains__(self, path: object) -> bool:
        return path in self.entries

    def __iter__(self) -> Iterator[Path]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __repr__(self) -> str:
        inner = ", ".join(f"{tuple(p)}: {c}" for p, c in self.entries.items())
        return f"PathCountMap({{{inner}}})"


def parse_delta(value: Union[str, int, None]) -> Optional[int]:
    """Parse a maximum time difference; None stands for an infinite delta."""
    if value is None:
        return None
    if isinstance(value, str):
        if value.strip().lower() in INFINITE_DELTA_LABELS:
            return None
        try:
            value = int(value.strip())
        except ValueError:
            raise UsageError(f"delta must be a positive integer or 'inf', got {value!r}") from None
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise UsageError(f"delta must be >= 1 or 'inf', got {value!r}")
    return value


def format_delta(delta: Optional[int]) -> str:
    return "inf" if delta is None else str(delta)


def _check_delta(instance, attribute, value):
    if value is not None and (isinstance(value, bool) or not isinstance(value, int) or value < 1):
        raise UsageError(f"delta must be >= 1 or infinite, got {value!r}")


def _check_max_length(instance, attribute, value):
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise UsageError(f"max_length must be >= 1, got {value!r}")


@attr.s(frozen=True)
class CountParameters:
    delta: Optional[int] = attr.ib(validator=_check_delta)
    max_length: int = attr.ib(validator=_check_max_length)

    @property
    def infinite(self) -> bool:
        return self.delta is None

    def __str__(self) -> str:
        return f"delta={format_delta(self.delta)}, K={self.max_length}"


@attr.s(frozen=True, repr=False)
class TemporalLinkSequence:
    links: Tuple[TimeStampedLink, ...] = attr.ib(converter=tuple)
    node_table: NodeTable = attr.ib(factory=NodeTable, eq=False)

    def __attrs_post_init__(self):
        previous = None
        for index, link in enumerate(self.links):
            if previous is not None and link.timestamp < previous:
                raise OrderViolationError(index, link.timestamp, previous)
            previous = link.timestamp

    @classmethod
    def from_tuples(cls, records: Iterable[Tuple[str, str, int]], sort_mode: SortMode = SortMode.REQUIRE_SORTED,
                    node_table: Optional[NodeTable] = None) -> "TemporalLinkSequence":
        table = node_table if node_table is not None else NodeTable()
        links = [TimeStampedLink(table.intern(str(s)), table.intern(str(d)), int(t)) for s, d, t in records]
        return _ordered(links, table, sort_mode)

    @property
    def n_links(self) -> int:
        return len(self.links)

    @property
    def n_nodes(self) -> int:
        return len(self.node_table)

    @property
    def time_span(self) -> int:
        if not self.links:
            return 0
        return self.links[-1].timestamp - self.links[0].timestamp

    def prefix(self, n: int) -> "TemporalLinkSequence":
        return TemporalLinkSequence(self.links[:n], self.node_table)

    def shifted(self, dt: int) -> "TemporalLinkSequence":
        return TemporalLinkSequence(
            [TimeStampedLink(x.source, x.target, x.timestamp + dt) for x in self.links], self.node_table
        )

    def relabeled(self, mapping: Dict[str, str]) -> "TemporalLinkSequence":
        table = NodeTable([mapping.get(label, label) for label in self.node_table.labels])
        return TemporalLinkSequence(self.links, table)

    def to_tuples(self) -> List[Tuple[str, str, int]]:
        labels = self.node_table.labels
        return [(labels[x.source], labels[x.target], x.timestamp) for x in self.links]

    def __iter__(self) -> Iterator[TimeStampedLink]:
        return iter(self.links)

    def __len__(self) -> int:
        return len(self.links)

    def __repr__(self) -> str:
        return f"TemporalLinkSequence(N={self.n_links}, |V|={self.n_nodes})"


def _ordered(links: List[TimeStampedLink], table: NodeTable, sort_mode: SortMode) -> TemporalLinkSequence:
    if sort_mode == SortMode.SORT:
        # sorted() is stable: equal timestamps keep their input order
        links = sorted(links, key=lambda x: x.timestamp)
    return TemporalLinkSequence(links, table)


def _parse_timestamp(text: str, line_number: Optional[int]) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise ParseError(f"timestamp {text.strip()!r} is not an integer", line_number) from None


def parse_link_record(line: str, field_separator: str, table: NodeTable, line_number: Optional[int] = None) -> TimeStampedLink:
    fields = line.rstrip("\r\n").split(field_separator)
    if len(fields) < 3:
        raise ParseError(f"expected source{field_separator!r}target{field_separator!r}timestamp, got {len(fields)} field(s)", line_number)
    timestamp = _parse_timestamp(fields[2], line_number)
    if timestamp < 0:
        raise ValidationError(f"line {line_number}: negative timestamp {timestamp}" if line_number else f"negative timestamp {timestamp}")
    return TimeStampedLink(table.intern(fields[0]), table.intern(fields[1]), timestamp)


def format_link_record(link: TimeStampedLink, table: NodeTable, field_separator: str = "\t") -> str:
    return field_separator.join((table.resolve(link.source), table.resolve(link.target), str(link.timestamp)))


def _is_header(line: str, field_separator: str) -> bool:
    fields = line.rstrip("\r\n").split(field_separator)
    if len(fields) < 3:
        return False
    try:
        int(fields[2].strip())
    except ValueError:
        return True
    return False


def iter_links(lines: Iterable[str], table: NodeTable, field_separator: str = "\t") -> Iterator[TimeStampedLink]:
    """Lazily parse edge-list records; comment lines (#) and blank lines are ignored, a header line is skipped."""
    first = True
    for line_number, line in enumerate(lines, start=1):
        if not line.strip() or line.startswith("#"):
            continue
        if first:
            first = False
            if _is_header(line, field_separator):
                log.warning("skipping header line %d: %r", line_number, line.rstrip("\r\n"))
                continue
        yield parse_link_record(line, field_separator, table, line_number)


def load_sequence(source: Iterable[str], sort_mode: SortMode = SortMode.REQUIRE_SORTED, field_separator: str = "\t",
                  table: Optional[NodeTable] = None) -> TemporalLinkSequence:
    table = table if table is not None else NodeTable()
    links = list(iter_links(source, table, field_separator))
    if sort_mode == SortMode.REQUIRE_SORTED:
        for index in range(1, len(links)):
            if links[index].timestamp < links[index - 1].timestamp:
                raise OrderViolationError(index, links[index].timestamp, links[index - 1].timestamp)
    ret = _ordered(links, table, sort_mode)
    log.info("loaded %d links between %d nodes", ret.n_links, ret.n_nodes)
    return ret


@contextlib.contextmanager
def open_records(path: Union[str, FilePath]) -> Iterator[TextIO]:
    if str(path) == "-":
        yield sys.stdin
        return
    try:
        f = open(path, "rt", encoding="utf-8")
    except OSError as e:
        raise ValidationError(f"cannot read {path}: {e.strerror}") from e
    with f:
        yield f


def read_sequence(path: Union[str, FilePath], sort_mode: SortMode = SortMode.REQUIRE_SORTED, field_separator: str = "\t",
                  table: Optional[NodeTable] = None) -> TemporalLinkSequence:
    with open_records(path) as f:
        return load_sequence(f, sort_mode, field_separator, table)


def path_from_labels(labels: Sequence[str], table: NodeTable, strict: bool = True) -> Path:
    if len(labels) < 2:
        raise ValidationError(f"a path needs at least 2 nodes, got {len(labels)}")
    if strict:
        return Path(table.lookup(label) for label in labels)
    return Path(table.intern(label) for label in labels)
