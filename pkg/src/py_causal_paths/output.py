"""
Path count serialisation: one TSV record `path<TAB>length<TAB>count` per stored path,
with the path written as comma-joined node labels, sorted by length and then by path.
"""
import re
from typing import Any, Dict, Iterable, List, Mapping, TextIO

import attr

from .model import NodeTable, PathCountMap, path_from_labels
from .types import ParseError

_ESCAPES = {"\\": "\\\\", ",": "\\,", "\t": "\\t", "\n": "\\n"}
_UNESCAPES = {"\\": "\\", ",": ",", "t": "\t", "n": "\n"}
_TOKEN_RE = re.compile(r"\\(.)|(,)|([^\\,]+)", re.DOTALL)


def escape_label(label: str) -> str:
    return "".join(_ESCAPES.get(ch, ch) for ch in label)


def split_path(text: str) -> List[str]:
    labels: List[str] = []
    current: List[str] = []
    position = 0
    for match in _TOKEN_RE.finditer(text):
        if match.start() != position:
            break
        position = match.end()
        escaped, comma, plain = match.groups()
        if escaped is not None:
            if escaped not in _UNESCAPES:
                raise ParseError(f"invalid escape \\{escaped} in path {text!r}")
            current.append(_UNESCAPES[escaped])
        elif comma is not None:
            labels.append("".join(current))
            current = []
        else:
            current.append(plain)
    if position != len(text):
        raise ParseError(f"dangling escape in path {text!r}")
    labels.append("".join(current))
    return labels


@attr.s(frozen=True)
class OutputRecord:
    path: str = attr.ib()
    length: int = attr.ib()
    count: int = attr.ib()

    def line(self) -> str:
        return f"{self.path}\t{self.length}\t{self.count}"


def output_records(counts: PathCountMap, table: NodeTable) -> List[OutputRecord]:
    keyed = sorted(((path.length, path.labels(table)), count) for path, count in counts.items())
    return [
        OutputRecord(path=",".join(escape_label(x) for x in labels), length=length, count=count)
        for (length, labels), count in keyed
    ]


def write_counts(counts: PathCountMap, table: NodeTable, fp: TextIO) -> int:
    records = output_records(counts, table)
    for record in records:
        fp.write(record.line())
        fp.write("\n")
    return len(records)


def read_counts(lines: Iterable[str], table: NodeTable) -> PathCountMap:
    ret = PathCountMap()
    for line_number, line in enumerate(lines, start=1):
        line = line.rstrip("\r\n")
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ParseError(f"expected path<TAB>length<TAB>count, got {len(fields)} field(s)", line_number)
        try:
            length, count = int(fields[1]), int(fields[2])
        except ValueError:
            raise ParseError("length and count must be integers", line_number) from None
        path = path_from_labels(split_path(fields[0]), table, strict=False)
        if path.length != length:
            raise ParseError(f"path {fields[0]!r} has length {path.length}, record says {length}", line_number)
        ret.add_path(path, count)
    return ret


def render_key_values(values: Mapping[str, Any], prefix: str = "") -> str:
    """Flatten a represented record into `key: value` lines; nested records become dotted keys."""
    lines: List[str] = []
    for key, value in values.items():
        name = f"{prefix}{key}"
        if isinstance(value, Mapping):
            lines.append(render_key_values(value, f"{name}."))
        elif isinstance(value, list) and value and all(isinstance(x, Mapping) for x in value):
            for i, item in enumerate(value):
                lines.append(render_key_values(item, f"{name}[{i}]."))
        elif isinstance(value, float):
            lines.append(f"{name}: {value:.6g}")
        else:
            lines.append(f"{name}: {value}")
    return "\n".join(lines)


def summary_values(counts: PathCountMap, n_links: int, n_nodes: int) -> Dict[str, int]:
    return {
        "links": n_links,
        "nodes": n_nodes,
        "distinct_paths": counts.distinct(),
        "total_instances": counts.total(),
    }
