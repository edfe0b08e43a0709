import io
import random

import pytest

from py_causal_paths.enums import SortMode
from py_causal_paths.model import (
    CountParameters, NodeTable, Path, PathCountMap, TemporalLinkSequence, TimeStampedLink, format_link_record,
    iter_links, load_sequence, parse_delta, parse_link_record, path_from_labels, read_sequence,
)
from py_causal_paths.types import OrderViolationError, ParseError, UsageError, ValidationError

from conftest import TOY_RECORDS, toy_text

LABELS = ["a", "node 1", "\u00fc", "back\\slash", "x;y", "42"]


class TestParseLinkRecord:
    def test_plain_record(self):
        table = NodeTable()
        link = parse_link_record("a\tb\t1", "\t", table)
        assert link == TimeStampedLink(table.lookup("a"), table.lookup("b"), 1)

    def test_self_loop(self):
        table = NodeTable()
        link = parse_link_record("x\tx\t0\n", "\t", table)
        assert link.source == link.target
        assert link.timestamp == 0
        assert len(table) == 1

    def test_missing_timestamp(self):
        with pytest.raises(ParseError) as e:
            parse_link_record("a\tb", "\t", NodeTable(), line_number=4)
        assert e.value.line_number == 4
        assert "line 4" in str(e.value)

    def test_non_integer_timestamp(self):
        with pytest.raises(ParseError):
            parse_link_record("a\tb\t1.5", "\t", NodeTable(), line_number=1)

    def test_negative_timestamp(self):
        with pytest.raises(ValidationError):
            parse_link_record("a\tb\t-3", "\t", NodeTable())

    def test_custom_separator(self):
        table = NodeTable()
        link = parse_link_record("a b 7", " ", table)
        assert link.timestamp == 7
        assert table.labels == ["a", "b"]

    @pytest.mark.parametrize("seed", range(20))
    def test_format_inverts_parse(self, seed):
        rng = random.Random(seed)
        table = NodeTable()
        separator = rng.choice(["\t", ","])
        for _ in range(30):
            source, target = rng.choice(LABELS), rng.choice(LABELS)
            t = rng.randrange(10_000)
            line = separator.join([source, target, rng.choice([str(t), f" {t}", f"{t:06d}", f"+{t}"])])
            link = parse_link_record(line + rng.choice(["", "\n", "\r\n"]), separator, table)
            assert format_link_record(link, table, separator) == separator.join([source, target, str(t)])


class TestLoadSequence:
    def test_toy_file_order(self):
        sequence = load_sequence(io.StringIO(toy_text()))
        assert sequence.n_links == 9
        assert [x.timestamp for x in sequence.links] == [1, 2, 3, 3, 3, 4, 5, 6, 7]
        assert sequence.node_table.labels == ["a", "b", "c", "d"]

    def test_empty_stream(self):
        sequence = load_sequence(io.StringIO(""))
        assert sequence.n_links == 0
        assert sequence.n_nodes == 0
        assert sequence.time_span == 0

    def test_order_violation_names_index(self):
        with pytest.raises(OrderViolationError) as e:
            load_sequence(io.StringIO("a\tb\t5\nb\tc\t3\n"))
        assert e.value.index == 1

    def test_sort_is_stable(self):
        sequence = load_sequence(io.StringIO("a\tb\t5\nb\tc\t3\nc\td\t3\n"), SortMode.SORT)
        assert sequence.to_tuples() == [("b", "c", 3), ("c", "d", 3), ("a", "b", 5)]

    @pytest.mark.parametrize("seed", range(20))
    def test_sort_orders_any_permutation(self, seed):
        rng = random.Random(seed)
        records = [(f"s{i}", f"d{i}", rng.randrange(8)) for i in range(40)]
        rng.shuffle(records)
        text = "".join(f"{s}\t{d}\t{t}\n" for s, d, t in records)
        sequence = load_sequence(io.StringIO(text), SortMode.SORT)
        timestamps = [x.timestamp for x in sequence.links]
        assert timestamps == sorted(timestamps)
        # labels are unique per record, so equal timestamps must keep their input order
        assert sequence.to_tuples() == sorted(records, key=lambda r: r[2])

    def test_comments_blank_lines_and_header(self):
        text = "source\ttarget\ttime\n# comment\n\na\tb\t1\n"
        sequence = load_sequence(io.StringIO(text))
        assert sequence.to_tuples() == [("a", "b", 1)]

    def test_header_only_on_first_line(self):
        with pytest.raises(ParseError) as e:
            load_sequence(io.StringIO("a\tb\t1\nsource\ttarget\ttime\n"))
        assert e.value.line_number == 2

    def test_iter_links_is_lazy(self):
        table = NodeTable()
        links = iter_links(iter(["a\tb\t1\n", "broken\n"]), table)
        assert next(links).timestamp == 1
        with pytest.raises(ParseError):
            next(links)

    def test_read_missing_file(self, tmp_path):
        with pytest.raises(ValidationError):
            read_sequence(tmp_path / "missing.tsv")

    def test_read_file(self, toy_file):
        assert read_sequence(toy_file).to_tuples() == TOY_RECORDS


class TestTemporalLinkSequence:
    def test_rejects_unordered_links(self):
        with pytest.raises(OrderViolationError):
            TemporalLinkSequence([TimeStampedLink(0, 1, 4), TimeStampedLink(1, 0, 2)], NodeTable(["a", "b"]))

    def test_negative_timestamp(self):
        with pytest.raises(ValidationError):
            TimeStampedLink(0, 1, -1)

    def test_shift_and_prefix(self, toy):
        shifted = toy.shifted(100)
        assert [x.timestamp for x in shifted.links][:3] == [101, 102, 103]
        assert shifted.node_table is toy.node_table
        assert toy.prefix(4).n_links == 4
        assert toy.time_span == 6

    def test_relabeled(self, toy):
        relabeled = toy.relabeled({"a": "alpha"})
        assert relabeled.to_tuples()[0] == ("alpha", "b", 1)
        assert toy.to_tuples()[0] == ("a", "b", 1)

    def test_from_tuples_shares_table(self):
        table = NodeTable(["z"])
        sequence = TemporalLinkSequence.from_tuples([("a", "z", 1)], node_table=table)
        assert sequence.node_table is table
        assert table.labels == ["z", "a"]


class TestPath:
    def test_from_labels(self):
        table = NodeTable(["a", "b", "c"])
        path = path_from_labels(["a", "b", "c"], table)
        assert path == (0, 1, 2)
        assert path.length == 2

    def test_too_short(self):
        with pytest.raises(ValidationError):
            path_from_labels(["a"], NodeTable(["a"]))

    def test_self_loop_path(self):
        path = path_from_labels(["a", "a"], NodeTable(["a"]))
        assert path.length == 1

    def test_unknown_label_strict(self):
        with pytest.raises(ValidationError):
            path_from_labels(["a", "q"], NodeTable(["a"]))

    def test_unknown_label_lenient(self):
        table = NodeTable(["a"])
        assert path_from_labels(["a", "q"], table, strict=False) == (0, 1)
        assert "q" in table

    def test_hashes_like_tuple(self):
        counts = {Path((1, 2)): 3}
        assert counts[(1, 2)] == 3
        assert Path((1, 2)).extended(5) == (1, 2, 5)


class TestPathCountMap:
    def test_add(self):
        left = PathCountMap.from_counts({(0, 1): 1})
        right = PathCountMap.from_counts({(0, 1): 1, (1, 2): 2})
        assert (left + right).entries == {(0, 1): 2, (1, 2): 2}
        assert left.entries == {(0, 1): 1}

    def test_empty_is_identity(self):
        counts = PathCountMap.from_counts({(1, 2): 1, (0, 1, 2): 2})
        assert counts + PathCountMap() == counts

    def test_zero_counts_dropped(self):
        assert len(PathCountMap.from_counts({(0, 1): 0})) == 0

    def test_extended_respects_length(self):
        counts = PathCountMap.from_counts({(0, 1): 1, (0, 1, 2): 2})
        assert counts.extended(3, 2).entries == {(0, 1, 3): 1}

    def test_totals(self):
        counts = PathCountMap.from_counts({(0, 1): 2, (1, 2): 1, (0, 1, 2): 4})
        assert counts.total() == 7
        assert counts.total(length=1) == 3
        assert counts.by_length() == {1: (2, 3), 2: (1, 4)}
        assert counts.restricted(1).entries == {(0, 1): 2, (1, 2): 1}

    def test_labelled(self):
        table = NodeTable(["a", "b"])
        assert PathCountMap.from_counts({(0, 1): 2}).labelled(table) == {("a", "b"): 2}


class TestParameters:
    @pytest.mark.parametrize("text", ["inf", "INF", "infinite", "∞"])
    def test_infinite_delta(self, text):
        assert parse_delta(text) is None

    def test_integer_delta(self):
        assert parse_delta("3") == 3

    @pytest.mark.parametrize("text", ["0", "-2", "soon"])
    def test_invalid_delta(self, text):
        with pytest.raises(UsageError):
            parse_delta(text)

    def test_invalid_count_parameters(self):
        with pytest.raises(UsageError):
            CountParameters(0, 2)
        with pytest.raises(UsageError):
            CountParameters(2, 0)
        assert CountParameters(None, 3).infinite
