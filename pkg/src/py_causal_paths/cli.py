import argparse
import contextlib
import json
import logging
import sys
from pathlib import Path as FilePath
from typing import Iterator, List, Optional, TextIO

from .analysis import spectral_report, synth_generate
from .bench import fit_scaling, load_plan, run_sweep, write_csv
from .counter import CounterState, dump_state, load_state
from .enums import Engine, FitModel, Multiplicity, SortMode, parse_enum
from .model import (
    CountParameters, NodeTable, PathCountMap, format_link_record, iter_links, load_sequence, open_records, parse_delta,
    read_sequence,
)
from .oracle import DEFAULT_BASELINE_CAP, DEFAULT_BRUTE_FORCE_CAP, baseline_count, brute_force_count, diff_counts
from .output import read_counts, render_key_values, summary_values, write_counts
from .types import CausalPathsError, EnumerationCapExceeded, InsufficientPointsError, UsageError, ValidationError

log = logging.getLogger(__name__)

PROG = "causal-paths"


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


@contextlib.contextmanager
def open_output(path: str) -> Iterator[TextIO]:
    if path == "-":
        yield sys.stdout
        sys.stdout.flush()
        return
    try:
        f = open(path, "wt", encoding="utf-8", newline="\n")
    except OSError as e:
        raise UsageError(f"cannot write {path}: {e.strerror}") from e
    with f:
        yield f


def _separator(value: str) -> str:
    value = {"\\t": "\t", "tab": "\t"}.get(value, value)
    if len(value) != 1:
        raise UsageError(f"field separator must be a single character, got {value!r}")
    return value


def _params(args: argparse.Namespace) -> CountParameters:
    return CountParameters(parse_delta(args.delta), args.max_length)


def _print_summary(counts: PathCountMap, n_links: int, n_nodes: int) -> None:
    for key, value in summary_values(counts, n_links, n_nodes).items():
        print(f"{key}: {value}", file=sys.stderr)


def cmd_count(args: argparse.Namespace) -> int:
    params = _params(args)
    if args.resume:
        with open_records(args.resume) as f:
            state, table = load_state(f)
        if state.params != params:
            raise UsageError(f"snapshot was taken with {state.params}, not {params}")
        log.info("resumed after %d links", state.links_processed)
    else:
        state, table = CounterState(params), NodeTable()

    separator = _separator(args.sep)
    with open_records(args.input) as f:
        if args.sort_mode == SortMode.SORT:
            links = load_sequence(f, SortMode.SORT, separator, table).links
            state.process_links(links)
        else:
            state.process_links(iter_links(f, table, separator))

    with open_output(args.output) as out:
        write_counts(state.counts, table, out)
    if args.save_state:
        with open_output(args.save_state) as out:
            dump_state(state, table, out)
    _print_summary(state.counts, state.links_processed, len(table))
    return 0


def _report_discrepancies(reference: str, expected: PathCountMap, actual: PathCountMap, table: NodeTable) -> int:
    diff = diff_counts(expected, actual)
    if diff:
        shown = sorted(diff.items(), key=lambda item: (item[0].length, item[0].labels(table)))[:5]
        log.warning("%d path(s) differ from %s: %s%s", len(diff), reference,
                    "; ".join(f"{','.join(p.labels(table))} {e} != {a}" for p, (e, a) in shown),
                    " ..." if len(diff) > len(shown) else "")
    return len(diff)


def cmd_oracle(args: argparse.Namespace) -> int:
    params = _params(args)
    sequence = read_sequence(args.input, args.sort_mode, _separator(args.sep))
    brute_force_cap = args.cap or DEFAULT_BRUTE_FORCE_CAP
    if args.engine == Engine.BRUTE:
        counts = brute_force_count(sequence, params, cap=brute_force_cap)
    else:
        counts = baseline_count(sequence, params, cap=args.cap or DEFAULT_BASELINE_CAP, multiplicity=args.multiplicity)
        try:
            reference = brute_force_count(sequence, params, cap=brute_force_cap)
        except EnumerationCapExceeded as e:
            log.info("no brute-force cross-check: %s", e)
        else:
            _report_discrepancies("the brute-force count", reference, counts, sequence.node_table)
    with open_output(args.output) as out:
        write_counts(counts, sequence.node_table, out)
    _print_summary(counts, sequence.n_links, sequence.n_nodes)
    if args.check:
        table = sequence.node_table.copy()
        with open_records(args.check) as f:
            saved = read_counts(f, table)
        if _report_discrepancies(args.check, saved, counts, table):
            raise ValidationError(f"{args.check} does not match the {args.engine.value} count")
    return 0


def cmd_bound(args: argparse.Namespace) -> int:
    if args.max_length < 1:
        raise UsageError(f"max_length must be >= 1, got {args.max_length}")
    sequence = read_sequence(args.input, args.sort_mode, _separator(args.sep))
    report = spectral_report(sequence, args.max_length, parse_delta(args.delta))
    if args.json:
        print(json.dumps(report.represent(), indent=2))
    else:
        print(render_key_values(report.represent()))
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    plan = load_plan(args.plan)
    records = run_sweep(plan, base_dir=FilePath(args.plan).parent)
    with open_output(args.output) as out:
        write_csv(records, out)
    if args.fit:
        stream = sys.stderr if args.output == "-" else sys.stdout
        for algorithm in plan.algorithms:
            try:
                report = fit_scaling(records, args.fit, plan.sweep, algorithm)
            except InsufficientPointsError as e:
                log.warning("no %s fit for %s: %s", args.fit.value, algorithm.value, e)
                continue
            print(render_key_values(report.represent()), file=stream)
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    sequence = synth_generate(args.nodes, args.links, args.horizon, args.density, args.seed)
    separator = _separator(args.sep)
    with open_output(args.output) as out:
        for link in sequence.links:
            out.write(format_link_record(link, sequence.node_table, separator))
            out.write("\n")
    return 0


def _enum_type(enum_cls):
    def parse(value: str):
        ret = parse_enum(enum_cls, value)
        if ret is None:
            raise argparse.ArgumentTypeError(f"choose from {', '.join(v.value for v in enum_cls)}")
        return ret
    parse.__name__ = enum_cls.__name__
    return parse


def _add_input_options(parser: argparse.ArgumentParser, delta_default: Optional[str] = None) -> None:
    parser.add_argument("input", help="edge list file (source, target, timestamp), '-' for stdin")
    if delta_default is None:
        parser.add_argument("--delta", required=True, help="maximum time difference (integer >= 1 or 'inf')")
    else:
        parser.add_argument("--delta", default=delta_default, help="maximum time difference (integer >= 1 or 'inf')")
    parser.add_argument("--sep", default="\t", help="field separator (default: TAB)")
    order = parser.add_mutually_exclusive_group()
    order.add_argument("--sort", dest="sort_mode", action="store_const", const=SortMode.SORT,
                       help="sort records by timestamp (stable) before counting")
    order.add_argument("--require-sorted", dest="sort_mode", action="store_const", const=SortMode.REQUIRE_SORTED,
                       help="reject out-of-order records (default)")
    parser.set_defaults(sort_mode=SortMode.REQUIRE_SORTED)


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog=PROG, description="Count causal paths in time-stamped network data.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeat for debug)")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    count = commands.add_parser("count", help="count causal paths with the streaming algorithm")
    _add_input_options(count)
    count.add_argument("--max-length", "-K", type=int, required=True, help="maximum path length K")
    count.add_argument("--output", "-o", default="-", help="output file (default: stdout)")
    count.add_argument("--resume", help="continue from a saved counter state")
    count.add_argument("--save-state", help="write the counter state after the last link")
    count.set_defaults(func=cmd_count)

    oracle = commands.add_parser("oracle", help="count with a reference implementation")
    _add_input_options(oracle)
    oracle.add_argument("--max-length", "-K", type=int, required=True, help="maximum path length K")
    oracle.add_argument("--engine", type=_enum_type(Engine), default=Engine.BRUTE, help="brute | baseline")
    oracle.add_argument("--multiplicity", type=_enum_type(Multiplicity), default=Multiplicity.DISTINCT,
                        help="baseline subpath counting: distinct | per_maximal_path")
    oracle.add_argument("--cap", type=int, help="enumeration cap (link sequences or root-to-leaf paths)")
    oracle.add_argument("--output", "-o", default="-", help="output file (default: stdout)")
    oracle.add_argument("--check", metavar="COUNTS", help="compare against a saved count output; a mismatch is a data error")
    oracle.set_defaults(func=cmd_oracle)

    bound = commands.add_parser("bound", help="report aggregated-graph statistics and complexity bounds")
    _add_input_options(bound, delta_default="inf")
    bound.add_argument("--max-length", "-K", type=int, required=True, help="maximum path length K")
    bound.add_argument("--json", action="store_true", help="machine-readable output")
    bound.set_defaults(func=cmd_bound)

    bench = commands.add_parser("bench", help="run a benchmark sweep")
    bench.add_argument("--plan", required=True, help="benchmark plan (TOML)")
    bench.add_argument("--output", "-o", default="-", help="CSV output (default: stdout)")
    bench.add_argument("--fit", type=_enum_type(FitModel), help="fit linear | quadratic | exponential | power")
    bench.set_defaults(func=cmd_bench)

    synth = commands.add_parser("synth", help="write a synthetic edge list")
    synth.add_argument("--nodes", type=int, required=True)
    synth.add_argument("--links", type=int, required=True)
    synth.add_argument("--horizon", type=int, required=True)
    synth.add_argument("--density", type=float, required=True)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--sep", default="\t")
    synth.add_argument("--output", "-o", default="-")
    synth.set_defaults(func=cmd_synth)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(
            level=[logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)],
            format="%(levelname)s %(name)s: %(message)s",
            stream=sys.stderr,
        )
        return args.func(args)
    except CausalPathsError as e:
        print(f"{PROG}: error: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
