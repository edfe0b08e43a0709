"""
Runtime sweeps over the number of links N, the maximum time difference delta or the
maximum path length K, for the streaming counter and the time-unfolded DAG baseline.
"""
import concurrent.futures
import csv
import logging
import math
import statistics
import sys
import time
from pathlib import Path as FilePath
from typing import Dict, List, Optional, TextIO, Tuple, Union

import attr
import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .analysis import synth_generate
from .counter import run_counter
from .dto import DataModel
from .enums import Algorithm, FitModel, RunStatus, SortMode, SweepVariable
from .model import CountParameters, PathCountMap, TemporalLinkSequence, format_delta, parse_delta, read_sequence
from .oracle import baseline_count
from .types import (
    BudgetExceeded, ConfigurationError, Deadline, EnumerationCapExceeded, InsufficientPointsError, LoadError,
    UsageError, ValidationError,
)

log = logging.getLogger(__name__)

CSV_HEADER = ["algorithm", "N", "delta", "K", "rep", "wall_time_s", "distinct_paths", "total_instances", "status"]


def _positive(instance, attribute, value):
    if value is not None and value <= 0:
        raise ConfigurationError(f"{type(instance).__name__} -> {attribute.name}: must be > 0, got {value}")


def _load_delta(data: dict) -> Optional[int]:
    try:
        return parse_delta(data.get("delta", "inf"))
    except UsageError as e:
        raise LoadError(f"BenchmarkPlan -> delta: {e}") from None


@attr.s
class GeneratorParams(DataModel):
    n_nodes: int = attr.ib(validator=_positive)
    n_links: int = attr.ib()
    time_horizon: int = attr.ib(validator=_positive)
    edge_density: float = attr.ib(validator=_positive)
    seed: int = attr.ib(default=0)


@attr.s
class DatasetSource(DataModel):
    path: Optional[str] = attr.ib(default=None)
    generator: Optional[GeneratorParams] = attr.ib(default=None)
    sep: str = attr.ib(default="\t")
    sort: bool = attr.ib(default=True)

    def __attrs_post_init__(self):
        if (self.path is None) == (self.generator is None):
            raise ConfigurationError("dataset: exactly one of `path` and `generator` must be given")

    def load(self, base_dir: Optional[FilePath] = None) -> TemporalLinkSequence:
        if self.generator is not None:
            g = self.generator
            return synth_generate(g.n_nodes, g.n_links, g.time_horizon, g.edge_density, g.seed)
        assert self.path is not None
        path = FilePath(self.path)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return read_sequence(path, SortMode.SORT if self.sort else SortMode.REQUIRE_SORTED, self.sep)


@attr.s
class BenchmarkPlan(DataModel):
    CUSTOM_LOAD = {"delta": _load_delta}
    CUSTOM_REPRESENTATION = {"delta": format_delta}
    FORCE_NONE = ["delta"]

    dataset: DatasetSource = attr.ib()
    sweep: SweepVariable = attr.ib()
    values: List[int] = attr.ib()
    delta: Optional[int] = attr.ib(default=None)
    max_length: int = attr.ib(default=4, validator=_positive)
    n_links: Optional[int] = attr.ib(default=None, validator=_positive)
    algorithms: List[Algorithm] = attr.ib(factory=lambda: [Algorithm.STREAMING])
    repetitions: int = attr.ib(default=3, validator=_positive)
    time_budget: float = attr.ib(default=60.0, validator=_positive)
    warmup: bool = attr.ib(default=True)
    parallel: bool = attr.ib(default=False)
    name: str = attr.ib(default="sweep")

    @values.validator
    def _check_values(self, attribute, value):
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ConfigurationError(f"BenchmarkPlan -> values: must be strictly increasing, got {value}")
        if any(x < (0 if self.sweep == SweepVariable.N else 1) for x in value):
            raise ConfigurationError(f"BenchmarkPlan -> values: out of range for a {self.sweep.value} sweep: {value}")

    def points(self, dataset_size: int) -> List[Tuple[int, Optional[int], int]]:
        """(N, delta, K) for every sweep value"""
        fixed_n = dataset_size if self.n_links is None else min(self.n_links, dataset_size)
        if self.sweep == SweepVariable.N:
            for n in self.values:
                if n > dataset_size:
                    log.warning("sweep value N=%d exceeds the dataset size %d", n, dataset_size)
            return [(min(n, dataset_size), self.delta, self.max_length) for n in self.values]
        if self.sweep == SweepVariable.DELTA:
            return [(fixed_n, d, self.max_length) for d in self.values]
        return [(fixed_n, self.delta, k) for k in self.values]


@attr.s
class BenchmarkRecord(DataModel):
    CUSTOM_REPRESENTATION = {"delta": format_delta}
    FORCE_NONE = ["delta"]

    algorithm: Algorithm = attr.ib()
    n_links: int = attr.ib()
    delta: Optional[int] = attr.ib()
    max_length: int = attr.ib()
    rep: int = attr.ib()
    wall_time: float = attr.ib()
    status: RunStatus = attr.ib()
    distinct_paths: Optional[int] = attr.ib(default=None)
    total_instances: Optional[int] = attr.ib(default=None)
    peak_window: Optional[int] = attr.ib(default=None)

    def __attrs_post_init__(self):
        if self.wall_time < 0:
            raise ValidationError(f"negative wall time {self.wall_time}")
        if self.status == RunStatus.OK and (self.distinct_paths is None or self.total_instances is None):
            raise ValidationError("a successful run must report its counts")

    def value_of(self, variable: SweepVariable) -> Optional[int]:
        return {SweepVariable.N: self.n_links, SweepVariable.DELTA: self.delta, SweepVariable.K: self.max_length}[variable]

    def csv_row(self) -> List[str]:
        return [
            self.algorithm.value, str(self.n_links), format_delta(self.delta), str(self.max_length), str(self.rep),
            f"{self.wall_time:.6f}",
            "" if self.distinct_paths is None else str(self.distinct_paths),
            "" if self.total_instances is None else str(self.total_instances),
            self.status.value,
        ]


@attr.s
class RunOutcome:
    status: RunStatus = attr.ib()
    wall_time: float = attr.ib()
    counts: Optional[PathCountMap] = attr.ib(default=None)
    peak_window: Optional[int] = attr.ib(default=None)


def timed_run(algorithm: Algorithm, sequence: TemporalLinkSequence, params: CountParameters, budget: Optional[float]) -> RunOutcome:
    deadline = Deadline(budget)
    start = time.perf_counter()
    try:
        if algorithm == Algorithm.STREAMING:
            state = run_counter(sequence, params, deadline)
            return RunOutcome(RunStatus.OK, time.perf_counter() - start, state.counts, state.peak_window)
        counts = baseline_count(sequence, params, deadline=deadline)
        return RunOutcome(RunStatus.OK, time.perf_counter() - start, counts)
    except BudgetExceeded:
        return RunOutcome(RunStatus.TIMEOUT, time.perf_counter() - start)
    except EnumerationCapExceeded as e:
        log.warning("%s refused at N=%d, %s: %s", algorithm.value, sequence.n_links, params, e)
        return RunOutcome(RunStatus.REFUSED, time.perf_counter() - start)


def run_point(algorithm: Algorithm, sequence: TemporalLinkSequence, point: Tuple[int, Optional[int], int],
              repetitions: int, budget: Optional[float], warmup: bool = True) -> List[BenchmarkRecord]:
    n, delta, k = point
    data = sequence.prefix(n)
    params = CountParameters(delta, k)

    def record(rep: int, outcome: RunOutcome) -> BenchmarkRecord:
        return BenchmarkRecord(
            algorithm=algorithm, n_links=n, delta=delta, max_length=k, rep=rep,
            wall_time=outcome.wall_time, status=outcome.status,
            distinct_paths=None if outcome.counts is None else outcome.counts.distinct(),
            total_instances=None if outcome.counts is None else outcome.counts.total(),
            peak_window=outcome.peak_window,
        )

    if warmup:
        outcome = timed_run(algorithm, data, params, budget)
        if outcome.status != RunStatus.OK:
            log.warning("%s warm-up at N=%d, %s ended with %s", algorithm.value, n, params, outcome.status.value)
            return [record(rep, outcome) for rep in range(repetitions)]

    records: List[BenchmarkRecord] = []
    for rep in range(repetitions):
        outcome = timed_run(algorithm, data, params, budget)
        records.append(record(rep, outcome))
        if outcome.status != RunStatus.OK:
            records += [record(r, outcome) for r in range(rep + 1, repetitions)]
            break
    log.info("%s N=%d %s: median %.4fs", algorithm.value, n, params, statistics.median(r.wall_time for r in records))
    return records


def _skipped(algorithm: Algorithm, point: Tuple[int, Optional[int], int], repetitions: int, budget: float) -> List[BenchmarkRecord]:
    n, delta, k = point
    return [
        BenchmarkRecord(algorithm=algorithm, n_links=n, delta=delta, max_length=k, rep=rep, wall_time=budget, status=RunStatus.TIMEOUT)
        for rep in range(repetitions)
    ]


def run_sweep(plan: BenchmarkPlan, base_dir: Optional[FilePath] = None) -> List[BenchmarkRecord]:
    sequence = plan.dataset.load(base_dir)
    points = plan.points(sequence.n_links)
    log.info("sweep %r over %s: %d points x %d algorithm(s) x %d repetition(s)",
             plan.name, plan.sweep.value, len(points), len(plan.algorithms), plan.repetitions)
    records: List[BenchmarkRecord] = []

    if plan.parallel:
        with concurrent.futures.ProcessPoolExecutor() as pool:
            futures = [
                pool.submit(run_point, algorithm, sequence, point, plan.repetitions, plan.time_budget, plan.warmup)
                for algorithm in plan.algorithms for point in points
            ]
            for future in futures:
                records += future.result()
    else:
        for algorithm in plan.algorithms:
            timed_out = False
            for point in points:
                if timed_out:
                    # runtime grows with every sweep variable; later points would time out as well
                    records += _skipped(algorithm, point, plan.repetitions, plan.time_budget)
                    continue
                point_records = run_point(algorithm, sequence, point, plan.repetitions, plan.time_budget, plan.warmup)
                records += point_records
                timed_out = any(r.status == RunStatus.TIMEOUT for r in point_records)

    check_determinism(records)
    check_agreement(records)
    return records


def check_determinism(records: List[BenchmarkRecord]) -> List[Tuple[Algorithm, int, Optional[int], int]]:
    """Configurations whose repetitions reported different count summaries."""
    summaries: Dict[Tuple[Algorithm, int, Optional[int], int], set] = {}
    for r in records:
        if r.status == RunStatus.OK:
            summaries.setdefault((r.algorithm, r.n_links, r.delta, r.max_length), set()).add((r.distinct_paths, r.total_instances))
    unstable = [key for key, seen in summaries.items() if len(seen) > 1]
    for key in unstable:
        log.warning("non-deterministic counts for %s", key)
    return unstable


def check_agreement(records: List[BenchmarkRecord]) -> List[Tuple[int, Optional[int], int]]:
    """Configurations where streaming and baseline both completed but disagree on the count summary."""
    by_config: Dict[Tuple[int, Optional[int], int], Dict[Algorithm, Tuple[Optional[int], Optional[int]]]] = {}
    for r in records:
        if r.status == RunStatus.OK:
            by_config.setdefault((r.n_links, r.delta, r.max_length), {})[r.algorithm] = (r.distinct_paths, r.total_instances)
    mismatched = [
        config for config, summaries in by_config.items()
        if len(summaries) > 1 and len(set(summaries.values())) > 1
    ]
    for config in mismatched:
        log.warning("streaming and baseline disagree at N=%d, delta=%s, K=%d: %s",
                    config[0], format_delta(config[1]), config[2], by_config[config])
    return mismatched


def write_csv(records: List[BenchmarkRecord], fp: TextIO) -> None:
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow(r.csv_row())


def load_plan(path: Union[str, FilePath]) -> BenchmarkPlan:
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except FileNotFoundError:
        raise LoadError(f"benchmark plan {path} does not exist") from None
    except OSError as e:
        raise LoadError(f"cannot read benchmark plan {path}: {e.strerror}") from e
    except tomllib.TOMLDecodeError as e:
        raise LoadError(f"benchmark plan {path} is not valid TOML: {e}") from e
    return BenchmarkPlan.load_from_dict(data)


@attr.s
class FitReport(DataModel):
    FORCE_NONE = ["algorithm"]

    algorithm: Optional[Algorithm] = attr.ib()
    variable: SweepVariable = attr.ib()
    model: FitModel = attr.ib()
    coefficients: List[float] = attr.ib()
    growth: float = attr.ib()
    r_squared: float = attr.ib()
    n_points: int = attr.ib()

    def predict(self, x: float) -> float:
        if self.model in (FitModel.LINEAR, FitModel.QUADRATIC):
            return float(np.polyval(self.coefficients, x))
        if self.model == FitModel.EXPONENTIAL:
            return math.exp(float(np.polyval(self.coefficients, x)))
        return math.exp(float(np.polyval(self.coefficients, math.log(x))))


def median_times(records: List[BenchmarkRecord], variable: SweepVariable, algorithm: Optional[Algorithm] = None) -> Dict[int, float]:
    """sweep value -> median wall time over the successful runs"""
    algorithms = {r.algorithm for r in records if algorithm is None or r.algorithm == algorithm}
    if algorithm is None and len(algorithms) > 1:
        raise UsageError("records mix several algorithms; choose one to fit")
    times: Dict[int, List[float]] = {}
    for r in records:
        x = r.value_of(variable)
        if r.status == RunStatus.OK and r.algorithm in algorithms and x is not None:
            times.setdefault(x, []).append(r.wall_time)
    return {x: statistics.median(ts) for x, ts in sorted(times.items())}


def _r_squared(observed: np.ndarray, predicted: np.ndarray) -> float:
    ss_res = float(((observed - predicted) ** 2).sum())
    ss_tot = float(((observed - observed.mean()) ** 2).sum())
    if ss_tot == 0:
        return 1.0 if ss_res == 0 else 0.0
    return 1.0 - ss_res / ss_tot


def fit_scaling(records: List[BenchmarkRecord], model: FitModel, variable: SweepVariable,
                algorithm: Optional[Algorithm] = None) -> FitReport:
    """Least-squares fit of median wall time against the sweep variable."""
    medians = median_times(records, variable, algorithm)
    if len(medians) < 3:
        raise InsufficientPointsError(f"a scaling fit needs at least 3 successful sweep points, got {len(medians)}")
    x = np.array(list(medians.keys()), dtype=np.float64)
    y = np.array(list(medians.values()), dtype=np.float64)

    if model in (FitModel.LINEAR, FitModel.QUADRATIC):
        coefficients = np.polyfit(x, y, 1 if model == FitModel.LINEAR else 2)
        r_squared = _r_squared(y, np.polyval(coefficients, x))
    else:
        if (y <= 0).any() or (model == FitModel.POWER and (x <= 0).any()):
            raise InsufficientPointsError(f"a {model.value} fit needs positive values")
        fx = np.log(x) if model == FitModel.POWER else x
        coefficients = np.polyfit(fx, np.log(y), 1)
        r_squared = _r_squared(np.log(y), np.polyval(coefficients, fx))

    return FitReport(
        algorithm=algorithm,
        variable=variable,
        model=model,
        coefficients=[float(c) for c in coefficients],
        growth=float(coefficients[0]),
        r_squared=r_squared,
        n_points=len(medians),
    )


def doubling_ratios(records: List[BenchmarkRecord], variable: SweepVariable, algorithm: Optional[Algorithm] = None) -> List[float]:
    """Ratios of consecutive median wall times."""
    medians = list(median_times(records, variable, algorithm).values())
    return [b / a for a, b in zip(medians, medians[1:]) if a > 0]
