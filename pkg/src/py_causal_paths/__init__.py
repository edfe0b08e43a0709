from .model import CountParameters, NodeTable, Path, PathCountMap, TemporalLinkSequence, TimeStampedLink, read_sequence
from .counter import CounterState, count_causal_paths, counter_extend, counter_sum
from .oracle import baseline_count, brute_force_count, build_time_unfolded_dag, window_scan_count
from .analysis import aggregate, lambda_max, path_count_bound, spectral_report, synth_generate
from .bench import BenchmarkPlan, fit_scaling, load_plan, run_sweep
from .dto import DataModel
from .types import CausalPathsError

__all__ = [
    "CountParameters", "NodeTable", "Path", "PathCountMap", "TemporalLinkSequence", "TimeStampedLink", "read_sequence",
    "CounterState", "count_causal_paths", "counter_extend", "counter_sum",
    "baseline_count", "brute_force_count", "build_time_unfolded_dag", "window_scan_count",
    "aggregate", "lambda_max", "path_count_bound", "spectral_report", "synth_generate",
    "BenchmarkPlan", "fit_scaling", "load_plan", "run_sweep",
    "DataModel", "CausalPathsError",
]
