"""Oracle, workloads, differential runner and benchmarks."""

from ptrie.harness.oracle import StableMultiset
from ptrie.harness.runner import RunReport, diff_run, make_structure, oracle_run
from ptrie.harness.workload import Workload, gen_workload, parse_workload, format_workload

__all__ = [
    "RunReport",
    "StableMultiset",
    "Workload",
    "diff_run",
    "format_workload",
    "gen_workload",
    "make_structure",
    "oracle_run",
    "parse_workload",
]
