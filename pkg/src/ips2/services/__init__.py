"""Bench orchestration, reporting and sweeps."""

from ips2.services.bench_service import BatchOutcome, BenchService, load_dataset
from ips2.services.reporting import build_report, write_dumps, write_report
from ips2.services.sweep import SweepParam, gain_table, run_sweep, write_gain_table

__all__ = [
    "BatchOutcome",
    "BenchService",
    "SweepParam",
    "build_report",
    "gain_table",
    "load_dataset",
    "run_sweep",
    "write_dumps",
    "write_gain_table",
    "write_report",
]
