"""Benchmark run service: executes method/seed runs and keeps BenchRun state in sync."""

from __future__ import annotations

import asyncio
import logging
import traceback
from dataclasses import dataclass
from datetime import datetime
from typing import Callable

from opentelemetry import trace
from opentelemetry.sdk.trace import TracerProvider

from ips2.cluster import PIPELINES
from ips2.dataset import load_csv, standardize
from ips2.errors import ErrorContract, Ips2Error, UsageError
from ips2.infrastructure import RunContextLogHandler, StageTimingExporter, current_run_id
from ips2.infrastructure.tracing_exporter import RUN_ID_ATTRIBUTE
from ips2.metrics import evaluate
from ips2.models import (
    BenchRun,
    ClusterConfig,
    ClusteringResult,
    Dataset,
    ExperimentSpec,
    LogMessage,
    MetricsReport,
    TraceMessage,
)
from ips2.seeding import Stream
from ips2.services.reporting import build_report
from ips2.synthgen import add_noise, generate

logger = logging.getLogger(__name__)
tracer = trace.get_tracer(__name__)

RunUpdatedCallback = Callable[[BenchRun], None]
LogCallback = Callable[[LogMessage], None]
TraceCallback = Callable[[TraceMessage], None]


def load_dataset(spec: ExperimentSpec) -> Dataset:
    """Materialize the spec's dataset: load or generate, standardize, add noise."""
    source = spec.source
    if source.kind == "csv":
        assert source.path is not None
        dataset = load_csv(source.path, source.label_column, source.has_header)
    else:
        assert source.generator is not None
        dataset = generate(source.generator, source.seed, **source.params)
    dataset = standardize(dataset, spec.standardization)
    if spec.noise is not None:
        dataset = add_noise(dataset, spec.noise, source.seed, Stream.EXTRA_NOISE)
    return dataset


@dataclass
class BatchOutcome:
    """Runs of one batch and the report built from them."""

    report: MetricsReport
    runs: list[BenchRun]

    @property
    def succeeded(self) -> bool:
        """Whether every run completed."""
        return self.report.failed_runs == 0


class BenchService:
    """Orchestrates bench runs and keeps BenchRun state in sync.

    - Executes each method/seed pipeline in a worker thread
    - Updates run status, timings, scores, and error
    - Collects warnings and stage spans per run
    - Notifies observers via callbacks
    """

    def __init__(
        self,
        workers: int = 1,
        provider: TracerProvider | None = None,
        on_run_updated: RunUpdatedCallback | None = None,
        on_log: LogCallback | None = None,
        on_trace: TraceCallback | None = None,
    ) -> None:
        """Initialize BenchService with a worker count and optional observers."""
        self.workers = max(1, workers)
        self.runs: dict[str, BenchRun] = {}

        self.on_run_updated = on_run_updated
        self.on_log = on_log
        self.on_trace = on_trace

        self.log_handler = RunContextLogHandler(callback=self.handle_log)
        self.exporter = StageTimingExporter(on_trace=self.handle_trace).attach(provider)

    def register_run(self, run: BenchRun) -> None:
        """Register a new run and emit an initial update."""
        self.runs[run.id] = run
        self._emit_run_updated(run)

    def plan(self, spec: ExperimentSpec) -> list[BenchRun]:
        """Register one run per method and seed of ``spec``."""
        runs = [BenchRun(method, seed) for method in spec.methods for seed in spec.seeds]
        for run in runs:
            self.register_run(run)
        return runs

    async def execute(self, run: BenchRun, dataset: Dataset, cfg: ClusterConfig) -> None:
        """Execute a run and score it against the dataset's labels."""
        try:
            run.status = "running"
            run.start_time = datetime.now()
            self._emit_run_updated(run)

            run.result = await asyncio.to_thread(
                self._run_pipeline, run, dataset, cfg.with_seed(run.seed)
            )
            if dataset.labels is not None:
                run.scores = evaluate(run.result.labels, dataset.labels)
            run.status = "completed"

        except Ips2Error as e:
            self._add_error_log(run, f"{e.title} {e.detail}".strip())
            run.status = "failed"
            run.error = e.error_info

        except Exception as e:
            self._add_error_log(run, str(e))
            run.status = "failed"
            run.error = ErrorContract(
                code="Unknown",
                title=str(e),
                detail=traceback.format_exc(),
            )

        run.end_time = datetime.now()
        self._emit_run_updated(run)

    def _run_pipeline(
        self, run: BenchRun, dataset: Dataset, cfg: ClusterConfig
    ) -> ClusteringResult:
        token = current_run_id.set(run.id)
        try:
            with tracer.start_as_current_span(
                "bench.run",
                attributes={
                    RUN_ID_ATTRIBUTE: run.id,
                    "run.method": run.method.value,
                    "run.seed": run.seed,
                },
            ):
                return PIPELINES[run.method.value](dataset, cfg)
        finally:
            current_run_id.reset(token)

    async def execute_batch(self, spec: ExperimentSpec, dataset: Dataset) -> BatchOutcome:
        """Run every method on every seed of ``spec``, at most ``workers`` at a time.

        A failing run is recorded and the rest of the batch continues.

        Raises:
            UsageError: If the dataset has no ground-truth labels.
        """
        if dataset.labels is None:
            raise UsageError(
                "bench needs a labeled dataset",
                "select the label column with --label-column",
            )

        runs = self.plan(spec)
        semaphore = asyncio.Semaphore(self.workers)

        async def guarded(run: BenchRun) -> None:
            async with semaphore:
                await self.execute(run, dataset, spec.config)

        package_logger = logging.getLogger("ips2")
        package_logger.addHandler(self.log_handler)
        try:
            await asyncio.gather(*(guarded(run) for run in runs))
        finally:
            package_logger.removeHandler(self.log_handler)

        return BatchOutcome(report=build_report(spec, dataset, runs), runs=runs)

    def handle_log(self, log_msg: LogMessage) -> None:
        """Entry point for all logs captured while a run is active."""
        run = self.runs.get(log_msg.run_id)
        if run is not None:
            run.logs.append(log_msg)

        if self.on_log is not None:
            self.on_log(log_msg)

    def handle_trace(self, trace_msg: TraceMessage) -> None:
        """Entry point for finished spans (from StageTimingExporter)."""
        run = self.runs.get(trace_msg.run_id)
        if run is not None:
            run.traces.append(trace_msg)

        if self.on_trace is not None:
            self.on_trace(trace_msg)

    def close(self) -> None:
        """Stop receiving spans."""
        self.exporter.shutdown()

    def _emit_run_updated(self, run: BenchRun) -> None:
        """Notify observers that a run's state changed."""
        self.runs[run.id] = run
        if self.on_run_updated is not None:
            self.on_run_updated(run)

    def _add_error_log(self, run: BenchRun, message: str) -> None:
        log_msg = LogMessage(
            run_id=run.id,
            level="ERROR",
            message=message,
            timestamp=datetime.now(),
        )
        self.handle_log(log_msg)
