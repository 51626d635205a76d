"""Report assembly and the files a bench run leaves behind."""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path

import numpy as np

from ips2.cluster import compute_high_order, compute_pairwise, fuse
from ips2.metrics import METRIC_NAMES
from ips2.models.config import ClusterConfig
from ips2.models.dataset import Dataset
from ips2.models.report import (
    DatasetInfo,
    ExperimentSpec,
    MethodSummary,
    MetricsReport,
    MetricSummary,
    RunRecord,
    WarningRecord,
)
from ips2.models.run import BenchRun, Method
from ips2.tensorsim import DENSE_VERIFICATION_CAP, decomposable_unfolded

logger = logging.getLogger(__name__)

REPORT_FILE = "report.json"
TIMINGS_FILE = "timings.json"
HISTOGRAM_BINS = 50


def run_record(run: BenchRun) -> RunRecord:
    """Deterministic part of a run's outcome."""
    result = run.result
    return RunRecord(
        method=run.method,
        seed=run.seed,
        status="completed" if run.status == "completed" else "failed",
        scores=dict(run.scores),
        objective=result.objective if result is not None else None,
        flags=list(result.diagnostics.flags) if result is not None else [],
        eig_residuals=(
            {k: list(v) for k, v in sorted(result.diagnostics.eig_residuals.items())}
            if result is not None
            else {}
        ),
        warnings=[WarningRecord(level=log.level, message=log.message) for log in run.warnings],
        error=run.error,
    )


def summarize(method: Method, records: list[RunRecord]) -> MethodSummary:
    """Mean and sample std of every metric over the successful runs of ``method``.

    With fewer than two successful runs the std is 0 and ``single_run`` is set.
    """
    completed = [r for r in records if r.status == "completed"]
    metrics: dict[str, MetricSummary] = {}
    if completed:
        for name in METRIC_NAMES:
            values = np.array([r.scores[name] for r in completed])
            std = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
            metrics[name] = MetricSummary(mean=float(np.mean(values)), std=std)
    return MethodSummary(
        method=method,
        runs=len(records),
        failed=len(records) - len(completed),
        single_run=len(completed) < 2,
        metrics=metrics,
    )


def build_report(spec: ExperimentSpec, dataset: Dataset, runs: list[BenchRun]) -> MetricsReport:
    """Assemble the report; runs are ordered by method then seed, whatever order they finished in."""
    records = sorted(
        (run_record(run) for run in runs), key=lambda r: (r.method.value, r.seed)
    )
    return MetricsReport(
        spec=spec,
        dataset=DatasetInfo(
            name=dataset.name,
            m=dataset.m,
            n=dataset.n,
            n_classes=dataset.n_classes,
            metadata=dataset.metadata,
        ),
        seeds=spec.seeds,
        methods=[
            summarize(method, [r for r in records if r.method == method])
            for method in spec.methods
        ],
        runs=records,
    )


def timings(runs: list[BenchRun]) -> dict[str, dict[str, object]]:
    """Wall-clock per run and per pipeline stage, in milliseconds."""
    ordered = sorted(runs, key=lambda r: (r.method.value, r.seed))
    return {
        run.label: {"total_ms": run.duration_ms, "stages": run.stage_timings}
        for run in ordered
    }


def write_report(report: MetricsReport, runs: list[BenchRun], output_dir: Path) -> Path:
    """Write ``report.json`` and ``timings.json`` into ``output_dir``."""
    output_dir.mkdir(parents=True, exist_ok=True)
    report_path = output_dir / REPORT_FILE
    report_path.write_text(report.to_json(), encoding="utf-8")
    (output_dir / TIMINGS_FILE).write_text(
        json.dumps(timings(runs), indent=2) + "\n", encoding="utf-8"
    )
    logger.info(f"Wrote {report_path}")
    return report_path


def similarity_histogram(values: np.ndarray) -> np.ndarray:
    """Counts of off-diagonal pair similarities in 50 equal bins over [0, 1]."""
    upper = values[np.triu_indices(values.shape[0], k=1)]
    counts, _ = np.histogram(upper, bins=HISTOGRAM_BINS, range=(0.0, 1.0))
    return counts


def write_dumps(
    dataset: Dataset, cfg: ClusterConfig, output_dir: Path, tensor: bool = False
) -> list[Path]:
    """Dump S, V and U as dense CSV plus their value histograms.

    With ``tensor`` the sparse indecomposable unfolding is written as coordinate
    CSV, and for small datasets the dense decomposable one too.
    """
    output_dir.mkdir(parents=True, exist_ok=True)
    dist, s = compute_pairwise(dataset, cfg)
    stage = compute_high_order(dist, cfg)
    u = fuse(s, stage.similarity)
    matrices = {"S": s.values, "V": stage.similarity.values, "U": u.values}

    written = []
    for name, values in matrices.items():
        path = output_dir / f"similarity_{name}.csv"
        np.savetxt(path, values, delimiter=",", fmt="%.17g")
        written.append(path)

    edges = np.linspace(0.0, 1.0, HISTOGRAM_BINS + 1)
    counts = {name: similarity_histogram(values) for name, values in matrices.items()}
    histogram_path = output_dir / "similarity_histogram.csv"
    with open(histogram_path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["bin_low", "bin_high", *matrices])
        for b in range(HISTOGRAM_BINS):
            writer.writerow(
                [f"{edges[b]:.2f}", f"{edges[b + 1]:.2f}", *(int(counts[n][b]) for n in matrices)]
            )
    written.append(histogram_path)

    if tensor:
        path = output_dir / "tensor_indecomposable.csv"
        stage.tensor.to_csv(path)
        written.append(path)
        if dataset.m <= DENSE_VERIFICATION_CAP:
            path = output_dir / "tensor_decomposable.csv"
            decomposable_unfolded(s).to_csv(path)
            written.append(path)
        else:
            logger.info(
                f"Skipping the decomposable tensor dump: m={dataset.m} exceeds {DENSE_VERIFICATION_CAP}"
            )
    return written
