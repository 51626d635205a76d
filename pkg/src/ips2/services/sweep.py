"""Parameter sweeps: one bench batch per point, plus the IPS2-over-SC gain table."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from ips2.errors import ParameterError, UsageError
from ips2.models import ClusterConfig, DatasetSource, ExperimentSpec, Method
from ips2.services.bench_service import BatchOutcome, BenchService, load_dataset
from ips2.synthgen import make_noise_model

logger = logging.getLogger(__name__)

SWEEP_FILE = "sweep.csv"


class SweepParam(str, Enum):
    """Quantities a sweep can vary."""

    DIM = "dim"
    N3 = "n3"
    NOISE = "noise"
    NOISE_KIND = "noise-kind"
    K = "k"

    @property
    def column(self) -> str:
        """Header of the sweep table's first column."""
        return {
            SweepParam.DIM: "dim",
            SweepParam.N3: "n3",
            SweepParam.NOISE: "level",
            SweepParam.NOISE_KIND: "noise_kind",
            SweepParam.K: "k",
        }[self]


SweepValue = int | float | str


def parse_values(param: SweepParam, raw: list[str]) -> list[SweepValue]:
    """Convert command-line values to the type ``param`` takes.

    Raises:
        UsageError: On an empty list or a value of the wrong type.
    """
    if not raw:
        raise UsageError("a sweep needs at least one value")
    try:
        if param in (SweepParam.DIM, SweepParam.N3, SweepParam.K):
            return [int(v) for v in raw]
        if param is SweepParam.NOISE:
            return [float(v) for v in raw]
    except ValueError as e:
        raise UsageError(f"bad value for sweep parameter {param.value}", str(e)) from e
    return [v.strip() for v in raw]


def point_spec(spec: ExperimentSpec, param: SweepParam, value: SweepValue) -> ExperimentSpec:
    """The bench spec of one sweep point, writing into its own subdirectory.

    Raises:
        UsageError: If ``param`` needs a generator source but the spec reads a CSV,
            or the value is invalid.
    """
    updates: dict[str, Any] = {
        "output_dir": str(Path(spec.output_dir) / f"{param.value}={value}")
    }
    try:
        if param is SweepParam.K:
            updates["config"] = ClusterConfig(**{**spec.config.model_dump(), "k": value})
        else:
            if spec.source.kind != "generator":
                raise UsageError(f"sweeping {param.value} needs a generator dataset source")
            params = dict(spec.source.params)
            if param is SweepParam.DIM:
                params["dim"] = value
            elif param is SweepParam.N3:
                params["n3"] = value
            elif param is SweepParam.NOISE:
                params["noise_std"] = value
            else:
                params["noise_std"] = 0.0
                updates["noise"] = make_noise_model(str(value))
            updates["source"] = DatasetSource(
                **{**spec.source.model_dump(), "params": params}
            )
    except (ValidationError, ParameterError) as e:
        raise UsageError(f"invalid sweep value {value!r} for {param.value}", str(e)) from e
    return spec.model_copy(update=updates)


@dataclass
class SweepPoint:
    """Outcome of the bench batch at one sweep value."""

    value: SweepValue
    outcome: BatchOutcome

    def mean_acc(self, method: Method) -> float | None:
        """Mean ACC of ``method`` at this point, if any run of it succeeded."""
        summary = self.outcome.report.summary_for(method)
        if summary is None or "acc" not in summary.metrics:
            return None
        return summary.metrics["acc"].mean


async def run_sweep(
    service: BenchService,
    spec: ExperimentSpec,
    param: SweepParam,
    values: list[SweepValue],
) -> list[SweepPoint]:
    """Run a bench batch at every sweep value, in order."""
    points = []
    for value in values:
        current = point_spec(spec, param, value)
        logger.info(f"Sweep point {param.value}={value}")
        outcome = await service.execute_batch(current, load_dataset(current))
        points.append(SweepPoint(value=value, outcome=outcome))
    return points


def gain_table(
    points: list[SweepPoint], param: SweepParam, methods: list[Method]
) -> list[dict[str, SweepValue | None]]:
    """Mean ACC per method per point, with the IPS2-minus-SC gain when both ran."""
    rows = []
    for point in points:
        row: dict[str, SweepValue | None] = {param.column: point.value}
        for method in Method:
            row[method.value] = point.mean_acc(method) if method in methods else None
        sc, ips2 = row[Method.SC.value], row[Method.IPS2.value]
        row["gain"] = (
            float(ips2) - float(sc)
            if isinstance(sc, float) and isinstance(ips2, float)
            else None
        )
        rows.append(row)
    return rows


def write_gain_table(
    rows: list[dict[str, SweepValue | None]], param: SweepParam, path: Path
) -> Path:
    """Write the sweep table as CSV; missing values are left empty."""
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = [param.column, *(m.value for m in Method), "gain"]
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: "" if v is None else v for k, v in row.items()})
    return path
