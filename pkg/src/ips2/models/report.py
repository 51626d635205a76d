"""Experiment specification and the JSON report it produces.

The report is a pure function of the spec: it carries no timestamps, run ids or
durations, so regenerating it from the echoed spec reproduces the same bytes.
Wall-clock data lives in a separate timings file.
"""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ips2.errors import ErrorContract
from ips2.models.config import ClusterConfig, NoiseModel, Standardization
from ips2.models.run import Method

SCHEMA_VERSION = 1


class DatasetSource(BaseModel):
    """Where the samples come from: a CSV file or a named generator."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["csv", "generator"]
    path: str | None = None
    label_column: str | int | None = None
    has_header: bool = False
    generator: str | None = None
    params: dict[str, Any] = Field(default_factory=dict)
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _check_kind(self) -> DatasetSource:
        if self.kind == "csv" and self.path is None:
            raise ValueError("a csv source needs a path")
        if self.kind == "generator" and self.generator is None:
            raise ValueError("a generator source needs a generator name")
        return self


class ExperimentSpec(BaseModel):
    """Everything needed to re-run a benchmark bit-identically.

    ``output_dir`` and ``workers`` change neither the runs nor the report, so they
    are left out of the serialized form.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    source: DatasetSource
    standardization: Standardization = Standardization.NONE
    noise: NoiseModel | None = None
    methods: list[Method] = Field(
        default_factory=lambda: [Method.SC, Method.PPC, Method.IPS2], min_length=1
    )
    config: ClusterConfig = Field(default_factory=ClusterConfig)
    repeats: int = Field(default=1, ge=1)
    output_dir: str = Field(default="ips2-out", exclude=True)
    dump_similarities: bool = False
    dump_tensor: bool = False
    workers: int = Field(default=1, ge=1, exclude=True)

    @field_validator("methods")
    @classmethod
    def _unique_methods(cls, value: list[Method]) -> list[Method]:
        if len(set(value)) != len(value):
            raise ValueError("methods must not repeat")
        return value

    @property
    def seeds(self) -> list[int]:
        """Seeds of the repeats: ``seed, seed + 1, ...``."""
        return [self.config.seed + r for r in range(self.repeats)]


class DatasetInfo(BaseModel):
    """Shape and provenance of the clustered dataset."""

    name: str
    m: int
    n: int
    n_classes: int
    metadata: dict[str, Any] = Field(default_factory=dict)


class WarningRecord(BaseModel):
    """A warning logged during a run."""

    level: str
    message: str


class RunRecord(BaseModel):
    """Outcome of one method on one seed."""

    method: Method
    seed: int
    status: Literal["completed", "failed"]
    scores: dict[str, float] = Field(default_factory=dict)
    objective: float | None = None
    flags: list[str] = Field(default_factory=list)
    eig_residuals: dict[str, list[float]] = Field(default_factory=dict)
    warnings: list[WarningRecord] = Field(default_factory=list)
    error: ErrorContract | None = None


class MetricSummary(BaseModel):
    """Mean and sample standard deviation (n-1 denominator) of one metric."""

    mean: float
    std: float


class MethodSummary(BaseModel):
    """Aggregate scores of one method over its successful runs."""

    method: Method
    runs: int
    failed: int
    single_run: bool
    metrics: dict[str, MetricSummary] = Field(default_factory=dict)


class MetricsReport(BaseModel):
    """Per-method summaries plus every raw run, sorted by method then seed."""

    schema_version: int = SCHEMA_VERSION
    spec: ExperimentSpec
    dataset: DatasetInfo
    seeds: list[int]
    methods: list[MethodSummary]
    runs: list[RunRecord]

    @property
    def failed_runs(self) -> int:
        """Number of runs that ended in an error."""
        return sum(1 for run in self.runs if run.status == "failed")

    def summary_for(self, method: Method) -> MethodSummary | None:
        """Summary of ``method``, if it was run."""
        return next((s for s in self.methods if s.method == method), None)

    def to_json(self) -> str:
        """Serialize with stable indentation and key order."""
        return self.model_dump_json(indent=2) + "\n"
