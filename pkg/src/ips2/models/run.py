"""A single benchmark run: one method on one seed."""

from datetime import datetime
from enum import Enum
from uuid import uuid4

from ips2.errors import ErrorContract
from ips2.models.messages import LogMessage, TraceMessage
from ips2.models.results import ClusteringResult


class Method(str, Enum):
    """Clustering methods the bench can run."""

    SC = "sc"
    PPC = "ppc"
    IPS2 = "ips2"


class BenchRun:
    """State of one method/seed run, filled in by the bench service."""

    def __init__(self, method: Method, seed: int):
        """Initialize a pending BenchRun."""
        self.id = str(uuid4())[:8]
        self.method = method
        self.seed = seed
        self.start_time: datetime | None = None
        self.end_time: datetime | None = None
        self.status = "pending"  # pending, running, completed, failed
        self.traces: list[TraceMessage] = []
        self.logs: list[LogMessage] = []
        self.error: ErrorContract | None = None
        self.result: ClusteringResult | None = None
        self.scores: dict[str, float] = {}

    @property
    def label(self) -> str:
        """Stable name of the run within a batch."""
        return f"{self.method.value}-{self.seed}"

    @property
    def duration_ms(self) -> float | None:
        """Wall-clock duration in milliseconds, once finished."""
        if self.start_time and self.end_time:
            return (self.end_time - self.start_time).total_seconds() * 1000
        return None

    @property
    def stage_timings(self) -> dict[str, float]:
        """Total milliseconds spent per pipeline stage."""
        timings: dict[str, float] = {}
        for trace in self.traces:
            if trace.duration_ms is not None:
                timings[trace.span_name] = (
                    timings.get(trace.span_name, 0.0) + trace.duration_ms
                )
        return dict(sorted(timings.items()))

    @property
    def warnings(self) -> list[LogMessage]:
        """Warnings logged during the run."""
        return [log for log in self.logs if log.level == "WARNING"]
