"""Log and trace capture for bench runs."""

from ips2.infrastructure.logging_handlers import RunContextLogHandler, current_run_id
from ips2.infrastructure.tracing_exporter import StageTimingExporter, tracer_provider

__all__ = [
    "RunContextLogHandler",
    "StageTimingExporter",
    "current_run_id",
    "tracer_provider",
]
