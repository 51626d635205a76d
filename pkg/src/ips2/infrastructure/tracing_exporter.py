"""OpenTelemetry span exporter that attributes pipeline stage timings to runs."""

from __future__ import annotations

import logging
from datetime import datetime
from typing import Callable, Sequence
from weakref import WeakKeyDictionary

from opentelemetry import trace
from opentelemetry.sdk.trace import ReadableSpan, TracerProvider
from opentelemetry.sdk.trace.export import (
    SimpleSpanProcessor,
    SpanExporter,
    SpanExportResult,
)
from opentelemetry.trace import StatusCode

from ips2.infrastructure.logging_handlers import current_run_id
from ips2.models.messages import TraceMessage

logger = logging.getLogger(__name__)

RUN_ID_ATTRIBUTE = "run.id"

_provider: TracerProvider | None = None
_fanouts: WeakKeyDictionary[TracerProvider, _Fanout] = WeakKeyDictionary()


def tracer_provider() -> TracerProvider:
    """Return the SDK provider, installing it as the global one on first use.

    If the application already installed an SDK provider, that one is reused.
    """
    global _provider
    if _provider is None:
        current = trace.get_tracer_provider()
        if isinstance(current, TracerProvider):
            _provider = current
        else:
            _provider = TracerProvider()
            trace.set_tracer_provider(_provider)
    return _provider


class StageTimingExporter(SpanExporter):
    """Turns finished spans into TraceMessages for the run they belong to.

    The run is read from the span's ``run.id`` attribute, falling back to the run
    active in the exporting context. With a simple (synchronous) span processor
    that is the context the span ended in.
    """

    def __init__(self, on_trace: Callable[[TraceMessage], None]):
        """Initialize StageTimingExporter with a trace callback."""
        self.on_trace = on_trace
        self._closed = False
        self._fanout: _Fanout | None = None

    def export(self, spans: Sequence[ReadableSpan]) -> SpanExportResult:
        """Export spans to the bench service."""
        if self._closed:
            return SpanExportResult.SUCCESS
        try:
            for span in spans:
                self._export_span(span)
            return SpanExportResult.SUCCESS
        except Exception as e:
            logger.error(f"Failed to export spans: {e}")
            return SpanExportResult.FAILURE

    def _export_span(self, span: ReadableSpan) -> None:
        attributes = dict(span.attributes) if span.attributes else {}
        run_id = attributes.get(RUN_ID_ATTRIBUTE) or current_run_id.get()
        if run_id is None:
            return

        start_ns = span.start_time or 0
        duration_ms = (
            (span.end_time - start_ns) / 1_000_000 if span.end_time is not None else None
        )
        if span.status.status_code == StatusCode.ERROR:
            status = "failed"
        elif duration_ms is not None:
            status = "completed"
        else:
            status = "running"

        span_context = span.get_span_context()
        parent_span_id = f"{span.parent.span_id:016x}" if span.parent else None

        self.on_trace(
            TraceMessage(
                run_id=str(run_id),
                span_name=span.name,
                span_id=f"{span_context.span_id:016x}",
                parent_span_id=parent_span_id,
                trace_id=f"{span_context.trace_id:032x}",
                status=status,
                duration_ms=duration_ms,
                timestamp=datetime.fromtimestamp(start_ns / 1_000_000_000),
                attributes=attributes,
            )
        )

    def attach(self, provider: TracerProvider | None = None) -> StageTimingExporter:
        """Register this exporter on ``provider`` through its shared simple span processor."""
        provider = provider or tracer_provider()
        fanout = _fanouts.get(provider)
        if fanout is None:
            fanout = _fanouts[provider] = _Fanout()
            provider.add_span_processor(SimpleSpanProcessor(fanout))
        fanout.exporters.append(self)
        self._fanout = fanout
        return self

    def shutdown(self) -> None:
        """Stop forwarding spans and detach from the provider."""
        self._closed = True
        if self._fanout is not None and self in self._fanout.exporters:
            self._fanout.exporters.remove(self)
        self._fanout = None

    def force_flush(self, timeout_millis: int = 30000) -> bool:
        """Force flush any pending spans."""
        return True


class _Fanout(SpanExporter):
    """Forwards spans to the exporters attached to one provider.

    Providers cannot drop a span processor, so each gets a single processor and
    exporters come and go here.
    """

    def __init__(self) -> None:
        self.exporters: list[StageTimingExporter] = []

    def export(self, spans: Sequence[ReadableSpan]) -> SpanExportResult:
        results = [exporter.export(spans) for exporter in list(self.exporters)]
        if SpanExportResult.FAILURE in results:
            return SpanExportResult.FAILURE
        return SpanExportResult.SUCCESS

    def shutdown(self) -> None:
        self.exporters.clear()
