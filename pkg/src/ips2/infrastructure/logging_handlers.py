"""Log capture scoped to the bench run executing in the current context."""

from __future__ import annotations

import logging
from contextvars import ContextVar
from datetime import datetime
from typing import Callable

from ips2.models.messages import LogMessage

current_run_id: ContextVar[str | None] = ContextVar("ips2_current_run_id", default=None)


class RunContextLogHandler(logging.Handler):
    """Forwards records emitted inside a run's context to a callback.

    Records logged while no run is active are ignored. ``asyncio.to_thread`` copies
    the context, so worker threads report against the run that started them.
    """

    def __init__(
        self,
        callback: Callable[[LogMessage], None],
        level: int = logging.WARNING,
    ):
        """Initialize RunContextLogHandler with a callback and minimum level."""
        super().__init__(level)
        self.callback = callback
        self.setFormatter(logging.Formatter("%(message)s"))

    def emit(self, record: logging.LogRecord) -> None:
        """Emit a log record to the run that is active in this context."""
        run_id = current_run_id.get()
        if run_id is None:
            return
        try:
            log_msg = LogMessage(
                run_id=run_id,
                level=record.levelname,
                message=self.format(record),
                timestamp=datetime.fromtimestamp(record.created),
            )
            self.callback(log_msg)
        except Exception:
            self.handleError(record)
