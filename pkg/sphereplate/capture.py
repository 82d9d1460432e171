"""Logging setup and in-memory capture of solver diagnostics."""

import json
import logging
import sys
from types import TracebackType
from typing import Optional, Union

try:
    from typing import Self
except ImportError:
    # 3.9 and 3.10
    from typing import TypeVar

    Self = TypeVar("Self", bound="LogCapture")

__all__ = ["JsonFormatter", "PersistentHandler", "LogCapture", "setup_logging"]

LOG_LVL = "warning"
PACKAGE_LOGGER = "sphereplate"
TEXT_FORMAT = "%(levelname)s %(name)s: %(message)s"


class JsonFormatter(logging.Formatter):
    """Format every record as one JSON object per line.

    Structured payloads can be attached with ``extra={"data": {...}}``.
    """

    RECORD_KEYS = ("levelname", "name", "message")

    def format(self, record: logging.LogRecord) -> str:
        """Render the record as a JSON line."""
        record.message = record.getMessage()
        data = {"time": self.formatTime(record)}
        for key in self.RECORD_KEYS:
            data[key] = getattr(record, key)
        payload = getattr(record, "data", None)
        if payload is not None:
            data["data"] = payload
        return json.dumps(data, sort_keys=True, default=str)


class PersistentHandler(logging.Handler):
    """Keep formatted solver diagnostics in memory, in emission order."""

    def __init__(self, json: bool = False, level: str = "WARNING"):
        """Create an empty record queue.

        :param json: store JSON lines rather than text lines, defaults to False
        :type json: bool, optional
        :param level: lowest level to keep, defaults to "WARNING"
        :type level: str, optional
        """
        super().__init__()
        self.records: list[str] = []
        self.cursor = 0
        self.closed = False
        self.json = json
        self.setFormatter(JsonFormatter() if json else logging.Formatter(TEXT_FORMAT))
        self.setLevel(level.upper())

    def emit(self, record: logging.LogRecord):
        """Format ``record`` and append it; blank lines are skipped."""
        try:
            line = self.format(record).rstrip()
        except Exception:
            self.handleError(record)
            return
        if line:
            self.records.append(line)

    def get(self) -> Optional[str]:
        """Pop the oldest record not read yet.

        :return: the record, or ``None`` once the queue is drained
        :rtype: Optional[str]
        """
        if self.cursor == len(self.records):
            return None
        self.cursor += 1
        return self.records[self.cursor - 1]

    def get_all(self) -> list[str]:
        """Every record, read or not."""
        return self.records

    def close(self):
        """Flag the queue as finished."""
        self.closed = True
        super().close()


class LogCapture:
    """Collect records from a logger while a batch run is in progress.

    Use as a context manager; the handler is detached on exit and the
    records stay available afterwards.
    """

    def __init__(self, logger: str = PACKAGE_LOGGER, log_json: bool = False):
        """Start collecting warnings from ``logger`` and its children.

        :param logger: name of the logger to watch, defaults to the package logger
        :type logger: str, optional
        :param log_json: keep JSON lines, defaults to False
        :type log_json: bool, optional
        """
        self.handler = PersistentHandler(log_json)
        self.logger = logging.getLogger(logger)
        self.logger.addHandler(self.handler)

    @property
    def records(self) -> list[str]:
        """Every record kept since the handler was attached."""
        return self.handler.get_all()

    def close(self):
        """Stop collecting."""
        self.logger.removeHandler(self.handler)
        self.handler.close()

    def __enter__(self) -> Self:
        """Return the runtime context."""
        return self

    def __exit__(
        self,
        exc_type: Optional[type[BaseException]],
        exc_value: Optional[BaseException],
        traceback: Optional[TracebackType],
    ) -> bool:
        """Detach the handler, never swallowing exceptions."""
        self.close()
        return False

    def __str__(self):
        """Join all records together as single string block."""
        return "\n".join(self.records)


def setup_logging(level: Union[str, int] = LOG_LVL, json: bool = False) -> logging.Logger:
    """Configure the package logger with a single stream handler on stderr.

    Calling it again replaces the previous stream handler instead of stacking.

    :param level: lowest level to emit, defaults to LOG_LVL
    :type level: Union[str, int], optional
    :param json: emit JSON lines instead of text, defaults to False
    :type json: bool, optional
    :return: the package logger
    :rtype: logging.Logger
    """
    logger = logging.getLogger(PACKAGE_LOGGER)
    for handler in list(logger.handlers):
        if getattr(handler, "_sphereplate_stream", False):
            logger.removeHandler(handler)

    handler = logging.StreamHandler(sys.stderr)
    handler._sphereplate_stream = True
    if json:
        handler.setFormatter(JsonFormatter())
    else:
        handler.setFormatter(logging.Formatter(TEXT_FORMAT))
    logger.addHandler(handler)
    logger.setLevel(level.upper() if isinstance(level, str) else level)
    return logger
