import json
import logging
import time
from typing import Any, Callable, Dict, List, Optional, Tuple


class TextFormatter(logging.Formatter):
    """
    Formats a log record as text.

    Timestamps are ISO 8601 in UTC with milliseconds. Run metadata (the
    subcommand, seed and report schema of a CLI run) is appended as sorted
    ``key=value`` lines.
    """

    converter: Callable[[Optional[float]], time.struct_time] = time.gmtime

    def __init__(
        self, fmt: Optional[str] = None, datefmt: Optional[str] = None, style: str = "%"
    ) -> None:
        """
        Inits TextFormatter.

        Args:
            fmt: Optional; a format string in the style given by style.
            datefmt: Optional; a time.strftime format for the timestamp.
            style: Optional; one of '%', '{' or '$'.
        """
        super(TextFormatter, self).__init__(
            fmt=fmt, datefmt=datefmt, style=style  # type: ignore
        )

        # milliseconds and timezone are added in formatTime.
        self.default_time_format: str = "%Y-%m-%dT%H:%M:%S"

    def formatTime(self, record: logging.LogRecord, datefmt: str = None) -> str:
        # Mypy confused by time.gmtime because it is written in C.
        ct: time.struct_time = self.converter(record.created)  # type: ignore

        if datefmt:
            return time.strftime(datefmt, ct)

        return (
            f"{time.strftime(self.default_time_format, ct)}"
            f".{record.msecs:03.0f}{time.strftime('%z', ct)}"
        )

    def format(
        self,
        record: logging.LogRecord,
        run_metadata: Optional[Dict[str, Any]] = None,
    ) -> str:
        """
        Formats a log record as text followed by the run metadata.

        Args:
            record: The log record to format.
            run_metadata: Fields appended as ``key=value`` lines. Values must
                have a __str__ representation.
        """
        string: str = super(TextFormatter, self).format(record)

        if run_metadata:
            items: List[Tuple[str, Any]] = sorted(run_metadata.items())
            lines = [string.rstrip()]
            lines.extend("{}={}".format(key, value) for key, value in items)
            string = "\n".join(lines)

        return string


class JSONFormatter(TextFormatter):
    """
    Formats log records as single-line JSON objects.
    """

    def __init__(self, datefmt: Optional[str] = None) -> None:
        super(JSONFormatter, self).__init__(datefmt=datefmt)

    def format(
        self,
        record: logging.LogRecord,
        run_metadata: Optional[Dict[str, Any]] = None,
    ) -> str:
        """
        Formats a log record into a dictionary, then JSON dumps it.

        Run metadata never overwrites the standard fields.
        """
        record.message = record.getMessage()
        record.asctime = self.formatTime(record, self.datefmt)

        formatted: Dict[str, Any] = {
            "timestamp": record.asctime,
            "message": record.message,
            "logger": record.name,
            "level": record.levelname,
            "level_num": record.levelno,
            "function": record.funcName,
            "line": record.lineno,
        }

        if record.exc_info:
            if not record.exc_text:
                record.exc_text = self.formatException(record.exc_info)
        if record.exc_text:
            formatted["exception"] = record.exc_text
        if record.stack_info:
            formatted["stack_trace"] = self.formatStack(record.stack_info)

        if run_metadata:
            for key, value in run_metadata.items():
                if key not in formatted:
                    formatted[key] = str(value)

        return json.dumps(formatted, sort_keys=True)
