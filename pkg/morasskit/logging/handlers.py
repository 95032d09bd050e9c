import logging
import sys
from typing import IO, Any, Dict, Optional, Union

from morasskit.logging.formatters import JSONFormatter, TextFormatter


class RunMetadataHandler(logging.StreamHandler):
    """
    Stream handler that stamps run metadata onto every record it emits.

    For the metadata to appear a TextFormatter (or subclass) must be the
    handler's formatter; other formatters get the plain record.
    """

    def __init__(
        self,
        stream: Optional[IO[str]] = None,
        level: int = logging.NOTSET,
        run_metadata: Optional[Dict[str, Any]] = None,
    ) -> None:
        """
        Inits RunMetadataHandler.

        Args:
            stream: Optional; defaults to sys.stderr so that stdout stays
                free for JSON reports.
            run_metadata: Optional; keys and values added to every record.
        """
        super(RunMetadataHandler, self).__init__(stream or sys.stderr)
        self.setLevel(level)

        self.default_formatter: TextFormatter = TextFormatter()
        self.run_metadata: Dict[str, Any] = dict(run_metadata or {})

    def set_run_metadata(self, **kwargs: Any) -> None:
        for key, value in kwargs.items():
            self.run_metadata[key] = value

    def format(self, record: logging.LogRecord) -> str:
        formatter = self.formatter or self.default_formatter
        if isinstance(formatter, TextFormatter):
            return formatter.format(record, run_metadata=self.run_metadata)

        return formatter.format(record)


def configure_logging(
    level: Union[int, str] = logging.WARNING,
    json: bool = False,
    stream: Optional[IO[str]] = None,
    run_metadata: Optional[Dict[str, Any]] = None,
) -> RunMetadataHandler:
    """
    Installs a single RunMetadataHandler on the ``morasskit`` logger,
    replacing any handler a previous call installed.
    """
    handler = RunMetadataHandler(stream=stream, run_metadata=run_metadata)
    if json:
        handler.setFormatter(JSONFormatter())
    else:
        handler.setFormatter(
            TextFormatter(fmt="%(asctime)s %(levelname)s %(name)s %(message)s")
        )

    package_logger = logging.getLogger("morasskit")
    for existing in list(package_logger.handlers):
        if isinstance(existing, RunMetadataHandler):
            package_logger.removeHandler(existing)

    package_logger.addHandler(handler)
    package_logger.setLevel(level)

    return handler
