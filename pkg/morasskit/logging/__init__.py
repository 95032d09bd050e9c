from morasskit.logging.formatters import JSONFormatter, TextFormatter
from morasskit.logging.handlers import RunMetadataHandler, configure_logging

__all__ = ["JSONFormatter", "TextFormatter", "RunMetadataHandler", "configure_logging"]
