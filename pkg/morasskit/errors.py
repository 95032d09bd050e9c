class MorassKitError(Exception):
    """Base class for every error raised by morasskit."""


class ConfigurationError(MorassKitError):
    pass
