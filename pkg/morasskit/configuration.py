import copy
import logging
import os
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

from morasskit.errors import ConfigurationError

logger = logging.getLogger(__name__)

DEFAULTS_PATH = str(Path(__file__).parent / "defaults.yaml")

# Overrides solver.enumeration_limit, the largest generator count the
# enumeration backend accepts.
SOLVER_BUDGET_ENV = "MORASSKIT_SOLVER_BUDGET"


def merge(base: Dict[str, Any], overlay: Dict[str, Any]) -> Dict[str, Any]:
    """
    Recursively merges overlay into a copy of base. Nested dictionaries are
    merged key by key, any other value in overlay replaces the one in base.
    """
    merged = copy.deepcopy(base)
    for key, value in overlay.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)

    return merged


class Manager(object):
    def __init__(self):
        self.config_dict = {}

    def get_configuration(self, name):
        if not isinstance(name, str):
            raise TypeError("A configuration name must be string")

        if name in self.config_dict:
            config = self.config_dict[name]
        else:
            config = Configuration(default_file_path=DEFAULTS_PATH)
            self.config_dict[name] = config

        return config


class Configuration(object):
    def __init__(
        self,
        file_path: Optional[str] = None,
        default_file_path: Optional[str] = DEFAULTS_PATH,
    ):
        """
        Retains the contents of a YAML configuration file layered over the
        packaged defaults.

        :param file_path: a user configuration merged over the defaults.
        :param default_file_path: the configuration always loaded first.
          Pass None to use file_path alone.
        """
        self._constants: Dict[str, Any] = {}

        self._loaded = False
        self._default_file_path = default_file_path
        self.file_path = file_path

        if default_file_path:
            self.load(default_file_path, ignore_missing=True)
        if file_path:
            self.load(file_path)

    @property
    def constants(self) -> Dict[str, Any]:
        return copy.deepcopy(self._constants)

    def load(self, file_path: str, ignore_missing: bool = False) -> None:
        # Imported lazily so that reading the version does not need yaml.
        import yaml

        if ignore_missing and not os.path.isfile(file_path):
            logger.warning("Ignoring missing configuration file: {}".format(file_path))
            return

        with open(file_path, "r") as fp:
            contents = yaml.safe_load(fp) or {}

        if not isinstance(contents, dict):
            raise ConfigurationError(
                "Configuration file {} must contain a mapping".format(file_path)
            )

        self._constants = merge(self._constants, contents)
        self._loaded = True
        self.file_path = file_path

    def update(self, overrides: Dict[str, Any]) -> None:
        self._constants = merge(self._constants, overrides)

    def get_constant(self, path: Iterable[str], default: Any = None) -> Any:
        current = self._constants

        for key in path:
            if isinstance(current, dict) and key in current:
                current = current[key]
            else:
                return default

        if current is None:
            return default

        return copy.deepcopy(current)

    def get_int(self, path: Iterable[str], default: int) -> int:
        path = list(path)
        value = self.get_constant(path, default)
        try:
            return int(value)
        except (TypeError, ValueError):
            raise ConfigurationError(
                "Configuration key {} must be an integer, found {!r}".format(
                    ".".join(path), value
                )
            )

    def solver_budget(self) -> int:
        """
        The enumeration backend's generator limit. The environment variable
        MORASSKIT_SOLVER_BUDGET takes precedence over the configuration.
        """
        raw = os.environ.get(SOLVER_BUDGET_ENV)
        if raw is not None:
            try:
                budget = int(raw)
            except ValueError:
                raise ConfigurationError(
                    "{} must be an integer, found {!r}".format(SOLVER_BUDGET_ENV, raw)
                )
            if budget < 0:
                raise ConfigurationError(
                    "{} must not be negative".format(SOLVER_BUDGET_ENV)
                )
            return budget

        return self.get_int(["solver", "enumeration_limit"], 20)

    def get_file_path(self) -> Optional[str]:
        if self.file_path:
            return self.file_path
        return self._default_file_path


def get_configuration(name: str = "morasskit") -> Configuration:
    return MANAGER.get_configuration(name)


MANAGER = Manager()
