"""Sweep configuration files: a JSON array of ``BVPConfig``-shaped objects."""
import json
import pathlib
import typing as ty

from voluptuous import MultipleInvalid

from prabhakar_kit.data import SweepEntryParameters
from prabhakar_kit.exceptions import ConfigError
from prabhakar_kit.greens_function import BVPConfig
from prabhakar_kit.utils.log import get_logger

LOGGER = get_logger(__name__)


class SweepFileError(ConfigError):
    """Raised when a sweep file is not a JSON array of valid configurations."""


def read_sweep_configs(path: ty.Union[str, pathlib.Path]) -> ty.List[BVPConfig]:
    """Read the configurations of a sweep file.

    Each entry takes the keys of the ``certify`` subcommand:
    ``a``, ``b``, ``xi``, ``beta``, ``rho``, ``mu``, ``gamma``, ``omega``.

    :raises SweepFileError: naming the offending entry
    """
    path = pathlib.Path(path)
    try:
        with path.open("r", encoding="utf-8") as handle:
            entries = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise SweepFileError(f"failed to read sweep file '{path}': {exc}") from exc

    if not isinstance(entries, list):
        raise SweepFileError(f"sweep file '{path}' must hold a JSON array")

    configs = []
    for index, entry in enumerate(entries):
        try:
            parameters = SweepEntryParameters(entry).get_dict()
        except MultipleInvalid as exc:
            raise SweepFileError(f"entry {index} of '{path}': {exc}", report=entry) from exc
        configs.append(BVPConfig.from_parameters(**parameters))

    LOGGER.info(f"read {len(configs)} configurations from '{path}'")
    return configs
