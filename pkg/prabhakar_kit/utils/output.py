"""Deterministic JSON, NDJSON and CSV output."""
import dataclasses
import enum
import json
import math
import pathlib
import typing as ty

import click
import numpy as np

SCHEMA_VERSION = "prabhakar-kit/1"


def to_jsonable(obj: ty.Any) -> ty.Any:
    """Convert reports, enums and numpy values to plain JSON types.

    Finite floats are kept as they are, so ``json`` writes the shortest repr
    that reads back as the same double; the text is fixed by the value.
    ``nan`` and ``inf`` become ``None``. Dictionary order is kept.
    """
    # pylint: disable=too-many-return-statements
    if hasattr(obj, "as_dict"):
        return to_jsonable(obj.as_dict())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(dataclasses.asdict(obj))
    if isinstance(obj, enum.Enum):
        return to_jsonable(obj.value)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None
    if isinstance(obj, complex):
        return {"real": to_jsonable(obj.real), "imag": to_jsonable(obj.imag)}
    if isinstance(obj, dict):
        return {str(key): to_jsonable(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [to_jsonable(value) for value in obj]
    if isinstance(obj, pathlib.Path):
        return str(obj)
    return obj


def dumps(payload: ty.Dict[str, ty.Any]) -> str:
    """Versioned JSON document, ``schema`` first."""
    document = {"schema": SCHEMA_VERSION, **to_jsonable(payload)}
    return json.dumps(document, indent=2, allow_nan=False) + "\n"


def dumps_line(payload: ty.Dict[str, ty.Any]) -> str:
    """One NDJSON record."""
    document = {"schema": SCHEMA_VERSION, **to_jsonable(payload)}
    return json.dumps(document, separators=(",", ":"), allow_nan=False) + "\n"


def write_text(text: str, path: ty.Optional[ty.Union[str, pathlib.Path]] = None) -> None:
    """Write to ``path``, or to stdout if it is ``None``."""
    if path is None:
        click.echo(text, nl=False)
        return
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def grid_csv(t: np.ndarray, s: np.ndarray, values: np.ndarray, name: str = "G") -> str:
    """Long-format CSV ``t,s,<name>`` of a tensor grid ``values[i, j]`` at ``(t[i], s[j])``."""
    t_mesh, s_mesh = np.meshgrid(np.asarray(t, dtype=float), np.asarray(s, dtype=float), indexing="ij")
    lines = [f"t,s,{name}"]
    for row in zip(t_mesh.ravel(), s_mesh.ravel(), np.asarray(values, dtype=float).ravel()):
        lines.append(",".join(f"{value:.17g}" for value in row))
    return "\n".join(lines) + "\n"
