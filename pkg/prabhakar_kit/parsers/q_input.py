"""
Coefficient ``q`` from a power expression or a CSV sample file.

Power expressions are sums of terms ``c*(s-a)^p`` where every factor is a
number, ``pi`` or ``(s-a)`` (``(t-a)`` and ``(u-a)`` are accepted as well), optionally raised
to a number, e.g. ``"pi^2"``, ``"1 + 2*(s-a)^0.5"`` or ``"-3.5e-1*(t-a)^2"``.
"""
import pathlib
import re
import typing as ty

import numpy as np

from prabhakar_kit.exceptions import ConfigError
from prabhakar_kit.prabhakar_ops import GridFunction, PowerLawSeries
from prabhakar_kit.utils.log import get_logger

LOGGER = get_logger(__name__)

_NUMBER = r"(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?"
_SIGNED = rf"[+-]?{_NUMBER}"

re_factor = re.compile(
    rf"^(?:(?P<number>{_NUMBER})|(?P<pi>pi)|\((?P<variable>[stu])-a\))"
    rf"(?:\^(?:(?P<power>{_SIGNED})|\((?P<bracketed>{_SIGNED})\)))?$"
)


class QExpressionError(ConfigError):
    """Raised when a ``q`` expression or sample file cannot be parsed."""


def _split(text: str, separators: str) -> ty.List[ty.Tuple[str, str]]:
    """Split at top-level ``separators``; signs in exponents and mantissas are kept."""
    pieces, depth, start = [], 0, 0
    lead = ""
    for index, char in enumerate(text):
        if char == "(":
            depth += 1
        elif char == ")":
            depth -= 1
        elif char in separators and depth == 0:
            previous = text[index - 1] if index else ""
            if previous and previous in "eE^*" and char in "+-":
                continue
            if index > start or pieces or lead:
                pieces.append((lead, text[start:index]))
            lead, start = char, index + 1
    pieces.append((lead, text[start:]))
    return pieces


def parse_q_expression(text: str, a: float = 0.0, *, integrable: bool = False) -> PowerLawSeries:
    """Parse a power expression into a ``PowerLawSeries`` based at ``a``.

    :param integrable: accept powers in ``(-1, 0)``, which are integrable but unbounded at ``a``
    :raises QExpressionError: on unparsable input or powers below the admissible range
    """
    expression = "".join(text.split())
    if not expression:
        raise QExpressionError("empty q expression")

    coefficients, exponents = [], []
    for sign, term in _split(expression, "+-"):
        if not term:
            raise QExpressionError(f"dangling sign in q expression '{text}'")
        coefficient = -1.0 if sign == "-" else 1.0
        exponent = 0.0
        for _, factor in _split(term, "*"):
            match = re_factor.match(factor)
            if not match:
                raise QExpressionError(f"cannot parse factor '{factor}' of q expression '{text}'")
            power = match.group("power") or match.group("bracketed")
            power = 1.0 if power is None else float(power)
            if match.group("variable"):
                exponent += power
            elif match.group("pi"):
                coefficient *= np.pi ** power
            else:
                coefficient *= float(match.group("number")) ** power
        if (integrable and exponent <= -1.0) or (not integrable and exponent < 0.0):
            kind = "integrable" if integrable else "continuous"
            raise QExpressionError(f"expression must be {kind} at a, got the power {exponent} in '{text}'")
        coefficients.append(coefficient)
        exponents.append(exponent)

    series = PowerLawSeries(a, tuple(coefficients), tuple(exponents)).merged()
    LOGGER.debug(f"parsed q = '{text}' into {len(series.coefficients)} terms")
    return series


def read_q_samples(path: ty.Union[str, pathlib.Path]) -> GridFunction:
    """Read ``s,q`` samples from a CSV file; a non-numeric first line is a header.

    :raises QExpressionError: if the file does not hold two numeric columns
    """
    path = pathlib.Path(path)
    with path.open("r", encoding="utf-8") as handle:
        first = handle.readline()
    try:
        float(first.split(",")[0])
        skiprows = 0
    except ValueError:
        skiprows = 1

    try:
        table = np.loadtxt(path, delimiter=",", comments="#", skiprows=skiprows, ndmin=2)
    except ValueError as exc:
        raise QExpressionError(f"failed to read q samples from '{path}': {exc}") from exc
    if table.shape[1] != 2:
        raise QExpressionError(f"expected two columns s,q in '{path}', found {table.shape[1]}")

    order = np.argsort(table[:, 0], kind="stable")
    LOGGER.info(f"read {len(table)} q samples from '{path}'")
    return GridFunction(table[order, 0], table[order, 1])


def load_q(text: str, a: float = 0.0) -> ty.Union[GridFunction, PowerLawSeries]:
    """Samples if ``text`` names a ``.csv`` file, else a power expression."""
    if text.lower().endswith(".csv"):
        path = pathlib.Path(text)
        if not path.is_file():
            raise QExpressionError(f"q sample file '{text}' does not exist")
        return read_q_samples(path)
    return parse_q_expression(text, a)
