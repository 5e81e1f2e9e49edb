"""Parsers for user-supplied coefficients and sweep files."""

from .q_input import QExpressionError, load_q, parse_q_expression, read_q_samples
from .sweep import SweepFileError, read_sweep_configs

__all__ = [
    "QExpressionError",
    "SweepFileError",
    "load_q",
    "parse_q_expression",
    "read_q_samples",
    "read_sweep_configs",
]
