"""Exceptions raised by prabhakar_kit."""
import typing as ty


class PrabhakarKitError(Exception):
    """Base class of all errors raised by the package."""


class DomainError(PrabhakarKitError, ValueError):
    """Raised when an argument lies outside the supported domain."""


class TruncationError(PrabhakarKitError):
    """Raised when a series does not reach its tolerance within ``max_terms``.

    :param partial_sum: the partial sum when the summation stopped
    :param last_term: the last term added
    :param n_terms: the number of terms summed
    """

    def __init__(self, message: str, *, partial_sum: float, last_term: float, n_terms: int):
        super().__init__(
            f"{message} (partial sum {partial_sum!r}, last term {last_term!r}, {n_terms} terms)"
        )
        self.partial_sum = partial_sum
        self.last_term = last_term
        self.n_terms = n_terms


class AccuracyError(PrabhakarKitError):
    """Raised when a quadrature or differencing estimate exceeds its target."""

    def __init__(self, message: str, *, estimate: float, target: float):
        super().__init__(f"{message} (estimate {estimate:.3e}, target {target:.3e})")
        self.estimate = estimate
        self.target = target


class ConfigError(PrabhakarKitError, ValueError):
    """Raised when parameters are invalid or a config fails its validation report."""

    def __init__(self, message: str, report: ty.Any = None):
        super().__init__(message)
        self.report = report


class SpectralError(PrabhakarKitError):
    """Raised when the dominant eigenvalue cannot be used for spectral scaling."""

    def __init__(self, message: str, eigenvalues: ty.Sequence[complex] = ()):
        super().__init__(message)
        self.eigenvalues = tuple(eigenvalues)
