"""Gamma, Pochhammer and three-parameter Mittag-Leffler functions.

The generalized Mittag-Leffler function is

    E^gamma_{rho,mu}(z) = sum_k (gamma)_k z^k / (Gamma(rho k + mu) k!)

and is evaluated here by direct summation of its power series for real
parameters and ``|z| <= Z_MAX``. Series whose terms cancel, as they do for
negative arguments, are summed again in multiprecision arithmetic (mpmath)
with enough digits to cover the largest term. No asymptotic expansion is
implemented, so larger arguments are rejected instead of being returned
inaccurately.
"""
import dataclasses
import math
import typing as ty

import mpmath
import numpy as np
from scipy import special

from prabhakar_kit.data import MLParameters, validate_fields
from prabhakar_kit.exceptions import DomainError, TruncationError
from prabhakar_kit.utils.log import get_logger

__all__ = [
    "MLParams",
    "MLResult",
    "log_gamma",
    "pochhammer",
    "series_term",
    "ml3",
    "ml2",
    "ml1",
    "ml_coefficients",
    "ml3_values",
]

LOGGER = get_logger(__name__)

TOL_ML = 1e-14
MAX_TERMS = 10_000
Z_MAX = 50.0
# relative rounding bound above which ml3_values hands an argument to ml3
TOL_CANCELLATION = 1e-11
# decimal digits carried beyond the magnitude of the largest term
GUARD_DIGITS = 20

_EPS = float(np.finfo(float).eps)
# below this the recurrence may silently underflow while the true term is representable
_LOG_TINY = math.log(np.finfo(float).tiny)


@dataclasses.dataclass(frozen=True)
class MLParams:
    """Parameters ``(rho, mu, gamma)`` and argument ``z`` of the Mittag-Leffler series."""

    rho: float
    mu: float
    gamma: float
    z: float

    def __post_init__(self):
        validate_fields(self, MLParameters)


@dataclasses.dataclass(frozen=True)
class MLResult:
    """Value of a truncated Mittag-Leffler series.

    ``error`` bounds the neglected tail plus the accumulated rounding,
    ``n_terms`` is the number of terms summed.
    """

    value: float
    error: float
    n_terms: int

    def __float__(self) -> float:
        return self.value


def log_gamma(x: float) -> float:
    """Return ``ln Gamma(x)`` for ``x > 0``.

    :param x: argument
    :type x: float
    :raises DomainError: if ``x <= 0`` or not finite
    :return: natural logarithm of the gamma function
    :rtype: float
    """
    if not (math.isfinite(x) and x > 0):
        raise DomainError(f"log_gamma requires a finite x > 0, got {x!r}")
    return float(special.gammaln(x))


def _is_nonpositive_integer(value: float) -> bool:
    return value <= 0 and float(value).is_integer()


def pochhammer(
    gamma: float, k: int, *, with_flag: bool = False
) -> ty.Union[float, ty.Tuple[float, bool]]:
    """Rising factorial ``(gamma)_k = gamma (gamma+1) ... (gamma+k-1)``.

    The product is formed factor by factor, so it is exact whenever the
    intermediate products are exactly representable.

    :param gamma: base
    :type gamma: float
    :param k: number of factors, ``k >= 0``
    :type k: int
    :param with_flag: also return whether the product overflowed, defaults to False
    :type with_flag: bool, optional
    :raises DomainError: if ``k`` is negative or not an integer
    :return: ``(gamma)_k``, or ``((gamma)_k, overflowed)`` when ``with_flag``
    """
    if int(k) != k or k < 0:
        raise DomainError(f"pochhammer requires a non-negative integer k, got {k!r}")
    k = int(k)

    if _is_nonpositive_integer(gamma) and k > -gamma:
        value = 0.0
    else:
        value = 1.0
        for j in range(k):
            value *= gamma + j
            if math.isinf(value):
                break

    overflowed = math.isinf(value)
    if overflowed:
        LOGGER.warning(f"Pochhammer symbol ({gamma})_{k} overflowed")
    if with_flag:
        return value, overflowed
    return value


def _log_rising(gamma: float, k: int) -> ty.Tuple[float, float]:
    """Return ``(log|(gamma)_k|, sign((gamma)_k))``; sign 0 when a factor vanishes."""
    if k == 0:
        return 0.0, 1.0
    factors = gamma + np.arange(k, dtype=float)
    if np.any(factors == 0):
        return -math.inf, 0.0
    sign = -1.0 if np.count_nonzero(factors < 0) % 2 else 1.0
    return float(np.sum(np.log(np.abs(factors)))), sign


def series_term(p: MLParams, k: int) -> float:
    """Evaluate the ``k``-th term of the series directly, without the recurrence.

    :param p: series parameters and argument
    :type p: MLParams
    :param k: term index
    :type k: int
    :return: ``(gamma)_k z^k / (Gamma(rho k + mu) k!)``
    :rtype: float
    """
    if p.z == 0.0:
        return float(special.rgamma(p.mu)) if k == 0 else 0.0

    log_abs, sign = _log_rising(p.gamma, k)
    if sign == 0.0:
        return 0.0
    argument = p.rho * k + p.mu
    if _is_nonpositive_integer(argument):
        return 0.0
    sign *= math.copysign(1.0, p.z) ** k * float(special.gammasgn(argument))
    exponent = (
        log_abs
        - special.gammaln(k + 1)
        + k * math.log(abs(p.z))
        - special.gammaln(argument)
    )
    return sign * float(np.exp(exponent))


def _monotone_index(rho: float, mu: float, gamma: float) -> int:
    """Index beyond which the term ratios ``|t_k / t_{k-1}|`` are non-increasing."""
    spread = 1.0 + abs(gamma)
    return int(math.ceil(abs(gamma)) + math.ceil(spread * (1.0 + mu / rho) / rho)) + 1


def _sum_series(
    rho: float, mu: float, gamma: float, z: float, tol: float, max_terms: int
) -> ty.Tuple[float, float, int]:
    """Sum the series by the term recurrence, falling back to log space on over/underflow."""
    first = float(special.rgamma(mu))
    if z == 0.0 or gamma == 0.0:
        return first, 0.0, 1

    term = first
    log_term = -float(special.gammaln(mu))
    sign = 1.0
    total = term
    largest = abs(term)
    previous = abs(term)
    previous_ratio = math.inf
    log_z = math.log(abs(z))
    k_min = _monotone_index(rho, mu, gamma)
    tail = 0.0

    for k in range(1, max_terms + 1):
        factor = gamma + k - 1
        if factor == 0.0:
            # (gamma)_k vanishes from here on: the series is a polynomial
            tail = 0.0
            break
        gamma_ratio = float(special.poch(rho * (k - 1) + mu, rho))
        term = term * z * factor / (k * gamma_ratio)
        log_term += log_z + math.log(abs(factor)) - math.log(k) - math.log(gamma_ratio)
        sign *= math.copysign(1.0, z) * math.copysign(1.0, factor)
        if not math.isfinite(term) or (term == 0.0 and log_term > _LOG_TINY):
            term = sign * float(np.exp(log_term))
            if not math.isfinite(term):
                raise TruncationError(
                    f"Mittag-Leffler series overflows for rho={rho}, mu={mu}, gamma={gamma}, z={z}",
                    partial_sum=total,
                    last_term=term,
                    n_terms=k,
                )

        total += term
        magnitude = abs(term)
        largest = max(largest, magnitude)
        if magnitude == 0.0:
            tail = 0.0
            break

        ratio = magnitude / previous if previous > 0 else math.inf
        previous = magnitude
        if k >= k_min and ratio < 1.0 and ratio <= previous_ratio:
            if z < 0:
                tail = magnitude * ratio
            else:
                tail = magnitude * ratio / (1.0 - ratio)
            if tail <= tol * abs(total):
                break
        previous_ratio = ratio
    else:
        raise TruncationError(
            f"Mittag-Leffler series did not converge to {tol:.1e} "
            f"for rho={rho}, mu={mu}, gamma={gamma}, z={z}",
            partial_sum=total,
            last_term=term,
            n_terms=max_terms + 1,
        )

    n_terms = k + 1
    rounding = _EPS * n_terms * largest
    return total, tail + rounding, n_terms


def _log10_largest_term(rho: float, mu: float, gamma: float, z: float, max_terms: int) -> float:
    """``log10`` of the largest ``|t_k|`` with ``k <= max_terms``."""
    k = np.arange(max_terms + 1, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_rising = np.concatenate(([0.0], np.cumsum(np.log(np.abs(gamma + k[:-1])))))
        log_terms = (
            log_rising
            + k * math.log(abs(z))
            - special.gammaln(rho * k + mu)
            - special.gammaln(k + 1.0)
        )
    finite = log_terms[np.isfinite(log_terms)]
    return float(np.max(finite)) / math.log(10.0) if finite.size else 0.0


def _sum_series_extended(
    rho: float, mu: float, gamma: float, z: float, tol: float, max_terms: int
) -> ty.Tuple[float, float, int]:
    """Sum the series in multiprecision with the same tail bound as ``_sum_series``."""
    digits = GUARD_DIGITS + max(0, math.ceil(_log10_largest_term(rho, mu, gamma, z, max_terms)))
    with mpmath.workdps(digits):
        rho_mp, mu_mp, gamma_mp, z_mp = (mpmath.mpf(v) for v in (rho, mu, gamma, z))
        factor = mpmath.mpf(1)
        term = total = mpmath.rgamma(mu_mp)
        previous = abs(term)
        previous_ratio = mpmath.inf
        tail = mpmath.mpf(0)
        k_min = _monotone_index(rho, mu, gamma)

        for k in range(1, max_terms + 1):
            factor *= z_mp * (gamma_mp + k - 1) / k
            if factor == 0:
                tail = mpmath.mpf(0)
                break
            term = factor * mpmath.rgamma(rho_mp * k + mu_mp)
            total += term
            magnitude = abs(term)
            ratio = magnitude / previous
            previous = magnitude
            if k >= k_min and ratio < 1 and ratio <= previous_ratio:
                tail = magnitude * ratio if z < 0 else magnitude * ratio / (1 - ratio)
                if tail <= tol * abs(total):
                    break
            previous_ratio = ratio
        else:
            raise TruncationError(
                f"Mittag-Leffler series did not converge to {tol:.1e} "
                f"for rho={rho}, mu={mu}, gamma={gamma}, z={z}",
                partial_sum=float(total),
                last_term=float(term),
                n_terms=max_terms + 1,
            )
        value, tail = float(total), float(tail)

    if not math.isfinite(value):
        raise TruncationError(
            f"Mittag-Leffler function overflows for rho={rho}, mu={mu}, gamma={gamma}, z={z}",
            partial_sum=value,
            last_term=float(term),
            n_terms=k + 1,
        )
    LOGGER.debug(f"summed E^{gamma}_{{{rho},{mu}}}({z}) with {digits} digits")
    return value, tail + _EPS * abs(value), k + 1


def _evaluate(rho: float, mu: float, gamma: float, z: float, tol: float, max_terms: int) -> MLResult:
    """Double-precision sum, redone in extended precision when the terms cancel."""
    # all terms share one sign only for z > 0 and gamma > 0
    can_cancel = z < 0 or gamma < 0
    try:
        value, error, n_terms = _sum_series(rho, mu, gamma, z, tol, max_terms)
    except TruncationError:
        if not can_cancel:
            raise
    else:
        if error <= tol * abs(value) or not can_cancel:
            return MLResult(value, error, n_terms)
    return MLResult(*_sum_series_extended(rho, mu, gamma, z, tol, max_terms))


def ml3(p: MLParams, tol: float = TOL_ML, max_terms: int = MAX_TERMS) -> MLResult:
    """Three-parameter Mittag-Leffler function ``E^gamma_{rho,mu}(z)``.

    The summation stops once the tail bound drops below ``tol`` relative to
    the partial sum. The bound is the geometric majorant of the tail from the
    last term ratio, or the next-term bound for alternating series, and is
    only applied past the index where the term ratios become monotone.

    For ``rho == 1`` and ``z < 0`` Kummer's transformation
    ``E^gamma_{1,mu}(z) = e^z E^{mu-gamma}_{1,mu}(-z)`` replaces the alternating
    sum by a positive one.

    :param p: parameters and argument
    :type p: MLParams
    :param tol: relative tolerance of the tail bound, defaults to TOL_ML
    :type tol: float, optional
    :param max_terms: maximum number of terms, defaults to MAX_TERMS
    :type max_terms: int, optional
    :raises DomainError: if ``mu <= 0`` or ``|z| > Z_MAX``
    :raises TruncationError: if the series does not converge within ``max_terms``
    :return: value, error estimate and number of terms
    :rtype: MLResult
    """
    if p.mu <= 0:
        raise DomainError(f"ml3 requires mu > 0, got mu={p.mu}")
    if abs(p.z) > Z_MAX:
        raise DomainError(f"|z| = {abs(p.z)} exceeds the supported range {Z_MAX}")

    if p.rho == 1.0 and p.z < 0 and not _is_nonpositive_integer(p.gamma):
        transformed = _evaluate(1.0, p.mu, p.mu - p.gamma, -p.z, tol, max_terms)
        scale = math.exp(p.z)
        result = MLResult(scale * transformed.value, scale * transformed.error, transformed.n_terms)
    else:
        result = _evaluate(p.rho, p.mu, p.gamma, p.z, tol, max_terms)

    LOGGER.debug(
        f"E^{p.gamma}_{{{p.rho},{p.mu}}}({p.z}) = {result.value!r} "
        f"(+/- {result.error:.1e}, {result.n_terms} terms)"
    )
    return result


def ml2(rho: float, mu: float, z: float, **kwargs) -> MLResult:
    """Two-parameter Mittag-Leffler function ``E_{rho,mu}(z)``."""
    return ml3(MLParams(rho=rho, mu=mu, gamma=1.0, z=z), **kwargs)


def ml1(rho: float, z: float, **kwargs) -> MLResult:
    """Classical Mittag-Leffler function ``E_rho(z)``."""
    return ml3(MLParams(rho=rho, mu=1.0, gamma=1.0, z=z), **kwargs)


def ml_coefficients(
    rho: float,
    mu: float,
    gamma: float,
    z_max: float,
    tol: float = TOL_ML,
    max_terms: int = MAX_TERMS,
) -> np.ndarray:
    """Coefficients ``(gamma)_k / (k! Gamma(rho k + mu))`` truncated for ``|z| <= z_max``.

    The table is cut once the tail of ``sum_k |c_k| z_max^k`` drops below
    ``tol`` relative to the absolute sum.

    :param rho: ``rho > 0``
    :param mu: ``mu > 0``
    :param gamma: Pochhammer base
    :param z_max: largest ``|z|`` the table has to serve
    :return: coefficient array, lowest order first
    :rtype: numpy.ndarray
    """
    if rho <= 0 or mu <= 0:
        raise DomainError(f"ml_coefficients requires rho > 0 and mu > 0, got rho={rho}, mu={mu}")
    if z_max > Z_MAX:
        raise DomainError(f"|z| = {z_max} exceeds the supported range {Z_MAX}")

    coefficients = [float(special.rgamma(mu))]
    if z_max == 0.0 or gamma == 0.0:
        return np.array(coefficients)

    log_z = math.log(z_max)
    rising = 1.0
    magnitude_sum = abs(coefficients[0])
    previous = magnitude_sum
    previous_ratio = math.inf
    k_min = _monotone_index(rho, mu, gamma)

    for k in range(1, max_terms + 1):
        rising *= (gamma + k - 1) / k
        if rising == 0.0:
            break
        argument = rho * k + mu
        log_coefficient = math.log(abs(rising)) - float(special.gammaln(argument))
        sign = math.copysign(1.0, rising) * float(special.gammasgn(argument))
        coefficients.append(sign * math.exp(log_coefficient))

        magnitude = math.exp(log_coefficient + k * log_z)
        magnitude_sum += magnitude
        ratio = magnitude / previous if previous > 0 else math.inf
        previous = magnitude
        if k >= k_min and ratio < 1.0 and ratio <= previous_ratio:
            if magnitude * ratio / (1.0 - ratio) <= tol * magnitude_sum:
                break
        previous_ratio = ratio
    else:
        raise TruncationError(
            f"coefficient table did not converge for rho={rho}, mu={mu}, gamma={gamma}, z_max={z_max}",
            partial_sum=magnitude_sum,
            last_term=previous,
            n_terms=max_terms + 1,
        )

    return np.array(coefficients)


def ml3_values(
    rho: float, mu: float, gamma: float, z: ty.Union[float, np.ndarray], tol: float = TOL_ML
) -> np.ndarray:
    """Vectorised ``E^gamma_{rho,mu}(z)`` sharing one coefficient table.

    The polynomial is evaluated for all arguments at once. Arguments where the
    rounding bound ``eps n sum_k |c_k z^k|`` exceeds ``TOL_CANCELLATION``
    relative to the value are evaluated again by ``ml3``.
    """
    z = np.asarray(z, dtype=float)
    if mu <= 0:
        raise DomainError(f"ml3_values requires mu > 0, got mu={mu}")
    z_max = float(np.max(np.abs(z))) if z.size else 0.0
    coefficients = ml_coefficients(rho, mu, gamma, z_max, tol=tol)
    values = np.polynomial.polynomial.polyval(z, coefficients)
    bound = np.polynomial.polynomial.polyval(np.abs(z), np.abs(coefficients))
    cancelled = _EPS * len(coefficients) * bound > TOL_CANCELLATION * np.abs(values)
    if np.any(cancelled):
        LOGGER.debug(f"{int(np.count_nonzero(cancelled))} arguments of E^{gamma}_{{{rho},{mu}}} cancel")
        values = np.array(values, dtype=float)
        values[cancelled] = [
            ml3(MLParams(rho, mu, gamma, float(v)), tol=tol).value for v in z[cancelled]
        ]
    return values
