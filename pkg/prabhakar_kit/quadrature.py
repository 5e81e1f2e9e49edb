"""Quadrature rules for weakly singular convolutions and graded Nystrom meshes."""
import dataclasses
import functools
import math
import typing as ty

import numpy as np
from scipy import special

from prabhakar_kit.exceptions import AccuracyError, DomainError
from prabhakar_kit.utils.log import get_logger

__all__ = [
    "gauss_legendre",
    "gauss_jacobi",
    "ConvolutionResult",
    "singular_convolution",
    "QuadratureRule",
    "graded_simpson_rule",
]

LOGGER = get_logger(__name__)

TOL_QUAD = 1e-9
N_NODES = 24
N_NODES_CHECK = 16
GRADING_RATIO = 0.15
GRADING_LEVELS = 16


@functools.lru_cache(maxsize=None)
def gauss_legendre(n: int) -> ty.Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on ``[-1, 1]``."""
    nodes, weights = np.polynomial.legendre.leggauss(n)
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


@functools.lru_cache(maxsize=1024)
def gauss_jacobi(n: int, alpha: float, beta: float = 0.0) -> ty.Tuple[np.ndarray, np.ndarray]:
    """Gauss-Jacobi nodes and weights for the weight ``(1-t)^alpha (1+t)^beta`` on ``[-1, 1]``."""
    nodes, weights = special.roots_jacobi(n, alpha, beta)
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


@dataclasses.dataclass(frozen=True)
class ConvolutionResult:
    """Quadrature value with the difference to a lower-order rerun as error estimate."""

    value: float
    error: float


def _graded_panels(a: float, x: float, levels: int, ratio: float) -> np.ndarray:
    """Breakpoints ``a < a + L ratio^levels < ... < a + L ratio < x`` with ``L = x - a``."""
    length = x - a
    inner = a + length * ratio ** np.arange(levels, 0, -1, dtype=float)
    return np.concatenate(([a], inner, [x]))


def _convolve(
    f: ty.Callable[[np.ndarray], np.ndarray],
    x: float,
    a: float,
    exponent: float,
    rho: float,
    kernel_terms: np.ndarray,
    n_nodes: int,
    levels: int,
    ratio: float,
) -> float:
    edges = _graded_panels(a, x, levels, ratio)

    # smooth panels: the kernel is analytic away from u = x
    left, right = edges[:-2], edges[1:-1]
    t, w = gauss_legendre(n_nodes)
    half = 0.5 * (right - left)
    u = 0.5 * (right + left)[:, None] + half[:, None] * t[None, :]
    distance = x - u
    kernel = distance ** exponent * np.polynomial.polynomial.polyval(
        distance ** rho, kernel_terms
    )
    value = float(np.sum(half[:, None] * w[None, :] * kernel * _evaluate(f, u)))

    # last panel: (x - u)^(exponent + rho k) is the Jacobi weight of each series term
    h = x - edges[-2]
    for k, coefficient in enumerate(kernel_terms):
        if coefficient == 0.0:
            continue
        power = exponent + rho * k
        nodes, weights = gauss_jacobi(n_nodes, power, 0.0)
        u = x - 0.5 * h * (1.0 - nodes)
        value += coefficient * (0.5 * h) ** (power + 1.0) * float(np.dot(weights, _evaluate(f, u)))
    return value


def _evaluate(f: ty.Callable, u: np.ndarray) -> np.ndarray:
    values = np.asarray(f(u), dtype=float)
    if values.shape != np.shape(u):
        values = np.broadcast_to(values, np.shape(u))
    if not np.all(np.isfinite(values)):
        raise AccuracyError(
            "integrand returned non-finite values", estimate=math.inf, target=TOL_QUAD
        )
    return values


def singular_convolution(
    f: ty.Callable[[np.ndarray], np.ndarray],
    x: float,
    a: float,
    *,
    exponent: float,
    rho: float,
    kernel_terms: np.ndarray,
    tol: float = TOL_QUAD,
    n_nodes: int = N_NODES,
    levels: int = GRADING_LEVELS,
    ratio: float = GRADING_RATIO,
) -> ConvolutionResult:
    """Integrate ``(x-u)^exponent * sum_k kernel_terms[k] (x-u)^(rho k) * f(u)`` over ``[a, x]``.

    ``[a, x]`` is split into panels graded geometrically toward ``a``. Every
    panel but the last uses Gauss-Legendre; on the last panel, adjacent to
    ``x``, each series term is integrated with the Gauss-Jacobi rule of its
    own endpoint power. The rule does not depend on ``f``, so the result is
    linear in ``f``.

    ``f`` must accept numpy arrays.

    :raises DomainError: if ``x <= a`` or ``exponent <= -1``
    :raises AccuracyError: if the rerun with ``N_NODES_CHECK`` nodes differs by
        more than ``tol`` relative
    :return: value and error estimate
    :rtype: ConvolutionResult
    """
    if not x > a:
        raise DomainError(f"convolution needs x > a, got x={x}, a={a}")
    if exponent <= -1.0:
        raise DomainError(f"kernel exponent {exponent} is not integrable")

    kernel_terms = np.asarray(kernel_terms, dtype=float)
    value = _convolve(f, x, a, exponent, rho, kernel_terms, n_nodes, levels, ratio)
    check = _convolve(
        f, x, a, exponent, rho, kernel_terms, min(N_NODES_CHECK, n_nodes), levels, ratio
    )
    error = abs(value - check)
    scale = max(abs(value), abs(check))
    LOGGER.debug(f"convolution over [{a}, {x}]: {value!r} (+/- {error:.1e})")

    if error > tol * scale:
        raise AccuracyError(
            f"quadrature on [{a}, {x}] did not converge", estimate=error / scale, target=tol
        )
    return ConvolutionResult(value, error)


@dataclasses.dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights of a composite rule on ``[a, b]``.

    Weights are positive except at graded endpoints, where they vanish.
    """

    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))

    def __len__(self) -> int:
        return len(self.nodes)


def _simpson_block(start: float, stop: float, n: int, grading: float, toward_start: bool):
    """Simpson rule in ``tau`` for ``s = start + (stop-start) tau^g`` (or its mirror)."""
    tau = np.linspace(0.0, 1.0, n + 1)
    simpson = np.ones(n + 1)
    simpson[1:-1:2] = 4.0
    simpson[2:-1:2] = 2.0
    simpson *= 1.0 / (3.0 * n)
    length = stop - start
    if toward_start:
        nodes = start + length * tau ** grading
        jacobian = length * grading * tau ** (grading - 1.0)
    else:
        nodes = stop - length * (1.0 - tau) ** grading
        jacobian = length * grading * (1.0 - tau) ** (grading - 1.0)
    return nodes, simpson * jacobian


@functools.lru_cache(maxsize=64)
def graded_simpson_rule(
    a: float, b: float, breakpoint: float, n: int, grading: float = 3.0
) -> QuadratureRule:
    """Composite Simpson rule on ``[a, b]`` with ``n`` intervals and ``breakpoint`` as a node.

    ``[a, breakpoint]`` is graded toward ``a`` and ``[breakpoint, b]`` toward
    ``b``, where the integrands of the boundary value problem behave like
    powers of ``(s - a)`` and ``(b - s)``. The rule has ``n + 1`` nodes.

    :param n: even number of intervals, at least 4
    :raises DomainError: if the ordering or ``n`` is invalid
    """
    if not a < breakpoint < b:
        raise DomainError(f"graded rule needs a < breakpoint < b, got {a}, {breakpoint}, {b}")
    if n < 4 or n % 2:
        raise DomainError(f"graded rule needs an even n >= 4, got {n}")

    n_left = 2 * int(round(0.5 * n * (breakpoint - a) / (b - a)))
    n_left = min(max(n_left, 2), n - 2)
    n_right = n - n_left

    left_nodes, left_weights = _simpson_block(a, breakpoint, n_left, grading, True)
    right_nodes, right_weights = _simpson_block(breakpoint, b, n_right, grading, False)

    nodes = np.concatenate((left_nodes, right_nodes[1:]))
    weights = np.concatenate((left_weights, right_weights[1:]))
    weights[n_left] += right_weights[0]
    nodes[n_left] = breakpoint
    nodes[-1] = b
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return QuadratureRule(nodes, weights)
