"""Prabhakar fractional integral and derivative.

For ``f`` on ``[a, x]`` the Prabhakar integral of order ``mu_eff`` is

    E^gamma_{rho,mu_eff,omega,a+} f(x)
        = int_a^x (x-u)^(mu_eff-1) E^gamma_{rho,mu_eff}(omega (x-u)^rho) f(u) du

and the Prabhakar derivative of order ``2 < mu <= 3`` is the third derivative
of the integral of order ``3 - mu`` with ``gamma`` replaced by ``-gamma``.

Callables are integrated numerically. ``PowerLawSeries`` inputs take an exact
path: every power ``(u-a)^p`` is integrated term by term with the Beta
integral, which is also what ``power_law_oracle`` computes.
"""
import dataclasses
import functools
import math
import typing as ty

import numpy as np
from scipy import interpolate, special

from prabhakar_kit.data import SpecParameters, validate_fields
from prabhakar_kit.exceptions import AccuracyError, DomainError
from prabhakar_kit.quadrature import TOL_QUAD, singular_convolution
from prabhakar_kit.special_functions import MLParams, ml3, ml3_values, ml_coefficients
from prabhakar_kit.utils.log import get_logger

__all__ = [
    "PrabhakarSpec",
    "GridFunction",
    "PowerLawSeries",
    "prabhakar_kernel",
    "kernel_values",
    "kernel_basis",
    "prabhakar_integral",
    "power_law_oracle",
    "rl_integral",
    "rl_power_derivative",
    "inner_prabhakar_integral_singular",
    "prabhakar_derivative",
]

LOGGER = get_logger(__name__)

TOL_DERIVATIVE = 1e-6
MAX_RICHARDSON_LEVELS = 5
# exponents closer than this are merged, and snapped to integers
_EXPONENT_DIGITS = 12

_EPS = float(np.finfo(float).eps)
# relative rounding accepted in the termwise kernel series of the exact path
TOL_SERIES = 1e-10


@dataclasses.dataclass(frozen=True)
class PrabhakarSpec:
    """Operator parameters; ``m = 3`` is the smallest integer not below ``mu``."""

    rho: float
    mu: float
    gamma: float
    omega: float
    a: float = 0.0
    m: int = 3

    def __post_init__(self):
        validate_fields(self, SpecParameters)

    def replace(self, **changes) -> "PrabhakarSpec":
        return dataclasses.replace(self, **changes)


@dataclasses.dataclass(frozen=True)
class GridFunction:
    """Real function sampled on strictly increasing nodes."""

    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        values = np.array(self.values, dtype=float)
        if nodes.ndim != 1 or nodes.shape != values.shape:
            raise DomainError(
                f"nodes and values must be 1d arrays of equal length, got {nodes.shape} and {values.shape}"
            )
        if len(nodes) < 2 or np.any(np.diff(nodes) <= 0):
            raise DomainError("nodes must be strictly increasing with at least two entries")
        if not (np.all(np.isfinite(nodes)) and np.all(np.isfinite(values))):
            raise DomainError("grid function samples must be finite")
        nodes.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, f: ty.Callable, nodes: ty.Sequence[float]) -> "GridFunction":
        nodes = np.asarray(nodes, dtype=float)
        values = np.broadcast_to(np.asarray(f(nodes), dtype=float), nodes.shape)
        return cls(nodes, values)

    @functools.cached_property
    def _interpolant(self) -> ty.Callable:
        if len(self.nodes) >= 4:
            return interpolate.CubicSpline(self.nodes, self.values)
        return functools.partial(np.interp, xp=self.nodes, fp=self.values)

    def __call__(self, t):
        """Interpolate with a cubic spline (linear below four nodes)."""
        return self._interpolant(np.asarray(t, dtype=float))

    def derivative(self, t):
        """Derivative of the interpolant."""
        if len(self.nodes) >= 4:
            return self._interpolant(np.asarray(t, dtype=float), 1)
        slopes = np.diff(self.values) / np.diff(self.nodes)
        index = np.clip(np.searchsorted(self.nodes, t, side="right") - 1, 0, len(slopes) - 1)
        return slopes[index]

    def matches(self, nodes: np.ndarray) -> bool:
        """Whether ``nodes`` coincide with the sample nodes."""
        nodes = np.asarray(nodes)
        if nodes.shape != self.nodes.shape:
            return False
        scale = max(float(np.max(np.abs(self.nodes))), 1.0)
        return bool(np.allclose(nodes, self.nodes, rtol=0.0, atol=1e-13 * scale))

    def resample(self, nodes: np.ndarray) -> np.ndarray:
        """Values on ``nodes``, reusing the samples when the nodes coincide."""
        if self.matches(nodes):
            return np.array(self.values)
        return np.asarray(self(nodes), dtype=float)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def scaled(self, factor: float) -> "GridFunction":
        return GridFunction(self.nodes, factor * self.values)


def _snap(exponent: float) -> float:
    exponent = round(float(exponent), _EXPONENT_DIGITS)
    nearest = round(exponent)
    if abs(exponent - nearest) < 10.0 ** (-_EXPONENT_DIGITS):
        return float(nearest)
    return exponent


@dataclasses.dataclass(frozen=True)
class PowerLawSeries:
    """Finite sum ``sum_j c_j (u - a)^(p_j)``.

    The exact input class of the operators: closed under linear combination,
    termwise Prabhakar integration and differentiation.
    """

    a: float
    coefficients: ty.Tuple[float, ...]
    exponents: ty.Tuple[float, ...]

    def __post_init__(self):
        coefficients = tuple(float(c) for c in self.coefficients)
        exponents = tuple(_snap(p) for p in self.exponents)
        if len(coefficients) != len(exponents):
            raise DomainError("coefficients and exponents must have equal length")
        if not all(math.isfinite(v) for v in coefficients + exponents + (self.a,)):
            raise DomainError("power-law series entries must be finite")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "coefficients", coefficients)
        object.__setattr__(self, "exponents", exponents)

    @classmethod
    def power(cls, a: float, nu: float, coefficient: float = 1.0) -> "PowerLawSeries":
        """``coefficient * (u - a)^(nu - 1)``."""
        return cls(a, (coefficient,), (nu - 1.0,))

    @classmethod
    def polynomial(cls, a: float, coefficients: ty.Sequence[float]) -> "PowerLawSeries":
        """``sum_j coefficients[j] (u - a)^j``."""
        return cls(a, tuple(coefficients), tuple(range(len(coefficients)))).merged()

    @classmethod
    def from_kernel(
        cls,
        a: float,
        *,
        rho: float,
        mu_eff: float,
        gamma: float,
        omega: float,
        span: float,
    ) -> "PowerLawSeries":
        """Series of ``(u-a)^(mu_eff-1) E^gamma_{rho,mu_eff}(omega (u-a)^rho)`` valid on ``[a, a+span]``."""
        terms = _kernel_terms(rho, mu_eff, gamma, omega, span)
        k = np.arange(len(terms))
        return cls(a, tuple(terms), tuple(mu_eff - 1.0 + rho * k)).merged()

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        distance = u - self.a
        total = np.zeros_like(distance)
        for coefficient, exponent in zip(self.coefficients, self.exponents):
            total = total + coefficient * distance ** exponent
        return total if total.ndim else float(total)

    def __add__(self, other: "PowerLawSeries") -> "PowerLawSeries":
        if not isinstance(other, PowerLawSeries):
            return NotImplemented
        if other.a != self.a:
            raise DomainError(f"cannot add series based at {self.a} and {other.a}")
        return PowerLawSeries(
            self.a,
            self.coefficients + other.coefficients,
            self.exponents + other.exponents,
        ).merged()

    def __mul__(self, factor: float) -> "PowerLawSeries":
        if isinstance(factor, PowerLawSeries):
            return NotImplemented
        return PowerLawSeries(
            self.a, tuple(factor * c for c in self.coefficients), self.exponents
        )

    __rmul__ = __mul__

    def __neg__(self) -> "PowerLawSeries":
        return -1.0 * self

    def __sub__(self, other: "PowerLawSeries") -> "PowerLawSeries":
        return self + (-other)

    def merged(self) -> "PowerLawSeries":
        """Combine equal exponents, drop zero coefficients, sort by exponent."""
        combined: ty.Dict[float, float] = {}
        for coefficient, exponent in zip(self.coefficients, self.exponents):
            combined[exponent] = combined.get(exponent, 0.0) + coefficient
        items = sorted((p, c) for p, c in combined.items() if c != 0.0)
        return PowerLawSeries(
            self.a, tuple(c for _, c in items), tuple(p for p, _ in items)
        )

    def derivative(self, order: int = 1) -> "PowerLawSeries":
        """Derivative of integer ``order``; integer powers below ``order`` vanish exactly."""
        coefficients, exponents = [], []
        for coefficient, exponent in zip(self.coefficients, self.exponents):
            falling = 1.0
            for i in range(order):
                falling *= exponent - i
            if falling != 0.0:
                coefficients.append(coefficient * falling)
                exponents.append(exponent - order)
        return PowerLawSeries(self.a, tuple(coefficients), tuple(exponents)).merged()

    def prabhakar_integral(
        self, *, rho: float, mu_eff: float, gamma: float, omega: float, span: float
    ) -> "PowerLawSeries":
        """Termwise Prabhakar integral, valid on ``[a, a+span]``.

        Uses ``E (u-a)^(nu-1) = Gamma(nu) (x-a)^(mu_eff+nu-1) E^gamma_{rho,mu_eff+nu}(omega (x-a)^rho)``.
        """
        if mu_eff <= 0:
            raise DomainError(f"integral order must be positive, got {mu_eff}")
        coefficients, exponents = [], []
        for coefficient, exponent in zip(self.coefficients, self.exponents):
            nu = exponent + 1.0
            if nu <= 0:
                raise DomainError(f"(u-a)^{exponent} is not integrable at a")
            terms = _kernel_terms(rho, mu_eff + nu, gamma, omega, span)
            k = np.arange(len(terms))
            coefficients.extend(coefficient * special.gamma(nu) * terms)
            exponents.extend(mu_eff + nu - 1.0 + rho * k)
        return PowerLawSeries(self.a, tuple(coefficients), tuple(exponents)).merged()


def prabhakar_kernel(t: float, s: float, spec: PrabhakarSpec, mu_eff: float) -> float:
    """Kernel ``(t-s)^(mu_eff-1) E^gamma_{rho,mu_eff}(omega (t-s)^rho)``.

    :raises DomainError: if ``t <= s`` or ``mu_eff <= 0``
    """
    if not t > s:
        raise DomainError(f"kernel needs t > s, got t={t}, s={s}")
    if mu_eff <= 0:
        raise DomainError(f"kernel order must be positive, got {mu_eff}")
    distance = t - s
    series = ml3(MLParams(spec.rho, mu_eff, spec.gamma, spec.omega * distance ** spec.rho))
    return distance ** (mu_eff - 1.0) * series.value


def kernel_values(
    u: np.ndarray, *, rho: float, mu_eff: float, gamma: float, omega: float
) -> np.ndarray:
    """Vectorised ``u^(mu_eff-1) E^gamma_{rho,mu_eff}(omega u^rho)`` for ``u >= 0``."""
    u = np.asarray(u, dtype=float)
    return u ** (mu_eff - 1.0) * ml3_values(rho, mu_eff, gamma, omega * u ** rho)


def kernel_basis(spec: PrabhakarSpec, j: int, span: float) -> PowerLawSeries:
    """Null-space function ``(t-a)^(mu-j) E^gamma_{rho,mu-j+1}(omega (t-a)^rho)``, ``j = 1, 2, 3``."""
    if j not in (1, 2, 3):
        raise DomainError(f"kernel basis index must be 1, 2 or 3, got {j}")
    return PowerLawSeries.from_kernel(
        spec.a,
        rho=spec.rho,
        mu_eff=spec.mu - j + 1.0,
        gamma=spec.gamma,
        omega=spec.omega,
        span=span,
    )


def _kernel_terms(
    rho: float, mu_eff: float, gamma: float, omega: float, span: float, tol: float = TOL_SERIES
) -> np.ndarray:
    """Coefficients ``c_k omega^k`` of the kernel series in powers of ``(x-u)^rho``.

    Shared by the exact and the quadrature paths, which both sum the series
    term by term.

    :raises AccuracyError: if rounding in the series exceeds ``tol`` relative on the span
    """
    z_max = abs(omega) * span ** rho
    table = ml_coefficients(rho, mu_eff, gamma, z_max)
    if len(table) == 1:
        return table
    # termwise integration loses the digits the series loses at its far end
    magnitude = float(np.polynomial.polynomial.polyval(z_max, np.abs(table)))
    reference = max(
        abs(table[0]), abs(ml3(MLParams(rho, mu_eff, gamma, omega * span ** rho)).value)
    )
    estimate = _EPS * len(table) * magnitude / reference
    if estimate > tol:
        raise AccuracyError(
            f"kernel series E^{gamma}_{{{rho},{mu_eff}}} cancels on |z| <= {z_max:.3g}",
            estimate=estimate,
            target=tol,
        )
    return table * omega ** np.arange(len(table))


def _integrate(
    f: ty.Callable,
    x: float,
    a: float,
    *,
    rho: float,
    mu_eff: float,
    gamma: float,
    omega: float,
    tol: float = TOL_QUAD,
    span: ty.Optional[float] = None,
) -> float:
    terms = _kernel_terms(rho, mu_eff, gamma, omega, x - a if span is None else span, tol)
    return singular_convolution(
        f, x, a, exponent=mu_eff - 1.0, rho=rho, kernel_terms=terms, tol=tol
    ).value


def prabhakar_integral(
    f: ty.Union[ty.Callable, PowerLawSeries],
    x: float,
    spec: PrabhakarSpec,
    mu_eff: ty.Optional[float] = None,
    *,
    method: str = "auto",
    tol: float = TOL_QUAD,
) -> float:
    """Prabhakar integral of order ``mu_eff`` (default ``spec.mu``) at ``x``.

    :param f: integrand; callables must accept numpy arrays
    :param method: ``"auto"`` uses the exact path for ``PowerLawSeries`` and
        quadrature otherwise; ``"quadrature"`` always integrates numerically
    :raises DomainError: if ``x <= a`` or ``mu_eff <= 0``
    :raises AccuracyError: if the quadrature estimate exceeds ``tol`` or the kernel series cancels
    """
    mu_eff = spec.mu if mu_eff is None else mu_eff
    if not x > spec.a:
        raise DomainError(f"prabhakar_integral needs x > a, got x={x}, a={spec.a}")
    if mu_eff <= 0:
        raise DomainError(f"integral order must be positive, got {mu_eff}")
    if method not in ("auto", "quadrature"):
        raise DomainError(f"unknown method {method!r}")

    if method == "auto" and isinstance(f, PowerLawSeries):
        integral = f.prabhakar_integral(
            rho=spec.rho, mu_eff=mu_eff, gamma=spec.gamma, omega=spec.omega, span=x - spec.a
        )
        return float(integral(x))
    return _integrate(
        f, x, spec.a, rho=spec.rho, mu_eff=mu_eff, gamma=spec.gamma, omega=spec.omega, tol=tol
    )


def power_law_oracle(nu: float, x: float, spec: PrabhakarSpec, mu_eff: float) -> float:
    """Closed form of the Prabhakar integral of ``(u-a)^(nu-1)``.

    ``Gamma(nu) (x-a)^(mu_eff+nu-1) E^gamma_{rho,mu_eff+nu}(omega (x-a)^rho)``
    """
    if nu <= 0:
        raise DomainError(f"power-law oracle needs nu > 0, got {nu}")
    if not x > spec.a:
        raise DomainError(f"power-law oracle needs x > a, got x={x}, a={spec.a}")
    span = x - spec.a
    series = ml3(MLParams(spec.rho, mu_eff + nu, spec.gamma, spec.omega * span ** spec.rho))
    return special.gamma(nu) * span ** (mu_eff + nu - 1.0) * series.value


def rl_integral(f: ty.Callable, x: float, mu_eff: float, a: float, *, tol: float = TOL_QUAD) -> float:
    """Riemann-Liouville integral ``1/Gamma(mu_eff) int_a^x (x-t)^(mu_eff-1) f(t) dt``.

    This is the Prabhakar integral with ``gamma = 0``, whose kernel
    ``E^0 = 1/Gamma(mu_eff)`` already carries the normalisation.
    """
    if not x > a:
        raise DomainError(f"rl_integral needs x > a, got x={x}, a={a}")
    if mu_eff <= 0:
        raise DomainError(f"integral order must be positive, got {mu_eff}")
    return _integrate(f, x, a, rho=1.0, mu_eff=mu_eff, gamma=0.0, omega=0.0, tol=tol)


def rl_power_derivative(nu: float, x: float, mu: float, a: float) -> float:
    """Riemann-Liouville derivative of ``(u-a)^(nu-1)``: ``Gamma(nu)/Gamma(nu-mu) (x-a)^(nu-mu-1)``."""
    return special.gamma(nu) * special.rgamma(nu - mu) * (x - a) ** (nu - mu - 1.0)


def inner_prabhakar_integral_singular(
    f: ty.Callable, x: float, spec: PrabhakarSpec, *, tol: float = TOL_QUAD
) -> float:
    """Inner integral of the derivative: order ``3 - mu`` with ``-gamma``.

    The kernel exponent ``2 - mu`` lies in ``(-1, 0)``; the endpoint
    singularity at ``u = x`` is absorbed into the Gauss-Jacobi weight.

    :raises DomainError: for ``mu = 3``, where the kernel exponent is ``-1``
    """
    if spec.mu >= 3.0:
        raise DomainError("mu = 3 has no weakly singular inner integral; use the classical third derivative")
    return prabhakar_integral(
        f,
        x,
        spec.replace(gamma=-spec.gamma),
        3.0 - spec.mu,
        method="quadrature",
        tol=tol,
    )


def _richardson_third_derivative(
    F: ty.Callable[[float], float], x: float, h0: float, scale: float
) -> float:
    """Richardson extrapolation of the central third difference over step halving."""

    def difference(h):
        return (F(x + 2 * h) - 2 * F(x + h) + 2 * F(x - h) - F(x - 2 * h)) / (2 * h ** 3)

    table = [[difference(h0)]]
    change = math.inf
    for level in range(1, MAX_RICHARDSON_LEVELS + 1):
        row = [difference(h0 / 2 ** level)]
        for j in range(1, level + 1):
            row.append(row[j - 1] + (row[j - 1] - table[-1][j - 1]) / (4 ** j - 1))
        change = abs(row[-1] - table[-1][-1])
        table.append(row)
        if change < TOL_DERIVATIVE * max(abs(row[-1]), scale):
            return row[-1]

    best = table[-1][-1]
    if change > 100 * TOL_DERIVATIVE * max(abs(best), scale):
        raise AccuracyError(
            f"third derivative at x={x} did not settle",
            estimate=change / max(abs(best), scale),
            target=TOL_DERIVATIVE,
        )
    LOGGER.warning(f"third derivative at x={x} settled only to {change:.1e}")
    return best


def prabhakar_derivative(
    f: ty.Union[ty.Callable, PowerLawSeries],
    x: float,
    spec: PrabhakarSpec,
    *,
    method: str = "auto",
) -> float:
    """Prabhakar derivative ``d^3/dx^3 E^{-gamma}_{rho,3-mu,omega,a+} f`` at ``x``.

    ``PowerLawSeries`` inputs are differentiated exactly. Callables go through
    Richardson-extrapolated central differences of the inner integral with
    initial step ``(x-a)/64``. ``mu = 3`` is the classical third derivative of
    ``f`` on both paths, whatever ``gamma`` and ``omega``.

    :raises AccuracyError: if the extrapolation does not settle
    """
    if not x > spec.a:
        raise DomainError(f"prabhakar_derivative needs x > a, got x={x}, a={spec.a}")
    if method not in ("auto", "differences"):
        raise DomainError(f"unknown method {method!r}")
    order = 3.0 - spec.mu
    h0 = (x - spec.a) / 64.0

    if order == 0.0:
        if method == "auto" and isinstance(f, PowerLawSeries):
            return float(f.derivative(3)(x))

        def sample(y: float) -> float:
            return float(np.asarray(f(np.array([y])), dtype=float).reshape(-1)[0])

        return _richardson_third_derivative(sample, x, h0, abs(sample(x)) / (x - spec.a) ** 3)

    if method == "auto" and isinstance(f, PowerLawSeries):
        inner = f.prabhakar_integral(
            rho=spec.rho, mu_eff=order, gamma=-spec.gamma, omega=spec.omega, span=x - spec.a
        )
        return float(inner.derivative(3)(x))

    def inner(y: float) -> float:
        # one kernel table for the whole stencil keeps the truncation identical at every y
        return _integrate(
            f,
            y,
            spec.a,
            rho=spec.rho,
            mu_eff=order,
            gamma=-spec.gamma,
            omega=spec.omega,
            span=x + 2 * h0 - spec.a,
        )

    scale = abs(inner(x)) / (x - spec.a) ** 3
    return _richardson_third_derivative(inner, x, h0, scale)
