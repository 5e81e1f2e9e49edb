"""Green's function of the nonlocal Prabhakar boundary value problem.

The problem is ``D x + q x = 0`` on ``[a, b]`` with ``x(a) = x'(a) = 0`` and
``x'(b) = beta x(xi)``. With

    phi(t) = (t-a)^(mu-1) E^gamma_{rho,mu}(omega (t-a)^rho)
    psi(u) = u^(mu-2) E^gamma_{rho,mu-1}(omega u^rho)      (psi = phi')

the Green's function is

    G(t, s) = phi(t) psi(b-s) / psi(b-a) - phi(a + t - s) [s <= t]

and the solution representation carries the amplification factor
``Lambda(t) = beta phi(t) / D`` with ``D = psi(b-a) - beta phi(xi)``.
"""
import dataclasses
import enum
import functools
import math
import typing as ty

import numpy as np

from prabhakar_kit.data import BVPParameters, validate_fields
from prabhakar_kit.exceptions import ConfigError, DomainError
from prabhakar_kit.prabhakar_ops import PrabhakarSpec, kernel_values
from prabhakar_kit.special_functions import ml3_values
from prabhakar_kit.utils.log import get_logger

__all__ = [
    "BVPConfig",
    "ValidationReport",
    "Branch",
    "GreenEval",
    "Violation",
    "MLRatioReport",
    "PropertyReport",
    "validate_config",
    "require_valid",
    "denominator",
    "green_eval",
    "green_matrix",
    "green_dt",
    "green_integral",
    "green_integral_dt",
    "amplification",
    "amplification_dt",
    "amplification_factors",
    "chebyshev_grid",
    "ml_ratio_check",
    "green_property_check",
]

LOGGER = get_logger(__name__)

TOL_POS = 1e-12


@dataclasses.dataclass(frozen=True)
class BVPConfig:
    """Interval ``[a, b]``, nonlocal point ``xi``, coupling ``beta`` and operator spec."""

    a: float
    b: float
    xi: float
    beta: float
    spec: PrabhakarSpec

    def __post_init__(self):
        validate_fields(self, BVPParameters)
        if self.spec.a != self.a:
            raise ConfigError(
                f"operator base point {self.spec.a} differs from the interval start {self.a}"
            )

    @classmethod
    def from_parameters(
        cls,
        *,
        a: float = 0.0,
        b: float = 1.0,
        xi: float,
        beta: float,
        rho: float,
        mu: float,
        gamma: float = 0.0,
        omega: float = 0.0,
    ) -> "BVPConfig":
        """Build a config from the flat parameter set used by the command line."""
        spec = PrabhakarSpec(rho=rho, mu=mu, gamma=gamma, omega=omega, a=a)
        return cls(a=a, b=b, xi=xi, beta=beta, spec=spec)

    def to_dict(self) -> ty.Dict[str, float]:
        """Flat parameter dictionary in a fixed key order."""
        return {
            "a": self.a,
            "b": self.b,
            "xi": self.xi,
            "beta": self.beta,
            "rho": self.spec.rho,
            "mu": self.spec.mu,
            "gamma": self.spec.gamma,
            "omega": self.spec.omega,
        }

    def key(self) -> ty.Tuple[float, ...]:
        """Sort key used to order sweep results."""
        return tuple(self.to_dict().values())


@dataclasses.dataclass(frozen=True)
class ValidationReport:
    """Truth value of each config invariant and the denominator ``D``."""

    ordering: bool
    beta_nonnegative: bool
    power_condition: bool
    denominator: float
    denominator_positive: bool

    @property
    def valid(self) -> bool:
        # the power condition is informational, D > 0 is what the representation needs
        return self.ordering and self.beta_nonnegative and self.denominator_positive

    def as_dict(self) -> dict:
        return {
            "valid": self.valid,
            "ordering": self.ordering,
            "beta_nonnegative": self.beta_nonnegative,
            "power_condition": self.power_condition,
            "denominator": self.denominator,
            "denominator_positive": self.denominator_positive,
        }


def _phi(t, cfg: BVPConfig) -> np.ndarray:
    spec = cfg.spec
    return kernel_values(
        np.asarray(t, dtype=float) - cfg.a,
        rho=spec.rho,
        mu_eff=spec.mu,
        gamma=spec.gamma,
        omega=spec.omega,
    )


def _psi(u, cfg: BVPConfig) -> np.ndarray:
    spec = cfg.spec
    return kernel_values(
        np.asarray(u, dtype=float),
        rho=spec.rho,
        mu_eff=spec.mu - 1.0,
        gamma=spec.gamma,
        omega=spec.omega,
    )


def _kernel(u, cfg: BVPConfig) -> np.ndarray:
    """``phi`` as a function of the distance ``u``."""
    return _phi(cfg.a + np.asarray(u, dtype=float), cfg)


def denominator(cfg: BVPConfig) -> float:
    """``D = psi(b-a) - beta phi(xi)``."""
    with np.errstate(invalid="ignore"):
        return float(_psi(cfg.b - cfg.a, cfg) - cfg.beta * _phi(cfg.xi, cfg))


@functools.lru_cache(maxsize=256)
def validate_config(cfg: BVPConfig) -> ValidationReport:
    """Report each invariant of ``cfg``; usable only when ``report.valid``."""
    mu = cfg.spec.mu
    ordering = cfg.a < cfg.xi < cfg.b
    beta_nonnegative = cfg.beta >= 0
    if ordering:
        power = cfg.beta * (cfg.xi - cfg.a) ** (mu - 1.0)
        power_condition = 0 <= power < (mu - 1.0) * (cfg.b - cfg.a) ** (mu - 2.0)
    else:
        power_condition = False

    if cfg.a < cfg.b and cfg.xi >= cfg.a:
        value = denominator(cfg)
    else:
        value = math.nan
    report = ValidationReport(
        ordering=ordering,
        beta_nonnegative=beta_nonnegative,
        power_condition=bool(power_condition),
        denominator=value,
        denominator_positive=bool(math.isfinite(value) and value > 0),
    )
    if not report.valid:
        LOGGER.info(f"config {cfg.to_dict()} is not admissible: {report.as_dict()}")
    return report


def require_valid(cfg: BVPConfig) -> ValidationReport:
    """Return the validation report or raise ``ConfigError`` carrying it."""
    report = validate_config(cfg)
    if not report.valid:
        raise ConfigError(f"invalid boundary value problem {cfg.to_dict()}", report=report)
    return report


class Branch(str, enum.Enum):
    """Which formula of the Green's function applies."""

    S_LE_T = "s_le_t"
    T_LE_S = "t_le_s"


@dataclasses.dataclass(frozen=True)
class GreenEval:
    t: float
    s: float
    value: float
    branch: Branch


def _check_in_interval(values: np.ndarray, cfg: BVPConfig, name: str) -> None:
    slack = 1e-14 * (cfg.b - cfg.a)
    if np.any(values < cfg.a - slack) or np.any(values > cfg.b + slack):
        raise DomainError(f"{name} must lie in [{cfg.a}, {cfg.b}]")


def green_matrix(t, s, cfg: BVPConfig) -> np.ndarray:
    """``G(t_i, s_j)`` on the tensor grid of ``t`` and ``s``.

    :raises ConfigError: if ``cfg`` is not valid
    :raises DomainError: if a point lies outside ``[a, b]``
    """
    require_valid(cfg)
    t = np.clip(np.atleast_1d(np.asarray(t, dtype=float)), cfg.a, cfg.b)
    s = np.clip(np.atleast_1d(np.asarray(s, dtype=float)), cfg.a, cfg.b)
    span = cfg.b - cfg.a

    first = np.outer(_phi(t, cfg), _psi(cfg.b - s, cfg)) / _psi(span, cfg)
    distance = t[:, None] - s[None, :]
    second = np.where(distance >= 0, _kernel(np.clip(distance, 0.0, None), cfg), 0.0)
    return first - second


def green_dt(t, s, cfg: BVPConfig) -> np.ndarray:
    """``dG/dt (t_i, s_j) = psi(t-a) psi(b-s) / psi(b-a) - psi(t-s) [s < t]``."""
    require_valid(cfg)
    t = np.clip(np.atleast_1d(np.asarray(t, dtype=float)), cfg.a, cfg.b)
    s = np.clip(np.atleast_1d(np.asarray(s, dtype=float)), cfg.a, cfg.b)
    span = cfg.b - cfg.a

    first = np.outer(_psi(t - cfg.a, cfg), _psi(cfg.b - s, cfg)) / _psi(span, cfg)
    distance = t[:, None] - s[None, :]
    second = np.where(distance > 0, _psi(np.clip(distance, 0.0, None), cfg), 0.0)
    return first - second


def green_integral(t, cfg: BVPConfig) -> np.ndarray:
    """Closed form of ``int_a^b G(t, s) ds``.

    Uses ``int_0^u phi(a+v) dv = u^mu E^gamma_{rho,mu+1}(omega u^rho)`` and
    ``int_0^u psi(v) dv = phi(a+u)``.
    """
    require_valid(cfg)
    spec = cfg.spec
    t = np.clip(np.atleast_1d(np.asarray(t, dtype=float)), cfg.a, cfg.b)
    ratio = float(_phi(cfg.b, cfg)) / float(_psi(cfg.b - cfg.a, cfg))
    swept = kernel_values(
        t - cfg.a, rho=spec.rho, mu_eff=spec.mu + 1.0, gamma=spec.gamma, omega=spec.omega
    )
    return _phi(t, cfg) * ratio - swept


def green_integral_dt(t, cfg: BVPConfig) -> np.ndarray:
    """``d/dt int_a^b G(t, s) ds = psi(t-a) phi(b) / psi(b-a) - phi(t)``."""
    require_valid(cfg)
    t = np.clip(np.atleast_1d(np.asarray(t, dtype=float)), cfg.a, cfg.b)
    ratio = float(_phi(cfg.b, cfg)) / float(_psi(cfg.b - cfg.a, cfg))
    return _psi(t - cfg.a, cfg) * ratio - _phi(t, cfg)


def green_eval(t: float, s: float, cfg: BVPConfig) -> GreenEval:
    """Evaluate ``G(t, s)`` and record the branch used."""
    _check_in_interval(np.array([t, s]), cfg, "t and s")
    value = float(green_matrix([t], [s], cfg)[0, 0])
    branch = Branch.S_LE_T if s <= t else Branch.T_LE_S
    return GreenEval(t=float(t), s=float(s), value=value, branch=branch)


def amplification(t, cfg: BVPConfig) -> np.ndarray:
    """``Lambda(t) = beta phi(t) / D``."""
    report = require_valid(cfg)
    return cfg.beta * _phi(t, cfg) / report.denominator


def amplification_dt(t, cfg: BVPConfig) -> np.ndarray:
    """``Lambda'(t) = beta psi(t-a) / D``."""
    report = require_valid(cfg)
    return cfg.beta * _psi(np.asarray(t, dtype=float) - cfg.a, cfg) / report.denominator


def amplification_factors(cfg: BVPConfig) -> ty.Tuple[float, float]:
    """Return ``(Lambda(b), Lambda(xi))``.

    ``Lambda(b)`` is the factor the inequality's derivation arrives at,
    ``Lambda(xi)`` the one in its statement.
    """
    lambda_b, lambda_xi = amplification(np.array([cfg.b, cfg.xi]), cfg)
    return float(lambda_b), float(lambda_xi)


def chebyshev_grid(a: float, b: float, n: int) -> np.ndarray:
    """Chebyshev-Lobatto nodes on ``[a, b]``, endpoints included, increasing."""
    if n < 2:
        raise DomainError(f"grid needs at least two nodes, got {n}")
    theta = np.pi * np.arange(n) / (n - 1)
    grid = a + 0.5 * (b - a) * (1.0 - np.cos(theta))
    grid[0], grid[-1] = a, b
    return grid


@dataclasses.dataclass(frozen=True)
class Violation:
    """Grid point of the smallest slack of a property, negative when violated."""

    t: float
    s: float
    value: float

    def as_dict(self) -> dict:
        return {"t": self.t, "s": self.s, "value": self.value}


@dataclasses.dataclass(frozen=True)
class MLRatioReport:
    """Observed validity of the Mittag-Leffler ratio inequality on a grid."""

    checked: int
    violations: int
    worst: Violation

    @property
    def holds(self) -> bool:
        return self.violations == 0

    def as_dict(self) -> dict:
        return {
            "checked": self.checked,
            "violations": self.violations,
            "worst": self.worst.as_dict(),
        }


@dataclasses.dataclass(frozen=True)
class PropertyReport:
    """Outcome of the structural checks of the Green's function on a grid."""

    nonneg: bool
    monotone: bool
    bounds: bool
    worst_violation: Violation
    power_ratio: bool
    ml_ratio: MLRatioReport
    n_grid: int
    tol: float

    @property
    def holds(self) -> bool:
        return self.nonneg and self.monotone and self.bounds

    def as_dict(self) -> dict:
        return {
            "nonneg": self.nonneg,
            "monotone": self.monotone,
            "bounds": self.bounds,
            "worst_violation": self.worst_violation.as_dict(),
            "power_ratio": self.power_ratio,
            "ml_ratio": self.ml_ratio.as_dict(),
            "n_grid": self.n_grid,
            "tol": self.tol,
        }


def _smallest(slack: np.ndarray, t: np.ndarray, s: np.ndarray) -> Violation:
    i, j = np.unravel_index(int(np.argmin(slack)), slack.shape)
    return Violation(t=float(t[i]), s=float(s[j]), value=float(slack[i, j]))


def ml_ratio_check(cfg: BVPConfig, n_grid: int = 200) -> MLRatioReport:
    """Check ``E_mu(w(t-a)^r) E_{mu-1}(w(b-s)^r) / E_{mu-1}(w(b-a)^r) >= E_mu(w(t-s)^r)`` for ``s <= t``.

    The ratio inequality is not known to hold everywhere; failures are counted
    and logged, never raised.
    """
    require_valid(cfg)
    spec = cfg.spec
    grid = chebyshev_grid(cfg.a, cfg.b, n_grid)

    def E(order, u):
        return ml3_values(spec.rho, order, spec.gamma, spec.omega * np.asarray(u) ** spec.rho)

    lhs = np.outer(E(spec.mu, grid - cfg.a), E(spec.mu - 1.0, cfg.b - grid)) / E(
        spec.mu - 1.0, cfg.b - cfg.a
    )
    distance = grid[:, None] - grid[None, :]
    lower = distance >= 0
    slack = np.where(lower, lhs - E(spec.mu, np.clip(distance, 0.0, None)), np.inf)

    violations = int(np.count_nonzero(slack < -TOL_POS))
    worst = _smallest(slack, grid, grid)
    if violations:
        LOGGER.warning(
            f"Mittag-Leffler ratio inequality fails at {violations} grid points for "
            f"{cfg.to_dict()}; worst {worst.value:.3e} at t={worst.t}, s={worst.s}"
        )
    return MLRatioReport(checked=int(np.count_nonzero(lower)), violations=violations, worst=worst)


def green_property_check(cfg: BVPConfig, n_grid: int = 200, tol: float = TOL_POS) -> PropertyReport:
    """Check nonnegativity, monotonicity in ``t`` and ``G(a,s) <= G(t,s) <= G(b,s)``.

    Rows of the Chebyshev grid are ``t``, columns ``s``. Outside the positivity
    regime ``omega >= 0`` the checks are still reported.

    :raises ConfigError: if ``cfg`` is not valid
    :raises DomainError: if ``n_grid < 16``
    """
    require_valid(cfg)
    if n_grid < 16:
        raise DomainError(f"property check needs n_grid >= 16, got {n_grid}")
    if cfg.spec.omega < 0:
        LOGGER.warning(f"omega = {cfg.spec.omega} < 0 is outside the positivity regime")

    grid = chebyshev_grid(cfg.a, cfg.b, n_grid)
    G = green_matrix(grid, grid, cfg)

    nonneg_slack = G + tol
    monotone_slack = np.full_like(G, np.inf)
    monotone_slack[1:, :] = np.diff(G, axis=0) + tol
    bounds_slack = np.minimum(G - G[0:1, :], G[-1:, :] - G) + tol

    slack = np.minimum(np.minimum(nonneg_slack, monotone_slack), bounds_slack)
    worst = _smallest(slack, grid, grid)
    worst = dataclasses.replace(worst, value=worst.value - tol)

    mu = cfg.spec.mu
    span = cfg.b - cfg.a
    distance = grid[:, None] - grid[None, :]
    ratio = np.outer((grid - cfg.a) ** (mu - 1.0), (cfg.b - grid) ** (mu - 2.0)) / span ** (mu - 2.0)
    ratio_slack = np.where(distance >= 0, ratio - np.clip(distance, 0.0, None) ** (mu - 1.0), np.inf)

    report = PropertyReport(
        nonneg=bool(np.all(nonneg_slack >= 0)),
        monotone=bool(np.all(monotone_slack >= 0)),
        bounds=bool(np.all(bounds_slack >= 0)),
        worst_violation=worst,
        power_ratio=bool(np.all(ratio_slack >= -tol)),
        ml_ratio=ml_ratio_check(cfg, n_grid),
        n_grid=n_grid,
        tol=tol,
    )
    LOGGER.info(f"Green's function properties for {cfg.to_dict()}: {report.as_dict()}")
    return report
