"""Nystrom discretisation of the boundary value problem and manufactured solutions.

The solution representation

    x(t) = int G(t,s) q(s) x(s) ds + Lambda(t) int G(xi,s) q(s) x(s) ds

is discretised with the graded composite Simpson rule, whose nodes contain
``xi`` and therefore the kink of ``G(xi, .)``. The kink of ``G(t, .)`` at
``s = t`` is handled by singularity subtraction,

    int G(t,s) f(s) ds = int G(t,s) (f(s) - f(t)) ds + f(t) int G(t,s) ds,

with the last integral in closed form, which puts a correction on the
diagonal (and on the ``xi`` column for the nonlocal term). A nontrivial
solution is manufactured by rescaling ``q`` with the dominant eigenvalue of
the matrix.
"""
import dataclasses
import typing as ty

import numpy as np
from scipy import linalg

from prabhakar_kit.exceptions import DomainError, SpectralError
from prabhakar_kit.greens_function import (
    BVPConfig,
    amplification,
    amplification_dt,
    green_dt,
    green_integral,
    green_integral_dt,
    green_matrix,
    require_valid,
)
from prabhakar_kit.prabhakar_ops import GridFunction, kernel_values
from prabhakar_kit.quadrature import QuadratureRule, graded_simpson_rule
from prabhakar_kit.utils.log import get_logger

__all__ = [
    "NystromOperator",
    "HomogeneousBasis",
    "ResidualReport",
    "ManufacturedInstance",
    "build_operator",
    "spectral_scale",
    "verify_solution",
    "homogeneous_coefficients",
    "manufacture_instance",
]

LOGGER = get_logger(__name__)

DEFAULT_N = 400
GRADING = 3.0
TOL_INTEGRAL = 1e-8
TOL_X_A = 1e-4
TOL_DX_A = 1e-4
TOL_BC_B = 1e-3
# imaginary parts below this fraction of |lambda| are eigensolver noise
TOL_IMAG = 1e-10


QLike = ty.Union[GridFunction, ty.Callable[[np.ndarray], np.ndarray]]


def _interior(t: np.ndarray, cfg: BVPConfig) -> np.ndarray:
    return (t > cfg.a) & (t < cfg.b)


def _subtraction(t: np.ndarray, rule: QuadratureRule, cfg: BVPConfig) -> np.ndarray:
    """``int G(t,s) ds - sum_j G(t,s_j) w_j``; zero at ``a`` and ``b``, where the kink is an endpoint."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    correction = green_integral(t, cfg) - green_matrix(t, rule.nodes, cfg) @ rule.weights
    return np.where(_interior(t, cfg), correction, 0.0)


def _subtraction_dt(t: np.ndarray, rule: QuadratureRule, cfg: BVPConfig) -> np.ndarray:
    t = np.atleast_1d(np.asarray(t, dtype=float))
    correction = green_integral_dt(t, cfg) - green_dt(t, rule.nodes, cfg) @ rule.weights
    return np.where(_interior(t, cfg), correction, 0.0)


@dataclasses.dataclass(frozen=True, eq=False)
class NystromOperator:
    """Matrix ``K[i, j] = [G(t_i, s_j) + Lambda(t_i) G(xi, s_j)] q(s_j) w_j`` plus the subtraction terms.

    Collocation points and quadrature nodes coincide.
    """

    cfg: BVPConfig
    rule: QuadratureRule
    q_values: np.ndarray
    kernel_matrix: np.ndarray
    xi_index: int

    @property
    def nodes(self) -> np.ndarray:
        return self.rule.nodes

    @property
    def weights(self) -> np.ndarray:
        return self.rule.weights

    @property
    def size(self) -> int:
        return len(self.rule)

    def scaled(self, factor: float) -> "NystromOperator":
        """Operator for ``factor * q``."""
        return dataclasses.replace(
            self, q_values=factor * self.q_values, kernel_matrix=factor * self.kernel_matrix
        )

    def apply(self, x_values: np.ndarray) -> np.ndarray:
        return self.kernel_matrix @ np.asarray(x_values, dtype=float)

    def interpolate(self, t, x_values: np.ndarray) -> np.ndarray:
        """Nystrom interpolant at arbitrary ``t``; equals ``apply`` on the nodes."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        qx = self.q_values * np.asarray(x_values, dtype=float)
        nonlocal_term = float(green_matrix([self.cfg.xi], self.nodes, self.cfg)[0] @ (qx * self.weights))
        nonlocal_term += qx[self.xi_index] * float(_subtraction([self.cfg.xi], self.rule, self.cfg)[0])
        local = green_matrix(t, self.nodes, self.cfg) @ (qx * self.weights)
        local += GridFunction(self.nodes, qx)(t) * _subtraction(t, self.rule, self.cfg)
        return local + amplification(t, self.cfg) * nonlocal_term

    def interpolate_derivative(self, t, x_values: np.ndarray) -> np.ndarray:
        """Exact ``t``-derivative of the Nystrom interpolant."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        qx = self.q_values * np.asarray(x_values, dtype=float)
        qx_function = GridFunction(self.nodes, qx)
        nonlocal_term = float(green_matrix([self.cfg.xi], self.nodes, self.cfg)[0] @ (qx * self.weights))
        nonlocal_term += qx[self.xi_index] * float(_subtraction([self.cfg.xi], self.rule, self.cfg)[0])
        local = green_dt(t, self.nodes, self.cfg) @ (qx * self.weights)
        local += qx_function.derivative(t) * _subtraction(t, self.rule, self.cfg)
        local += qx_function(t) * _subtraction_dt(t, self.rule, self.cfg)
        return local + amplification_dt(t, self.cfg) * nonlocal_term


def build_operator(cfg: BVPConfig, q: QLike, n: int = DEFAULT_N) -> NystromOperator:
    """Assemble the Nystrom matrix on the graded rule with ``n`` intervals (``n + 1`` nodes).

    :param q: samples or callable; samples are interpolated unless their nodes
        coincide with the rule
    :param n: even number of intervals, at least 8
    :raises ConfigError: if ``cfg`` is not valid
    :raises DomainError: if ``n`` is invalid or ``q`` is not finite on the nodes
    """
    require_valid(cfg)
    if n < 8 or n % 2:
        raise DomainError(f"Nystrom discretisation needs an even n >= 8, got {n}")

    rule = graded_simpson_rule(cfg.a, cfg.b, cfg.xi, n, GRADING)
    nodes = rule.nodes
    q_values = np.array(_samples(q, np.array(nodes)), dtype=float)
    if not np.all(np.isfinite(q_values)):
        raise DomainError("q has non-finite samples on the quadrature nodes")

    xi_index = int(np.argmin(np.abs(nodes - cfg.xi)))
    lambdas = amplification(nodes, cfg)
    nonlocal_row = green_matrix([cfg.xi], nodes, cfg)[0]
    kernel = green_matrix(nodes, nodes, cfg) + np.outer(lambdas, nonlocal_row)
    matrix = kernel * (q_values * rule.weights)[None, :]

    corrections = _subtraction(nodes, rule, cfg)
    matrix[np.diag_indices_from(matrix)] += q_values * corrections
    matrix[:, xi_index] += lambdas * q_values[xi_index] * corrections[xi_index]
    LOGGER.debug(
        f"assembled {matrix.shape} Nystrom matrix for {cfg.to_dict()}, "
        f"largest subtraction term {float(np.max(np.abs(corrections))):.2e}"
    )
    return NystromOperator(
        cfg=cfg,
        rule=rule,
        q_values=q_values,
        kernel_matrix=matrix,
        xi_index=xi_index,
    )


def spectral_scale(op: NystromOperator) -> ty.Tuple[float, GridFunction]:
    """Dominant eigenpair of the Nystrom matrix.

    The eigenvector is normalised so that its largest-magnitude entry is ``+1``.
    With ``q / lambda_star`` the matrix has eigenvalue 1 and ``x_star`` is a
    nontrivial solution of the discretised problem.

    :raises SpectralError: if the dominant eigenvalue is complex or zero
    """
    eigenvalues, eigenvectors = linalg.eig(op.kernel_matrix)
    scale = float(np.max(np.abs(op.kernel_matrix))) if op.kernel_matrix.size else 0.0
    magnitude = np.abs(eigenvalues)
    index = int(np.argmax(magnitude))
    lambda_star = eigenvalues[index]

    if scale == 0.0 or magnitude[index] <= 1e-14 * scale:
        raise SpectralError(
            "dominant eigenvalue is zero; q is too degenerate to scale", eigenvalues=[lambda_star]
        )
    if abs(lambda_star.imag) > TOL_IMAG * abs(lambda_star):
        raise SpectralError(
            f"dominant eigenvalue {lambda_star} is complex; refusing to scale",
            eigenvalues=[lambda_star, np.conj(lambda_star)],
        )

    vector = np.real(eigenvectors[:, index])
    vector = vector / vector[int(np.argmax(np.abs(vector)))]
    LOGGER.info(f"dominant eigenvalue {lambda_star.real!r} with {op.size} nodes")
    return float(lambda_star.real), GridFunction(op.nodes, vector)


@dataclasses.dataclass(frozen=True)
class HomogeneousBasis:
    """Coefficients of the three null-space functions of the Prabhakar derivative."""

    c1: float
    c2: float = 0.0
    c3: float = 0.0

    def satisfies_boundary_conditions(self) -> bool:
        """``x(a) = x'(a) = 0`` leave only the first function."""
        return self.c2 == 0.0 and self.c3 == 0.0

    def evaluate(self, t, cfg: BVPConfig) -> np.ndarray:
        spec = cfg.spec
        u = np.asarray(t, dtype=float) - cfg.a
        total = np.zeros_like(u)
        for j, c in enumerate((self.c1, self.c2, self.c3), start=1):
            if c != 0.0:
                total = total + c * kernel_values(
                    u, rho=spec.rho, mu_eff=spec.mu - j + 1.0, gamma=spec.gamma, omega=spec.omega
                )
        return total


def homogeneous_coefficients(
    cfg: BVPConfig, q: QLike, x: GridFunction, n: ty.Optional[int] = None
) -> HomogeneousBasis:
    """Recover ``c1`` of a solution from the condition at ``b``.

    ``c1 = (int psi(b-s) q x ds - beta int_a^xi phi(a+xi-s) q x ds) / D``
    """
    report = require_valid(cfg)
    spec = cfg.spec
    n = n or _intervals_for(x)
    rule = graded_simpson_rule(cfg.a, cfg.b, cfg.xi, n, GRADING)
    s = rule.nodes
    qx = _samples(q, s) * x.resample(s)

    psi = kernel_values(
        cfg.b - s, rho=spec.rho, mu_eff=spec.mu - 1.0, gamma=spec.gamma, omega=spec.omega
    )
    before_xi = s <= cfg.xi
    phi = np.where(
        before_xi,
        kernel_values(
            np.clip(cfg.xi - s, 0.0, None),
            rho=spec.rho,
            mu_eff=spec.mu,
            gamma=spec.gamma,
            omega=spec.omega,
        ),
        0.0,
    )
    c1 = (rule.integrate(psi * qx) - cfg.beta * rule.integrate(phi * qx)) / report.denominator
    return HomogeneousBasis(c1=float(c1))


@dataclasses.dataclass(frozen=True)
class ResidualReport:
    """Residuals of a candidate solution and the tolerances they are held to."""

    integral_residual: float
    x_a: float
    dx_a: float
    bc_b: float
    trivial: bool
    tolerances: ty.Dict[str, float]

    @property
    def passed(self) -> bool:
        return not self.trivial and (
            self.integral_residual <= self.tolerances["integral_residual"]
            and self.x_a <= self.tolerances["x_a"]
            and self.dx_a <= self.tolerances["dx_a"]
            and self.bc_b <= self.tolerances["bc_b"]
        )

    def as_dict(self) -> dict:
        return {
            "integral_residual": self.integral_residual,
            "x_a": self.x_a,
            "dx_a": self.dx_a,
            "bc_b": self.bc_b,
            "trivial": self.trivial,
            "passed": self.passed,
            "tolerances": dict(self.tolerances),
        }


def _intervals_for(x: GridFunction) -> int:
    intervals = len(x.nodes) - 1
    return intervals + (intervals % 2)


def _samples(q: QLike, nodes: np.ndarray) -> np.ndarray:
    if isinstance(q, GridFunction):
        return q.resample(nodes)
    return np.broadcast_to(np.asarray(q(nodes), dtype=float), nodes.shape)


def verify_solution(
    cfg: BVPConfig,
    q: QLike,
    x: GridFunction,
    *,
    operator: ty.Optional[NystromOperator] = None,
) -> ResidualReport:
    """Residuals of ``x`` against the integral equation and the boundary conditions.

    Boundary derivatives are those of the Nystrom interpolant through the
    kernel; ``x`` is resampled onto the operator's nodes when they differ.

    :param operator: operator already built for ``q``; built from ``q`` otherwise
    """
    op = operator or build_operator(cfg, q, _intervals_for(x))
    values = x.resample(op.nodes)
    scale = float(np.max(np.abs(values)))
    if scale == 0.0:
        return ResidualReport(0.0, 0.0, 0.0, 0.0, True, _tolerances())

    residual = float(np.max(np.abs(values - op.apply(values))))
    x_xi = float(op.interpolate([cfg.xi], values)[0])
    slopes = op.interpolate_derivative([cfg.a, cfg.b], values)
    report = ResidualReport(
        integral_residual=residual,
        x_a=abs(float(values[0])),
        dx_a=abs(float(slopes[0])),
        bc_b=abs(float(slopes[1]) - cfg.beta * x_xi),
        trivial=False,
        tolerances=_tolerances(),
    )
    LOGGER.debug(f"residuals for {cfg.to_dict()}: {report.as_dict()}")
    return report


def _tolerances() -> ty.Dict[str, float]:
    return {
        "integral_residual": TOL_INTEGRAL,
        "x_a": TOL_X_A,
        "dx_a": TOL_DX_A,
        "bc_b": TOL_BC_B,
    }


@dataclasses.dataclass(frozen=True, eq=False)
class ManufacturedInstance:
    """A scaled ``q`` with a nontrivial solution ``x`` of the discretised problem."""

    cfg: BVPConfig
    lambda_star: float
    q: GridFunction
    x: GridFunction
    operator: NystromOperator
    residuals: ResidualReport


def manufacture_instance(cfg: BVPConfig, q: QLike, n: int = DEFAULT_N) -> ManufacturedInstance:
    """Build the operator, rescale ``q`` by ``1 / lambda_star`` and verify the solution."""
    op = build_operator(cfg, q, n)
    lambda_star, x_star = spectral_scale(op)
    scaled = op.scaled(1.0 / lambda_star)
    q_scaled = GridFunction(scaled.nodes, scaled.q_values)
    residuals = verify_solution(cfg, q_scaled, x_star, operator=scaled)
    if not residuals.passed:
        LOGGER.warning(f"manufactured solution for {cfg.to_dict()} fails its residual checks")
    return ManufacturedInstance(
        cfg=cfg,
        lambda_star=lambda_star,
        q=q_scaled,
        x=x_star,
        operator=scaled,
        residuals=residuals,
    )
