""" Tests for the Nystrom discretisation and manufactured solutions."""
import numpy as np
import pytest
from scipy import special

from prabhakar_kit.bvp_spectral import (
    HomogeneousBasis,
    build_operator,
    homogeneous_coefficients,
    manufacture_instance,
    spectral_scale,
    verify_solution,
)
from prabhakar_kit.exceptions import ConfigError, DomainError, SpectralError
from prabhakar_kit.greens_function import amplification, green_integral
from prabhakar_kit.prabhakar_ops import GridFunction, kernel_values
from prabhakar_kit.quadrature import graded_simpson_rule


def q_linear(s):
    return 1.0 + s


def test_build_operator(generate_config):
    """Test the operator lives on the graded rule through ``xi``."""
    cfg = generate_config(xi=0.3)
    op = build_operator(cfg, q_linear, 40)
    assert op.size == 41
    assert op.kernel_matrix.shape == (41, 41)
    assert op.nodes[op.xi_index] == 0.3
    assert np.allclose(op.q_values, 1.0 + op.nodes)
    assert np.allclose(op.scaled(2.0).kernel_matrix, 2.0 * op.kernel_matrix)


@pytest.mark.parametrize("n", [6, 41])
def test_build_operator_invalid_n(generate_config, n):
    """Test ``n`` must be even and at least 8."""
    with pytest.raises(DomainError, match="even n >= 8"):
        build_operator(generate_config(), q_linear, n)


def test_build_operator_invalid(generate_config):
    """Test invalid configurations and non-finite ``q`` are rejected."""
    with pytest.raises(ConfigError):
        build_operator(generate_config(beta=10.0), q_linear, 40)
    with pytest.raises(DomainError, match="non-finite"):
        build_operator(generate_config(), lambda s: 1.0 / s, 40)


@pytest.mark.parametrize("parameters", [{}, {"rho": 0.6, "mu": 2.2, "gamma": 0.5, "omega": 0.3, "beta": 0.2}])
def test_subtraction_constant(generate_config, parameters):
    """Test rows reproduce ``int G(t,s) ds + Lambda(t) int G(xi,s) ds`` exactly for ``q = 1``."""
    cfg = generate_config(**parameters)
    op = build_operator(cfg, lambda s: np.ones_like(s), 40)
    t = op.nodes[1:-1]
    expected = green_integral(t, cfg) + amplification(t, cfg) * green_integral([cfg.xi], cfg)[0]
    assert np.allclose(op.apply(np.ones(op.size))[1:-1], expected, rtol=1e-12, atol=1e-15)


def test_rl_operator_oracle(generate_config, rl_green):
    """Test the matrix for ``gamma = omega = 0`` against one assembled from power formulas."""
    a, b, xi, beta, mu, n = 0.0, 1.5, 0.6, 0.1, 2.3, 40
    cfg = generate_config(a=a, b=b, xi=xi, beta=beta, mu=mu)
    op = build_operator(cfg, q_linear, n)

    rule = graded_simpson_rule(a, b, xi, n, 3.0)
    t, w = rule.nodes, rule.weights
    q = 1.0 + t
    G = np.array([[rl_green(ti, sj, a, b, mu) for sj in t] for ti in t])
    D = (b - a) ** (mu - 2) / special.gamma(mu - 1) - beta * (xi - a) ** (mu - 1) / special.gamma(mu)
    lambdas = beta * (t - a) ** (mu - 1) / special.gamma(mu) / D
    integral = (t - a) ** (mu - 1) * (b - a) / ((mu - 1) * special.gamma(mu)) - (t - a) ** mu / special.gamma(mu + 1)
    correction = np.where((t > a) & (t < b), integral - G @ w, 0.0)

    k = int(np.argmin(np.abs(t - xi)))
    expected = (G + np.outer(lambdas, G[k])) * (q * w)[None, :]
    expected[np.diag_indices_from(expected)] += q * correction
    expected[:, k] += lambdas * q[k] * correction[k]

    assert np.allclose(op.nodes, t)
    assert np.allclose(op.kernel_matrix, expected, rtol=1e-11, atol=1e-14)


def test_interpolate_matches_apply(generate_config):
    """Test the Nystrom interpolant agrees with the matrix on the nodes."""
    cfg = generate_config(gamma=0.5, omega=0.3, beta=0.2)
    op = build_operator(cfg, q_linear, 40)
    x = np.sin(op.nodes)
    assert np.allclose(op.interpolate(op.nodes, x), op.apply(x), rtol=1e-10, atol=1e-13)

    # the derivative of the interpolant against central differences
    h = 1e-6
    t = np.array([0.37, 0.81])
    difference = (op.interpolate(t + h, x) - op.interpolate(t - h, x)) / (2 * h)
    assert np.allclose(op.interpolate_derivative(t, x), difference, rtol=1e-5, atol=1e-8)


@pytest.mark.parametrize(
    "parameters",
    [{}, {"rho": 0.5, "mu": 2.2, "gamma": 0.5, "omega": 0.3, "beta": 0.0}, {"mu": 2.9, "beta": 0.3}],
)
def test_manufacture_instance(generate_config, parameters):
    """Test the scaled ``q`` has a nontrivial solution meeting its boundary conditions."""
    cfg = generate_config(**parameters)
    instance = manufacture_instance(cfg, q_linear, 200)
    assert instance.lambda_star > 0
    assert instance.residuals.passed
    assert not instance.residuals.trivial
    assert np.max(np.abs(instance.x.values)) == 1.0
    assert np.all(instance.x.values >= -1e-12)
    assert np.allclose(instance.q.values, (1.0 + instance.q.nodes) / instance.lambda_star)

    report = verify_solution(cfg, instance.q, instance.x)
    assert report.integral_residual <= 1e-8
    assert report.as_dict()["passed"]


def test_mesh_convergence(generate_config):
    """Test the dominant eigenvalue settles under mesh refinement."""
    cfg = generate_config(gamma=0.5, omega=0.3, rho=0.5, beta=0.05)
    coarse, _ = spectral_scale(build_operator(cfg, q_linear, 100))
    fine, _ = spectral_scale(build_operator(cfg, q_linear, 200))
    assert coarse == pytest.approx(fine, rel=1e-4)


@pytest.mark.slow
def test_spectral_scale_rl_eigensolve(generate_config, rl_green):
    """Test ``lambda_star`` at ``n = 400`` against a trapezoidal eigensolve of the power formulas."""
    a, b, xi, beta, mu, n = 0.0, 1.5, 0.6, 0.1, 2.8, 400
    cfg = generate_config(a=a, b=b, xi=xi, beta=beta, mu=mu)
    lambda_star, x_star = spectral_scale(build_operator(cfg, q_linear, n))

    t = np.linspace(a, b, n + 1)
    w = np.full(n + 1, (b - a) / n)
    w[[0, -1]] *= 0.5
    G = np.array([[rl_green(ti, sj, a, b, mu) for sj in t] for ti in t])
    D = (b - a) ** (mu - 2) / special.gamma(mu - 1) - beta * (xi - a) ** (mu - 1) / special.gamma(mu)
    lambdas = beta * (t - a) ** (mu - 1) / special.gamma(mu) / D
    k = int(np.argmin(np.abs(t - xi)))
    assert t[k] == pytest.approx(xi)
    matrix = (G + np.outer(lambdas, G[k])) * (q_linear(t) * w)[None, :]
    eigenvalues = np.linalg.eigvals(matrix)
    expected = eigenvalues[int(np.argmax(np.abs(eigenvalues)))]

    assert abs(expected.imag) < 1e-12
    assert lambda_star == pytest.approx(expected.real, rel=1e-3)
    assert np.all(x_star.values >= -1e-12)


def test_spectral_scale_zero(generate_config):
    """Test a vanishing ``q`` cannot be scaled."""
    op = build_operator(generate_config(), lambda s: np.zeros_like(s), 20)
    with pytest.raises(SpectralError, match="zero"):
        spectral_scale(op)


def test_verify_solution_failures(generate_config):
    """Test trivial and wrong candidates are reported as failures."""
    cfg = generate_config()
    nodes = graded_simpson_rule(0.0, 1.0, 0.5, 40).nodes

    report = verify_solution(cfg, q_linear, GridFunction(nodes, np.zeros_like(nodes)))
    assert report.trivial
    assert not report.passed

    report = verify_solution(cfg, q_linear, GridFunction(nodes, np.ones_like(nodes)))
    assert not report.trivial
    assert report.x_a == 1.0
    assert not report.passed


def test_homogeneous_coefficients(generate_config):
    """Test ``x(b) = c1 phi(b) - int phi(a+b-s) q x ds`` for a manufactured solution."""
    cfg = generate_config(gamma=0.5, omega=0.3)
    instance = manufacture_instance(cfg, q_linear, 200)
    basis = homogeneous_coefficients(cfg, instance.q, instance.x)
    assert isinstance(basis, HomogeneousBasis)
    assert basis.satisfies_boundary_conditions()
    assert basis.c1 > 0

    spec = cfg.spec
    rule = instance.operator.rule
    qx = instance.q.values * instance.x.values
    memory = rule.integrate(
        kernel_values(cfg.b - rule.nodes, rho=spec.rho, mu_eff=spec.mu, gamma=spec.gamma, omega=spec.omega) * qx
    )
    x_b = float(basis.evaluate(cfg.b, cfg)) - memory
    assert x_b == pytest.approx(instance.x.values[-1], rel=1e-6)

    assert not HomogeneousBasis(1.0, c3=0.5).satisfies_boundary_conditions()
