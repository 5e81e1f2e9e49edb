""" Tests for the quadrature rules."""
import math

import numpy as np
import pytest
from scipy import special

from prabhakar_kit.exceptions import AccuracyError, DomainError
from prabhakar_kit.quadrature import gauss_jacobi, graded_simpson_rule, singular_convolution


def test_gauss_jacobi_moments():
    """Test the Jacobi rule integrates its weight times a polynomial exactly."""
    nodes, weights = gauss_jacobi(8, -0.4)
    # int_{-1}^{1} (1-t)^alpha dt = 2^(alpha+1) / (alpha+1)
    assert float(np.sum(weights)) == pytest.approx(2 ** 0.6 / 0.6, rel=1e-13)
    assert not weights.flags.writeable
    assert np.all((nodes > -1) & (nodes < 1))


@pytest.mark.parametrize("exponent, nu", [(1.5, 1.0), (-0.3, 1.5), (0.7, 2.0)])
def test_singular_convolution_beta(exponent, nu):
    """Test ``int_0^x (x-u)^e u^(nu-1) du = x^(e+nu) B(e+1, nu)``."""
    x = 0.8
    result = singular_convolution(
        lambda u: u ** (nu - 1.0), x, 0.0, exponent=exponent, rho=1.0, kernel_terms=[1.0]
    )
    expected = x ** (exponent + nu) * special.beta(exponent + 1.0, nu)
    assert result.value == pytest.approx(expected, rel=1e-10)
    assert result.error <= 1e-9 * abs(result.value)


def test_singular_convolution_series_kernel():
    """Test a two-term kernel ``(x-u)^e (c0 + c1 (x-u)^rho)`` is integrated term by term."""
    x, exponent, rho = 1.0, -0.5, 0.5
    terms = [2.0, -0.25]
    result = singular_convolution(
        np.cos, x, 0.0, exponent=exponent, rho=rho, kernel_terms=terms
    )
    expected = 0.0
    for k, coefficient in enumerate(terms):
        # int_0^1 (1-u)^p cos(u) du by the series of cos
        power = exponent + rho * k
        expected += coefficient * math.fsum(
            (-1) ** j / math.factorial(2 * j) * special.beta(2 * j + 1, power + 1.0) for j in range(20)
        )
    assert result.value == pytest.approx(expected, rel=1e-10)


def test_singular_convolution_domain():
    """Test the convolution rejects an empty interval and a non-integrable kernel."""
    with pytest.raises(DomainError, match="x > a"):
        singular_convolution(np.cos, 0.0, 0.0, exponent=0.5, rho=1.0, kernel_terms=[1.0])
    with pytest.raises(DomainError, match="not integrable"):
        singular_convolution(np.cos, 1.0, 0.0, exponent=-1.0, rho=1.0, kernel_terms=[1.0])


def test_singular_convolution_non_finite():
    """Test non-finite integrand values raise an accuracy error."""
    with pytest.raises(AccuracyError, match="non-finite"):
        singular_convolution(
            lambda u: np.full_like(u, np.nan), 1.0, 0.0, exponent=0.5, rho=1.0, kernel_terms=[1.0]
        )


def test_graded_simpson_rule():
    """Test the graded rule contains the breakpoint and integrates power laws."""
    a, b, xi = 0.0, 2.0, 0.7
    rule = graded_simpson_rule(a, b, xi, 200)
    assert len(rule) == 201
    assert rule.nodes[0] == a and rule.nodes[-1] == b
    assert xi in rule.nodes
    assert np.all(np.diff(rule.nodes) > 0)
    assert np.all(rule.weights >= 0)

    assert rule.integrate(np.ones(len(rule))) == pytest.approx(b - a, rel=1e-12)
    # endpoint singular behaviour resolved by the grading
    values = np.sqrt(rule.nodes - a) + np.sqrt(b - rule.nodes)
    expected = 2 * (2.0 / 3.0) * (b - a) ** 1.5
    assert rule.integrate(values) == pytest.approx(expected, rel=1e-7)


@pytest.mark.parametrize("breakpoint, n", [(0.0, 8), (1.0, 8), (0.5, 7), (0.5, 2)])
def test_graded_simpson_rule_invalid(breakpoint, n):
    """Test the graded rule rejects a breakpoint at an endpoint and odd or small ``n``."""
    with pytest.raises(DomainError):
        graded_simpson_rule(0.0, 1.0, breakpoint, n)
