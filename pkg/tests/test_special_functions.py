""" Tests for the gamma, Pochhammer and Mittag-Leffler functions."""
import math

import numpy as np
import pytest
from scipy import special

from prabhakar_kit.exceptions import ConfigError, DomainError, TruncationError
from prabhakar_kit.special_functions import (
    MLParams,
    log_gamma,
    ml1,
    ml2,
    ml3,
    ml3_values,
    ml_coefficients,
    pochhammer,
    series_term,
)


@pytest.mark.parametrize(
    "x, expected",
    [(1.0, 0.0), (5.0, math.log(24.0)), (0.5, 0.5 * math.log(math.pi))],
)
def test_log_gamma(x, expected):
    """Test ``log_gamma`` at integer and half-integer arguments."""
    assert log_gamma(x) == pytest.approx(expected, rel=1e-13, abs=1e-15)


@pytest.mark.parametrize("x", [0.0, -1.5, math.inf, math.nan])
def test_log_gamma_domain(x):
    """Test ``log_gamma`` rejects arguments outside ``(0, inf)``."""
    with pytest.raises(DomainError, match="log_gamma requires a finite x > 0"):
        log_gamma(x)


@pytest.mark.parametrize(
    "gamma, k, expected",
    [(-7.3, 0, 1.0), (3.0, 4, 360.0), (0.0, 2, 0.0), (-2.0, 5, 0.0), (-0.5, 2, -0.25)],
)
def test_pochhammer(gamma, k, expected):
    """Test ``pochhammer`` on exact products."""
    assert pochhammer(gamma, k) == expected


def test_pochhammer_overflow():
    """Test ``pochhammer`` flags an overflowing product instead of raising."""
    value, overflowed = pochhammer(1e200, 2, with_flag=True)
    assert math.isinf(value)
    assert overflowed

    value, overflowed = pochhammer(2.0, 3, with_flag=True)
    assert value == 24.0
    assert not overflowed


def test_pochhammer_negative_k():
    """Test ``pochhammer`` rejects a negative number of factors."""
    with pytest.raises(DomainError, match="non-negative integer k"):
        pochhammer(1.0, -1)


@pytest.mark.parametrize(
    "params, expected",
    [
        ((1.0, 1.0, 1.0, 1.0), math.e),
        ((2.0, 3.0, 0.0, 7.3), 0.5),
        ((2.0, 1.0, 1.0, 1.0), math.cosh(1.0)),
    ],
)
def test_ml3(params, expected):
    """Test ``ml3`` reduces to ``exp``, ``1/Gamma`` and ``cosh``."""
    result = ml3(MLParams(*params))
    assert result.value == pytest.approx(expected, rel=1e-13)
    assert result.error <= 1e-13 * abs(expected)
    assert float(result) == result.value


def test_ml2():
    """Test the two-parameter function."""
    assert ml2(1.0, 2.0, 1.0).value == pytest.approx(math.e - 1.0, rel=1e-13)
    assert ml2(1.0, 1.0, 0.0).value == 1.0
    assert ml2(2.0, 2.0, 1.0).value == pytest.approx(math.sinh(1.0), rel=1e-13)


def test_ml1():
    """Test the classical function, including a negative argument."""
    assert ml1(1.0, -2.0).value == pytest.approx(math.exp(-2.0), rel=1e-13)
    assert ml1(2.0, 1.0).value == pytest.approx(math.cosh(1.0), rel=1e-13)
    assert ml1(0.5, 0.0).value == 1.0


def test_ml3_exp_range():
    """Test ``E_{1,1}`` against ``exp`` on ``[-10, 10]``."""
    for z in np.linspace(-10.0, 10.0, 81):
        assert ml1(1.0, float(z)).value == pytest.approx(math.exp(z), rel=1e-12)


def test_ml3_cosh_range():
    """Test ``E_{2,1}(z^2)`` against ``cosh(z)`` on ``[0, 5]``."""
    for z in np.linspace(0.0, 5.0, 41):
        assert ml1(2.0, float(z * z)).value == pytest.approx(math.cosh(z), rel=1e-12)


def test_ml3_gamma_zero():
    """Test ``gamma = 0`` leaves the leading term ``1/Gamma(mu)`` for any argument."""
    rng = np.random.default_rng(7)
    for rho, mu, z in zip(rng.uniform(0.3, 2.0, 20), rng.uniform(0.2, 3.0, 20), rng.uniform(-40, 40, 20)):
        value = ml3(MLParams(rho, mu, 0.0, z)).value
        assert value == pytest.approx(float(special.rgamma(mu)), rel=1e-14)


@pytest.mark.parametrize(
    "params",
    [(0.5, 2.5, 0.7, 0.3 * 0.5 ** 0.5), (1.5, 2.2, -0.5, 3.0), (0.5, 0.5, 1.0, -1.2), (1.0, 3.0, 2.5, -4.0)],
)
def test_ml3_oracle(params, ml3_oracle):
    """Test ``ml3`` against the series summed at 100 digits."""
    assert ml3(MLParams(*params)).value == pytest.approx(ml3_oracle(*params), rel=1e-12)


@pytest.mark.parametrize("x", [5.0, 7.0, 10.0, 20.0])
def test_ml1_half_negative(x):
    """Test ``E_{1/2}(-x) = erfcx(x)``, where the alternating series cancels."""
    result = ml1(0.5, -x)
    assert result.value == pytest.approx(special.erfcx(x), rel=1e-12)
    assert result.error <= 1e-12 * result.value


@pytest.mark.parametrize(
    "params",
    [(0.7, 1.0, 1.0, -20.0), (0.5, 2.5, 1.0, -10.0), (0.7, 2.5, 0.5, -15.0), (0.5, 1.0, -0.5, -8.0)],
)
def test_ml3_negative_cancellation(params, ml3_oracle):
    """Test ``rho < 1`` with large negative arguments against the 100-digit series."""
    result = ml3(MLParams(*params))
    expected = ml3_oracle(*params)
    assert result.value == pytest.approx(expected, rel=1e-12)
    assert result.error <= 1e-12 * abs(expected)


def test_ml3_values_cancellation():
    """Test the vectorised path hands cancelling arguments to ``ml3``."""
    z = np.array([-10.0, -7.0, -0.5, 0.3])
    values = ml3_values(0.5, 1.0, 1.0, z)
    assert values[:2] == pytest.approx(special.erfcx([10.0, 7.0]), rel=1e-12)
    assert values[2] == pytest.approx(special.erfcx(0.5), rel=1e-12)
    assert values[3] == pytest.approx(ml1(0.5, 0.3).value, rel=1e-12)


def test_series_term_recurrence():
    """Test direct term evaluation sums to the recurrence result."""
    p = MLParams(0.5, 2.5, 0.7, 1.3)
    direct = math.fsum(series_term(p, k) for k in range(200))
    assert direct == pytest.approx(ml3(p).value, rel=1e-13)

    # consecutive terms follow the recurrence factor
    for k in range(1, 10):
        ratio = p.z * (p.gamma + k - 1) / (k * special.poch(p.rho * (k - 1) + p.mu, p.rho))
        assert series_term(p, k) == pytest.approx(series_term(p, k - 1) * ratio, rel=1e-13)


def test_series_terms_nonnegative():
    """Test every term is nonnegative for ``omega, gamma >= 0``, so ``ml3 >= 1/Gamma(mu)``."""
    p = MLParams(0.7, 2.4, 0.5, 2.0)
    assert all(series_term(p, k) >= 0 for k in range(60))
    assert ml3(p).value >= float(special.rgamma(p.mu))


def test_ml3_domain():
    """Test ``ml3`` rejects ``mu <= 0`` and arguments beyond the supported range."""
    with pytest.raises(DomainError, match="mu > 0"):
        ml3(MLParams(1.0, 0.0, 1.0, 0.5))
    with pytest.raises(DomainError, match="exceeds the supported range"):
        ml3(MLParams(1.0, 1.0, 1.0, 60.0))


def test_ml3_truncation():
    """Test the truncation error carries the partial sum and term count."""
    with pytest.raises(TruncationError) as excinfo:
        ml3(MLParams(1.0, 1.0, 1.0, 10.0), max_terms=3)
    assert excinfo.value.n_terms == 4
    assert excinfo.value.partial_sum == pytest.approx(1 + 10 + 50 + 1000 / 6)


def test_ml_params_validation():
    """Test ``MLParams`` validates and coerces its fields."""
    p = MLParams(1, 2, 0, 0)
    assert isinstance(p.rho, float) and isinstance(p.z, float)
    with pytest.raises(ConfigError, match="invalid MLParams"):
        MLParams(0.0, 1.0, 1.0, 0.5)
    with pytest.raises(ConfigError):
        MLParams(1.0, math.nan, 1.0, 0.5)


def test_ml_coefficients():
    """Test the coefficient table reproduces ``ml3``."""
    table = ml_coefficients(0.5, 2.5, 0.7, 2.0)
    for z in (-2.0, -0.3, 0.0, 1.1, 2.0):
        value = np.polynomial.polynomial.polyval(z, table)
        assert value == pytest.approx(ml3(MLParams(0.5, 2.5, 0.7, z)).value, rel=1e-12, abs=1e-15)

    assert np.array_equal(ml_coefficients(1.0, 2.0, 0.0, 3.0), [1.0])
    with pytest.raises(DomainError):
        ml_coefficients(0.0, 1.0, 1.0, 1.0)
    with pytest.raises(DomainError, match="mu > 0"):
        ml_coefficients(1.0, 0.0, -0.5, 1.0)


def test_ml3_values():
    """Test the vectorised evaluation agrees with the scalar path."""
    z = np.linspace(-3.0, 3.0, 13)
    values = ml3_values(1.5, 2.2, 0.5, z)
    expected = [ml3(MLParams(1.5, 2.2, 0.5, float(v))).value for v in z]
    assert np.allclose(values, expected, rtol=1e-12, atol=0.0)
    assert values.shape == z.shape
