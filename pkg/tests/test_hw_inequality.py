""" Tests for the Hartman-Wintner-type inequality."""
import math

import numpy as np
import pytest
from scipy import special

from prabhakar_kit.bvp_spectral import manufacture_instance
from prabhakar_kit.exceptions import ConfigError
from prabhakar_kit.hw_inequality import (
    Provenance,
    certify,
    classical_hartman_wintner_check,
    classical_lyapunov_check,
    fractional_lyapunov_bound,
    lhs_integral,
    lyapunov_from_hartman_wintner,
    rhs_bounds,
    rl_green_maximum,
    rl_inequality_bound,
    rl_inequality_lhs,
)
from prabhakar_kit.prabhakar_ops import GridFunction


def test_lhs_integral_constant(generate_config):
    """Test ``int G(b,s) ds`` for ``q = 1`` is the Beta integral ``B(mu-1, 2) / Gamma(mu)``."""
    cfg = generate_config()
    expected = special.beta(1.5, 2.0) / special.gamma(2.5)
    assert expected == pytest.approx((4.0 / 15.0) / special.gamma(2.5))
    assert lhs_integral(cfg, lambda s: np.ones_like(s)) == pytest.approx(expected, rel=1e-9)


def test_lhs_integral_absolute_value(generate_config):
    """Test ``q`` enters through ``|q|`` and samples are resampled onto the rule."""
    cfg = generate_config(gamma=0.5, omega=0.3)
    positive = lhs_integral(cfg, lambda s: 1.0 + s)
    assert lhs_integral(cfg, lambda s: -(1.0 + s)) == pytest.approx(positive, rel=1e-14)

    nodes = np.linspace(0.0, 1.0, 401)
    samples = GridFunction(nodes, 1.0 + nodes)
    assert lhs_integral(cfg, samples) == pytest.approx(positive, rel=1e-8)


def test_rhs_bounds(generate_config):
    """Test the stated bound uses ``Lambda(xi)`` and the derived one ``Lambda(b)``."""
    cfg = generate_config(beta=0.2)
    rhs_stated, rhs_proof = rhs_bounds(cfg)
    assert rhs_proof < rhs_stated < 1.0

    rhs_stated, rhs_proof = rhs_bounds(generate_config(beta=0.0))
    assert rhs_stated == rhs_proof == 1.0


@pytest.mark.parametrize(
    "parameters", [{}, {"rho": 0.5, "mu": 2.2, "gamma": 0.5, "omega": 0.3, "beta": 0.2}, {"mu": 2.9}]
)
def test_certify_manufactured(generate_config, parameters):
    """Test manufactured instances satisfy the derived bound and scaling down breaks it."""
    cfg = generate_config(**parameters)
    instance = manufacture_instance(cfg, lambda s: 1.0 + s, 200)
    report = certify(cfg, instance.q, Provenance.SPECTRAL_SCALED)
    assert report.holds_proof
    assert report.margin_proof == pytest.approx(report.lhs - report.rhs_proof)
    assert report.instance_provenance is Provenance.SPECTRAL_SCALED
    assert report.as_dict()["config"] == cfg.to_dict()

    # far below the bound no nontrivial solution can exist
    weak = certify(cfg, instance.q.scaled(1e-3), "user_supplied")
    assert not weak.holds_proof
    assert not weak.holds_stated
    assert weak.as_dict()["instance_provenance"] == "user_supplied"


def test_certify_invalid(generate_config):
    """Test an inadmissible configuration is rejected."""
    with pytest.raises(ConfigError):
        certify(generate_config(beta=10.0), lambda s: 1.0 + s)
    with pytest.raises(ValueError):
        certify(generate_config(), lambda s: 1.0 + s, "guessed")


def test_rl_inequality_reduction(generate_config):
    """Test both sides reduce to the Riemann-Liouville inequality for ``gamma = omega = 0``."""
    rng = np.random.default_rng(11)
    for _ in range(5):
        mu = rng.uniform(2.2, 2.9)
        b = rng.uniform(0.5, 2.0)
        xi = rng.uniform(0.1, 0.9) * b
        beta = rng.uniform(0.0, 0.9) * (mu - 1.0) * b ** (mu - 2.0) / xi ** (mu - 1.0)
        cfg = generate_config(b=b, xi=xi, beta=beta, mu=mu)

        _, rhs_proof = rhs_bounds(cfg)
        assert special.gamma(mu) * rhs_proof == pytest.approx(rl_inequality_bound(0.0, b, xi, beta, mu), rel=1e-12)

        lhs = special.gamma(mu) * lhs_integral(cfg, lambda s: 1.0 + s)
        assert lhs == pytest.approx(rl_inequality_lhs(0.0, b, lambda s: 1.0 + s, mu), rel=1e-8)


def test_rl_inequality_lhs():
    """Test the algebraic-weight rule on a Beta integral."""
    assert rl_inequality_lhs(0.0, 1.0, lambda s: 1.0, 2.5) == pytest.approx(special.beta(1.5, 2.0), rel=1e-12)


def test_classical_checks():
    """Test the classical criteria for ``sin(pi t)``, the first eigenfunction on ``[0, 1]``."""
    lyapunov = classical_lyapunov_check(0.0, 1.0, lambda s: math.pi ** 2)
    assert lyapunov.integral == pytest.approx(math.pi ** 2, rel=1e-12)
    assert lyapunov.bound == 4.0
    assert lyapunov.exceeds

    lyapunov = classical_lyapunov_check(0.0, 2.0, lambda s: math.pi ** 2 / 4)
    assert lyapunov.integral == pytest.approx(math.pi ** 2 / 2, rel=1e-12)
    assert lyapunov.exceeds

    hartman_wintner = classical_hartman_wintner_check(0.0, 1.0, lambda s: math.pi ** 2)
    assert hartman_wintner.integral == pytest.approx(math.pi ** 2 / 6, rel=1e-12)
    assert hartman_wintner.exceeds
    assert hartman_wintner.max_identity_error <= 1e-15

    # only the positive part of q counts
    negative = classical_hartman_wintner_check(0.0, 1.0, lambda s: -1.0)
    assert negative.integral == 0.0
    assert not negative.exceeds


def test_lyapunov_from_hartman_wintner():
    """Test the weighted integral is bounded by the quarter-square of the interval times ``int q+``."""
    deduction = lyapunov_from_hartman_wintner(0.0, 1.0, lambda s: math.pi ** 2)
    assert deduction.consistent
    assert deduction.scaled_positive_part == pytest.approx(math.pi ** 2 / 4)
    assert deduction.as_dict()["hartman_wintner_integral"] == pytest.approx(math.pi ** 2 / 6)


@pytest.mark.parametrize("mu", [2.2, 2.5, 2.9])
def test_fractional_lyapunov_bound(generate_config, mu):
    """Test the maximum of ``G(b, .)`` against its closed form for ``gamma = 0``."""
    cfg = generate_config(mu=mu, b=2.0, xi=0.7, beta=0.1)
    bound = fractional_lyapunov_bound(cfg)
    assert bound.max_green == pytest.approx(rl_green_maximum(0.0, 2.0, mu), rel=1e-10)
    # the maximiser of (b-s)^(mu-2) (s-a) is a + (b-a) / (mu-1)
    assert bound.argmax == pytest.approx(2.0 / (mu - 1.0), rel=1e-5)
    assert bound.bound == pytest.approx(bound.rhs_proof / bound.max_green)
