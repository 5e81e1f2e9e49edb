"""pytest fixtures for simplified testing."""
import json

import pytest


@pytest.fixture(scope="function")
def generate_spec():
    """Get a ``PrabhakarSpec``."""
    from prabhakar_kit.prabhakar_ops import PrabhakarSpec

    def _generate_spec(**overrides) -> PrabhakarSpec:
        """Generate a spec; keyword arguments override the defaults."""
        parameters = {"rho": 1.0, "mu": 2.5, "gamma": 0.5, "omega": 0.3, "a": 0.0}
        parameters.update(overrides)
        return PrabhakarSpec(**parameters)

    return _generate_spec


@pytest.fixture(scope="function")
def generate_config():
    """Get a ``BVPConfig`` on ``[0, 1]``."""
    from prabhakar_kit.greens_function import BVPConfig

    def _generate_config(**overrides) -> BVPConfig:
        """Generate a config; keyword arguments override the flat parameters."""
        parameters = {
            "a": 0.0,
            "b": 1.0,
            "xi": 0.5,
            "beta": 0.05,
            "rho": 1.0,
            "mu": 2.5,
            "gamma": 0.0,
            "omega": 0.0,
        }
        parameters.update(overrides)
        return BVPConfig.from_parameters(**parameters)

    return _generate_config


@pytest.fixture(scope="function")
def generate_cli_parameters():
    """Get flat parameters of the ``certify`` subcommand."""

    def _generate_cli_parameters(full: bool = False) -> dict:
        """Generate inputs.

        :param full: return a full parameters or a minimal set, defaults to False
        :type full: bool, optional
        :return: parameters
        :rtype: dict
        """
        if full:
            params = {
                "a": 0.0,
                "b": 2.0,
                "xi": 1.0,
                "beta": 0.1,
                "rho": 0.5,
                "mu": 2.2,
                "gamma": 0.5,
                "omega": 0.3,
                "q": "1 + (s-a)",
                "n": 200,
                "provenance": "user_supplied",
            }
        else:
            params = {
                "xi": 0.5,
                "beta": 0.05,
                "rho": 1,
                "mu": 2.5,
            }
        return params

    return _generate_cli_parameters


@pytest.fixture(scope="function")
def sweep_file(tmp_path):
    """Write a sweep file with two configurations and return its path."""
    entries = [
        {"xi": 0.5, "beta": 0.05, "rho": 1.0, "mu": 2.9, "gamma": 0.5, "omega": 0.3},
        {"xi": 0.5, "beta": 0.0, "rho": 0.5, "mu": 2.5},
    ]
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps(entries), encoding="utf-8")
    return path


@pytest.fixture(scope="session")
def ml3_oracle():
    """Get the three-parameter Mittag-Leffler series summed at 100 digits.

    Terms up to about ``1e60`` still leave 40 correct digits.
    """
    import mpmath

    def _ml3_oracle(rho: float, mu: float, gamma: float, z: float) -> float:
        with mpmath.workdps(100):
            rho, mu, gamma, z = (mpmath.mpf(value) for value in (rho, mu, gamma, z))
            total, previous, k = mpmath.mpf(0), mpmath.inf, 0
            while True:
                term = mpmath.rf(gamma, k) * z ** k / (mpmath.gamma(rho * k + mu) * mpmath.factorial(k))
                total += term
                if k > 10 and abs(term) < mpmath.mpf(10) ** -40 and abs(term) <= previous:
                    return float(total)
                previous = abs(term)
                k += 1

    return _ml3_oracle


@pytest.fixture(scope="session")
def rl_green():
    """Get the Green's function for ``gamma = 0`` written out with powers."""
    from scipy import special

    def _rl_green(t: float, s: float, a: float, b: float, mu: float) -> float:
        value = (t - a) ** (mu - 1) * (b - s) ** (mu - 2) / (b - a) ** (mu - 2)
        if s <= t:
            value -= (t - s) ** (mu - 1)
        return value / special.gamma(mu)

    return _rl_green
