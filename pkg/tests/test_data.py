""" Tests for the parameter schemas."""
import re

import pytest
from voluptuous.error import MultipleInvalid

from prabhakar_kit.data import (
    SUBCOMMAND_PARAMETERS,
    CertifyParameters,
    MLParameters,
    ReproduceParameters,
    SpecParameters,
)


def test_certify_parameters_filename():
    """Test ``CertifyParameters`` raise exception when ``filename`` is provided."""
    parameters = {"xi": 0.5, "beta": 0.05, "rho": 1.0, "mu": 2.5, "filename": "q.csv"}
    with pytest.raises(MultipleInvalid, match=re.escape("extra keys not allowed @ data['filename']")):
        CertifyParameters(parameters).get_dict()


def test_certify_parameters_optional(data_regression, generate_cli_parameters):
    """Test ``CertifyParameters`` can generate optional parameters."""
    inputs = CertifyParameters(generate_cli_parameters(full=False)).get_dict()
    data_regression.check(inputs)


def test_certify_parameters_full(generate_cli_parameters):
    """Test a full parameter set is kept as given."""
    parameters = generate_cli_parameters(full=True)
    assert CertifyParameters(parameters).get_dict() == parameters


@pytest.mark.parametrize(
    "parameters",
    [
        {"xi": 0.5, "beta": 0.05, "rho": 1.0, "mu": 3.5},
        {"xi": 0.5, "beta": 0.05, "rho": 1.0, "mu": 2.0},
        {"xi": 0.5, "beta": -0.05, "rho": 1.0, "mu": 2.5},
        {"xi": 0.5, "beta": 0.05, "rho": 0.0, "mu": 2.5},
        {"xi": 0.5, "beta": 0.05, "rho": 1.0, "mu": 2.5, "provenance": "guessed"},
        {"xi": 0.5, "beta": 0.05, "rho": 1.0, "mu": 2.5, "n": 4},
        {"beta": 0.05, "rho": 1.0, "mu": 2.5},
    ],
)
def test_certify_parameters_invalid(parameters):
    """Test out-of-range and missing values are rejected."""
    with pytest.raises(MultipleInvalid):
        CertifyParameters(parameters)


def test_ml_parameters():
    """Test the series parameters reject non-finite values and coerce to ``float``."""
    assert MLParameters({"rho": 1, "mu": 1, "gamma": 1, "z": 0}).get_dict()["z"] == 0.0
    with pytest.raises(MultipleInvalid, match="finite"):
        MLParameters({"rho": 1.0, "mu": 1.0, "gamma": 1.0, "z": float("inf")})


def test_spec_parameters():
    """Test the operator order is fixed to three."""
    inputs = SpecParameters({"rho": 1.0, "mu": 2.5, "gamma": 0.0, "omega": 0.0}).get_dict()
    assert inputs["a"] == 0.0
    assert inputs["m"] == 3
    with pytest.raises(MultipleInvalid):
        SpecParameters({"rho": 1.0, "mu": 2.5, "gamma": 0.0, "omega": 0.0, "m": 2})


def test_subcommand_parameters():
    """Test every subcommand has a schema and ``reproduce`` defaults to ``moderate``."""
    assert sorted(SUBCOMMAND_PARAMETERS) == [
        "certify",
        "certify-sweep",
        "greens",
        "make-instance",
        "ml-eval",
        "prabhakar-deriv",
        "prabhakar-int",
        "reproduce",
    ]
    assert ReproduceParameters({}).get_dict() == {"protocol": "moderate"}
