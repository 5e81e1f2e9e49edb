"""
Parameter sets used by prabhakar_kit.

Every parameter set is described by a "voluptuous" schema; the numerical
types validate their fields against these schemas on construction and the
command line validates user input against the same schemas.
"""
import dataclasses
import math
import typing as ty

from voluptuous import (
    All,
    Any,
    Coerce,
    In,
    Invalid,
    MultipleInvalid,
    Optional,
    Range,
    Required,
    Schema,
)

from prabhakar_kit.exceptions import ConfigError


def Finite(value: float) -> float:
    """Voluptuous validator rejecting ``nan`` and ``inf``."""
    if not math.isfinite(value):
        raise Invalid("value must be finite")
    return value


real = All(Coerce(float), Finite)
positive = All(Coerce(float), Finite, Range(min=0, min_included=False))
nonnegative = All(Coerce(float), Finite, Range(min=0))

PROVENANCES = ["spectral_scaled", "user_supplied"]
PROTOCOLS = ["fast", "moderate", "precise"]
FORMATS = ["json", "csv"]

# Series parameters of the three-parameter Mittag-Leffler function
ml_parameters = {
    Required("rho"): positive,
    Required("mu"): real,
    Required("gamma"): real,
    Required("z"): real,
}

# Prabhakar operator parameters; the derivative order lies in (2, 3]
spec_parameters = {
    Required("rho"): positive,
    Required("mu"): All(Coerce(float), Finite, Range(min=2, max=3, min_included=False)),
    Required("gamma"): real,
    Required("omega"): real,
    Optional("a", default=0.0): real,
    Optional("m", default=3): All(int, In([3])),
}

# Nonlocal boundary value problem; ordering and D > 0 are reported by
# ``greens_function.validate_config`` rather than rejected here
bvp_parameters = {
    Required("a"): real,
    Required("b"): real,
    Required("xi"): real,
    Required("beta"): real,
}

# Command line parameter sets, one per subcommand
_bvp_flags = {
    Optional("a", default=0.0): real,
    Optional("b", default=1.0): real,
    Required("xi"): real,
    Required("beta"): nonnegative,
    Required("rho"): positive,
    Required("mu"): All(Coerce(float), Finite, Range(min=2, max=3, min_included=False)),
    Optional("gamma", default=0.0): real,
    Optional("omega", default=0.0): real,
}

ml_eval_parameters = {
    **ml_parameters,
    Optional("tol", default=1e-14): positive,
    Optional("max_terms", default=10_000): All(int, Range(min=1)),
}

operator_parameters = {
    Required("rho"): positive,
    Required("mu"): All(Coerce(float), Finite, Range(min=2, max=3, min_included=False)),
    Optional("gamma", default=0.0): real,
    Optional("omega", default=0.0): real,
    Optional("a", default=0.0): real,
    Required("x"): real,
    Required("f"): str,
    Optional("mu_eff", default=None): Any(None, positive),
}

greens_parameters = {
    **_bvp_flags,
    Optional("n_grid", default=200): All(int, Range(min=16)),
    Optional("csv_out", default=None): Any(None, str),
}

instance_parameters = {
    **_bvp_flags,
    Optional("q", default="1"): str,
    Optional("n", default=400): All(int, Range(min=8)),
}

certify_parameters = {
    **instance_parameters,
    Optional("provenance", default="spectral_scaled"): All(str, In(PROVENANCES)),
}

sweep_entry_parameters = dict(_bvp_flags)

sweep_parameters = {
    Required("grid"): str,
    Optional("q", default="1"): str,
    Optional("n", default=400): All(int, Range(min=8)),
}

reproduce_parameters = {
    Optional("protocol", default="moderate"): All(str, In(PROTOCOLS)),
}


class InputParameters:  # pylint: disable=too-many-ancestors
    """
    Validated parameter dictionary.

    Subclasses set ``schema``; the dictionary passed to the constructor is
    validated and completed with defaults.
    """

    # "voluptuous" schema  to add automatic validation
    schema = Schema({})

    # pylint: disable=redefined-builtin
    def __init__(self, dict, /):
        """
        Constructor for the parameter class

        Usage: ``MLParameters({'rho': 1, 'mu': 1, 'gamma': 1, 'z': 0.5})``

        :param dict: dictionary with parameters
        :param type dict: dict

        """
        self.dict = self.validate(dict)

    def validate(self, parameters_dict):
        """Validate parameters.

        Uses the voluptuous package for validation. Find out about allowed keys using::

            print(MLParameters.schema.schema)

        :param parameters_dict: dictionary with parameters
        :param type parameters_dict: dict
        :returns: validated dictionary
        """
        return self.schema(parameters_dict)

    def get_dict(self) -> dict:
        """Return validated dict."""
        return self.dict

    def __str__(self):
        return str(self.dict)


class MLParameters(InputParameters):
    """Parameters of ``special_functions.MLParams``."""

    schema = Schema(ml_parameters)


class SpecParameters(InputParameters):
    """Parameters of ``prabhakar_ops.PrabhakarSpec``."""

    schema = Schema(spec_parameters)


class BVPParameters(InputParameters):
    """Parameters of ``greens_function.BVPConfig`` apart from the operator spec."""

    schema = Schema(bvp_parameters)


class MLEvalParameters(InputParameters):
    """Parameters of the ``ml-eval`` subcommand."""

    schema = Schema(ml_eval_parameters)


class OperatorParameters(InputParameters):
    """Parameters of the ``prabhakar-int`` and ``prabhakar-deriv`` subcommands."""

    schema = Schema(operator_parameters)


class GreensParameters(InputParameters):
    """Parameters of the ``greens`` subcommand."""

    schema = Schema(greens_parameters)


class InstanceParameters(InputParameters):
    """Parameters of the ``make-instance`` subcommand."""

    schema = Schema(instance_parameters)


class CertifyParameters(InputParameters):
    """Parameters of the ``certify`` subcommand."""

    schema = Schema(certify_parameters)


class SweepParameters(InputParameters):
    """Parameters of the ``certify-sweep`` subcommand."""

    schema = Schema(sweep_parameters)


class SweepEntryParameters(InputParameters):
    """One configuration of a sweep file."""

    schema = Schema(sweep_entry_parameters)


class ReproduceParameters(InputParameters):
    """Parameters of the ``reproduce`` subcommand."""

    schema = Schema(reproduce_parameters)


SUBCOMMAND_PARAMETERS: ty.Dict[str, ty.Type[InputParameters]] = {
    "ml-eval": MLEvalParameters,
    "prabhakar-int": OperatorParameters,
    "prabhakar-deriv": OperatorParameters,
    "greens": GreensParameters,
    "make-instance": InstanceParameters,
    "certify": CertifyParameters,
    "certify-sweep": SweepParameters,
    "reproduce": ReproduceParameters,
}


def validate_fields(instance: ty.Any, parameters_class: ty.Type[InputParameters]) -> None:
    """Validate the scalar fields of a frozen dataclass against a parameter schema.

    Fields are coerced to ``float`` in place, so ``MLParams(1, 1, 1, 0)`` stores floats.

    :param instance: dataclass instance
    :param parameters_class: ``InputParameters`` subclass holding the schema
    :raises ConfigError: naming the offending field
    """
    keys = {str(key) for key in parameters_class.schema.schema}
    values = {
        field.name: getattr(instance, field.name)
        for field in dataclasses.fields(instance)
        if field.name in keys
    }
    try:
        validated = parameters_class(values).get_dict()
    except MultipleInvalid as exc:
        raise ConfigError(
            f"invalid {type(instance).__name__}: {exc}", report=values
        ) from exc
    for name, value in validated.items():
        if name in values:
            object.__setattr__(instance, name, value)
