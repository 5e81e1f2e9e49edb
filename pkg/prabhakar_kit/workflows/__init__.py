"""Sweeps over boundary value problems and the ``reproduce`` acceptance run.

Inputs of ``reproduce`` are read from ``protocols/reproduce.yaml``: the
``default_inputs`` are overridden by the selected protocol and then by the
caller's ``overrides``.
"""
import concurrent.futures
import copy
import itertools
import pathlib
import typing as ty

import numpy as np
import yaml

from prabhakar_kit.bvp_spectral import TOL_BC_B, TOL_DX_A, TOL_X_A, manufacture_instance
from prabhakar_kit.exceptions import ConfigError
from prabhakar_kit.greens_function import BVPConfig
from prabhakar_kit.hw_inequality import InequalityReport, Provenance, certify
from prabhakar_kit.parsers import parse_q_expression
from prabhakar_kit.utils.log import get_logger
from prabhakar_kit.utils.output import dumps

from . import criteria

__all__ = [
    "get_protocol_filepath",
    "get_default_protocol",
    "get_available_protocols",
    "get_protocol_inputs",
    "recursive_merge",
    "sweep_configs",
    "certify_sweep",
    "reproduce",
]

LOGGER = get_logger(__name__)


def get_protocol_filepath() -> pathlib.Path:
    """Return the ``pathlib.Path`` to the ``.yaml`` file that defines the protocols."""
    from importlib_resources import files

    from . import protocols

    return files(protocols) / "reproduce.yaml"


def _load_protocol_file() -> dict:
    with get_protocol_filepath().open("r", encoding="utf-8") as handle:
        return yaml.safe_load(handle)


def get_default_protocol() -> str:
    """Return the default protocol name."""
    return _load_protocol_file()["default_protocol"]


def get_available_protocols() -> ty.Dict[str, dict]:
    """Return the available protocols with their descriptions."""
    data = _load_protocol_file()
    return {key: {"description": value["description"]} for key, value in data["protocols"].items()}


def recursive_merge(left: dict, right: dict) -> dict:
    """Merge ``right`` into a copy of ``left``; nested dictionaries are merged, other values replaced."""
    merged = copy.deepcopy(left)
    for key, value in right.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = recursive_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def get_protocol_inputs(protocol: ty.Optional[str] = None, overrides: ty.Optional[dict] = None) -> dict:
    """Return the inputs of ``protocol`` (default protocol if ``None``) merged with ``overrides``.

    :raises ConfigError: if the protocol does not exist
    """
    data = _load_protocol_file()
    protocol = protocol or data["default_protocol"]
    try:
        protocol_inputs = dict(data["protocols"][protocol])
    except KeyError as exc:
        raise ConfigError(
            f"`{protocol}` is not a valid protocol. Call ``get_available_protocols`` to show available protocols."
        ) from exc
    protocol_inputs.pop("description")
    inputs = recursive_merge(data["default_inputs"], protocol_inputs)
    return recursive_merge(inputs, overrides or {})


def sweep_configs(inputs: dict) -> ty.List[BVPConfig]:
    """Configurations of the certification sweep, in key order.

    :param inputs: the ``sweep`` section of the protocol inputs
    """
    grid = itertools.product(
        inputs["rho"], inputs["mu"], inputs["gamma"], inputs["omega"], inputs["beta"]
    )
    configs = [
        BVPConfig.from_parameters(
            a=inputs["a"], b=inputs["b"], xi=inputs["xi"], beta=beta, rho=rho, mu=mu, gamma=gamma, omega=omega
        )
        for rho, mu, gamma, omega, beta in grid
    ]
    configs.sort(key=BVPConfig.key)
    if inputs.get("max_configs") is not None:
        configs = configs[: inputs["max_configs"]]
    return configs


def _certify_one(cfg: BVPConfig, q: ty.Any, n: int, provenance: Provenance) -> InequalityReport:
    if provenance is Provenance.SPECTRAL_SCALED:
        instance = manufacture_instance(cfg, q, n)
        return certify(cfg, instance.q, provenance)
    return certify(cfg, q, provenance)


def certify_sweep(
    configs: ty.Iterable[BVPConfig],
    q: ty.Any,
    n: int = 400,
    *,
    provenance: ty.Union[Provenance, str] = Provenance.SPECTRAL_SCALED,
    max_workers: int = 1,
) -> ty.List[InequalityReport]:
    """Certify ``q`` on every configuration, reports ordered by configuration key.

    With ``spectral_scaled`` provenance ``q`` is first rescaled per configuration
    so that the problem has a nontrivial solution.
    """
    provenance = Provenance(provenance)
    configs = sorted(configs, key=BVPConfig.key)
    if max_workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=max_workers) as executor:
            reports = list(executor.map(lambda cfg: _certify_one(cfg, q, n, provenance), configs))
    else:
        reports = [_certify_one(cfg, q, n, provenance) for cfg in configs]
    failed = sum(not report.holds_proof for report in reports)
    LOGGER.info(f"certified {len(reports)} configurations, {failed} below the derived bound")
    return reports


def _run_criteria(inputs: dict) -> ty.List[criteria.CriterionResult]:
    """Criteria 1 to 10 with a generator seeded from the inputs."""
    rng = np.random.default_rng(inputs["seed"])
    tolerances = {"x_a": TOL_X_A, "dx_a": TOL_DX_A, "bc_b": TOL_BC_B}

    configs = sweep_configs(inputs["sweep"])
    q = parse_q_expression(inputs["sweep"]["q"], inputs["sweep"]["a"])
    n = inputs["certification"]["n"]
    LOGGER.info(f"manufacturing {len(configs)} instances with n={n}")
    instances = criteria.manufacture_all(configs, q, n)
    fine = {}
    if inputs["mesh"]["n_fine"] == n:
        fine = {instance.cfg.key(): instance.lambda_star for instance in instances}

    return [
        criteria.ml_reductions(inputs["ml_reductions"], rng),
        criteria.oracle_grid(inputs["oracle_grid"]),
        criteria.roundtrip(inputs["roundtrip"]),
        criteria.null_space(inputs["null_space"]),
        criteria.green_reduction(inputs["green_reduction"]),
        criteria.green_properties(inputs["green_properties"]),
        criteria.certification(instances, inputs["certification"], tolerances),
        criteria.rl_special_case(inputs["rl_special_case"], rng),
        criteria.classical(inputs["classical"]),
        criteria.mesh_convergence(configs, q, inputs["mesh"], fine),
    ]


def reproduce(protocol: ty.Optional[str] = None, overrides: ty.Optional[dict] = None) -> dict:
    """Run every acceptance criterion and return the summary.

    Random inputs come from a generator seeded by the protocol, so two runs
    with the same protocol return identical summaries.
    """
    inputs = get_protocol_inputs(protocol, overrides)
    results = _run_criteria(inputs)

    # a second complete run must serialise to the same bytes
    first = dumps({"criteria": [result.as_dict() for result in results]})
    second = dumps({"criteria": [result.as_dict() for result in _run_criteria(inputs)]})
    results.append(
        criteria.CriterionResult(
            11,
            "determinism",
            (criteria.Check("byte_identical", float(first != second), 0.0, first == second),),
        )
    )

    for result in results:
        if not result.passed:
            LOGGER.warning(f"criterion {result.number} ({result.name}) failed")
    return {
        "protocol": protocol or get_default_protocol(),
        "passed": all(result.passed for result in results),
        "criteria": [result.as_dict() for result in results],
    }
