"""Configuration validation."""
from typing import Any, Dict, List

import numpy as np
import pydantic

from config.schema import ParameterRule, RunConfig, StudyConfig
from tensor_algebra.reduction import check_planar_condition
from tensor_algebra.tensor import require_valid
from utils.exceptions import ConfigError, DomainError, HypothesisError, ValidationError
from utils.logger import setup_logger

logger = setup_logger(__name__)

REQUIRED_SECTIONS = ['params', 'scheme']
REQUIRED_PARAMS = ['kappa', 'lambda_yosida', 'a0', 'a1']


def _field_path(location) -> str:
    return '.'.join(str(part) for part in location)


def validate_run_config(config: Dict[str, Any]) -> RunConfig:
    """Validate a raw run configuration.

    Args:
        config: Raw mapping loaded from YAML/JSON

    Returns:
        RunConfig: Parsed configuration

    Raises:
        ConfigError: If a field is missing or invalid (message names the field)
    """
    for section in REQUIRED_SECTIONS:
        if section not in config:
            raise ConfigError(f"Missing required field: {section}")
    if not isinstance(config['params'], dict):
        raise ConfigError("params must be a mapping")
    for name in REQUIRED_PARAMS:
        if name not in config['params']:
            raise ConfigError(f"Missing required field: params.{name} ({name})")

    try:
        run = RunConfig.model_validate(config)
    except pydantic.ValidationError as e:
        first = e.errors()[0]
        raise ConfigError(f"Invalid field {_field_path(first['loc'])}: {first['msg']}")
    except (DomainError, ValueError) as e:
        raise ConfigError(str(e))

    validate_tensors(run)
    validate_initial(run)
    logger.debug(f"Run config validated: {run.name}")
    return run


def build_tensors(run: RunConfig):
    """Elasticity and (optional) viscosity tensors of a run.

    Raises:
        ConfigError: If a tensor cannot be built or fails its axioms
    """
    tensors = []
    for name in ('elasticity', 'viscosity'):
        tensor_config = getattr(run.material, name)
        if tensor_config is None:
            tensors.append(None)
            continue
        try:
            tensors.append(require_valid(tensor_config.build(), f"material.{name}"))
        except (DomainError, ValidationError, ValueError) as e:
            raise ConfigError(f"Invalid field material.{name}: {e}")
    return tuple(tensors)


def validate_tensors(run: RunConfig) -> None:
    build_tensors(run)


def validate_initial(run: RunConfig) -> None:
    """Initial adhesion must be admissible; binary when the perimeter term is on."""
    if run.initial.z_pattern is not None:
        pattern = np.asarray(run.initial.z_pattern, dtype=float)
        if pattern.ndim != 2:
            raise ConfigError("Invalid field initial.z_pattern: must be a 2D array")
        if np.any(pattern < 0) or np.any(pattern > 1):
            raise ConfigError("Invalid field initial.z_pattern: values must lie in [0, 1]")
        values = pattern
    else:
        values = np.array([run.initial.z])
    if run.params.b > 0 and not np.all((values == 0) | (values == 1)):
        raise ConfigError("Invalid field initial.z: must be 0 or 1 when params.b > 0")


# ============================================================================
# Structural requirements of the asymptotic studies
# ============================================================================

def _require_study(run: RunConfig) -> StudyConfig:
    if run.study is None:
        raise ConfigError("Missing required field: study")
    return run.study


def _check_eps_list(eps_list: List[float]) -> None:
    if not eps_list:
        raise HypothesisError("study.eps_list must not be empty")
    if any(e <= 0 for e in eps_list):
        raise HypothesisError("study.eps_list must contain positive thickness parameters")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise HypothesisError("study.eps_list must be strictly decreasing")


def _check_family_values(study: StudyConfig, run: RunConfig) -> Dict[str, ParameterRule]:
    """Per-eps parameters must be admissible along the family and at the limit."""
    rules = {
        'rho': study.rule('rho', run.params.rho),
        'a0': study.rule('a0', run.params.a0),
        'a1': study.rule('a1', run.params.a1),
        'b': study.rule('b', run.params.b),
        'nu': study.rule('nu', run.params.nu),
    }
    for name in ('rho', 'a0', 'a1'):
        if rules[name].limit <= 0:
            raise HypothesisError(f"study.{name}: the limit must be positive (got {rules[name].limit})")
    for eps in study.eps_list:
        for name in ('rho', 'a0', 'a1'):
            if rules[name].value(eps) <= 0:
                raise HypothesisError(f"study.{name} must stay positive along the family (eps={eps})")
        for name in ('b', 'nu'):
            if rules[name].value(eps) < 0:
                raise HypothesisError(f"study.{name} must stay non-negative along the family (eps={eps})")
    return rules


def validate_nu_study(run: RunConfig) -> StudyConfig:
    """Vanishing-viscosity study: D = nu * D_bar with decreasing positive nu."""
    study = _require_study(run)
    if run.material.viscosity is None:
        raise HypothesisError("nu study needs material.viscosity (the tensor D_bar scaled by nu)")
    nus = study.nu_list
    if not nus or any(n <= 0 for n in nus) or any(b >= a for a, b in zip(nus, nus[1:])):
        raise HypothesisError("study.nu_list must be positive and strictly decreasing")
    if run.scheme.variant not in ('physical3D', 'rescaled3D'):
        raise HypothesisError("nu study runs a 3D variant (physical3D or rescaled3D)")
    return study


def validate_undamped_family(run: RunConfig) -> StudyConfig:
    """Undamped dimension reduction.

    Requires a perimeter coefficient with positive limit, vanishing cone
    weight in the limit, damping D_eps = eps^delta D_star with delta in
    [0, 3] and D_star positive definite.

    Raises:
        HypothesisError: Naming the violated requirement
    """
    study = _require_study(run)
    _check_eps_list(study.eps_list)
    rules = _check_family_values(study, run)
    if study.damping_rule != 'power':
        raise HypothesisError("undamped reduction needs study.damping_rule 'power' (D_eps = eps^delta D_star)")
    if not 0.0 <= study.delta <= 3.0:
        raise HypothesisError(f"undamped reduction needs the damping exponent delta in [0, 3] (got {study.delta})")
    if rules['b'].limit <= 0:
        raise HypothesisError("undamped reduction needs a perimeter coefficient b with positive limit")
    if rules['nu'].limit != 0:
        raise HypothesisError("undamped reduction needs the cone-penalty weight nu to vanish in the limit")
    if run.material.viscosity is None:
        raise HypothesisError("undamped reduction needs material.viscosity (the positive definite D_star)")
    if run.initial.z_pattern is None and run.initial.z not in (0.0, 1.0):
        raise HypothesisError("undamped reduction needs a binary initial adhesion field")
    if run.loads.dirichlet.kind != 'kl':
        raise HypothesisError("undamped reduction compares with the plate limit and needs loads.dirichlet.kind 'kl'")
    return study


def validate_damped_family(run: RunConfig) -> StudyConfig:
    """Damped dimension reduction.

    Requires eps D_eps = D fixed, a positive cone weight in the limit,
    in-plane/out-of-plane decoupled elasticity and viscosity tensors and a
    Kirchhoff-Love Dirichlet datum.

    Raises:
        HypothesisError: Naming the violated requirement
    """
    study = _require_study(run)
    _check_eps_list(study.eps_list)
    rules = _check_family_values(study, run)
    if study.damping_rule != 'inverse':
        raise HypothesisError("damped reduction needs study.damping_rule 'inverse' (eps D_eps = D)")
    if rules['nu'].limit <= 0:
        raise HypothesisError("damped reduction needs a cone-penalty weight nu with positive limit")
    elasticity, viscosity = build_tensors(run)
    if viscosity is None:
        raise HypothesisError("damped reduction needs material.viscosity")
    for name, tensor in (('elasticity', elasticity), ('viscosity', viscosity)):
        if not check_planar_condition(tensor):
            raise HypothesisError(
                f"damped reduction needs a planar-decoupled {name} tensor "
                f"(entries T_i3kl must vanish for in-plane k, l)")
    if run.loads.dirichlet.kind != 'kl':
        raise HypothesisError("damped reduction needs a Kirchhoff-Love Dirichlet datum (loads.dirichlet.kind 'kl')")
    return study
