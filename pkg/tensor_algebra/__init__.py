"""Fourth-order tensor algebra, planar reduction and visco-elastic completion."""
from tensor_algebra.tensor import (
    SymTensor4,
    TensorReport,
    identity_tensor,
    make_decoupled,
    make_isotropic,
    quadratic_form,
    require_valid,
    strain_to_mandel,
    tensor_from_json,
    tensor_to_json,
    validate_tensor,
)
from tensor_algebra.reduction import (
    ReducedTensor,
    apply_M,
    check_planar_condition,
    mix,
    planar_block,
    reduced_tensor,
    rescale_strain,
)
from tensor_algebra.viscoelastic import CompletionResult, StrainTrajectory, mve_evolve

__all__ = [
    'SymTensor4', 'TensorReport', 'identity_tensor', 'make_decoupled', 'make_isotropic',
    'quadratic_form', 'require_valid', 'strain_to_mandel', 'tensor_from_json', 'tensor_to_json',
    'validate_tensor', 'ReducedTensor', 'apply_M', 'check_planar_condition', 'mix',
    'planar_block', 'reduced_tensor', 'rescale_strain', 'CompletionResult', 'StrainTrajectory',
    'mve_evolve',
]
