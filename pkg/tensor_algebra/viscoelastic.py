"""Visco-elastic completion of planar strain histories."""
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from tensor_algebra.reduction import (
    completion_multipliers,
    completion_rhs,
    completion_system,
    mix,
)
from tensor_algebra.tensor import SymTensor4
from utils.exceptions import DomainError, SingularSystemError
from utils.logger import setup_logger

logger = setup_logger(__name__)


@dataclass(frozen=True, eq=False)
class StrainTrajectory:
    """Strains sampled at strictly increasing times.

    Attributes:
        times: Shape (N,)
        values: Shape (N, 2, 2) or (N, 3, 3)
    """
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or len(times) == 0:
            raise DomainError("times must be a non-empty 1D array")
        if np.any(np.diff(times) <= 0):
            raise DomainError("times must be strictly increasing")
        if values.shape[0] != times.shape[0] or values.shape[1:] not in ((2, 2), (3, 3)):
            raise DomainError(f"values must have shape (N, 2, 2) or (N, 3, 3), got {values.shape}")
        object.__setattr__(self, 'times', times)
        object.__setattr__(self, 'values', values)

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class CompletionResult:
    trajectory: StrainTrajectory
    max_residual: float


def mve_evolve(
    elasticity: SymTensor4,
    viscosity: SymTensor4,
    xi: StrainTrajectory,
    lambda0: Optional[np.ndarray] = None,
) -> CompletionResult:
    """Complete a planar strain history with its visco-elastic out-of-plane part.

    The extra components lambda(t) solve
    A_D lambda' + A_C lambda = -b_C(xi) - b_D(xi'), the orthogonality of
    C Y + D Y' to every mix(O, zeta), integrated by implicit midpoint on the
    native time grid of xi (xi taken piecewise linear).

    Args:
        elasticity: Elasticity tensor C
        viscosity: Viscosity tensor D
        xi: Planar strain history (values of shape (N, 2, 2))
        lambda0: Initial extra components; defaults to the static completion of xi(0)

    Returns:
        CompletionResult: Trajectory of 3x3 strains and the largest midpoint residual

    Raises:
        SingularSystemError: If the out-of-plane block of the viscosity is not positive definite
    """
    if xi.values.shape[1:] != (2, 2):
        raise DomainError("mve_evolve expects a trajectory of 2x2 strains")

    a_c = completion_system(elasticity)
    a_d = completion_system(viscosity)
    if np.linalg.eigvalsh(a_d)[0] <= 0.0:
        raise SingularSystemError("Out-of-plane block of the viscosity tensor is not positive definite")

    b_c = completion_rhs(elasticity, xi.values)
    if lambda0 is None:
        lam = completion_multipliers(elasticity, xi.values[0])
    else:
        lam = np.asarray(lambda0, dtype=float).reshape(3)

    lambdas = np.empty((len(xi), 3))
    lambdas[0] = lam
    max_residual = 0.0
    factors = None
    last_dt = None
    for n in range(len(xi) - 1):
        dt = xi.times[n + 1] - xi.times[n]
        if factors is None or not np.isclose(dt, last_dt, rtol=1e-14, atol=0.0):
            factors = lu_factor(a_d / dt + 0.5 * a_c)
            last_dt = dt
        b_mid = 0.5 * (b_c[n] + b_c[n + 1])
        b_rate = completion_rhs(viscosity, (xi.values[n + 1] - xi.values[n]) / dt)
        rhs = (a_d / dt - 0.5 * a_c) @ lambdas[n] - b_mid - b_rate
        lambdas[n + 1] = lu_solve(factors, rhs)

        lam_mid = 0.5 * (lambdas[n] + lambdas[n + 1])
        residual = a_c @ lam_mid + b_mid + a_d @ (lambdas[n + 1] - lambdas[n]) / dt + b_rate
        scale = max(1.0, np.max(np.abs(b_mid)), np.max(np.abs(b_rate)))
        max_residual = max(max_residual, float(np.max(np.abs(residual))) / scale)

    logger.debug(f"mve_evolve: {len(xi)} samples, max midpoint residual {max_residual:.3e}")
    return CompletionResult(
        trajectory=StrainTrajectory(xi.times, mix(xi.values, lambdas)),
        max_residual=max_residual,
    )
