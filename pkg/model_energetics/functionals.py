"""Scalar energy and dissipation functionals.

All interface integrals use the one-point midpoint rule per interface cell.
"""
from typing import Optional, Union

import numpy as np
import scipy.sparse as sp

from model_energetics.params import AdhesionField, ModelParams
from tensor_algebra.tensor import SymTensor4
from utils.exceptions import ConstraintError, GridMismatchError


class Inadmissible:
    """Value of the dissipation for an update that increases z somewhere."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INADMISSIBLE"

    def __bool__(self) -> bool:
        return False


INADMISSIBLE = Inadmissible()
Dissipation = Union[float, Inadmissible]


def yosida_pair(v, n, lam: float):
    """Yosida cone penalty and its gradient.

    The cone is {v : v.n >= 0}; alpha_hat = dist(v, cone)^2 / lam and
    alpha = (2 / lam) min(v.n, 0) n. Works on a single vector or on rows.

    Returns:
        tuple: (alpha, alpha_hat)
    """
    v = np.asarray(v, dtype=float)
    n = np.asarray(n, dtype=float)
    normal_part = np.minimum(v @ n, 0.0)
    alpha_hat = normal_part ** 2 / lam
    alpha = (2.0 / lam) * np.multiply.outer(normal_part, n)
    return alpha, alpha_hat


def kinetic(velocity: np.ndarray, mass: sp.spmatrix) -> float:
    """Kinetic energy 0.5 v^T M v; the density weights live in M."""
    return 0.5 * float(velocity @ (mass @ velocity))


def viscous_dissipation(viscosity: SymTensor4, strain_rates: np.ndarray, weights: np.ndarray,
                        eps_weight: float = 1.0) -> float:
    """(eps_weight / 2) * integral of D e(u') : e(u') from quadrature samples.

    Args:
        viscosity: Viscosity tensor
        strain_rates: (nq, 3, 3) strain rates, already rescaled when needed
        weights: (nq,) quadrature weights
        eps_weight: 1 for the physical system, eps for the rescaled one
    """
    stress = np.einsum('ijkl,qkl->qij', viscosity.entries, strain_rates)
    density = np.einsum('qij,qij->q', stress, strain_rates)
    return 0.5 * eps_weight * float(weights @ density)


def viscous_power(velocity: np.ndarray, damping: sp.spmatrix) -> float:
    """Matrix form of the viscous potential: 0.5 v^T C v (eps weight included in C)."""
    return 0.5 * float(velocity @ (damping @ velocity))


def dissipation_R(z_old: AdhesionField, z_new: AdhesionField, a1: float) -> Dissipation:
    """a1 * integral of (z_old - z_new), or INADMISSIBLE if z grows anywhere."""
    if not z_old.same_grid(z_new):
        raise GridMismatchError("Adhesion fields live on different grids")
    decrease = z_old.values - z_new.values
    if np.any(decrease < 0.0):
        return INADMISSIBLE
    return a1 * float(np.sum(z_old.cell_areas * decrease))


def perimeter(z: AdhesionField, binary: bool = True) -> float:
    """Total variation of z over interior edges of the interface grid.

    Neighbors along x2 share an edge of length hz, neighbors along x3 an
    edge of length hy.

    Raises:
        ConstraintError: If binary and z has fractional values
    """
    if binary and not z.is_binary():
        raise ConstraintError("Perimeter needs a 0/1 adhesion field")
    values = z.values
    along_x2 = np.abs(np.diff(values, axis=0)).sum() * z.hz
    along_x3 = np.abs(np.diff(values, axis=1)).sum() * z.hy
    return float(along_x2 + along_x3)


def adhesive_density(jumps: np.ndarray, weights) -> np.ndarray:
    """Weighted squared jump Q per cell."""
    return np.asarray(jumps) ** 2 @ np.asarray(weights, dtype=float)


def cone_penalty(jumps: np.ndarray, params: ModelParams, mask=(1.0, 1.0, 0.0)) -> np.ndarray:
    """Cellwise alpha_hat of the masked jump."""
    _, alpha_hat = yosida_pair(np.asarray(jumps) * np.asarray(mask), params.normal, params.lambda_yosida)
    return alpha_hat


def surface_energy(
    jumps: np.ndarray,
    z: AdhesionField,
    params: ModelParams,
    jump_weights=(1.0, 1.0, 1.0),
    cone_mask=(1.0, 1.0, 0.0),
    include_cone: bool = True,
) -> float:
    """nu int alpha_hat + (kappa/2) int z Q(jump) - a0 int z + b P(z).

    Args:
        jumps: (ncells, 3) jumps at cell midpoints, ordered like z.flat
        z: Adhesion field
        params: Model parameters
        jump_weights: Component weights of Q
        cone_mask: Jump components seen by the cone penalty
        include_cone: Drop the cone term when False (z-dependent part only)
    """
    jumps = np.asarray(jumps, dtype=float).reshape(-1, 3)
    if jumps.shape[0] != z.flat.size:
        raise GridMismatchError(f"{jumps.shape[0]} jumps for {z.flat.size} interface cells")
    areas = z.flat_areas
    energy = 0.5 * params.kappa * float(np.sum(areas * z.flat * adhesive_density(jumps, jump_weights)))
    energy -= params.a0 * z.total()
    if include_cone and params.nu > 0:
        energy += params.nu * float(areas @ cone_penalty(jumps, params, cone_mask))
    if params.b > 0:
        energy += params.b * perimeter(z, binary=True)
    return energy


def bulk_energy(stiffness: sp.spmatrix, u: np.ndarray, load: Optional[np.ndarray] = None) -> float:
    """0.5 u^T K u - F . u."""
    energy = 0.5 * float(u @ (stiffness @ u))
    if load is not None:
        energy -= float(load @ u)
    return energy


def power_of_loads(load_rate: np.ndarray, u: np.ndarray) -> float:
    """Partial time derivative of the energy: -F'(t) . u."""
    return -float(load_rate @ u)
