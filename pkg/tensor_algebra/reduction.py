"""Reduction of 3D tensors to planar ones.

apply_M completes a planar strain with the out-of-plane components that
minimize the elastic energy; reduced_tensor is the planar stress response
of the completed strain.
"""
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, lu_factor, lu_solve

from tensor_algebra.tensor import SymTensor4, as_strain, strain_to_mandel
from utils.exceptions import DomainError, SingularSystemError

PLANAR_TOL = 1e-14

# Mandel slots of the planar block (11, 22, 12) and of the completion (33, 23, 13)
PLANAR_SLOTS = (0, 1, 5)
PLANAR_WEIGHTS = np.array([1.0, 1.0, np.sqrt(2.0)])


@dataclass(frozen=True, eq=False)
class ReducedTensor:
    """Symmetric 3x3 matrix acting on Mandel-packed 2x2 strains (11, 22, 12)."""
    voigt3: np.ndarray

    def apply(self, xi) -> np.ndarray:
        """Return the 2x2 stress of a 2x2 strain."""
        xi = as_strain(xi, dim=2)
        s = self.voigt3 @ planar_to_mandel(xi)
        return mandel_to_planar(s)

    def quadratic(self, xi) -> float:
        """0.5 * (T_r Xi) : Xi."""
        vector = planar_to_mandel(as_strain(xi, dim=2))
        return 0.5 * float(vector @ self.voigt3 @ vector)


def planar_to_mandel(xi: np.ndarray) -> np.ndarray:
    """Pack 2x2 strains (any leading shape) as (11, 22, sqrt2*12)."""
    xi = np.asarray(xi, dtype=float)
    return np.stack([xi[..., 0, 0], xi[..., 1, 1], xi[..., 0, 1]], axis=-1) * PLANAR_WEIGHTS


def mandel_to_planar(vector: np.ndarray) -> np.ndarray:
    vector = np.asarray(vector, dtype=float) / PLANAR_WEIGHTS
    xi = np.empty(vector.shape[:-1] + (2, 2))
    xi[..., 0, 0] = vector[..., 0]
    xi[..., 1, 1] = vector[..., 1]
    xi[..., 0, 1] = xi[..., 1, 0] = vector[..., 2]
    return xi


def mix(xi, eta) -> np.ndarray:
    """Symmetric 3x3 matrix with planar block xi and last row/column (eta1, eta2, eta3)."""
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    m = np.zeros(np.broadcast_shapes(xi.shape[:-2], eta.shape[:-1]) + (3, 3))
    m[..., :2, :2] = xi
    m[..., 0, 2] = m[..., 2, 0] = eta[..., 0]
    m[..., 1, 2] = m[..., 2, 1] = eta[..., 1]
    m[..., 2, 2] = eta[..., 2]
    return m


def _completion_basis() -> np.ndarray:
    """The three matrices mix(O, e_p)."""
    return np.stack([mix(np.zeros((2, 2)), e) for e in np.eye(3)])


COMPLETION_BASIS = _completion_basis()


def completion_system(tensor: SymTensor4) -> np.ndarray:
    """3x3 Gram matrix A_pq = (T mix(O,e_p)) : mix(O,e_q)."""
    return np.einsum('pij,ijkl,qkl->pq', COMPLETION_BASIS, tensor.entries, COMPLETION_BASIS)


def completion_rhs(tensor: SymTensor4, xi) -> np.ndarray:
    """Vector b_p = (T mix(xi, 0)) : mix(O, e_p); accepts a leading time axis."""
    planar = mix(xi, np.zeros(np.shape(xi)[:-2] + (3,)))
    return np.einsum('...ij,ijkl,pkl->...p', planar, tensor.entries, COMPLETION_BASIS)


def factor_completion(tensor: SymTensor4):
    """LU factors of the completion system.

    Raises:
        SingularSystemError: If the system is not positive definite
    """
    system = completion_system(tensor)
    if np.linalg.eigvalsh(system)[0] <= 0.0:
        raise SingularSystemError("Out-of-plane block is not positive definite")
    try:
        return lu_factor(system)
    except (LinAlgError, ValueError) as e:
        raise SingularSystemError(f"Out-of-plane block could not be factored: {e}")


def completion_multipliers(tensor: SymTensor4, xi) -> np.ndarray:
    """The out-of-plane components lambda(xi) of M xi."""
    xi = as_strain(xi, dim=2)
    return lu_solve(factor_completion(tensor), -completion_rhs(tensor, xi))


def apply_M(tensor: SymTensor4, xi) -> np.ndarray:
    """Energy-minimizing completion M xi = mix(xi, lambda(xi)).

    Args:
        tensor: Valid elasticity tensor
        xi: Planar 2x2 strain

    Returns:
        np.ndarray: 3x3 strain whose stress has vanishing (i, 3) entries
    """
    return mix(xi, completion_multipliers(tensor, xi))


def reduced_tensor(tensor: SymTensor4) -> ReducedTensor:
    """Reduced tensor xi -> planar block of T M xi, in Mandel form."""
    factors = factor_completion(tensor)
    columns = []
    for basis_vector in np.eye(3):
        xi = mandel_to_planar(basis_vector)
        completed = mix(xi, lu_solve(factors, -completion_rhs(tensor, xi)))
        stress = tensor.apply(completed)
        columns.append(planar_to_mandel(stress[:2, :2]))
    matrix = np.array(columns).T
    return ReducedTensor(0.5 * (matrix + matrix.T))


def planar_block(tensor: SymTensor4) -> ReducedTensor:
    """In-plane Mandel block of a tensor (no completion)."""
    block = tensor.mandel[np.ix_(PLANAR_SLOTS, PLANAR_SLOTS)]
    return ReducedTensor(block)


def check_planar_condition(tensor: SymTensor4, tol: float = PLANAR_TOL) -> bool:
    """True iff |T_i3kl| <= tol for every i and every in-plane pair kl."""
    return bool(np.all(np.abs(tensor.entries[:, 2, :2, :2]) <= tol))


def rescale_strain(strain, eps: float) -> np.ndarray:
    """Divide the (i,3) entries by eps and the (3,3) entry by eps squared.

    Accepts a single 3x3 strain or an array of them.

    Raises:
        DomainError: If eps <= 0
    """
    if eps <= 0:
        raise DomainError(f"eps must be positive (got: {eps})")
    scaled = np.array(strain, dtype=float, copy=True)
    scaled[..., :2, 2] /= eps
    scaled[..., 2, :2] /= eps
    scaled[..., 2, 2] /= eps ** 2
    return scaled


def rescale_mandel_weights(eps: float) -> np.ndarray:
    """Row scales realizing rescale_strain on Mandel vectors."""
    if eps <= 0:
        raise DomainError(f"eps must be positive (got: {eps})")
    return np.array([1.0, 1.0, 1.0 / eps ** 2, 1.0 / eps, 1.0 / eps, 1.0])


def energy_of_completion(tensor: SymTensor4, xi, eta) -> float:
    """0.5 * (T mix(xi, eta)) : mix(xi, eta)."""
    v = strain_to_mandel(mix(xi, eta))
    return 0.5 * float(v @ tensor.mandel @ v)
