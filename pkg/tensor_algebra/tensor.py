"""Symmetric fourth-order tensors in Mandel packing.

Strains and stresses are packed as 6-vectors in the order
(11, 22, 33, 23, 13, 12) with a sqrt(2) weight on the shear slots, so that
the 6x6 matrix of a tensor is symmetric and its eigenvalues are the
definiteness constants of the tensor.
"""
import json
from dataclasses import dataclass
from typing import Any, Dict

import numpy as np

from utils.exceptions import DomainError, ValidationError
from utils.logger import setup_logger

logger = setup_logger(__name__)

MANDEL_PAIRS = ((0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1))
MANDEL_WEIGHTS = np.array([1.0, 1.0, 1.0, np.sqrt(2.0), np.sqrt(2.0), np.sqrt(2.0)])

# Rejection thresholds used by every loader
SYMMETRY_TOL = 1e-12
MIN_EIGENVALUE = 1e-10


@dataclass(frozen=True)
class TensorReport:
    """Result of validate_tensor."""
    symmetry_defect: float
    min_eigenvalue: float
    max_eigenvalue: float

    @property
    def is_valid(self) -> bool:
        return self.symmetry_defect <= SYMMETRY_TOL and self.min_eigenvalue >= MIN_EIGENVALUE


@dataclass(frozen=True, eq=False)
class SymTensor4:
    """Fourth-order tensor with major and minor symmetries.

    Attributes:
        entries: Array of shape (3, 3, 3, 3)
    """
    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        if entries.shape != (3, 3, 3, 3):
            raise DomainError(f"Tensor entries must have shape (3, 3, 3, 3), got {entries.shape}")
        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)

    @property
    def mandel(self) -> np.ndarray:
        """6x6 Mandel matrix of the tensor."""
        matrix = np.empty((6, 6))
        for a, (i, j) in enumerate(MANDEL_PAIRS):
            for b, (k, l) in enumerate(MANDEL_PAIRS):
                matrix[a, b] = MANDEL_WEIGHTS[a] * MANDEL_WEIGHTS[b] * self.entries[i, j, k, l]
        return matrix

    @classmethod
    def from_mandel(cls, matrix) -> 'SymTensor4':
        """Build a tensor from a 6x6 Mandel matrix.

        The matrix is symmetrized; entries are spread over all index
        permutations allowed by the minor symmetries.
        """
        matrix = np.asarray(matrix, dtype=float)
        if matrix.shape != (6, 6):
            raise DomainError(f"Mandel matrix must be 6x6, got {matrix.shape}")
        entries = np.zeros((3, 3, 3, 3))
        for a, (i, j) in enumerate(MANDEL_PAIRS):
            for b, (k, l) in enumerate(MANDEL_PAIRS):
                value = matrix[a, b] / (MANDEL_WEIGHTS[a] * MANDEL_WEIGHTS[b])
                for p, q in {(i, j), (j, i)}:
                    for r, s in {(k, l), (l, k)}:
                        entries[p, q, r, s] = value
        return cls(entries)

    def apply(self, strain: np.ndarray) -> np.ndarray:
        """Contract with a 3x3 strain: (T A)_ij = T_ijkl A_kl."""
        return np.einsum('ijkl,kl->ij', self.entries, strain)

    def __add__(self, other: 'SymTensor4') -> 'SymTensor4':
        return SymTensor4(self.entries + other.entries)

    def scaled(self, factor: float) -> 'SymTensor4':
        return SymTensor4(factor * self.entries)


def strain_to_mandel(strain: np.ndarray) -> np.ndarray:
    """Pack symmetric 3x3 strains (any leading shape) into Mandel 6-vectors."""
    strain = np.asarray(strain, dtype=float)
    packed = np.stack([strain[..., i, j] for i, j in MANDEL_PAIRS], axis=-1)
    return packed * MANDEL_WEIGHTS


def mandel_to_strain(vector: np.ndarray) -> np.ndarray:
    """Unpack Mandel 6-vectors (any leading shape) into symmetric 3x3 strains."""
    vector = np.asarray(vector, dtype=float) / MANDEL_WEIGHTS
    strain = np.zeros(vector.shape[:-1] + (3, 3))
    for a, (i, j) in enumerate(MANDEL_PAIRS):
        strain[..., i, j] = vector[..., a]
        strain[..., j, i] = vector[..., a]
    return strain


def as_strain(m, dim: int = 3) -> np.ndarray:
    """Return m as a symmetric dim x dim strain.

    Raises:
        DomainError: If m has the wrong shape or is not symmetric
    """
    m = np.asarray(m, dtype=float)
    if m.shape != (dim, dim):
        raise DomainError(f"Strain must be {dim}x{dim}, got shape {m.shape}")
    if not np.allclose(m, m.T, rtol=0.0, atol=1e-12):
        raise DomainError("Strain must be symmetric")
    return m


def validate_tensor(tensor: SymTensor4) -> TensorReport:
    """Report symmetry defect and Mandel eigenvalue range of a tensor.

    Args:
        tensor: Tensor to inspect

    Returns:
        TensorReport: max symmetry violation and eigenvalue bounds
    """
    t = tensor.entries
    defect = max(
        np.max(np.abs(t - t.transpose(2, 3, 0, 1))),
        np.max(np.abs(t - t.transpose(1, 0, 2, 3))),
        np.max(np.abs(t - t.transpose(0, 1, 3, 2))),
    )
    sym_mandel = tensor.mandel
    eigenvalues = np.linalg.eigvalsh(0.5 * (sym_mandel + sym_mandel.T))
    return TensorReport(
        symmetry_defect=float(defect),
        min_eigenvalue=float(eigenvalues[0]),
        max_eigenvalue=float(eigenvalues[-1]),
    )


def require_valid(tensor: SymTensor4, name: str = "tensor") -> SymTensor4:
    """Raise ValidationError unless the tensor is symmetric and positive definite."""
    report = validate_tensor(tensor)
    if report.symmetry_defect > SYMMETRY_TOL:
        raise ValidationError(f"{name}: symmetry defect {report.symmetry_defect:.3e} exceeds {SYMMETRY_TOL}")
    if report.min_eigenvalue < MIN_EIGENVALUE:
        raise ValidationError(f"{name}: not positive definite (min eigenvalue {report.min_eigenvalue:.3e})")
    return tensor


def identity_tensor() -> SymTensor4:
    """Identity on symmetric matrices."""
    return SymTensor4.from_mandel(np.eye(6))


def make_isotropic(lambda_lame: float, mu: float) -> SymTensor4:
    """Isotropic tensor lambda delta_ij delta_kl + mu (delta_ik delta_jl + delta_il delta_jk).

    Args:
        lambda_lame: First Lame parameter
        mu: Shear modulus

    Returns:
        SymTensor4: Isotropic tensor

    Raises:
        DomainError: If mu <= 0 or 3 lambda + 2 mu <= 0
    """
    if mu <= 0:
        raise DomainError(f"mu must be positive (got: {mu})")
    if 3.0 * lambda_lame + 2.0 * mu <= 0:
        raise DomainError(f"3*lambda_lame + 2*mu must be positive (got: {3.0 * lambda_lame + 2.0 * mu})")
    delta = np.eye(3)
    entries = (lambda_lame * np.einsum('ij,kl->ijkl', delta, delta)
               + mu * (np.einsum('ik,jl->ijkl', delta, delta) + np.einsum('il,jk->ijkl', delta, delta)))
    return SymTensor4(entries)


def make_decoupled(lambda_plane: float, mu: float, c33: float, mu_shear: float) -> SymTensor4:
    """Tensor whose in-plane and out-of-plane responses are uncoupled.

    The in-plane block is isotropic with (lambda_plane, mu); the 33 modulus
    and the transverse shear modulus are independent, and every entry
    T_i3kl with in-plane kl vanishes.

    Raises:
        DomainError: If the resulting tensor would not be positive definite
    """
    if mu <= 0 or mu_shear <= 0 or c33 <= 0:
        raise DomainError("mu, mu_shear and c33 must be positive")
    if lambda_plane + mu <= 0:
        raise DomainError(f"lambda_plane + mu must be positive (got: {lambda_plane + mu})")
    matrix = np.zeros((6, 6))
    matrix[0, 0] = matrix[1, 1] = lambda_plane + 2.0 * mu
    matrix[0, 1] = matrix[1, 0] = lambda_plane
    matrix[2, 2] = c33
    matrix[3, 3] = matrix[4, 4] = 2.0 * mu_shear
    matrix[5, 5] = 2.0 * mu
    return SymTensor4.from_mandel(matrix)


def quadratic_form(tensor: SymTensor4, strain) -> float:
    """Half the energy density: 0.5 * (T A) : A."""
    strain = as_strain(strain)
    return 0.5 * float(np.einsum('ij,ij->', tensor.apply(strain), strain))


def tensor_to_json(tensor: SymTensor4) -> Dict[str, Any]:
    """Serialize as {"voigt": 6x6 row-major Mandel matrix}."""
    return {"voigt": tensor.mandel.tolist()}


def tensor_from_json(data: Dict[str, Any], name: str = "tensor") -> SymTensor4:
    """Load a tensor from its JSON form and re-validate it.

    Raises:
        ValidationError: If the payload is malformed or the tensor is invalid
    """
    if isinstance(data, str):
        data = json.loads(data)
    if "voigt" not in data:
        raise ValidationError(f"{name}: missing 'voigt' matrix")
    matrix = np.asarray(data["voigt"], dtype=float)
    if matrix.shape != (6, 6):
        raise ValidationError(f"{name}: 'voigt' must be 6x6, got {matrix.shape}")
    if np.max(np.abs(matrix - matrix.T)) > SYMMETRY_TOL * max(1.0, np.max(np.abs(matrix))):
        raise ValidationError(f"{name}: 'voigt' matrix is not symmetric")
    tensor = SymTensor4.from_mandel(matrix)
    logger.debug(f"Loaded {name} from JSON")
    return require_valid(tensor, name)
