"""Coupling between in-plane and deflection dofs through the adhesive interface."""
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import norm as sparse_norm

from discretization.assembly import plate_jump_operator
from discretization.mesh import PlateMesh, build_plate_mesh
from utils.exceptions import GridMismatchError

DECOUPLING_TOL = 1e-12

ZProfile = Union[np.ndarray, float, Callable[[np.ndarray, np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class CouplingNorms:
    """Frobenius norms of the blocks of kappa J^T diag(area z) J."""
    cross: float
    inplane: float
    deflection: float

    @property
    def decoupled(self) -> bool:
        return bool(self.cross <= DECOUPLING_TOL)


def adhesion_values(plate: PlateMesh, z_profile: ZProfile) -> np.ndarray:
    """Evaluate a profile on the interface cells, ordered like the jump rows.

    Args:
        plate: Plate mesh
        z_profile: Scalar, (ny, nz) array, or callable of (x2, x3) midpoints

    Raises:
        GridMismatchError: If an array profile has the wrong shape
    """
    grid = plate.interface
    if callable(z_profile):
        values = np.asarray(z_profile(grid.midpoints[:, 0], grid.midpoints[:, 1]), dtype=float)
        return np.broadcast_to(values, (grid.n_cells,)).astype(float)
    values = np.asarray(z_profile, dtype=float)
    if values.ndim == 0:
        return np.full(grid.n_cells, float(values))
    if values.shape != grid.shape:
        raise GridMismatchError(f"z profile has shape {values.shape}, interface grid is {grid.shape}")
    return values.ravel()


def decoupling_test(z_profile: ZProfile, plate: PlateMesh = None, kappa: float = 1.0) -> CouplingNorms:
    """Norms of the interface coupling between in-plane and deflection dofs.

    The lifted jump is (jump u1 - x3 jump w_1, jump u2 - x3 jump w_2, jump w),
    so the cross block is weighted by the first moment of z across the
    thickness and vanishes when that moment does.
    """
    plate = build_plate_mesh(4, 2, 4) if plate is None else plate
    grid = plate.interface
    z = adhesion_values(plate, z_profile)
    J = plate_jump_operator(plate)
    weights = np.repeat(grid.areas * z, 3)
    adhesive = (kappa * (J.T @ sp.diags(weights) @ J)).tocsr()

    inplane, deflection = plate.inplane_dofs, plate.deflection_dofs
    cross = adhesive[inplane][:, deflection]
    return CouplingNorms(
        cross=float(sparse_norm(cross)) if cross.nnz else 0.0,
        inplane=float(sparse_norm(adhesive[inplane][:, inplane])) if adhesive.nnz else 0.0,
        deflection=float(sparse_norm(adhesive[deflection][:, deflection])) if adhesive.nnz else 0.0,
    )
