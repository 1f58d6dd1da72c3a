"""Maps between the thin slab of thickness eps and the unit-thickness rescaled slab."""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from discretization.mesh import SlabMesh
from model_energetics.params import AdhesionField
from utils.exceptions import DomainError, GridMismatchError


@dataclass(frozen=True, eq=False)
class SlabSample:
    """Nodal displacements (n_times, n_dofs), adhesion and time stamps of one slab."""
    u: np.ndarray
    z: Optional[AdhesionField]
    times: Optional[np.ndarray] = None


def _component_scales(eps: float) -> np.ndarray:
    return np.array([1.0, 1.0, eps])


def check_slab_pair(physical: SlabMesh, rescaled: SlabMesh, eps: float) -> None:
    """Both slabs must share cell counts; thicknesses eps and 1.

    Raises:
        GridMismatchError: If the node sets are not images of each other
    """
    if (physical.nx, physical.ny, physical.nz) != (rescaled.nx, rescaled.ny, rescaled.nz):
        raise GridMismatchError("Physical and rescaled slabs must have the same cell counts")
    if not np.isclose(physical.thickness, eps) or not np.isclose(rescaled.thickness, 1.0):
        raise GridMismatchError(
            f"Expected thicknesses ({eps:g}, 1), got ({physical.thickness:g}, {rescaled.thickness:g})")


def _scale_displacements(u: np.ndarray, scales: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape[-1] % 3:
        raise GridMismatchError(f"Nodal displacement length {u.shape[-1]} is not a multiple of 3")
    return (u.reshape(*u.shape[:-1], -1, 3) * scales).reshape(u.shape)


def _scale_adhesion(z: Optional[AdhesionField], area_factor: float, hz_factor: float) -> Optional[AdhesionField]:
    if z is None:
        return None
    return AdhesionField(values=z.values, cell_areas=z.cell_areas * area_factor, hy=z.hy, hz=z.hz * hz_factor)


def rescale_solution(
    u_phys: np.ndarray,
    z_phys: Optional[AdhesionField],
    eps: float,
    times: Optional[np.ndarray] = None,
    physical: Optional[SlabMesh] = None,
    rescaled: Optional[SlabMesh] = None,
) -> SlabSample:
    """Physical slab fields to rescaled fields.

    u_resc(t, x) = (u1, u2, eps u3)(t / eps, r_eps x) and z_resc(t, x) = z(t / eps, r_eps x),
    where r_eps(x1, x2, x3) = (x1, x2, eps x3). Node k of the physical slab is
    the image of node k of the rescaled slab, so the map acts componentwise.

    Args:
        u_phys: Nodal displacements, shape (n_dofs,) or (n_times, n_dofs)
        z_phys: Adhesion on the physical interface (areas scale by 1 / eps)
        eps: Thickness parameter
        times: Physical time stamps (mapped to eps * t)
        physical, rescaled: Optional meshes checked for compatibility

    Raises:
        DomainError: If eps <= 0
        GridMismatchError: If the meshes or sizes do not match
    """
    if eps <= 0:
        raise DomainError(f"eps must be positive (got: {eps})")
    if physical is not None and rescaled is not None:
        check_slab_pair(physical, rescaled, eps)
    u = _scale_displacements(u_phys, _component_scales(eps))
    z = _scale_adhesion(z_phys, 1.0 / eps, 1.0 / eps)
    t = None if times is None else eps * np.asarray(times, dtype=float)
    return SlabSample(u=u, z=z, times=t)


def unscale_solution(
    u_resc: np.ndarray,
    z_resc: Optional[AdhesionField],
    eps: float,
    times: Optional[np.ndarray] = None,
) -> SlabSample:
    """Inverse of rescale_solution."""
    if eps <= 0:
        raise DomainError(f"eps must be positive (got: {eps})")
    u = _scale_displacements(u_resc, 1.0 / _component_scales(eps))
    z = _scale_adhesion(z_resc, eps, eps)
    t = None if times is None else np.asarray(times, dtype=float) / eps
    return SlabSample(u=u, z=z, times=t)
