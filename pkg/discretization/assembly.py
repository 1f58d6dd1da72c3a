"""Assembly of mass, stiffness, damping and jump operators."""
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import scipy.sparse as sp

from discretization.elements import (
    hermite_1d,
    hex_element_matrix,
    hex_gradient_gram,
    hex_mass_matrix,
    plate_element_matrix,
    plate_mass_matrix,
)
from discretization.mesh import InterfaceGrid, PlateMesh, SlabMesh
from discretization.variant import ModelVariant
from tensor_algebra.reduction import reduced_tensor, rescale_mandel_weights
from tensor_algebra.tensor import SymTensor4, require_valid
from utils.exceptions import AssemblyError, GridMismatchError, ValidationError
from utils.logger import setup_logger

logger = setup_logger(__name__)

Mesh = Union[SlabMesh, PlateMesh]


@dataclass(eq=False)
class AssembledForms:
    """Global matrices of one model variant on one mesh (all dofs, Dirichlet included).

    Attributes:
        mass: Component-weighted mass matrix
        unit_mass: Unweighted mass matrix, pairs volume forces with test fields
        stiffness: Elastic form
        damping: Viscous form, zero matrix for undamped variants
        jump: Maps dofs to interface-cell jumps, rows 3c + component
    """
    mesh: Mesh
    variant: ModelVariant
    mass: sp.csr_matrix
    unit_mass: sp.csr_matrix
    stiffness: sp.csr_matrix
    damping: sp.csr_matrix
    jump: sp.csr_matrix

    @property
    def interface(self) -> InterfaceGrid:
        return self.mesh.interface

    @property
    def free_dofs(self) -> np.ndarray:
        return self.mesh.free_dofs

    @property
    def dirichlet_dofs(self) -> np.ndarray:
        return self.mesh.dirichlet_dofs

    @property
    def n_dofs(self) -> int:
        return self.mesh.n_dofs

    @property
    def is_damped(self) -> bool:
        return self.damping.nnz > 0 and abs(self.damping).max() > 0.0

    def restrict(self, matrix: sp.spmatrix) -> sp.csr_matrix:
        """Free-free block."""
        free = self.free_dofs
        return matrix.tocsr()[free][:, free]

    def free_rows(self, matrix: sp.spmatrix) -> sp.csr_matrix:
        """Free rows, all columns (couples Dirichlet lifts into free equations)."""
        return matrix.tocsr()[self.free_dofs]

    def expand(self, u_free: np.ndarray) -> np.ndarray:
        """Full dof vector with zero Dirichlet entries."""
        full = np.zeros(self.n_dofs)
        full[self.free_dofs] = u_free
        return full

    def jumps(self, u_full: np.ndarray) -> np.ndarray:
        """Jumps at interface-cell midpoints, shape (ncells, 3)."""
        return (self.jump @ u_full).reshape(-1, 3)

    def without_damping(self) -> 'AssembledForms':
        return AssembledForms(
            mesh=self.mesh, variant=self.variant, mass=self.mass, unit_mass=self.unit_mass,
            stiffness=self.stiffness, damping=sp.csr_matrix(self.damping.shape), jump=self.jump,
        )


def _assemble(cell_dofs: np.ndarray, element: np.ndarray, n_dofs: int) -> sp.csr_matrix:
    """Sum one element matrix over all cells (uniform structured meshes)."""
    n_cells, n_local = cell_dofs.shape
    rows = np.repeat(cell_dofs, n_local, axis=1).ravel()
    cols = np.tile(cell_dofs, (1, n_local)).ravel()
    data = np.tile(element.ravel(), n_cells)
    matrix = sp.coo_matrix((data, (rows, cols)), shape=(n_dofs, n_dofs)).tocsr()
    matrix.sum_duplicates()
    return matrix


def _checked(tensor: Optional[SymTensor4], name: str) -> Optional[SymTensor4]:
    if tensor is None:
        return None
    try:
        return require_valid(tensor, name)
    except ValidationError as e:
        raise AssemblyError(str(e))


# ============================================================================
# Slab forms
# ============================================================================

def assemble_slab_form(mesh: SlabMesh, mandel: np.ndarray, row_scales=None) -> sp.csr_matrix:
    """Integral of (T S e(u)) : (S e(v)) for a 6x6 Mandel matrix and row scales S."""
    element = hex_element_matrix(mandel, mesh.spacing, row_scales)
    return _assemble(mesh.cell_dofs, element, mesh.n_dofs)


def assemble_slab_mass(mesh: SlabMesh, component_weights) -> sp.csr_matrix:
    return _assemble(mesh.cell_dofs, hex_mass_matrix(mesh.spacing, component_weights), mesh.n_dofs)


def assemble_gradient_gram(mesh: SlabMesh, components=(0, 1, 2)) -> sp.csr_matrix:
    """Integral of grad(u_c) . grad(v_c) summed over the given components."""
    element = sum(hex_gradient_gram(mesh.spacing, c) for c in components)
    return _assemble(mesh.cell_dofs, element, mesh.n_dofs)


def slab_jump_operator(mesh: SlabMesh) -> sp.csr_matrix:
    """Jump u+ - u- at interface-cell midpoints (bilinear average of the four corners)."""
    grid = mesh.interface
    rows, cols, data = [], [], []
    for j in range(grid.ny):
        for k in range(grid.nz):
            cell = j * grid.nz + k
            for b in range(2):
                for c in range(2):
                    plus = mesh.plus_node(j + b, k + c)
                    minus = mesh.grid_node(mesh.interface_column, j + b, k + c)
                    for comp in range(3):
                        rows += [3 * cell + comp, 3 * cell + comp]
                        cols += [3 * plus + comp, 3 * minus + comp]
                        data += [0.25, -0.25]
    return sp.csr_matrix((data, (rows, cols)), shape=(3 * grid.n_cells, mesh.n_dofs))


def _assemble_slab(mesh: SlabMesh, elasticity: SymTensor4, viscosity: Optional[SymTensor4],
                   variant: ModelVariant, rho: float) -> AssembledForms:
    if not np.isclose(mesh.thickness, variant.thickness):
        raise GridMismatchError(
            f"{variant.label()} needs slab thickness {variant.thickness:g}, mesh has {mesh.thickness:g}")
    scales = rescale_mandel_weights(variant.eps) if variant.kind == 'rescaled3D' else None
    stiffness = assemble_slab_form(mesh, elasticity.mandel, scales)
    if viscosity is not None:
        damping = variant.damping_weight * assemble_slab_form(mesh, viscosity.mandel, scales)
    else:
        damping = sp.csr_matrix((mesh.n_dofs, mesh.n_dofs))
    return AssembledForms(
        mesh=mesh,
        variant=variant,
        mass=assemble_slab_mass(mesh, variant.mass_weights(rho)),
        unit_mass=assemble_slab_mass(mesh, np.ones(3)),
        stiffness=stiffness,
        damping=damping,
        jump=slab_jump_operator(mesh),
    )


# ============================================================================
# Plate forms
# ============================================================================

def plate_jump_operator(mesh: PlateMesh) -> sp.csr_matrix:
    """Jump of the lifted field (u1 - x3 w_1, u2 - x3 w_2, w) at interface-cell midpoints."""
    grid = mesh.interface
    hy = mesh.spacing[1]
    value = hermite_1d(np.array(0.5), hy, 0)
    slope = hermite_1d(np.array(0.5), hy, 1)
    rows, cols, data = [], [], []

    def add(row, node, slot, weight):
        rows.append(row)
        cols.append(6 * node + slot)
        data.append(weight)

    for j in range(grid.ny):
        for k in range(grid.nz):
            cell = j * grid.nz + k
            x3 = grid.midpoints[cell, 1]
            for sign, nodes in ((1.0, mesh.plus_nodes), (-1.0, mesh.minus_nodes)):
                n0, n1 = nodes[j], nodes[j + 1]
                r1, r2, r3 = 3 * cell, 3 * cell + 1, 3 * cell + 2
                for node in (n0, n1):
                    add(r1, node, 0, 0.5 * sign)
                    add(r2, node, 1, 0.5 * sign)
                # x1-slope along the edge is interpolated by (wx, wxy)
                for weight, node, slot in zip(value, (n0, n0, n1, n1), (3, 5, 3, 5)):
                    add(r1, node, slot, -x3 * sign * weight)
                for weight, node, slot in zip(slope, (n0, n0, n1, n1), (2, 4, 2, 4)):
                    add(r2, node, slot, -x3 * sign * weight)
                for weight, node, slot in zip(value, (n0, n0, n1, n1), (2, 4, 2, 4)):
                    add(r3, node, slot, sign * weight)
    return sp.csr_matrix((data, (rows, cols)), shape=(3 * grid.n_cells, mesh.n_dofs))


def _assemble_plate(mesh: PlateMesh, elasticity: SymTensor4, viscosity: Optional[SymTensor4],
                    variant: ModelVariant, rho: float) -> AssembledForms:
    h = mesh.spacing
    stiffness = _assemble(mesh.cell_dofs, plate_element_matrix(reduced_tensor(elasticity).voigt3, h), mesh.n_dofs)
    if variant.is_damped_limit and viscosity is not None:
        damping = _assemble(mesh.cell_dofs, plate_element_matrix(reduced_tensor(viscosity).voigt3, h), mesh.n_dofs)
    else:
        damping = sp.csr_matrix((mesh.n_dofs, mesh.n_dofs))
    return AssembledForms(
        mesh=mesh,
        variant=variant,
        mass=_assemble(mesh.cell_dofs, plate_mass_matrix(h, 0.0, rho), mesh.n_dofs),
        unit_mass=_assemble(mesh.cell_dofs, plate_mass_matrix(h, 1.0, 1.0), mesh.n_dofs),
        stiffness=stiffness,
        damping=damping,
        jump=plate_jump_operator(mesh),
    )


def assemble_forms(
    mesh: Mesh,
    elasticity: SymTensor4,
    viscosity: Optional[SymTensor4],
    variant: ModelVariant,
    rho: float = 1.0,
) -> AssembledForms:
    """Assemble every bilinear form of a model variant.

    Args:
        mesh: SlabMesh for the 3D variants, PlateMesh for the limit variants
        elasticity: Elasticity tensor (reduced internally for the plate)
        viscosity: Viscosity tensor already scaled for the variant, or None
        variant: Model variant carrying eps
        rho: Mass density

    Returns:
        AssembledForms: Sparse symmetric matrices and the jump operator

    Raises:
        AssemblyError: If a tensor is invalid or the mesh does not fit the variant
    """
    elasticity = _checked(elasticity, "elasticity")
    viscosity = _checked(viscosity, "viscosity")
    if variant.is_limit:
        if not isinstance(mesh, PlateMesh):
            raise AssemblyError(f"{variant.label()} must be assembled on a PlateMesh")
        forms = _assemble_plate(mesh, elasticity, viscosity, variant, rho)
    else:
        if not isinstance(mesh, SlabMesh):
            raise AssemblyError(f"{variant.label()} must be assembled on a SlabMesh")
        forms = _assemble_slab(mesh, elasticity, viscosity, variant, rho)
    logger.debug(f"Assembled {variant.label()}: {mesh.n_dofs} dofs, {len(mesh.free_dofs)} free")
    return forms


def jump_operator(mesh: Mesh) -> sp.csr_matrix:
    """Linear map from dofs to jumps u+ - u- at interface-cell midpoints."""
    if isinstance(mesh, PlateMesh):
        return plate_jump_operator(mesh)
    return slab_jump_operator(mesh)
