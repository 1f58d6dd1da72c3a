"""Kirchhoff-Love lifts of plate fields onto the slab and the reverse projection."""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from discretization.assembly import assemble_gradient_gram, assemble_slab_mass
from discretization.elements import bfs_shape, gauss_01, quad_shape
from discretization.mesh import X1_RANGE, X2_RANGE, PlateMesh, SlabMesh
from utils.exceptions import GridMismatchError
from utils.logger import setup_logger

logger = setup_logger(__name__)


def _check_grids(plate: PlateMesh, slab: SlabMesh) -> None:
    if plate.nx != slab.nx or plate.ny != slab.ny:
        raise GridMismatchError(
            f"Plate grid {plate.nx}x{plate.ny} does not match slab grid {slab.nx}x{slab.ny}")
    if not np.isclose(slab.thickness, 1.0):
        raise GridMismatchError(f"KL lifts need the unit-thickness slab (got thickness {slab.thickness:g})")


def kl_lift_operator(plate: PlateMesh, slab: SlabMesh) -> sp.csr_matrix:
    """Sparse map from plate dofs to slab nodal dofs.

    Each slab node at (x1, x2, x3) receives (u1 - x3 w_1, u2 - x3 w_2, w)
    from the plate node at (x1, x2) on the same side of the contact line.
    """
    _check_grids(plate, slab)
    n_slab = slab.n_nodes
    nodes = np.arange(n_slab)
    grid = nodes < slab.n_grid_nodes
    plate_node = np.empty(n_slab, dtype=np.int64)
    i = nodes[grid] % (slab.nx + 1)
    j = (nodes[grid] // (slab.nx + 1)) % (slab.ny + 1)
    plate_node[grid] = plate.grid_node(i, j)
    copies = nodes[~grid] - slab.n_grid_nodes
    plate_node[~grid] = plate.plus_node(copies % (slab.ny + 1))
    x3 = slab.coordinates[:, 2]

    rows = np.concatenate([3 * nodes, 3 * nodes, 3 * nodes + 1, 3 * nodes + 1, 3 * nodes + 2])
    cols = np.concatenate([6 * plate_node, 6 * plate_node + 3, 6 * plate_node + 1, 6 * plate_node + 4,
                           6 * plate_node + 2])
    data = np.concatenate([np.ones(n_slab), -x3, np.ones(n_slab), -x3, np.ones(n_slab)])
    return sp.csr_matrix((data, (rows, cols)), shape=(slab.n_dofs, plate.n_dofs))


def kl_lift(plate: PlateMesh, slab: SlabMesh, plate_dofs: np.ndarray) -> np.ndarray:
    """Slab dof vector of the lift (ubar - x3 grad w, w) of a plate field."""
    plate_dofs = np.asarray(plate_dofs, dtype=float)
    if plate_dofs.shape != (plate.n_dofs,):
        raise GridMismatchError(f"Expected {plate.n_dofs} plate dofs, got {plate_dofs.shape}")
    return kl_lift_operator(plate, slab) @ plate_dofs


@dataclass(eq=False)
class KLField:
    """Exact evaluation of a lifted plate field at slab points."""
    plate: PlateMesh
    dofs: np.ndarray

    def _locate(self, points: np.ndarray):
        hx, hy = self.plate.spacing
        i = np.clip(np.floor((points[:, 0] - X1_RANGE[0]) / hx).astype(int), 0, self.plate.nx - 1)
        j = np.clip(np.floor((points[:, 1] - X2_RANGE[0]) / hy).astype(int), 0, self.plate.ny - 1)
        local = np.column_stack([(points[:, 0] - X1_RANGE[0]) / hx - i, (points[:, 1] - X2_RANGE[0]) / hy - j])
        return i + self.plate.nx * j, local

    def _cell_values(self, cells: np.ndarray):
        local_dofs = self.dofs[self.plate.cell_dofs[cells]].reshape(-1, 4, 6)
        return local_dofs[:, :, :2], local_dofs[:, :, 2:].reshape(-1, 16)

    def strain(self, points: np.ndarray) -> np.ndarray:
        """Symmetric gradient of the lifted field at points (n, 3), shape (n, 3, 3).

        The lift (ubar - x3 grad w, w) has e_i3 = 0 identically, so only the
        planar block is filled.
        """
        points = np.atleast_2d(points)
        cells, local = self._locate(points)
        inplane, deflection = self._cell_values(cells)
        h = self.plate.spacing
        x3 = points[:, 2]
        strains = np.zeros((len(points), 3, 3))
        for q in range(len(points)):
            _, grads = quad_shape(local[q:q + 1], h)
            grad_u = grads[0].T @ inplane[q]            # (2 derivative, 2 component)
            w_11 = bfs_shape(local[q:q + 1], h, 2, 0)[0] @ deflection[q]
            w_22 = bfs_shape(local[q:q + 1], h, 0, 2)[0] @ deflection[q]
            w_12 = bfs_shape(local[q:q + 1], h, 1, 1)[0] @ deflection[q]
            strains[q, 0, 0] = grad_u[0, 0] - x3[q] * w_11
            strains[q, 1, 1] = grad_u[1, 1] - x3[q] * w_22
            strains[q, 0, 1] = strains[q, 1, 0] = 0.5 * (grad_u[1, 0] + grad_u[0, 1]) - x3[q] * w_12
        return strains


def slab_quadrature(slab: SlabMesh, inplane_order: int = 4, thickness_order: int = 2) -> Tuple[np.ndarray, np.ndarray]:
    """Interior quadrature points and weights of the slab, cell by cell."""
    hx, hy, hz = slab.spacing
    sx, wx = gauss_01(inplane_order)
    sz, wz = gauss_01(thickness_order)
    points, weights = [], []
    for k in range(slab.nz):
        for j in range(slab.ny):
            for i in range(slab.nx):
                x0 = np.array([X1_RANGE[0] + i * hx, X2_RANGE[0] + j * hy, -0.5 * slab.thickness + k * hz])
                for c, wc in zip(sz, wz):
                    for b, wb in zip(sx, wx):
                        for a, wa in zip(sx, wx):
                            points.append(x0 + np.array([a * hx, b * hy, c * hz]))
                            weights.append(wa * wb * wc * hx * hy * hz)
    return np.array(points), np.array(weights)


def kl_strain_samples(plate: PlateMesh, slab: SlabMesh, plate_dofs: np.ndarray, inplane_order: int = 4):
    """Exact strains of the lifted field at slab quadrature points.

    Returns:
        tuple: (strains (n, 3, 3), weights (n,), points (n, 3))
    """
    _check_grids(plate, slab)
    points, weights = slab_quadrature(slab, inplane_order)
    strains = KLField(plate, np.asarray(plate_dofs, dtype=float)).strain(points)
    return strains, weights, points


def h1_gram(slab: SlabMesh) -> sp.csr_matrix:
    """Gram matrix of the H1 inner product on slab displacements."""
    return assemble_slab_mass(slab, np.ones(3)) + assemble_gradient_gram(slab)


@dataclass(eq=False)
class KLProjector:
    """Factored least-squares projection of slab fields onto lifted plate fields.

    Minimizes (P p - u)^T H (P p - u) over plate dofs vanishing on the
    clamped edges; the twist dofs do not reach the slab nodes and are
    fixed by a vanishing Tikhonov term.
    """
    slab: SlabMesh
    plate: PlateMesh
    gram: sp.csr_matrix
    lift: sp.csr_matrix
    _lift_free: sp.csc_matrix
    _factor: object

    @classmethod
    def build(cls, slab: SlabMesh, plate: PlateMesh, gram: Optional[sp.spmatrix] = None,
              lift: Optional[sp.spmatrix] = None) -> 'KLProjector':
        H = (h1_gram(slab) if gram is None else gram).tocsr()
        P = (kl_lift_operator(plate, slab) if lift is None else lift).tocsr()
        P_free = P.tocsc()[:, plate.free_dofs]
        normal = (P_free.T @ H @ P_free).tocsc()
        tikhonov = 1e-12 * max(1.0, abs(normal.diagonal()).max())
        normal = (normal + tikhonov * sp.identity(normal.shape[0], format='csc')).tocsc()
        return cls(slab=slab, plate=plate, gram=H, lift=P, _lift_free=P_free, _factor=splu(normal))

    def project(self, slab_dofs: np.ndarray) -> Tuple[np.ndarray, float]:
        """Returns (plate dofs, H-norm distance)."""
        slab_dofs = np.asarray(slab_dofs, dtype=float)
        if slab_dofs.shape != (self.slab.n_dofs,):
            raise GridMismatchError(f"Expected {self.slab.n_dofs} slab dofs, got {slab_dofs.shape}")
        p = np.zeros(self.plate.n_dofs)
        p[self.plate.free_dofs] = self._factor.solve(self._lift_free.T @ (self.gram @ slab_dofs))
        return p, self.distance(slab_dofs, p)

    def distance(self, slab_dofs: np.ndarray, plate_dofs: np.ndarray) -> float:
        """H-norm of slab_dofs minus the lift of plate_dofs."""
        residual = self.lift @ plate_dofs - slab_dofs
        return float(np.sqrt(max(residual @ (self.gram @ residual), 0.0)))


def kl_project(
    slab: SlabMesh,
    plate: PlateMesh,
    slab_dofs: np.ndarray,
    gram: Optional[sp.spmatrix] = None,
    lift: Optional[sp.spmatrix] = None,
) -> Tuple[np.ndarray, float]:
    """Least-squares projection of a slab field onto lifted plate fields.

    Returns:
        tuple: (plate dofs, H-norm distance)
    """
    return KLProjector.build(slab, plate, gram, lift).project(slab_dofs)
