"""Structured meshes of the cracked slab and of the cracked mid-plane.

Both meshes cover omega = (-1, 1) x (0, 1) in the (x1, x2) plane with the
contact set on the plane x1 = 0. Nodes on that plane exist twice: the grid
node belongs to the minus side (x1 < 0), an appended copy to the plus side
(x1 > 0). Dirichlet data live on the faces x1 = -1 and x1 = 1.
"""
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from utils.exceptions import ConfigError
from utils.logger import setup_logger

logger = setup_logger(__name__)

X1_RANGE = (-1.0, 1.0)
X2_RANGE = (0.0, 1.0)


def _check_counts(nx: int, **counts: int) -> None:
    if nx < 2 or nx % 2:
        raise ConfigError(f"nx must be even and >= 2 so that x1 = 0 is a mesh plane (got: {nx})")
    for name, value in counts.items():
        if value < 1:
            raise ConfigError(f"{name} must be >= 1 (got: {value})")


@dataclass(eq=False)
class InterfaceGrid:
    """Cells of the contact surface: (ny along x2) x (nz through the thickness).

    Attributes:
        midpoints: (ncells, 2) array of (x2, x3) cell midpoints
        areas: (ncells,) cell areas
        hy: cell edge along x2
        hz: cell edge along x3
    """
    ny: int
    nz: int
    midpoints: np.ndarray
    areas: np.ndarray
    hy: float
    hz: float

    @property
    def shape(self):
        return (self.ny, self.nz)

    @property
    def n_cells(self) -> int:
        return self.ny * self.nz

    @classmethod
    def uniform(cls, ny: int, nz: int, thickness: float) -> 'InterfaceGrid':
        hy = (X2_RANGE[1] - X2_RANGE[0]) / ny
        hz = thickness / nz
        j, k = np.meshgrid(np.arange(ny), np.arange(nz), indexing='ij')
        midpoints = np.column_stack([
            X2_RANGE[0] + (j.ravel() + 0.5) * hy,
            -0.5 * thickness + (k.ravel() + 0.5) * hz,
        ])
        return cls(ny=ny, nz=nz, midpoints=midpoints, areas=np.full(ny * nz, hy * hz), hy=hy, hz=hz)


@dataclass(eq=False)
class SlabMesh:
    """Trilinear hexahedral mesh of (-1,1) x (0,1) x (-t/2, t/2) cut along x1 = 0."""
    nx: int
    ny: int
    nz: int
    thickness: float = 1.0
    dofs_per_node: int = field(default=3, init=False)

    @property
    def spacing(self):
        return ((X1_RANGE[1] - X1_RANGE[0]) / self.nx, (X2_RANGE[1] - X2_RANGE[0]) / self.ny,
                self.thickness / self.nz)

    @property
    def interface_column(self) -> int:
        return self.nx // 2

    @property
    def n_grid_nodes(self) -> int:
        return (self.nx + 1) * (self.ny + 1) * (self.nz + 1)

    @property
    def n_nodes(self) -> int:
        return self.n_grid_nodes + (self.ny + 1) * (self.nz + 1)

    @property
    def n_dofs(self) -> int:
        return 3 * self.n_nodes

    @property
    def n_cells(self) -> int:
        return self.nx * self.ny * self.nz

    @property
    def volume(self) -> float:
        hx, hy, hz = self.spacing
        return self.n_cells * hx * hy * hz

    def grid_node(self, i, j, k):
        return i + (self.nx + 1) * (j + (self.ny + 1) * k)

    def plus_node(self, j, k):
        return self.n_grid_nodes + j + (self.ny + 1) * k

    @cached_property
    def coordinates(self) -> np.ndarray:
        hx, hy, hz = self.spacing
        k, j, i = np.meshgrid(np.arange(self.nz + 1), np.arange(self.ny + 1), np.arange(self.nx + 1),
                              indexing='ij')
        grid = np.column_stack([
            X1_RANGE[0] + i.ravel() * hx,
            X2_RANGE[0] + j.ravel() * hy,
            -0.5 * self.thickness + k.ravel() * hz,
        ])
        k2, j2 = np.meshgrid(np.arange(self.nz + 1), np.arange(self.ny + 1), indexing='ij')
        plus = np.column_stack([
            np.zeros(k2.size),
            X2_RANGE[0] + j2.ravel() * hy,
            -0.5 * self.thickness + k2.ravel() * hz,
        ])
        return np.vstack([grid, plus])

    @cached_property
    def cells(self) -> np.ndarray:
        """(ncells, 8) connectivity; local node index a + 2b + 4c for offsets (a, b, c)."""
        ic = self.interface_column
        connectivity = np.empty((self.n_cells, 8), dtype=np.int64)
        row = 0
        for k in range(self.nz):
            for j in range(self.ny):
                for i in range(self.nx):
                    for c in range(2):
                        for b in range(2):
                            for a in range(2):
                                if i == ic and a == 0:
                                    node = self.plus_node(j + b, k + c)
                                else:
                                    node = self.grid_node(i + a, j + b, k + c)
                                connectivity[row, a + 2 * b + 4 * c] = node
                    row += 1
        return connectivity

    @cached_property
    def cell_dofs(self) -> np.ndarray:
        return (3 * self.cells[:, :, None] + np.arange(3)).reshape(self.n_cells, 24)

    @cached_property
    def minus_nodes(self) -> np.ndarray:
        """Interface nodes of the minus side, ordered j + (ny+1) k."""
        k, j = np.meshgrid(np.arange(self.nz + 1), np.arange(self.ny + 1), indexing='ij')
        return self.grid_node(self.interface_column, j.ravel(), k.ravel())

    @cached_property
    def plus_nodes(self) -> np.ndarray:
        return self.n_grid_nodes + np.arange((self.ny + 1) * (self.nz + 1))

    @cached_property
    def dirichlet_dofs(self) -> np.ndarray:
        x1 = self.coordinates[:, 0]
        nodes = np.flatnonzero(np.isclose(x1, X1_RANGE[0]) | np.isclose(x1, X1_RANGE[1]))
        return np.sort((3 * nodes[:, None] + np.arange(3)).ravel())

    @cached_property
    def free_dofs(self) -> np.ndarray:
        return np.setdiff1d(np.arange(self.n_dofs), self.dirichlet_dofs)

    @cached_property
    def interface(self) -> InterfaceGrid:
        return InterfaceGrid.uniform(self.ny, self.nz, self.thickness)


@dataclass(eq=False)
class PlateMesh:
    """Rectangular mesh of omega cut along x1 = 0.

    Each node carries [u1, u2, w, dw/dx1, dw/dx2, d2w/dx1dx2]: bilinear
    in-plane displacements and a Bogner-Fox-Schmit deflection. nz sets the
    through-thickness resolution of the contact surface.
    """
    nx: int
    ny: int
    nz: int = 4
    dofs_per_node: int = field(default=6, init=False)

    @property
    def spacing(self):
        return ((X1_RANGE[1] - X1_RANGE[0]) / self.nx, (X2_RANGE[1] - X2_RANGE[0]) / self.ny)

    @property
    def interface_column(self) -> int:
        return self.nx // 2

    @property
    def n_grid_nodes(self) -> int:
        return (self.nx + 1) * (self.ny + 1)

    @property
    def n_nodes(self) -> int:
        return self.n_grid_nodes + self.ny + 1

    @property
    def n_dofs(self) -> int:
        return 6 * self.n_nodes

    @property
    def n_cells(self) -> int:
        return self.nx * self.ny

    def grid_node(self, i, j):
        return i + (self.nx + 1) * j

    def plus_node(self, j):
        return self.n_grid_nodes + j

    @cached_property
    def coordinates(self) -> np.ndarray:
        hx, hy = self.spacing
        j, i = np.meshgrid(np.arange(self.ny + 1), np.arange(self.nx + 1), indexing='ij')
        grid = np.column_stack([X1_RANGE[0] + i.ravel() * hx, X2_RANGE[0] + j.ravel() * hy])
        plus = np.column_stack([np.zeros(self.ny + 1), X2_RANGE[0] + np.arange(self.ny + 1) * hy])
        return np.vstack([grid, plus])

    @cached_property
    def cells(self) -> np.ndarray:
        """(ncells, 4) connectivity; local node index a + 2b for offsets (a, b)."""
        ic = self.interface_column
        connectivity = np.empty((self.n_cells, 4), dtype=np.int64)
        row = 0
        for j in range(self.ny):
            for i in range(self.nx):
                for b in range(2):
                    for a in range(2):
                        if i == ic and a == 0:
                            connectivity[row, a + 2 * b] = self.plus_node(j + b)
                        else:
                            connectivity[row, a + 2 * b] = self.grid_node(i + a, j + b)
                row += 1
        return connectivity

    @cached_property
    def cell_dofs(self) -> np.ndarray:
        return (6 * self.cells[:, :, None] + np.arange(6)).reshape(self.n_cells, 24)

    @cached_property
    def minus_nodes(self) -> np.ndarray:
        return self.grid_node(self.interface_column, np.arange(self.ny + 1))

    @cached_property
    def plus_nodes(self) -> np.ndarray:
        return self.n_grid_nodes + np.arange(self.ny + 1)

    @cached_property
    def dirichlet_dofs(self) -> np.ndarray:
        x1 = self.coordinates[:, 0]
        nodes = np.flatnonzero(np.isclose(x1, X1_RANGE[0]) | np.isclose(x1, X1_RANGE[1]))
        return np.sort((6 * nodes[:, None] + np.arange(6)).ravel())

    @cached_property
    def free_dofs(self) -> np.ndarray:
        return np.setdiff1d(np.arange(self.n_dofs), self.dirichlet_dofs)

    @cached_property
    def interface(self) -> InterfaceGrid:
        return InterfaceGrid.uniform(self.ny, self.nz, 1.0)

    @cached_property
    def inplane_dofs(self) -> np.ndarray:
        """Dof indices of (u1, u2) at every node."""
        return np.sort((6 * np.arange(self.n_nodes)[:, None] + np.arange(2)).ravel())

    @cached_property
    def deflection_dofs(self) -> np.ndarray:
        """Dof indices of the four Hermite deflection unknowns at every node."""
        return np.sort((6 * np.arange(self.n_nodes)[:, None] + np.arange(2, 6)).ravel())


def build_slab_mesh(nx: int, ny: int, nz: int, thickness: float = 1.0) -> SlabMesh:
    """Build the slab mesh with its doubled interface sheet.

    Raises:
        ConfigError: If nx is odd or a count is not positive
    """
    _check_counts(nx, ny=ny, nz=nz)
    if thickness <= 0:
        raise ConfigError(f"thickness must be positive (got: {thickness})")
    mesh = SlabMesh(nx=nx, ny=ny, nz=nz, thickness=thickness)
    logger.debug(f"Slab mesh {nx}x{ny}x{nz}: {mesh.n_nodes} nodes, {mesh.n_cells} cells")
    return mesh


def build_plate_mesh(nx: int, ny: int, nz: int = 4) -> PlateMesh:
    """Build the plate mesh with doubled nodes along the contact line.

    Raises:
        ConfigError: If nx is odd or a count is not positive
    """
    _check_counts(nx, ny=ny, nz=nz)
    mesh = PlateMesh(nx=nx, ny=ny, nz=nz)
    logger.debug(f"Plate mesh {nx}x{ny}: {mesh.n_nodes} nodes, {mesh.n_cells} cells")
    return mesh
