"""Debug exports of meshes and matrices."""
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np
import scipy.sparse as sp

from discretization.mesh import PlateMesh, SlabMesh
from utils.exceptions import StorageError


def mesh_to_json(mesh: Union[SlabMesh, PlateMesh]) -> Dict[str, Any]:
    """Mesh geometry and dof maps as a JSON-ready dict."""
    kind = 'slab' if isinstance(mesh, SlabMesh) else 'plate'
    payload = {
        'kind': kind,
        'nx': mesh.nx,
        'ny': mesh.ny,
        'nz': mesh.nz,
        'dofs_per_node': mesh.dofs_per_node,
        'coordinates': mesh.coordinates.tolist(),
        'cells': mesh.cells.tolist(),
        'minus_nodes': mesh.minus_nodes.tolist(),
        'plus_nodes': mesh.plus_nodes.tolist(),
        'dirichlet_dofs': mesh.dirichlet_dofs.tolist(),
    }
    if kind == 'slab':
        payload['thickness'] = mesh.thickness
    return payload


def write_coo(matrix: sp.spmatrix, path: Union[str, Path]) -> None:
    """Write a matrix as 'i j value' lines.

    Raises:
        StorageError: If the file cannot be written
    """
    coo = matrix.tocoo()
    table = np.column_stack([coo.row, coo.col, coo.data])
    try:
        np.savetxt(path, table, fmt=['%d', '%d', '%.17g'], header=f"{matrix.shape[0]} {matrix.shape[1]}")
    except OSError as e:
        raise StorageError(f"Failed to write {path}: {e}")
