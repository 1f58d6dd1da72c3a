"""Reference elements: trilinear hexahedron, bilinear quad, Bogner-Fox-Schmit rectangle.

All shape functions are written on the unit cell [0,1]^d and mapped to
axis-aligned cells of edge lengths h; derivatives returned are physical.
"""
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

SQRT2 = np.sqrt(2.0)


@lru_cache(maxsize=None)
def gauss_01(n: int):
    """n-point Gauss-Legendre rule on [0, 1]."""
    x, w = leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def tensor_rule(n: int, dim: int):
    """Tensor-product Gauss rule on [0,1]^dim; points ordered with x fastest."""
    x, w = gauss_01(n)
    grids = np.meshgrid(*([x] * dim), indexing='ij')
    weights = np.meshgrid(*([w] * dim), indexing='ij')
    points = np.column_stack([g.transpose().ravel() for g in grids])
    return points, np.prod([g.transpose().ravel() for g in weights], axis=0)


# ============================================================================
# Trilinear hexahedron
# ============================================================================

def hex_shape(points: np.ndarray, h) -> tuple:
    """Trilinear shape values (nq, 8) and physical gradients (nq, 8, 3).

    Local node index a + 2b + 4c for corner offsets (a, b, c).
    """
    points = np.atleast_2d(points)
    nq = points.shape[0]
    values = np.empty((nq, 8))
    grads = np.empty((nq, 8, 3))
    for c in range(2):
        for b in range(2):
            for a in range(2):
                fx = points[:, 0] if a else 1.0 - points[:, 0]
                fy = points[:, 1] if b else 1.0 - points[:, 1]
                fz = points[:, 2] if c else 1.0 - points[:, 2]
                sx, sy, sz = (1.0 if a else -1.0), (1.0 if b else -1.0), (1.0 if c else -1.0)
                node = a + 2 * b + 4 * c
                values[:, node] = fx * fy * fz
                grads[:, node, 0] = sx * fy * fz / h[0]
                grads[:, node, 1] = fx * sy * fz / h[1]
                grads[:, node, 2] = fx * fy * sz / h[2]
    return values, grads


def hex_strain_matrix(grads: np.ndarray) -> np.ndarray:
    """Mandel strain-displacement matrices (nq, 6, 24) from hex gradients."""
    nq = grads.shape[0]
    B = np.zeros((nq, 6, 24))
    for a in range(8):
        g = grads[:, a, :]
        col = 3 * a
        B[:, 0, col + 0] = g[:, 0]
        B[:, 1, col + 1] = g[:, 1]
        B[:, 2, col + 2] = g[:, 2]
        # sqrt(2) * e23, sqrt(2) * e13, sqrt(2) * e12
        B[:, 3, col + 1] = g[:, 2] / SQRT2
        B[:, 3, col + 2] = g[:, 1] / SQRT2
        B[:, 4, col + 0] = g[:, 2] / SQRT2
        B[:, 4, col + 2] = g[:, 0] / SQRT2
        B[:, 5, col + 0] = g[:, 1] / SQRT2
        B[:, 5, col + 1] = g[:, 0] / SQRT2
    return B


def hex_element_matrix(mandel: np.ndarray, h, row_scales=None) -> np.ndarray:
    """24x24 element matrix of the form integral of (T Lambda e(u)) : (Lambda e(v)).

    Args:
        mandel: 6x6 Mandel matrix of the tensor
        h: Cell edge lengths
        row_scales: Optional Mandel row scales (rescaled strains)
    """
    points, weights = tensor_rule(2, 3)
    _, grads = hex_shape(points, h)
    B = hex_strain_matrix(grads)
    if row_scales is not None:
        B = B * np.asarray(row_scales)[None, :, None]
    volume = h[0] * h[1] * h[2]
    return volume * np.einsum('q,qai,ab,qbj->ij', weights, B, mandel, B)


def hex_mass_matrix(h, component_weights) -> np.ndarray:
    """24x24 mass matrix with a weight per displacement component."""
    points, weights = tensor_rule(2, 3)
    values, _ = hex_shape(points, h)
    scalar = h[0] * h[1] * h[2] * np.einsum('q,qa,qb->ab', weights, values, values)
    return np.kron(scalar, np.diag(component_weights))


def hex_gradient_gram(h, component: int) -> np.ndarray:
    """24x24 matrix of the integral of grad(u_c) . grad(v_c)."""
    points, weights = tensor_rule(2, 3)
    _, grads = hex_shape(points, h)
    scalar = h[0] * h[1] * h[2] * np.einsum('q,qai,qbi->ab', weights, grads, grads)
    selector = np.zeros((3, 3))
    selector[component, component] = 1.0
    return np.kron(scalar, selector)


# ============================================================================
# Bilinear quadrilateral (in-plane displacements)
# ============================================================================

def quad_shape(points: np.ndarray, h) -> tuple:
    """Bilinear shape values (nq, 4) and gradients (nq, 4, 2); local index a + 2b."""
    points = np.atleast_2d(points)
    nq = points.shape[0]
    values = np.empty((nq, 4))
    grads = np.empty((nq, 4, 2))
    for b in range(2):
        for a in range(2):
            fx = points[:, 0] if a else 1.0 - points[:, 0]
            fy = points[:, 1] if b else 1.0 - points[:, 1]
            values[:, a + 2 * b] = fx * fy
            grads[:, a + 2 * b, 0] = (1.0 if a else -1.0) * fy / h[0]
            grads[:, a + 2 * b, 1] = fx * (1.0 if b else -1.0) / h[1]
    return values, grads


def quad_strain_matrix(grads: np.ndarray) -> np.ndarray:
    """Planar Mandel strain matrices (nq, 3, 8) on [u1, u2] per node."""
    nq = grads.shape[0]
    B = np.zeros((nq, 3, 8))
    for a in range(4):
        g = grads[:, a, :]
        B[:, 0, 2 * a] = g[:, 0]
        B[:, 1, 2 * a + 1] = g[:, 1]
        B[:, 2, 2 * a] = g[:, 1] / SQRT2
        B[:, 2, 2 * a + 1] = g[:, 0] / SQRT2
    return B


# ============================================================================
# Bogner-Fox-Schmit bicubic Hermite rectangle (deflection)
# ============================================================================

def hermite_1d(s: np.ndarray, h: float, derivative: int = 0) -> np.ndarray:
    """Cubic Hermite basis on [0,1] scaled to an edge of length h.

    Columns: value at 0, slope at 0, value at 1, slope at 1. Derivatives are
    taken with respect to the physical coordinate.
    """
    s = np.asarray(s, dtype=float)
    if derivative == 0:
        basis = [1 - 3 * s**2 + 2 * s**3, h * (s - 2 * s**2 + s**3), 3 * s**2 - 2 * s**3, h * (-s**2 + s**3)]
    elif derivative == 1:
        basis = [(-6 * s + 6 * s**2) / h, 1 - 4 * s + 3 * s**2, (6 * s - 6 * s**2) / h, -2 * s + 3 * s**2]
    elif derivative == 2:
        basis = [(-6 + 12 * s) / h**2, (-4 + 6 * s) / h, (6 - 12 * s) / h**2, (-2 + 6 * s) / h]
    else:
        raise ValueError(f"Unsupported derivative order: {derivative}")
    return np.stack(basis, axis=-1)


def bfs_shape(points: np.ndarray, h, dx: int = 0, dy: int = 0) -> np.ndarray:
    """Derivative (dx, dy) of the 16 BFS functions at points, shape (nq, 16).

    Local ordering: corner a + 2b, then (w, w_x, w_y, w_xy) at that corner.
    """
    points = np.atleast_2d(points)
    hx_basis = hermite_1d(points[:, 0], h[0], dx)
    hy_basis = hermite_1d(points[:, 1], h[1], dy)
    out = np.empty((points.shape[0], 16))
    for b in range(2):
        for a in range(2):
            base = 4 * (a + 2 * b)
            value_x, slope_x = hx_basis[:, 2 * a], hx_basis[:, 2 * a + 1]
            value_y, slope_y = hy_basis[:, 2 * b], hy_basis[:, 2 * b + 1]
            out[:, base + 0] = value_x * value_y
            out[:, base + 1] = slope_x * value_y
            out[:, base + 2] = value_x * slope_y
            out[:, base + 3] = slope_x * slope_y
    return out


def bfs_curvature_matrix(points: np.ndarray, h) -> np.ndarray:
    """Planar Mandel Hessian (w_11, w_22, sqrt2 w_12) matrices, shape (nq, 3, 16)."""
    return np.stack([
        bfs_shape(points, h, 2, 0),
        bfs_shape(points, h, 0, 2),
        SQRT2 * bfs_shape(points, h, 1, 1),
    ], axis=1)


# Element dof layout of a plate cell: for each corner, [u1, u2, w, wx, wy, wxy]
PLATE_INPLANE_SLOTS = np.array([6 * a + c for a in range(4) for c in range(2)])
PLATE_DEFLECTION_SLOTS = np.array([6 * a + c for a in range(4) for c in range(2, 6)])


def plate_element_matrix(reduced_voigt: np.ndarray, h) -> np.ndarray:
    """24x24 membrane plus bending matrix for a reduced planar tensor.

    Membrane: integral over the cell of T_r e(u) : e(v); bending: the same
    with Hessians weighted by the through-thickness moment 1/12.
    """
    area = h[0] * h[1]
    points2, weights2 = tensor_rule(2, 2)
    _, grads = quad_shape(points2, h)
    Bm = quad_strain_matrix(grads)
    membrane = area * np.einsum('q,qai,ab,qbj->ij', weights2, Bm, reduced_voigt, Bm)

    points4, weights4 = tensor_rule(4, 2)
    Bb = bfs_curvature_matrix(points4, h)
    bending = area / 12.0 * np.einsum('q,qai,ab,qbj->ij', weights4, Bb, reduced_voigt, Bb)

    out = np.zeros((24, 24))
    out[np.ix_(PLATE_INPLANE_SLOTS, PLATE_INPLANE_SLOTS)] = membrane
    out[np.ix_(PLATE_DEFLECTION_SLOTS, PLATE_DEFLECTION_SLOTS)] = bending
    return out


def plate_mass_matrix(h, inplane_weight: float, deflection_weight: float) -> np.ndarray:
    """24x24 mass matrix: bilinear on (u1, u2), Hermite on w, unit thickness."""
    area = h[0] * h[1]
    out = np.zeros((24, 24))
    if inplane_weight:
        points2, weights2 = tensor_rule(2, 2)
        values, _ = quad_shape(points2, h)
        scalar = area * np.einsum('q,qa,qb->ab', weights2, values, values)
        out[np.ix_(PLATE_INPLANE_SLOTS, PLATE_INPLANE_SLOTS)] = inplane_weight * np.kron(scalar, np.eye(2))
    if deflection_weight:
        points4, weights4 = tensor_rule(4, 2)
        values = bfs_shape(points4, h)
        out[np.ix_(PLATE_DEFLECTION_SLOTS, PLATE_DEFLECTION_SLOTS)] = (
            deflection_weight * area * np.einsum('q,qa,qb->ab', weights4, values, values))
    return out
