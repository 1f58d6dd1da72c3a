"""Semistable update of the adhesion field."""
import maxflow
import numpy as np

from model_energetics.functionals import adhesive_density
from model_energetics.params import AdhesionField, ModelParams
from utils.exceptions import ConstraintError, GridMismatchError
from utils.logger import setup_logger

logger = setup_logger(__name__)

# Neighbor stencils for add_grid_edges on the (ny, nz) interface grid
EDGE_ALONG_X2 = np.array([[0, 0, 0], [0, 0, 0], [0, 1, 0]])
EDGE_ALONG_X3 = np.array([[0, 0, 0], [0, 0, 1], [0, 0, 0]])


def debonding_gain(z_prev: AdhesionField, jumps: np.ndarray, params: ModelParams,
                   jump_weights=(1.0, 1.0, 1.0)) -> np.ndarray:
    """Per-cell coefficient of z in the update objective: area ((kappa/2) Q - a0 - a1).

    Positive values make debonding profitable.
    """
    jumps = np.asarray(jumps, dtype=float).reshape(-1, 3)
    if jumps.shape[0] != z_prev.flat.size:
        raise GridMismatchError(f"{jumps.shape[0]} jumps for {z_prev.flat.size} interface cells")
    drive = 0.5 * params.kappa * adhesive_density(jumps, jump_weights)
    return (z_prev.flat_areas * (drive - params.a0 - params.a1)).reshape(z_prev.grid_dims)


def _binary_update(z_prev: AdhesionField, gain: np.ndarray, params: ModelParams) -> np.ndarray:
    """Exact minimizer over 0/1 labels below z_prev via one max-flow.

    Label 1 (bonded) is the source segment. A bonded cell pays its gain,
    neighbors with different labels pay b times the shared edge length.
    """
    bonded = z_prev.values == 1.0
    pairwise_total = params.b * (z_prev.hz * gain.size + z_prev.hy * gain.size) * 2.0
    pinned_cap = float(np.abs(gain).sum() + pairwise_total + 1.0)

    source_caps = np.where(bonded, np.maximum(-gain, 0.0), 0.0)
    sink_caps = np.where(bonded, np.maximum(gain, 0.0), pinned_cap)

    graph = maxflow.Graph[float]()
    node_ids = graph.add_grid_nodes(gain.shape)
    graph.add_grid_edges(node_ids, weights=params.b * z_prev.hz, structure=EDGE_ALONG_X2, symmetric=True)
    graph.add_grid_edges(node_ids, weights=params.b * z_prev.hy, structure=EDGE_ALONG_X3, symmetric=True)
    graph.add_grid_tedges(node_ids, source_caps, sink_caps)
    graph.maxflow()
    in_sink = graph.get_grid_segments(node_ids)
    return np.where(bonded & ~in_sink, 1.0, 0.0)


def semistable_update_z(z_prev: AdhesionField, jumps: np.ndarray, params: ModelParams,
                        jump_weights=(1.0, 1.0, 1.0)) -> AdhesionField:
    """Minimize (kappa/2) int z Q - a0 int z + b P(z) + a1 int (z_prev - z) over z <= z_prev.

    Without perimeter (b = 0) the objective is cellwise affine: a cell
    debonds completely when (kappa/2) Q > a0 + a1 and keeps z_prev
    otherwise, ties included. With b > 0 the binary problem is solved
    exactly by a minimum cut on the interface grid.

    Args:
        z_prev: Current adhesion field
        jumps: (ncells, 3) jumps at cell midpoints
        params: Model parameters
        jump_weights: Component weights of Q

    Returns:
        AdhesionField: Updated adhesion field

    Raises:
        ConstraintError: If z_prev is inadmissible (fractional while b > 0)
    """
    z_prev.check_admissible(binary=params.binary)
    gain = debonding_gain(z_prev, jumps, params, jump_weights)

    if params.binary:
        values = _binary_update(z_prev, gain, params)
    else:
        values = np.where(gain > 0.0, 0.0, z_prev.values)

    debonded = int(np.count_nonzero(values < z_prev.values))
    if debonded:
        logger.debug(f"Adhesion update: {debonded} cells debonded")
    return z_prev.with_values(values)


def project_initial_z(u0_jumps: np.ndarray, z_candidate: AdhesionField, params: ModelParams,
                      jump_weights=(1.0, 1.0, 1.0)) -> AdhesionField:
    """Make a candidate initial adhesion field semistable at the initial jumps."""
    try:
        return semistable_update_z(z_candidate, u0_jumps, params, jump_weights)
    except ConstraintError:
        logger.warning("Initial adhesion field is inadmissible")
        raise
