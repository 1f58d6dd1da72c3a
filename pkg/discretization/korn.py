"""Sampling check of the thin-plate Korn inequality."""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from discretization.assembly import assemble_gradient_gram, assemble_slab_form
from discretization.mesh import SlabMesh
from tensor_algebra.reduction import rescale_mandel_weights
from tensor_algebra.tensor import SymTensor4
from utils.logger import setup_logger

logger = setup_logger(__name__)


@dataclass(frozen=True)
class KornResult:
    min_ratio: float
    n_used: int
    n_skipped: int


def korn_check(
    mesh: SlabMesh,
    viscosity: SymTensor4,
    eps: float,
    n_samples: int,
    seed: int = 0,
    samples: Optional[np.ndarray] = None,
) -> KornResult:
    """Smallest observed ratio eps * int D e^eps(v):e^eps(v) / int |grad v3|^2.

    Args:
        mesh: Unit-thickness slab
        viscosity: Rescaled viscosity tensor D_eps
        eps: Thickness parameter
        n_samples: Number of random admissible fields (ignored when samples given)
        seed: Seed of the sample generator
        samples: Optional (n, ndofs) fields; Dirichlet entries are zeroed

    Returns:
        KornResult: Minimum ratio and how many samples were skipped
    """
    numerator_form = eps * assemble_slab_form(mesh, viscosity.mandel, rescale_mandel_weights(eps))
    denominator_form = assemble_gradient_gram(mesh, components=(2,))

    if samples is None:
        rng = np.random.default_rng(seed)
        samples = rng.standard_normal((n_samples, mesh.n_dofs))
    samples = np.array(samples, dtype=float, copy=True)
    samples[:, mesh.dirichlet_dofs] = 0.0

    ratios = []
    skipped = 0
    for v in samples:
        denominator = float(v @ (denominator_form @ v))
        if denominator <= 1e-14 * max(1.0, float(v @ v)):
            skipped += 1
            continue
        ratios.append(float(v @ (numerator_form @ v)) / denominator)

    if skipped:
        logger.debug(f"korn_check: skipped {skipped} samples with vanishing grad v3")
    min_ratio = min(ratios) if ratios else float('inf')
    return KornResult(min_ratio=min_ratio, n_used=len(ratios), n_skipped=skipped)
