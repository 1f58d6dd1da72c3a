"""Model variants: which energies the discrete system carries."""
from dataclasses import dataclass
from typing import Literal

import numpy as np

from utils.exceptions import DomainError

VariantKind = Literal['physical3D', 'rescaled3D', 'limit_undamped', 'limit_damped']
VARIANT_KINDS = ('physical3D', 'rescaled3D', 'limit_undamped', 'limit_damped')


@dataclass(frozen=True)
class ModelVariant:
    """A model variant and its thickness parameter.

    physical3D lives on the thin slab of thickness eps with the anisotropic
    jump weights (1, 1, eps^2); rescaled3D lives on the unit-thickness slab
    with rescaled strains; the two limit variants live on the plate.
    """
    kind: VariantKind
    eps: float = 1.0

    def __post_init__(self):
        if self.kind not in VARIANT_KINDS:
            raise DomainError(f"Unknown model variant: {self.kind}. Must be one of: {list(VARIANT_KINDS)}")
        if self.eps <= 0:
            raise DomainError(f"eps must be positive (got: {self.eps})")

    @property
    def is_limit(self) -> bool:
        return self.kind in ('limit_undamped', 'limit_damped')

    @property
    def is_damped_limit(self) -> bool:
        return self.kind == 'limit_damped'

    @property
    def thickness(self) -> float:
        return self.eps if self.kind == 'physical3D' else 1.0

    @property
    def damping_weight(self) -> float:
        """Factor in front of the viscous form."""
        return self.eps if self.kind == 'rescaled3D' else 1.0

    def mass_weights(self, rho: float) -> np.ndarray:
        """Density weight per displacement component."""
        if self.kind == 'rescaled3D':
            return rho * np.array([self.eps ** 2, self.eps ** 2, 1.0])
        return rho * np.ones(3)

    @property
    def jump_weights(self) -> np.ndarray:
        """Weights of the squared jump components in the adhesive energy."""
        if self.kind == 'physical3D':
            return np.array([1.0, 1.0, self.eps ** 2])
        return np.ones(3)

    @property
    def cone_mask(self) -> np.ndarray:
        """Jump components entering the cone penalty."""
        if self.kind == 'physical3D':
            return np.ones(3)
        return np.array([1.0, 1.0, 0.0])

    def label(self) -> str:
        return self.kind if self.is_limit else f"{self.kind}(eps={self.eps:g})"
