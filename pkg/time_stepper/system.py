"""Free-dof view of one assembled model: matrices, interface terms and energies."""
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
import scipy.sparse as sp

from discretization.assembly import AssembledForms
from discretization.variant import ModelVariant
from model_energetics.functionals import bulk_energy, kinetic, surface_energy
from model_energetics.loads import LoadData, LoadOperator
from model_energetics.params import AdhesionField, ModelParams


@dataclass(frozen=True)
class EnergySnapshot:
    kinetic: float
    bulk: float
    surface: float

    @property
    def total(self) -> float:
        """Stored energy E = bulk + surface (kinetic excluded)."""
        return self.bulk + self.surface


@dataclass(eq=False)
class DiscreteSystem:
    """Everything a time step needs, restricted to free dofs."""
    forms: AssembledForms
    params: ModelParams
    loads: LoadOperator
    mass: sp.csr_matrix = field(init=False)
    damping: sp.csr_matrix = field(init=False)
    stiffness: sp.csr_matrix = field(init=False)
    jump: sp.csr_matrix = field(init=False)
    _cone_rows: sp.csr_matrix = field(init=False)

    def __post_init__(self):
        self.mass = self.forms.restrict(self.forms.mass)
        self.damping = self.forms.restrict(self.forms.damping)
        self.stiffness = self.forms.restrict(self.forms.stiffness)
        self.jump = self.forms.jump.tocsc()[:, self.forms.free_dofs].tocsr()
        # Row c of G J is (mask * n) . jump of cell c
        g = self.variant.cone_mask * self.params.normal
        n_cells = self.n_cells
        G = sp.kron(sp.identity(n_cells, format='csr'), sp.csr_matrix(g.reshape(1, 3)), format='csr')
        self._cone_rows = (G @ self.jump).tocsr()

    @classmethod
    def build(cls, forms: AssembledForms, params: ModelParams, loads: Optional[LoadOperator] = None) -> 'DiscreteSystem':
        if loads is None:
            loads = LoadOperator.build(forms, LoadData())
        return cls(forms=forms, params=params, loads=loads)

    # ------------------------------------------------------------------
    @property
    def variant(self) -> ModelVariant:
        return self.forms.variant

    @property
    def n_free(self) -> int:
        return len(self.forms.free_dofs)

    @property
    def n_cells(self) -> int:
        return self.forms.interface.n_cells

    @property
    def areas(self) -> np.ndarray:
        return self.forms.interface.areas

    @property
    def jump_weights(self) -> np.ndarray:
        return self.variant.jump_weights

    @property
    def is_damped(self) -> bool:
        return self.forms.is_damped

    def initial_z(self, value=1.0) -> AdhesionField:
        return AdhesionField.on_grid(self.forms.interface, value)

    def jumps(self, u: np.ndarray) -> np.ndarray:
        """(ncells, 3) jumps of a free-dof displacement."""
        return (self.jump @ u).reshape(-1, 3)

    # ------------------------------------------------------------------
    def adhesive_matrix(self, z: AdhesionField) -> sp.csr_matrix:
        """Hessian of (kappa/2) int z Q(jump): kappa J^T diag(area z q) J."""
        weights = np.outer(self.areas * z.flat, self.jump_weights).ravel()
        return (self.params.kappa * (self.jump.T @ sp.diags(weights) @ self.jump)).tocsr()

    def penalty(self, u: np.ndarray) -> Tuple[np.ndarray, sp.csr_matrix]:
        """Gradient and Hessian of nu int alpha_hat(mask * jump)."""
        if self.params.nu == 0.0:
            return np.zeros(self.n_free), sp.csr_matrix((self.n_free, self.n_free))
        s = self._cone_rows @ u
        active = s < 0.0
        scale = self.params.nu * 2.0 / self.params.lambda_yosida * self.areas
        force = self._cone_rows.T @ (scale * np.minimum(s, 0.0))
        hessian = self._cone_rows.T @ sp.diags(scale * active) @ self._cone_rows
        return force, hessian.tocsr()

    # ------------------------------------------------------------------
    def energies(self, t: float, u: np.ndarray, v: np.ndarray, z: AdhesionField) -> EnergySnapshot:
        return EnergySnapshot(
            kinetic=kinetic(v, self.mass),
            bulk=bulk_energy(self.stiffness, u, self.loads.load(t)),
            surface=self.surface_energy(u, z),
        )

    def surface_energy(self, u: np.ndarray, z: AdhesionField) -> float:
        return surface_energy(self.jumps(u), z, self.params, self.jump_weights, self.variant.cone_mask)

