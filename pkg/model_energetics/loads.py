"""External loads: volume force, Dirichlet lift and the load functional F(t)."""
from dataclasses import dataclass
from typing import List, Literal, Optional

import numpy as np
from numpy.polynomial import Polynomial
from pydantic import BaseModel, ConfigDict, Field

from discretization.assembly import AssembledForms
from discretization.mesh import PlateMesh, SlabMesh
from utils.exceptions import ConfigError
from utils.logger import setup_logger

logger = setup_logger(__name__)


class LoadProfile(BaseModel):
    """Scalar time amplitude with exact derivatives.

    polynomial: sum of coefficients[k] t^k
    sine: amplitude sin(omega t + phase)
    """
    model_config = ConfigDict(extra='forbid')

    kind: Literal['polynomial', 'sine'] = 'polynomial'
    coefficients: List[float] = Field(default_factory=lambda: [0.0])
    amplitude: float = 0.0
    omega: float = 1.0
    phase: float = 0.0

    def value(self, t: float, derivative: int = 0) -> float:
        if self.kind == 'polynomial':
            poly = Polynomial(self.coefficients)
            return float(poly.deriv(derivative)(t)) if derivative else float(poly(t))
        return float(self.amplitude * self.omega ** derivative
                     * np.sin(self.omega * t + self.phase + 0.5 * np.pi * derivative))

    @property
    def is_zero(self) -> bool:
        if self.kind == 'polynomial':
            return not any(self.coefficients)
        return self.amplitude == 0.0


class DirichletField(BaseModel):
    """Spatial shape of the Dirichlet lift.

    affine: w(x) = matrix x + offset on the slab.
    kl: in-plane affine field plus a quadratic deflection q(x1, x2), lifted
    as (ubar - x3 grad q, q); usable on both slab and plate.
    """
    model_config = ConfigDict(extra='forbid')

    kind: Literal['affine', 'kl'] = 'kl'
    matrix: List[List[float]] = Field(default_factory=lambda: [[0.0] * 3 for _ in range(3)])
    offset: List[float] = Field(default_factory=lambda: [0.0, 0.0, 0.0])
    inplane_matrix: List[List[float]] = Field(default_factory=lambda: [[0.0, 0.0], [0.0, 0.0]])
    inplane_offset: List[float] = Field(default_factory=lambda: [0.0, 0.0])
    # q = c + c1 x1 + c2 x2 + c11 x1^2 + c12 x1 x2 + c22 x2^2
    deflection: List[float] = Field(default_factory=lambda: [0.0] * 6)

    def _deflection_parts(self, x1, x2):
        c, c1, c2, c11, c12, c22 = self.deflection
        q = c + c1 * x1 + c2 * x2 + c11 * x1 ** 2 + c12 * x1 * x2 + c22 * x2 ** 2
        q1 = c1 + 2 * c11 * x1 + c12 * x2
        q2 = c2 + c12 * x1 + 2 * c22 * x2
        q12 = c12 * np.ones_like(x1)
        return q, q1, q2, q12

    def slab_values(self, coordinates: np.ndarray) -> np.ndarray:
        """Nodal values (nnodes, 3) at slab coordinates."""
        if self.kind == 'affine':
            return coordinates @ np.asarray(self.matrix, dtype=float).T + np.asarray(self.offset, dtype=float)
        x1, x2, x3 = coordinates.T
        ubar = coordinates[:, :2] @ np.asarray(self.inplane_matrix, dtype=float).T + np.asarray(self.inplane_offset)
        q, q1, q2, _ = self._deflection_parts(x1, x2)
        return np.column_stack([ubar[:, 0] - x3 * q1, ubar[:, 1] - x3 * q2, q])

    def plate_values(self, coordinates: np.ndarray) -> np.ndarray:
        """Nodal plate dofs (nnodes, 6) at plate coordinates.

        Raises:
            ConfigError: If the field is not of Kirchhoff-Love type
        """
        if self.kind != 'kl':
            raise ConfigError("Plate models need a Dirichlet field of kind 'kl'")
        x1, x2 = coordinates.T
        ubar = coordinates @ np.asarray(self.inplane_matrix, dtype=float).T + np.asarray(self.inplane_offset)
        q, q1, q2, q12 = self._deflection_parts(x1, x2)
        return np.column_stack([ubar[:, 0], ubar[:, 1], q, q1, q2, q12])

    def is_kirchhoff_love(self) -> bool:
        if self.kind == 'kl':
            return True
        g = np.asarray(self.matrix, dtype=float)
        return bool(abs(g[0, 2] + g[2, 0]) < 1e-14 and abs(g[1, 2] + g[2, 1]) < 1e-14 and abs(g[2, 2]) < 1e-14)


class LoadData(BaseModel):
    """Volume force f(t) = force_profile(t) * force and lift w(t) = dirichlet_profile(t) * dirichlet."""
    model_config = ConfigDict(extra='forbid')

    force: List[float] = Field(default_factory=lambda: [0.0, 0.0, 0.0])
    force_profile: LoadProfile = Field(default_factory=LoadProfile)
    dirichlet: DirichletField = Field(default_factory=DirichletField)
    dirichlet_profile: LoadProfile = Field(default_factory=LoadProfile)

    @property
    def is_static(self) -> bool:
        """True when every time derivative of the loads vanishes identically."""
        force_static = self.force_profile.kind == 'polynomial' and len(self.force_profile.coefficients) <= 1
        lift_static = self.dirichlet_profile.kind == 'polynomial' and len(self.dirichlet_profile.coefficients) <= 1
        return (force_static or not any(self.force)) and lift_static


@dataclass(eq=False)
class LoadOperator:
    """F(t) and F'(t) on the free dofs of one assembled model.

    F = a_f M1 f - a_w K W - a_w' C W - a_w'' M W, restricted to free rows,
    where W is the nodal lift and a_f, a_w are the time profiles.
    """
    forms: AssembledForms
    data: LoadData
    force_vector: np.ndarray
    lift_stiffness: np.ndarray
    lift_damping: np.ndarray
    lift_mass: np.ndarray
    lift: np.ndarray

    @classmethod
    def build(cls, forms: AssembledForms, data: LoadData) -> 'LoadOperator':
        mesh = forms.mesh
        force = np.asarray(data.force, dtype=float)
        if isinstance(mesh, SlabMesh):
            nodal_force = np.tile(force, mesh.n_nodes)
            lift = data.dirichlet.slab_values(mesh.coordinates).ravel()
        elif isinstance(mesh, PlateMesh):
            nodal_force = np.zeros(mesh.n_dofs)
            nodal_force[0::6], nodal_force[1::6], nodal_force[2::6] = force
            lift = data.dirichlet.plate_values(mesh.coordinates).ravel()
        else:
            raise ConfigError(f"Unsupported mesh type: {type(mesh).__name__}")
        return cls(
            forms=forms,
            data=data,
            force_vector=forms.free_rows(forms.unit_mass) @ nodal_force,
            lift_stiffness=forms.free_rows(forms.stiffness) @ lift,
            lift_damping=forms.free_rows(forms.damping) @ lift,
            lift_mass=forms.free_rows(forms.mass) @ lift,
            lift=lift,
        )

    def _combine(self, t: float, order: int) -> np.ndarray:
        f, w = self.data.force_profile, self.data.dirichlet_profile
        return (f.value(t, order) * self.force_vector
                - w.value(t, order) * self.lift_stiffness
                - w.value(t, order + 1) * self.lift_damping
                - w.value(t, order + 2) * self.lift_mass)

    def load(self, t: float) -> np.ndarray:
        """F(t) on free dofs."""
        return self._combine(t, 0)

    def rate(self, t: float) -> np.ndarray:
        """F'(t) on free dofs."""
        return self._combine(t, 1)

    def power(self, t: float, u_free: np.ndarray) -> float:
        """Partial time derivative of the energy at (t, u): -F'(t) . u."""
        return -float(self.rate(t) @ u_free)

    def lift_at(self, t: float) -> np.ndarray:
        """Full Dirichlet lift w(t) on all dofs."""
        return self.data.dirichlet_profile.value(t) * self.lift

    def without_damping(self) -> 'LoadOperator':
        return LoadOperator.build(self.forms.without_damping(), self.data)
