"""Material parameters and the adhesion field."""
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from discretization.mesh import InterfaceGrid
from utils.exceptions import ConstraintError, GridMismatchError


class ModelParams(BaseModel):
    """Scalar parameters of the adhesive-contact model."""
    model_config = ConfigDict(frozen=True, extra='forbid')

    kappa: float = Field(gt=0, description="adhesive stiffness")
    lambda_yosida: float = Field(gt=0, description="Yosida penalty parameter")
    a0: float = Field(gt=0, description="adhesion energy per unit area")
    a1: float = Field(gt=0, description="debonding dissipation per unit area")
    b: float = Field(default=0.0, ge=0, description="perimeter coefficient")
    nu: float = Field(default=0.0, ge=0, description="cone-penalty weight")
    rho: float = Field(default=1.0, gt=0, description="mass density")
    n_interface: Tuple[float, float, float] = (1.0, 0.0, 0.0)

    @field_validator('n_interface')
    @classmethod
    def _unit_normal(cls, value):
        if abs(np.linalg.norm(value) - 1.0) > 1e-12:
            raise ValueError(f"n_interface must be a unit vector (norm {np.linalg.norm(value):.6g})")
        return value

    @property
    def normal(self) -> np.ndarray:
        return np.asarray(self.n_interface, dtype=float)

    @property
    def binary(self) -> bool:
        """Perimeter regularization forces z into {0, 1}."""
        return self.b > 0


@dataclass(frozen=True, eq=False)
class AdhesionField:
    """Cellwise constant adhesion z on the interface grid.

    Attributes:
        values: (ny, nz) array in [0, 1]
        cell_areas: (ny, nz) array
        hy: Cell edge along x2
        hz: Cell edge along x3
    """
    values: np.ndarray
    cell_areas: np.ndarray
    hy: float
    hz: float

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        areas = np.array(self.cell_areas, dtype=float)
        if values.ndim != 2 or values.shape != areas.shape:
            raise GridMismatchError(f"values {values.shape} and cell_areas {areas.shape} must be equal 2D shapes")
        values.setflags(write=False)
        areas.setflags(write=False)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'cell_areas', areas)

    @classmethod
    def on_grid(cls, grid: InterfaceGrid, value=1.0) -> 'AdhesionField':
        """Field on an interface grid; value is a scalar or an (ny, nz) array."""
        values = np.broadcast_to(np.asarray(value, dtype=float), grid.shape)
        return cls(values=values, cell_areas=grid.areas.reshape(grid.shape), hy=grid.hy, hz=grid.hz)

    @property
    def grid_dims(self) -> Tuple[int, int]:
        return self.values.shape

    @property
    def flat(self) -> np.ndarray:
        """Values ordered like the interface cells (x3 index fastest)."""
        return self.values.ravel()

    @property
    def flat_areas(self) -> np.ndarray:
        return self.cell_areas.ravel()

    def with_values(self, values) -> 'AdhesionField':
        return AdhesionField(values=np.reshape(values, self.grid_dims), cell_areas=self.cell_areas,
                             hy=self.hy, hz=self.hz)

    def same_grid(self, other: 'AdhesionField') -> bool:
        return self.grid_dims == other.grid_dims and np.allclose(self.cell_areas, other.cell_areas)

    def is_binary(self) -> bool:
        return bool(np.all((self.values == 0.0) | (self.values == 1.0)))

    def check_admissible(self, binary: bool = False) -> None:
        """Raise ConstraintError unless z lies in [0, 1] (in {0, 1} when binary)."""
        if np.any(self.values < 0.0) or np.any(self.values > 1.0) or not np.all(np.isfinite(self.values)):
            raise ConstraintError("Adhesion values must lie in [0, 1]")
        if binary and not self.is_binary():
            raise ConstraintError("Adhesion values must be 0 or 1 when the perimeter term is active")

    def total(self) -> float:
        """Integral of z over the interface."""
        return float(np.sum(self.values * self.cell_areas))
