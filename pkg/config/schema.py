"""Pydantic models of run and study configurations."""
from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from config.loader import settings
from model_energetics.loads import LoadData
from model_energetics.params import ModelParams
from tensor_algebra.tensor import SymTensor4, identity_tensor, make_decoupled, make_isotropic
from time_stepper.scheme import SchemeConfig


class MeshConfig(BaseModel):
    """Cell counts; nz is the through-thickness count (slab) or interface resolution (plate)."""
    model_config = ConfigDict(extra='forbid')

    nx: int = 8
    ny: int = 4
    nz: int = 4


class TensorConfig(BaseModel):
    """A material tensor given by constructor parameters or by its 6x6 Mandel matrix."""
    model_config = ConfigDict(extra='forbid')

    kind: Literal['isotropic', 'decoupled', 'identity', 'voigt'] = 'isotropic'
    lambda_lame: float = 0.0
    mu: float = 1.0
    lambda_plane: float = 0.0
    c33: float = 1.0
    mu_shear: float = 1.0
    voigt: Optional[List[List[float]]] = None
    scale: float = 1.0

    def build(self) -> SymTensor4:
        if self.kind == 'isotropic':
            tensor = make_isotropic(self.lambda_lame, self.mu)
        elif self.kind == 'decoupled':
            tensor = make_decoupled(self.lambda_plane, self.mu, self.c33, self.mu_shear)
        elif self.kind == 'identity':
            tensor = identity_tensor()
        else:
            if self.voigt is None:
                raise ValueError("kind 'voigt' needs a 6x6 'voigt' matrix")
            tensor = SymTensor4.from_mandel(np.asarray(self.voigt, dtype=float))
        return tensor if self.scale == 1.0 else tensor.scaled(self.scale)


class MaterialConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    elasticity: TensorConfig = Field(default_factory=TensorConfig)
    viscosity: Optional[TensorConfig] = None


class InitialConfig(BaseModel):
    """Initial adhesion; displacement and velocity start at rest."""
    model_config = ConfigDict(extra='forbid')

    z: float = Field(default=1.0, ge=0, le=1)
    z_pattern: Optional[List[List[float]]] = None


class CertificationConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    balance_rel_tol: float = Field(default=1e-3, gt=0)
    undamped_rel_tol: float = Field(default=1e-6, gt=0)
    semistability_rel_tol: float = Field(default=1e-9, gt=0)


class ParameterRule(BaseModel):
    """value(eps) = limit + coefficient * eps ** power."""
    model_config = ConfigDict(extra='forbid')

    limit: float
    coefficient: float = 0.0
    power: float = 1.0

    def value(self, eps: float) -> float:
        return self.limit + self.coefficient * eps ** self.power


class StudyConfig(BaseModel):
    """Parameter family of an asymptotic study."""
    model_config = ConfigDict(extra='forbid')

    nu_list: List[float] = Field(default_factory=lambda: [1e-1, 1e-2, 1e-3, 1e-4])
    include_undamped: bool = True
    eps_list: List[float] = Field(default_factory=lambda: [1.0, 0.5, 0.25, 0.125])
    delta: float = 1.0
    damping_rule: Literal['power', 'inverse'] = 'power'
    rho: Optional[ParameterRule] = None
    a0: Optional[ParameterRule] = None
    a1: Optional[ParameterRule] = None
    b: Optional[ParameterRule] = None
    nu: Optional[ParameterRule] = None

    def rule(self, name: str, fallback: float) -> ParameterRule:
        rule = getattr(self, name)
        return rule if rule is not None else ParameterRule(limit=fallback)


class RunConfig(BaseModel):
    """A complete run configuration."""
    model_config = ConfigDict(extra='forbid')

    name: str = 'run'
    seed: int = Field(default_factory=lambda: settings.default_seed)
    mesh: MeshConfig = Field(default_factory=MeshConfig)
    material: MaterialConfig = Field(default_factory=MaterialConfig)
    params: ModelParams
    loads: LoadData = Field(default_factory=LoadData)
    initial: InitialConfig = Field(default_factory=InitialConfig)
    scheme: SchemeConfig
    certification: CertificationConfig = Field(default_factory=CertificationConfig)
    study: Optional[StudyConfig] = None
