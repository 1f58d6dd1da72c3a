"""Data models for storage layer."""
from typing import List, Optional

from pydantic import BaseModel, Field


class StateCheckpoint(BaseModel):
    """A system state written every checkpoint_every steps."""
    step: int
    t: float
    variant: str
    u: List[float]
    v: List[float]
    z: List[List[float]]
    viscous_dissipated: float
    rate_independent_dissipated: float
    load_work: float


class BalanceSummary(BaseModel):
    """Energy-dissipation balance of one trajectory."""
    one_sided: bool
    max_abs_residual: float
    max_residual: float
    energy_scale: float
    tolerance: float
    passed: bool


class AuditSummary(BaseModel):
    """Semistability audits of one trajectory."""
    n_audits: int
    min_margin: float
    energy_scale: float
    tolerance: float
    passed: bool


class CertificationSummary(BaseModel):
    """Written as summary.json next to trajectory.csv."""
    name: str
    variant: str
    eps: float
    n_steps: int
    dt: float
    damped: bool
    balance: BalanceSummary
    semistability: AuditSummary
    # audits of (u_{n+1}, z_{n+1}); diagnostic only, not part of passed
    post_step_semistability: Optional[AuditSummary] = None
    unidirectionality_violations: int = 0
    debonded_fraction: float = 0.0
    max_newton_iterations: int = 0
    passed: bool = False
    notes: List[str] = Field(default_factory=list)
    config_path: Optional[str] = None
