"""Staggered time stepping: adhesion update, then momentum balance."""
from dataclasses import dataclass, field, replace
from typing import Callable, List, Literal, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy.sparse.linalg import splu

from discretization.variant import ModelVariant
from model_energetics.params import AdhesionField
from time_stepper.interface import project_initial_z, semistable_update_z
from time_stepper.system import DiscreteSystem, EnergySnapshot
from utils.exceptions import NonConvergenceError, SingularSystemError
from utils.logger import setup_logger

logger = setup_logger(__name__)


class SchemeConfig(BaseModel):
    """Time discretization and solver settings."""
    model_config = ConfigDict(extra='forbid')

    dt: float = Field(gt=0)
    t_final: float = Field(default=1.0, gt=0)
    variant: Literal['physical3D', 'rescaled3D', 'limit_undamped', 'limit_damped'] = 'rescaled3D'
    eps: float = Field(default=1.0, gt=0)
    newmark_beta: float = 0.25
    newmark_gamma: float = 0.5
    solver_tol: float = Field(default=1e-10, gt=0, lt=1)
    max_newton_iterations: int = Field(default=50, ge=1)
    competitor_count: int = Field(default=100, ge=0)
    audit_samples: int = Field(default=10, ge=0)
    checkpoint_every: int = Field(default=0, ge=0)

    @field_validator('newmark_beta')
    @classmethod
    def _beta(cls, value):
        if value != 0.25:
            raise ValueError("only the average-acceleration scheme (beta = 1/4) is supported")
        return value

    @field_validator('newmark_gamma')
    @classmethod
    def _gamma(cls, value):
        if value != 0.5:
            raise ValueError("only the average-acceleration scheme (gamma = 1/2) is supported")
        return value

    @property
    def model_variant(self) -> ModelVariant:
        return ModelVariant(self.variant, self.eps)

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))


@dataclass(frozen=True, eq=False)
class SystemState:
    """Displacement, velocity and adhesion at time t, with cumulative tallies.

    u and v are the homogeneous (Dirichlet-free) parts on free dofs; the
    full displacement adds the lift w(t).
    """
    t: float
    u: np.ndarray
    v: np.ndarray
    z: AdhesionField
    viscous_dissipated: float = 0.0
    rate_independent_dissipated: float = 0.0
    load_work: float = 0.0
    energy: Optional[EnergySnapshot] = None
    newton_iterations: int = 0


@dataclass(eq=False)
class Trajectory:
    """States of one run plus the system that produced them."""
    system: DiscreteSystem
    states: List[SystemState] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.states)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    def update_pairs(self) -> List[SystemState]:
        """States (t_n, u_n, z_{n+1}) seen by each adhesion update."""
        return [replace(prev, z=nxt.z) for prev, nxt in zip(self.states[:-1], self.states[1:])]


# ============================================================================
# Momentum balance
# ============================================================================

def _solve(matrix: sp.spmatrix, rhs: np.ndarray) -> np.ndarray:
    try:
        return splu(matrix.tocsc()).solve(rhs)
    except RuntimeError as e:
        raise SingularSystemError(f"Momentum system is singular: {e}")


def momentum_step(
    state: SystemState,
    dt: float,
    system: DiscreteSystem,
    z: AdhesionField,
    solver_tol: float = 1e-10,
    max_iterations: int = 50,
) -> Tuple[np.ndarray, np.ndarray, int]:
    """Average-acceleration Newmark step written for the midpoint displacement.

    With u_mid = (u_n + u_{n+1}) / 2 the step solves
    M (v_{n+1} - v_n)/dt + C (u_{n+1} - u_n)/dt + (K + K_z) u_mid + N(u_mid)
    = (F(t_n) + F(t_{n+1})) / 2, where N is the cone penalty, by Newton.

    Returns:
        tuple: (u_new, v_new, Newton iterations)

    Raises:
        NonConvergenceError: If Newton exceeds max_iterations
    """
    M, C = system.mass, system.damping
    u_n, v_n = state.u, state.v
    linear = (4.0 / dt ** 2) * M + (2.0 / dt) * C + system.stiffness + system.adhesive_matrix(z)
    load = 0.5 * (system.loads.load(state.t) + system.loads.load(state.t + dt))
    rhs = load + M @ (4.0 * u_n / dt ** 2 + 2.0 * v_n / dt) + C @ (2.0 * u_n / dt)

    if system.params.nu == 0.0:
        u_mid = _solve(linear, rhs)
        iterations = 1
    else:
        u_mid = u_n + 0.5 * dt * v_n
        iterations = 0
        while True:
            force, hessian = system.penalty(u_mid)
            residual = linear @ u_mid + force - rhs
            scale = max(np.linalg.norm(rhs), np.linalg.norm(linear @ u_mid), np.finfo(float).tiny)
            residual_norm = np.linalg.norm(residual)
            if residual_norm <= solver_tol * scale:
                break
            if iterations >= max_iterations:
                raise NonConvergenceError(
                    f"Newton did not converge in {max_iterations} iterations "
                    f"(relative residual {residual_norm / scale:.3e})",
                    residual=residual_norm / scale, iterations=iterations)
            u_mid = u_mid - _solve(linear + hessian, residual)
            iterations += 1

    u_new = 2.0 * u_mid - u_n
    v_new = 4.0 * (u_mid - u_n) / dt - v_n
    return u_new, v_new, iterations


# ============================================================================
# Staggered step
# ============================================================================

def initial_state(system: DiscreteSystem, z_candidate: AdhesionField, u0: Optional[np.ndarray] = None,
                  v0: Optional[np.ndarray] = None, t0: float = 0.0) -> SystemState:
    """State at t0 with z projected onto the semistable set."""
    u0 = np.zeros(system.n_free) if u0 is None else np.asarray(u0, dtype=float)
    v0 = np.zeros(system.n_free) if v0 is None else np.asarray(v0, dtype=float)
    z0 = project_initial_z(system.jumps(u0), z_candidate, system.params, system.jump_weights)
    return SystemState(t=t0, u=u0, v=v0, z=z0, energy=system.energies(t0, u0, v0, z0))


def step(state: SystemState, dt: float, system: DiscreteSystem, solver_tol: float = 1e-10,
         max_iterations: int = 50) -> SystemState:
    """Advance one step: adhesion update at u_n, momentum solve, tallies.

    The viscous tally adds dt * v_mid^T C v_mid; the load work adds
    -(F(t_{n+1}) - F(t_n)) . u_mid, the midpoint rule in u with the exact
    load increment.
    """
    z_new = semistable_update_z(state.z, system.jumps(state.u), system.params, system.jump_weights)
    u_new, v_new, iterations = momentum_step(state, dt, system, z_new, solver_tol, max_iterations)

    u_mid = 0.5 * (state.u + u_new)
    v_mid = (u_new - state.u) / dt
    t_new = state.t + dt
    viscous = dt * float(v_mid @ (system.damping @ v_mid))
    dissipated = system.params.a1 * float(np.sum(state.z.cell_areas * (state.z.values - z_new.values)))
    work = -float((system.loads.load(t_new) - system.loads.load(state.t)) @ u_mid)

    return SystemState(
        t=t_new,
        u=u_new,
        v=v_new,
        z=z_new,
        viscous_dissipated=state.viscous_dissipated + viscous,
        rate_independent_dissipated=state.rate_independent_dissipated + dissipated,
        load_work=state.load_work + work,
        energy=system.energies(t_new, u_new, v_new, z_new),
        newton_iterations=iterations,
    )


def run_scheme(
    system: DiscreteSystem,
    state: SystemState,
    config: SchemeConfig,
    on_step: Optional[Callable[[int, SystemState], None]] = None,
) -> Trajectory:
    """Integrate from state over config.n_steps steps."""
    trajectory = Trajectory(system=system, states=[state])
    if on_step is not None:
        on_step(0, state)
    for n in range(1, config.n_steps + 1):
        state = step(state, config.dt, system, config.solver_tol, config.max_newton_iterations)
        trajectory.states.append(state)
        if on_step is not None:
            on_step(n, state)
    logger.debug(f"Integrated {config.n_steps} steps of {system.variant.label()}")
    return trajectory
