"""Scaling diagnostics, trajectory distances and momentum-balance residuals."""
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from discretization.assembly import assemble_slab_form, assemble_slab_mass
from discretization.kl import KLProjector
from discretization.mesh import SlabMesh
from model_energetics.params import AdhesionField
from tensor_algebra.reduction import rescale_mandel_weights
from time_stepper.scheme import SystemState, Trajectory
from time_stepper.system import DiscreteSystem
from utils.exceptions import GridMismatchError
from utils.logger import setup_logger

logger = setup_logger(__name__)

DIAGNOSTIC_COLUMNS = ['d33_over_eps2', 'shear13_over_eps', 'shear23_over_eps',
                      'eps_velocity1', 'eps_velocity2', 'velocity3', 'rescaled_strain', 'viscous']


@dataclass(frozen=True)
class ScalingDiagnostics:
    """Sup-in-time L2 norms bounded uniformly in eps for rescaled solutions."""
    eps: float
    d33_over_eps2: float
    shear13_over_eps: float
    shear23_over_eps: float
    eps_velocity1: float
    eps_velocity2: float
    velocity3: float
    rescaled_strain: float
    viscous: float

    def values(self) -> List[float]:
        data = asdict(self)
        return [data[c] for c in DIAGNOSTIC_COLUMNS]


def _selector(slot: int, weight: float = 1.0) -> np.ndarray:
    mandel = np.zeros((6, 6))
    mandel[slot, slot] = weight
    return mandel


def diagnostic_forms(mesh: SlabMesh, eps: float) -> Dict[str, sp.csr_matrix]:
    """Quadratic forms whose square roots are the diagnostic norms.

    Mandel slot 2 carries e33, slots 3 and 4 carry sqrt(2) e23 and sqrt(2) e13;
    with the rescaling row weights the forms measure |d3 u3|^2 / eps^4 and
    |d1 u3 + d3 u1|^2 / eps^2 (weight 2 turns 2 e13^2 into (2 e13)^2).
    """
    scales = rescale_mandel_weights(eps)
    return {
        'd33': assemble_slab_form(mesh, _selector(2), scales),
        'shear13': assemble_slab_form(mesh, _selector(4, 2.0), scales),
        'shear23': assemble_slab_form(mesh, _selector(3, 2.0), scales),
        'strain': assemble_slab_form(mesh, np.eye(6), scales),
        'v1': assemble_slab_mass(mesh, [1.0, 0.0, 0.0]),
        'v2': assemble_slab_mass(mesh, [0.0, 1.0, 0.0]),
        'v3': assemble_slab_mass(mesh, [0.0, 0.0, 1.0]),
    }


def full_fields(system: DiscreteSystem, state: SystemState) -> Tuple[np.ndarray, np.ndarray]:
    """Displacement and velocity on all dofs, Dirichlet lift included."""
    forms, loads = system.forms, system.loads
    profile = loads.data.dirichlet_profile
    u = forms.expand(state.u) + profile.value(state.t) * loads.lift
    v = forms.expand(state.v) + profile.value(state.t, 1) * loads.lift
    return u, v


def _norm(form: sp.spmatrix, x: np.ndarray) -> float:
    return float(np.sqrt(max(x @ (form @ x), 0.0)))


def scaling_diagnostics(trajectory: Trajectory, eps: float) -> ScalingDiagnostics:
    """A priori diagnostics of a rescaled-slab trajectory.

    Raises:
        GridMismatchError: If the trajectory does not live on a slab
    """
    mesh = trajectory.system.forms.mesh
    if not isinstance(mesh, SlabMesh):
        raise GridMismatchError("Scaling diagnostics need a slab trajectory")
    forms = diagnostic_forms(mesh, eps)
    peak = dict.fromkeys(['d33', 'shear13', 'shear23', 'strain', 'v1', 'v2', 'v3'], 0.0)
    for state in trajectory.states:
        u, v = full_fields(trajectory.system, state)
        for key in ('d33', 'shear13', 'shear23', 'strain'):
            peak[key] = max(peak[key], _norm(forms[key], u))
        for key in ('v1', 'v2', 'v3'):
            peak[key] = max(peak[key], _norm(forms[key], v))
    return ScalingDiagnostics(
        eps=eps,
        d33_over_eps2=peak['d33'],
        shear13_over_eps=peak['shear13'],
        shear23_over_eps=peak['shear23'],
        eps_velocity1=eps * peak['v1'],
        eps_velocity2=eps * peak['v2'],
        velocity3=peak['v3'],
        rescaled_strain=peak['strain'],
        viscous=trajectory.states[-1].viscous_dissipated,
    )


# ============================================================================
# Distances
# ============================================================================

def _check_aligned(a: Trajectory, b: Trajectory) -> None:
    if len(a) != len(b) or not np.allclose(a.times, b.times):
        raise GridMismatchError(f"Trajectories are not on the same time grid ({len(a)} vs {len(b)} states)")


def trajectory_distance(a: Trajectory, b: Trajectory) -> Tuple[float, float]:
    """Max over time of the energy-norm gap in u and the mass-norm gap in v.

    Both trajectories must share mesh, free dofs and time grid; the norms
    are those of the first trajectory's system.
    """
    _check_aligned(a, b)
    if a.system.n_free != b.system.n_free:
        raise GridMismatchError("Trajectories live on different discrete spaces")
    K, M = a.system.stiffness, a.system.mass
    du = max(_norm(K, sa.u - sb.u) for sa, sb in zip(a.states, b.states))
    dv = max(_norm(M, sa.v - sb.v) for sa, sb in zip(a.states, b.states))
    return du, dv


def kl_distances(slab_run: Trajectory, plate_run: Trajectory, projector: KLProjector,
                 n_samples: int = 11) -> Tuple[float, float]:
    """Distances of a slab trajectory to a plate trajectory and to the KL space.

    Returns:
        tuple: (max over time of |u_slab - lift(u_plate)|_H1,
                max over sampled times of the distance of u_slab to lifted plate fields)
    """
    _check_aligned(slab_run, plate_run)
    to_plate = 0.0
    for s_slab, s_plate in zip(slab_run.states, plate_run.states):
        u_slab, _ = full_fields(slab_run.system, s_slab)
        u_plate, _ = full_fields(plate_run.system, s_plate)
        to_plate = max(to_plate, projector.distance(u_slab, u_plate))
    indices = np.unique(np.linspace(0, len(slab_run) - 1, max(n_samples, 1)).round().astype(int))
    to_space = 0.0
    for i in indices:
        u_slab, _ = full_fields(slab_run.system, slab_run.states[i])
        to_space = max(to_space, projector.project(u_slab)[1])
    return to_plate, to_space


# ============================================================================
# Momentum residuals
# ============================================================================

def undamped_counterpart(system: DiscreteSystem) -> DiscreteSystem:
    """Same model with the viscous form and its load terms removed."""
    forms = system.forms.without_damping()
    return DiscreteSystem.build(forms, system.params, system.loads.without_damping())


def midpoint_residual(trajectory: Trajectory, system: Optional[DiscreteSystem] = None) -> float:
    """Relative residual of the midpoint momentum balance of `system` along a trajectory.

    For each step, M (v_{n+1} - v_n)/dt + C (u_{n+1} - u_n)/dt + (K + K_z) u_mid
    + N(u_mid) - (F(t_n) + F(t_{n+1}))/2 with z = z_{n+1}, measured against the
    largest load and stiffness terms seen. With the trajectory's own system the
    value is at solver tolerance; with the undamped counterpart it measures how
    far a damped trajectory is from solving the undamped equation.
    """
    system = trajectory.system if system is None else system
    M, C, K = system.mass, system.damping, system.stiffness
    worst, scale = 0.0, np.finfo(float).tiny
    for prev, nxt in zip(trajectory.states[:-1], trajectory.states[1:]):
        dt = nxt.t - prev.t
        u_mid = 0.5 * (prev.u + nxt.u)
        load = 0.5 * (system.loads.load(prev.t) + system.loads.load(nxt.t))
        elastic = K @ u_mid + system.adhesive_matrix(nxt.z) @ u_mid + system.penalty(u_mid)[0]
        inertia = M @ (nxt.v - prev.v) / dt
        residual = inertia + C @ (nxt.u - prev.u) / dt + elastic - load
        worst = max(worst, float(np.linalg.norm(residual)))
        scale = max(scale, float(np.linalg.norm(load)), float(np.linalg.norm(elastic)),
                    float(np.linalg.norm(inertia)))
    return worst / scale


def sequence_residual(
    system: DiscreteSystem,
    times: Sequence[float],
    displacements: Sequence[np.ndarray],
    adhesion: Sequence[AdhesionField],
) -> float:
    """Relative central-difference residual of a displacement sequence.

    M (u_{n+1} - 2 u_n + u_{n-1})/dt^2 + C (u_{n+1} - u_{n-1})/(2 dt)
    + (K + K_z) u_n + N(u_n) - F(t_n) at interior times. Used on projections
    of slab trajectories, which carry no velocities of their own.
    """
    M, C, K = system.mass, system.damping, system.stiffness
    worst, scale = 0.0, np.finfo(float).tiny
    for n in range(1, len(times) - 1):
        dt = times[n + 1] - times[n]
        u_prev, u, u_next = displacements[n - 1], displacements[n], displacements[n + 1]
        load = system.loads.load(times[n])
        elastic = K @ u + system.adhesive_matrix(adhesion[n]) @ u + system.penalty(u)[0]
        inertia = M @ (u_next - 2.0 * u + u_prev) / dt ** 2
        residual = inertia + C @ (u_next - u_prev) / (2.0 * dt) + elastic - load
        worst = max(worst, float(np.linalg.norm(residual)))
        scale = max(scale, float(np.linalg.norm(load)), float(np.linalg.norm(elastic)),
                    float(np.linalg.norm(inertia)))
    return worst / scale


def projected_limit_residual(slab_run: Trajectory, plate_system: DiscreteSystem,
                             projector: KLProjector) -> float:
    """Limit-equation residual of the KL projection of a slab trajectory."""
    free = plate_system.forms.free_dofs
    projected = [projector.project(slab_run.system.forms.expand(s.u))[0][free] for s in slab_run.states]
    return sequence_residual(plate_system, slab_run.times, projected, [s.z for s in slab_run.states])
