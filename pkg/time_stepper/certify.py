"""A-posteriori certification of computed trajectories."""
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from model_energetics.functionals import dissipation_R
from time_stepper.interface import semistable_update_z
from time_stepper.scheme import SystemState, Trajectory
from time_stepper.system import DiscreteSystem
from utils.logger import setup_logger

logger = setup_logger(__name__)

BALANCE_REL_TOL = 1e-3
UNDAMPED_REL_TOL = 1e-6
SEMISTABILITY_REL_TOL = 1e-9


@dataclass(frozen=True)
class BalanceReport:
    residuals: List[float]
    energy_scale: float
    one_sided: bool
    tolerance: float

    @property
    def max_abs(self) -> float:
        return max((abs(r) for r in self.residuals), default=0.0)

    @property
    def max_residual(self) -> float:
        return max(self.residuals, default=0.0)

    @property
    def passed(self) -> bool:
        bound = self.tolerance * self.energy_scale
        if self.one_sided:
            return bool(self.max_residual <= bound)
        return bool(self.max_abs <= bound)


@dataclass(frozen=True)
class SemistabilityAudit:
    margin: float
    energy_scale: float
    n_competitors: int
    tolerance: float = SEMISTABILITY_REL_TOL

    @property
    def passed(self) -> bool:
        return bool(self.margin >= -self.tolerance * self.energy_scale)


def balance_residual(state: SystemState, initial: SystemState) -> float:
    """[K + int 2V + Var_R + E](t_n) - [K + E](0) - int dE/dt."""
    now, start = state.energy, initial.energy
    lhs = now.kinetic + state.viscous_dissipated + state.rate_independent_dissipated + now.total
    rhs = start.kinetic + start.total + state.load_work
    return lhs - rhs


def energy_scale(states: List[SystemState]) -> float:
    """Peak of kinetic plus absolute stored energies along the states."""
    peak = max((s.energy.kinetic + abs(s.energy.bulk) + abs(s.energy.surface) for s in states), default=0.0)
    return max(peak, np.finfo(float).tiny)


def verify_energy_balance(
    trajectory: Trajectory,
    one_sided: Optional[bool] = None,
    rel_tol: Optional[float] = None,
) -> BalanceReport:
    """Per-step energy-dissipation balance residuals.

    Damped systems are checked two-sided (|residual| small); undamped
    systems only satisfy the inequality, so residual <= tolerance is
    checked.
    """
    if one_sided is None:
        one_sided = not trajectory.system.is_damped
    if rel_tol is None:
        rel_tol = UNDAMPED_REL_TOL if one_sided else BALANCE_REL_TOL
    initial = trajectory.states[0]
    residuals = [balance_residual(s, initial) for s in trajectory.states]
    report = BalanceReport(residuals=residuals, energy_scale=energy_scale(trajectory.states),
                           one_sided=one_sided, tolerance=rel_tol)
    level = logger.info if report.passed else logger.warning
    level(f"Energy balance ({'one-sided' if one_sided else 'two-sided'}): "
          f"max |residual| {report.max_abs:.3e}, scale {report.energy_scale:.3e}, passed={report.passed}")
    return report


def _competitors(z_values: np.ndarray, binary: bool, n: int, rng: np.random.Generator) -> List[np.ndarray]:
    out = []
    for k in range(n):
        subset = rng.random(z_values.shape) < rng.random()
        if binary or k % 2 == 0:
            out.append(np.where(subset, 0.0, z_values))
        else:
            out.append(np.where(subset, z_values * rng.random(z_values.shape), z_values))
    return out


def verify_semistability(
    state: SystemState,
    system: DiscreteSystem,
    n_competitors: int = 100,
    rng_seed: int = 0,
    scale: Optional[float] = None,
    warn: bool = True,
) -> SemistabilityAudit:
    """Smallest [E(t,u,z~) + R(z~ - z)] - E(t,u,z) over admissible z~ <= z.

    Competitors are random debonded subsets (random fractional reductions
    too when b = 0), z itself and the exact minimizer of the update problem.
    Only the surface energy depends on z, so bulk terms cancel.
    """
    rng = np.random.default_rng(rng_seed)
    z = state.z
    base = system.surface_energy(state.u, z)
    candidates = _competitors(z.values, system.params.binary, n_competitors, rng)
    candidates.append(z.values)
    candidates.append(semistable_update_z(z, system.jumps(state.u), system.params, system.jump_weights).values)

    margin = np.inf
    for values in candidates:
        competitor = z.with_values(values)
        cost = dissipation_R(z, competitor, system.params.a1)
        margin = min(margin, system.surface_energy(state.u, competitor) + cost - base)

    if scale is None:
        scale = max(abs(base), state.energy.kinetic + abs(state.energy.bulk) if state.energy else 0.0,
                    np.finfo(float).tiny)
    audit = SemistabilityAudit(margin=float(margin), energy_scale=scale, n_competitors=len(candidates))
    if warn and not audit.passed:
        logger.warning(f"Semistability violated at t={state.t:.6g}: margin {audit.margin:.3e}")
    return audit


def audit_trajectory(trajectory: Trajectory, n_samples: int, n_competitors: int, seed: int = 0,
                     every_step: bool = False, post_step: bool = False) -> List[SemistabilityAudit]:
    """Semistability audits at sampled update pairs (all pairs when every_step).

    The update pairs (u_n, z_{n+1}) are what each adhesion update minimized.
    With post_step the states (u_{n+1}, z_{n+1}) after the momentum solve are
    audited instead; the displacement has moved on there, so negative
    margins are expected near debonding and are reported, not certified.
    """
    pairs = trajectory.states[1:] if post_step else trajectory.update_pairs()
    if not pairs:
        pairs = trajectory.states[:1]
    if every_step or n_samples >= len(pairs):
        indices = range(len(pairs))
    else:
        indices = np.unique(np.linspace(0, len(pairs) - 1, n_samples).round().astype(int))
    scale = energy_scale(trajectory.states)
    return [verify_semistability(pairs[i], trajectory.system, n_competitors, seed + int(i), scale,
                                 warn=not post_step)
            for i in indices]


def check_unidirectional(trajectory: Trajectory) -> int:
    """Number of (step, cell) pairs where z grows or leaves its admissible set."""
    violations = 0
    binary = trajectory.system.params.binary
    for prev, nxt in zip(trajectory.states[:-1], trajectory.states[1:]):
        violations += int(np.count_nonzero(nxt.z.values > prev.z.values))
    for s in trajectory.states:
        values = s.z.values
        bad = (values < 0.0) | (values > 1.0)
        if binary:
            bad |= (values != 0.0) & (values != 1.0)
        violations += int(np.count_nonzero(bad))
    return violations


# ============================================================================
# Convergence in dt
# ============================================================================

DT_HALVING_RANGE = (1.5, 3.0)
EXACT_BALANCE_REL = 1e-9


def dt_halving_ratio(coarse: BalanceReport, fine: BalanceReport) -> Optional[float]:
    """max |residual| at dt over max |residual| at dt / 2.

    None when the coarse run balances to roundoff: without debonding the
    midpoint scheme has no first-order gap to measure.
    """
    if coarse.max_abs <= EXACT_BALANCE_REL * coarse.energy_scale or fine.max_abs == 0.0:
        return None
    return float(coarse.max_abs / fine.max_abs)


def first_order_in_dt(ratio: Optional[float]) -> bool:
    low, high = DT_HALVING_RANGE
    return ratio is None or bool(low <= ratio <= high)
