"""Single simulation runs: build, integrate, certify, write."""
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from config.loader import load_run_config, settings
from config.schema import RunConfig
from config.validator import build_tensors, validate_run_config
from discretization.assembly import assemble_forms
from discretization.mesh import build_plate_mesh, build_slab_mesh
from discretization.variant import ModelVariant
from model_energetics.loads import LoadOperator
from model_energetics.params import AdhesionField, ModelParams
from storage.file_store import RunStore, read_csv_file
from storage.models import AuditSummary, BalanceSummary, CertificationSummary, StateCheckpoint
from tensor_algebra.tensor import SymTensor4
from time_stepper.certify import (
    BalanceReport,
    SemistabilityAudit,
    audit_trajectory,
    balance_residual,
    check_unidirectional,
    verify_energy_balance,
)
from time_stepper.scheme import SystemState, Trajectory, initial_state, run_scheme
from time_stepper.system import DiscreteSystem
from utils.exceptions import CertificationError, ConfigError, StorageError
from utils.logger import setup_logger

logger = setup_logger(__name__)

TRAJECTORY_COLUMNS = ['t', 'K', 'V_cum', 'R_cum', 'E_bulk', 'E_surf', 'E_total', 'power_cum', 'balance_residual']

_UNSET = object()


@dataclass(eq=False)
class SimulationResult:
    """Trajectory of one run and its certification."""
    run: RunConfig
    trajectory: Trajectory
    balance: BalanceReport
    audits: List[SemistabilityAudit]
    summary: CertificationSummary
    out_dir: Optional[Path] = None
    files: List[Path] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.summary.passed


# ============================================================================
# Building
# ============================================================================

def build_mesh(run: RunConfig, variant: ModelVariant):
    """Slab of the variant's thickness, or the plate for limit variants."""
    m = run.mesh
    if variant.is_limit:
        return build_plate_mesh(m.nx, m.ny, m.nz)
    return build_slab_mesh(m.nx, m.ny, m.nz, thickness=variant.thickness)


def build_system(
    run: RunConfig,
    variant: Optional[ModelVariant] = None,
    params: Optional[ModelParams] = None,
    elasticity: Optional[SymTensor4] = None,
    viscosity=_UNSET,
) -> DiscreteSystem:
    """Assemble the discrete system of a run.

    Args:
        run: Validated run configuration
        variant: Overrides the scheme's variant
        params: Overrides run.params (studies pass per-parameter values)
        elasticity: Overrides material.elasticity
        viscosity: Overrides material.viscosity; None means undamped

    Returns:
        DiscreteSystem: Free-dof system with loads attached
    """
    variant = run.scheme.model_variant if variant is None else variant
    params = run.params if params is None else params
    default_elasticity, default_viscosity = build_tensors(run)
    elasticity = default_elasticity if elasticity is None else elasticity
    viscosity = default_viscosity if viscosity is _UNSET else viscosity
    if variant.kind == 'limit_undamped':
        viscosity = None

    mesh = build_mesh(run, variant)
    forms = assemble_forms(mesh, elasticity, viscosity, variant, rho=params.rho)
    loads = LoadOperator.build(forms, run.loads)
    return DiscreteSystem.build(forms, params, loads)


def initial_adhesion(run: RunConfig, system: DiscreteSystem) -> AdhesionField:
    """Initial z from initial.z_pattern, or the constant initial.z.

    Raises:
        ConfigError: If the pattern does not match the interface grid
    """
    grid = system.forms.interface
    if run.initial.z_pattern is None:
        return AdhesionField.on_grid(grid, run.initial.z)
    pattern = np.asarray(run.initial.z_pattern, dtype=float)
    if pattern.shape != grid.shape:
        raise ConfigError(f"initial.z_pattern has shape {pattern.shape}, interface grid is {grid.shape}")
    return AdhesionField.on_grid(grid, pattern)


def integrate(run: RunConfig, system: DiscreteSystem, on_step=None) -> Trajectory:
    """Project the initial adhesion onto the semistable set and run the scheme."""
    z0 = initial_adhesion(run, system)
    state = initial_state(system, z0)
    if not np.array_equal(state.z.values, z0.values):
        logger.info(f"Initial adhesion projected: {int(np.count_nonzero(z0.values != state.z.values))} cells changed")
    return run_scheme(system, state, run.scheme, on_step)


# ============================================================================
# Certification
# ============================================================================

def trajectory_rows(trajectory: Trajectory) -> List[list]:
    initial = trajectory.states[0]
    rows = []
    for s in trajectory.states:
        e = s.energy
        rows.append([s.t, e.kinetic, s.viscous_dissipated, s.rate_independent_dissipated,
                     e.bulk, e.surface, e.total, s.load_work, balance_residual(s, initial)])
    return rows


def _audit_summary(audits: List[SemistabilityAudit], rel_tol: float) -> AuditSummary:
    margins = [a.margin for a in audits]
    return AuditSummary(
        n_audits=len(audits),
        min_margin=min(margins) if margins else 0.0,
        energy_scale=audits[0].energy_scale if audits else 0.0,
        tolerance=rel_tol,
        passed=bool(all(a.margin >= -rel_tol * a.energy_scale for a in audits)),
    )


def certify_trajectory(run: RunConfig, trajectory: Trajectory, every_step: bool = False):
    """Balance, semistability and unidirectionality checks of a trajectory.

    Returns:
        tuple: (BalanceReport, audits, CertificationSummary)
    """
    system = trajectory.system
    cert = run.certification
    damped = system.is_damped
    balance = verify_energy_balance(
        trajectory, one_sided=not damped,
        rel_tol=cert.balance_rel_tol if damped else cert.undamped_rel_tol)
    audits = audit_trajectory(trajectory, run.scheme.audit_samples, run.scheme.competitor_count,
                              seed=run.seed, every_step=every_step)
    post_step = audit_trajectory(trajectory, run.scheme.audit_samples, run.scheme.competitor_count,
                                 seed=run.seed, every_step=every_step, post_step=True)
    violations = check_unidirectional(trajectory)

    semistability = _audit_summary(audits, cert.semistability_rel_tol)
    semistable = semistability.passed
    final_z = trajectory.states[-1].z
    area = float(final_z.cell_areas.sum())
    summary = CertificationSummary(
        name=run.name,
        variant=system.variant.kind,
        eps=system.variant.eps,
        n_steps=len(trajectory) - 1,
        dt=run.scheme.dt,
        damped=damped,
        balance=BalanceSummary(
            one_sided=balance.one_sided,
            max_abs_residual=balance.max_abs,
            max_residual=balance.max_residual,
            energy_scale=balance.energy_scale,
            tolerance=balance.tolerance,
            passed=balance.passed,
        ),
        semistability=semistability,
        post_step_semistability=_audit_summary(post_step, cert.semistability_rel_tol),
        unidirectionality_violations=violations,
        debonded_fraction=1.0 - final_z.total() / area if area > 0 else 0.0,
        max_newton_iterations=max(s.newton_iterations for s in trajectory.states),
        passed=balance.passed and semistable and violations == 0,
    )
    level = logger.info if summary.passed else logger.warning
    level(f"Certification of {run.name} [{system.variant.label()}]: balance={balance.passed}, "
          f"semistability={semistable} (min margin {summary.semistability.min_margin:.3e}), "
          f"unidirectionality violations={violations}")
    return balance, audits, summary


def _checkpoint(step_index: int, state: SystemState, variant: ModelVariant) -> StateCheckpoint:
    return StateCheckpoint(
        step=step_index,
        t=state.t,
        variant=variant.label(),
        u=state.u.tolist(),
        v=state.v.tolist(),
        z=state.z.values.tolist(),
        viscous_dissipated=state.viscous_dissipated,
        rate_independent_dissipated=state.rate_independent_dissipated,
        load_work=state.load_work,
    )


def simulate(
    run: RunConfig,
    store: Optional[RunStore] = None,
    variant: Optional[ModelVariant] = None,
    params: Optional[ModelParams] = None,
    elasticity: Optional[SymTensor4] = None,
    viscosity=_UNSET,
    every_step_audit: bool = False,
    config_path: Optional[str] = None,
) -> SimulationResult:
    """Build, integrate and certify one run; write files when a store is given."""
    system = build_system(run, variant, params, elasticity, viscosity)
    logger.info(f"Running {run.name} [{system.variant.label()}]: {run.scheme.n_steps} steps, "
                f"{system.n_free} free dofs, {system.n_cells} interface cells")

    every = run.scheme.checkpoint_every
    files: List[Path] = []

    def on_step(n: int, state: SystemState) -> None:
        if store is not None and every and n % every == 0:
            files.append(store.save_checkpoint(n, _checkpoint(n, state, system.variant).model_dump()))

    trajectory = integrate(run, system, on_step)
    balance, audits, summary = certify_trajectory(run, trajectory, every_step=every_step_audit)
    summary.config_path = config_path
    result = SimulationResult(run=run, trajectory=trajectory, balance=balance, audits=audits,
                              summary=summary, out_dir=store.out_dir if store else None, files=files)
    if store is not None:
        files.append(store.write_csv("trajectory.csv", TRAJECTORY_COLUMNS, trajectory_rows(trajectory)))
        files.append(store.save_json("summary.json", summary.model_dump()))
        logger.info(f"Wrote {len(files)} files to {store.out_dir}")
    return result


def run_simulation(
    config_path: Union[str, Path, RunConfig],
    out_dir: Optional[Union[str, Path]] = None,
    seed: Optional[int] = None,
    dt: Optional[float] = None,
    fmt: str = 'csv',
) -> SimulationResult:
    """Run a configuration file and write trajectory.csv, checkpoints and summary.json.

    Args:
        config_path: YAML/JSON run configuration (or an already parsed RunConfig)
        out_dir: Output directory; defaults to settings.out_dir / run name
        seed: Overrides the config seed
        dt: Overrides the scheme time step
        fmt: 'json' additionally writes trajectory.json

    Returns:
        SimulationResult: Trajectory, reports and written files

    Raises:
        ConfigError: If the configuration is invalid (message names the field)
    """
    if isinstance(config_path, RunConfig):
        run = config_path
    else:
        run = validate_run_config(load_run_config(config_path))
        logger.info(f"Loaded config {config_path}")
    run = apply_overrides(run, seed=seed, dt=dt)
    target = Path(out_dir) if out_dir is not None else Path(settings.out_dir) / run.name
    source = None if isinstance(config_path, RunConfig) else str(config_path)
    store = RunStore(target)
    result = simulate(run, store, config_path=source)
    if fmt == 'json':
        result.files.append(store.save_json("trajectory.json", {
            'columns': TRAJECTORY_COLUMNS, 'rows': trajectory_rows(result.trajectory)}))
    return result


def apply_overrides(run: RunConfig, seed: Optional[int] = None, dt: Optional[float] = None) -> RunConfig:
    """Copy of run with CLI overrides applied (re-validated)."""
    if seed is None and dt is None:
        return run
    data = run.model_dump()
    if seed is not None:
        data['seed'] = seed
    if dt is not None:
        data['scheme']['dt'] = dt
    return validate_run_config(data)


# ============================================================================
# Certification from files
# ============================================================================

@dataclass(frozen=True)
class FileCertification:
    max_abs_residual: float
    max_residual: float
    recomputed_mismatch: float
    energy_scale: float
    one_sided: bool
    tolerance: float
    monotone: bool

    @property
    def passed(self) -> bool:
        bound = self.tolerance * self.energy_scale
        balance_ok = self.max_residual <= bound if self.one_sided else self.max_abs_residual <= bound
        return bool(balance_ok and self.monotone)


def certify_csv(path: Union[str, Path], rel_tol: Optional[float] = None,
                one_sided: Optional[bool] = None) -> FileCertification:
    """Recompute the energy balance from a trajectory.csv.

    The variant (damped or not) and tolerance come from summary.json next to
    the file when present; explicit arguments take precedence.

    Raises:
        StorageError: If the file lacks the trajectory columns
        CertificationError: If the table has no rows
    """
    path = Path(path)
    columns, rows = read_csv_file(path)
    missing = [c for c in TRAJECTORY_COLUMNS if c not in columns]
    if missing:
        raise StorageError(f"{path} is missing columns: {missing}")
    if not rows:
        raise CertificationError(f"{path} has no rows")
    table = np.array([[row[columns.index(c)] for c in TRAJECTORY_COLUMNS] for row in rows], dtype=float)
    t, K, V, R, E_bulk, E_surf, E, W, logged = table.T

    summary_path = path.parent / "summary.json"
    if summary_path.exists() and (one_sided is None or rel_tol is None):
        summary = RunStore(path.parent).load_json("summary.json")
        balance = summary.get('balance', {})
        one_sided = balance.get('one_sided', False) if one_sided is None else one_sided
        rel_tol = balance.get('tolerance') if rel_tol is None else rel_tol
    one_sided = bool(one_sided) if one_sided is not None else False
    rel_tol = rel_tol if rel_tol is not None else 1e-3

    residual = K + V + R + E - (K[0] + E[0]) - W
    scale = max(float(np.max(K + np.abs(E_bulk) + np.abs(E_surf))), np.finfo(float).tiny)
    monotone = bool(np.all(np.diff(t) > 0) and np.all(np.diff(V) >= -1e-14 * scale)
                    and np.all(np.diff(R) >= -1e-14 * scale))
    report = FileCertification(
        max_abs_residual=float(np.max(np.abs(residual))),
        max_residual=float(np.max(residual)),
        recomputed_mismatch=float(np.max(np.abs(residual - logged))),
        energy_scale=scale,
        one_sided=one_sided,
        tolerance=rel_tol,
        monotone=monotone,
    )
    level = logger.info if report.passed else logger.warning
    level(f"Certified {path}: max |residual| {report.max_abs_residual:.3e}, scale {scale:.3e}, "
          f"monotone tallies={monotone}, passed={report.passed}")
    return report
