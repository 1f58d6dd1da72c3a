"""Vanishing-viscosity and thin-plate parameter studies."""
from pathlib import Path
from typing import Dict, Optional

from config.schema import RunConfig, StudyConfig
from config.validator import (
    build_tensors,
    validate_damped_family,
    validate_nu_study,
    validate_undamped_family,
)
from discretization.kl import KLProjector
from discretization.korn import korn_check
from discretization.variant import ModelVariant
from experiments.diagnostics import (
    DIAGNOSTIC_COLUMNS,
    kl_distances,
    midpoint_residual,
    projected_limit_residual,
    scaling_diagnostics,
    sequence_residual,
    trajectory_distance,
    undamped_counterpart,
)
from experiments.report import StudyReport, bounded_by_first, nonincreasing, strictly_decreasing
from experiments.runner import SimulationResult, simulate
from experiments.sweep import SweepManager
from model_energetics.params import ModelParams
from storage.file_store import RunStore
from time_stepper.certify import dt_halving_ratio, first_order_in_dt
from utils.logger import setup_logger

logger = setup_logger(__name__)

FAMILY_FIELDS = ('rho', 'a0', 'a1', 'b', 'nu')
KORN_SAMPLES = 200


def family_params(run: RunConfig, study: StudyConfig, eps: Optional[float]) -> ModelParams:
    """Model parameters at eps (eps=None gives the declared limits)."""
    data = run.params.model_dump()
    for name in FAMILY_FIELDS:
        rule = study.rule(name, getattr(run.params, name))
        data[name] = rule.limit if eps is None else rule.value(eps)
    return ModelParams(**data)


def _store(out_dir: Optional[Path], name: str) -> Optional[RunStore]:
    return None if out_dir is None else RunStore(Path(out_dir) / name)


# ============================================================================
# Vanishing viscosity
# ============================================================================

NU_COLUMNS = ['nu', 'viscous_dissipation', 'undamped_residual', 'distance_u_previous',
              'distance_v_previous', 'distance_u_undamped', 'balance_max_abs', 'certified']


def study_nu_to_zero(run: RunConfig, sweep: Optional[SweepManager] = None,
                     out_dir: Optional[Path] = None) -> StudyReport:
    """Damped runs with D = nu * D_bar for decreasing nu, plus the direct undamped run.

    Reports the viscous dissipation per nu, distances between consecutive
    levels and to the undamped run, and the residual of the undamped
    momentum balance along each damped trajectory.

    Raises:
        HypothesisError: If the configuration does not describe a nu family
    """
    study = validate_nu_study(run)
    sweep = sweep or SweepManager()
    _, base_viscosity = build_tensors(run)
    logger.info(f"nu study {run.name}: nu in {study.nu_list}")

    tasks = {nu: (lambda nu=nu: simulate(run, _store(out_dir, f"nu_{nu:g}"), viscosity=base_viscosity.scaled(nu)))
             for nu in study.nu_list}
    if study.include_undamped:
        tasks[0.0] = lambda: simulate(run, _store(out_dir, "nu_0"), viscosity=None)
    results: Dict[float, SimulationResult] = sweep.run(tasks)
    undamped = results.get(0.0)

    report = StudyReport(study='nu_study', parameter='nu', columns=NU_COLUMNS)
    previous = None
    for nu in study.nu_list:
        result = results[nu]
        trajectory = result.trajectory
        residual = midpoint_residual(trajectory, undamped_counterpart(trajectory.system))
        row = {
            'nu': nu,
            'viscous_dissipation': trajectory.states[-1].viscous_dissipated,
            'undamped_residual': residual,
            'balance_max_abs': result.balance.max_abs,
            'certified': float(result.passed),
        }
        if previous is not None:
            row['distance_u_previous'], row['distance_v_previous'] = trajectory_distance(trajectory, previous)
        if undamped is not None:
            row['distance_u_undamped'] = trajectory_distance(trajectory, undamped.trajectory)[0]
        report.add_row(row)
        previous = trajectory

    report.flags['viscous_strictly_decreasing'] = strictly_decreasing(report.column('viscous_dissipation'))
    report.flags['undamped_residual_decreasing'] = strictly_decreasing(report.column('undamped_residual'))
    report.metrics['smallest_nu_undamped_residual'] = report.column('undamped_residual')[-1]
    if undamped is not None:
        report.add_row({
            'nu': 0.0,
            'viscous_dissipation': undamped.trajectory.states[-1].viscous_dissipated,
            'undamped_residual': midpoint_residual(undamped.trajectory),
            'balance_max_abs': undamped.balance.max_abs,
            'certified': float(undamped.passed),
        })
        report.flags['undamped_inequality_certified'] = undamped.balance.passed and undamped.balance.one_sided
        report.metrics['undamped_one_sided_max_residual'] = undamped.balance.max_residual
        report.metrics['undamped_energy_scale'] = undamped.balance.energy_scale
    report.flags['runs_certified'] = all(r.passed for r in results.values())
    logger.info(f"nu study {run.name} done: flags {report.flags}")
    return report


# ============================================================================
# Thin-plate limits
# ============================================================================

UNDAMPED_COLUMNS = ['eps'] + DIAGNOSTIC_COLUMNS + ['korn_min_ratio', 'kl_distance_to_limit',
                                                   'distance_to_kl_space', 'certified']


def study_dimred_undamped(run: RunConfig, sweep: Optional[SweepManager] = None,
                          out_dir: Optional[Path] = None) -> StudyReport:
    """Rescaled slab runs with D_eps = eps^delta D_star against the undamped plate limit.

    Raises:
        HypothesisError: If the family violates the undamped reduction requirements
    """
    study = validate_undamped_family(run)
    sweep = sweep or SweepManager()
    _, d_star = build_tensors(run)
    logger.info(f"Undamped reduction {run.name}: eps in {study.eps_list}, delta={study.delta}")

    def slab_run(eps: float) -> SimulationResult:
        return simulate(run, _store(out_dir, f"eps_{eps:g}"), variant=ModelVariant('rescaled3D', eps),
                        params=family_params(run, study, eps), viscosity=d_star.scaled(eps ** study.delta))

    tasks = {eps: (lambda eps=eps: slab_run(eps)) for eps in study.eps_list}
    tasks['limit'] = lambda: simulate(run, _store(out_dir, "limit"), variant=ModelVariant('limit_undamped'),
                                      params=family_params(run, study, None), viscosity=None)
    results = sweep.run(tasks)
    limit = results['limit']
    plate = limit.trajectory.system.forms.mesh

    report = StudyReport(study='dimred_undamped', parameter='eps', columns=UNDAMPED_COLUMNS)
    projector = None
    for eps in study.eps_list:
        trajectory = results[eps].trajectory
        slab = trajectory.system.forms.mesh
        if projector is None:
            projector = KLProjector.build(slab, plate)
        diagnostics = scaling_diagnostics(trajectory, eps)
        korn = korn_check(slab, d_star.scaled(eps ** study.delta), eps, KORN_SAMPLES, seed=run.seed)
        to_limit, to_space = kl_distances(trajectory, limit.trajectory, projector)
        row = dict(zip(DIAGNOSTIC_COLUMNS, diagnostics.values()))
        row.update(eps=eps, korn_min_ratio=korn.min_ratio, kl_distance_to_limit=to_limit,
                   distance_to_kl_space=to_space, certified=float(results[eps].passed))
        report.add_row(row)

    for column in DIAGNOSTIC_COLUMNS[:-1]:
        report.flags[f'{column}_bounded'] = bounded_by_first(report.column(column))
    report.flags['kl_distance_nonincreasing'] = nonincreasing(report.column('kl_distance_to_limit'))
    report.flags['korn_positive'] = bool(min(report.column('korn_min_ratio')) > 0.0)

    smallest = results[study.eps_list[-1]].trajectory
    report.metrics['projected_limit_residual'] = projected_limit_residual(smallest, limit.trajectory.system, projector)
    report.metrics['limit_self_residual'] = _limit_self_residual(limit)
    report.metrics['limit_one_sided_max_residual'] = limit.balance.max_residual
    report.flags['limit_inequality_certified'] = limit.balance.passed
    report.flags['runs_certified'] = all(r.passed for r in results.values())
    logger.info(f"Undamped reduction {run.name} done: flags {report.flags}")
    return report


def _limit_self_residual(limit: SimulationResult) -> float:
    """The same central-difference residual on the plate run itself."""
    trajectory = limit.trajectory
    return sequence_residual(trajectory.system, trajectory.times, [s.u for s in trajectory.states],
                             [s.z for s in trajectory.states])


DAMPED_COLUMNS = ['eps', 'viscous', 'kl_distance_to_limit', 'distance_to_kl_space', 'balance_max_abs',
                  'min_semistability_margin', 'certified']


def study_dimred_damped(run: RunConfig, sweep: Optional[SweepManager] = None,
                        out_dir: Optional[Path] = None) -> StudyReport:
    """Rescaled slab runs with eps D_eps = D against the damped plate limit.

    The limit run is audited for semistability at every step and its
    balance is measured again with dt halved.

    Raises:
        HypothesisError: If the family violates the damped reduction requirements
    """
    study = validate_damped_family(run)
    sweep = sweep or SweepManager()
    _, viscosity = build_tensors(run)
    limit_params = family_params(run, study, None)
    logger.info(f"Damped reduction {run.name}: eps in {study.eps_list}")

    halved = run.model_copy(update={'scheme': run.scheme.model_copy(update={'dt': 0.5 * run.scheme.dt})})
    tasks = {eps: (lambda eps=eps: simulate(
        run, _store(out_dir, f"eps_{eps:g}"), variant=ModelVariant('rescaled3D', eps),
        params=family_params(run, study, eps), viscosity=viscosity.scaled(1.0 / eps)))
        for eps in study.eps_list}
    tasks['limit'] = lambda: simulate(run, _store(out_dir, "limit"), variant=ModelVariant('limit_damped'),
                                      params=limit_params, viscosity=viscosity, every_step_audit=True)
    tasks['limit_half_dt'] = lambda: simulate(halved, _store(out_dir, "limit_half_dt"),
                                              variant=ModelVariant('limit_damped'), params=limit_params,
                                              viscosity=viscosity)
    results = sweep.run(tasks)
    limit, limit_half = results['limit'], results['limit_half_dt']
    plate = limit.trajectory.system.forms.mesh

    report = StudyReport(study='dimred_damped', parameter='eps', columns=DAMPED_COLUMNS)
    projector = None
    for eps in study.eps_list:
        result = results[eps]
        if projector is None:
            projector = KLProjector.build(result.trajectory.system.forms.mesh, plate)
        to_limit, to_space = kl_distances(result.trajectory, limit.trajectory, projector)
        report.add_row({
            'eps': eps,
            'viscous': result.trajectory.states[-1].viscous_dissipated,
            'kl_distance_to_limit': to_limit,
            'distance_to_kl_space': to_space,
            'balance_max_abs': result.balance.max_abs,
            'min_semistability_margin': min((a.margin for a in result.audits), default=0.0),
            'certified': float(result.passed),
        })

    limit_margin = min((a.margin for a in limit.audits), default=0.0)
    report.metrics['limit_balance_max_abs'] = limit.balance.max_abs
    report.metrics['limit_balance_max_abs_half_dt'] = limit_half.balance.max_abs
    ratio = dt_halving_ratio(limit.balance, limit_half.balance)
    report.metrics['limit_balance_ratio_dt_halving'] = ratio
    report.flags['dt_halving_ratio_in_range'] = first_order_in_dt(ratio)
    if ratio is None:
        report.notes.append("limit balance exact to roundoff at dt; no dt-halving ratio to measure")
    report.metrics['limit_min_semistability_margin'] = limit_margin
    report.metrics['limit_semistability_audits'] = float(len(limit.audits))
    report.flags['limit_balance_certified'] = limit.balance.passed
    report.flags['limit_semistable_all_steps'] = limit.summary.semistability.passed
    report.flags['runs_certified'] = all(r.passed for r in results.values())
    report.flags['kl_distance_nonincreasing'] = nonincreasing(report.column('kl_distance_to_limit'))
    logger.info(f"Damped reduction {run.name} done: flags {report.flags}")
    return report
