"""Simulation runs, parameter studies and report emission."""
from experiments.decoupling import CouplingNorms, decoupling_test
from experiments.diagnostics import ScalingDiagnostics, scaling_diagnostics
from experiments.report import StudyReport, emit_report, load_report
from experiments.rescaling import rescale_solution, unscale_solution
from experiments.runner import SimulationResult, certify_csv, run_simulation, simulate
from experiments.studies import study_dimred_damped, study_dimred_undamped, study_nu_to_zero
from experiments.sweep import SweepManager

__all__ = [
    'CouplingNorms', 'decoupling_test', 'ScalingDiagnostics', 'scaling_diagnostics',
    'StudyReport', 'emit_report', 'load_report', 'rescale_solution', 'unscale_solution',
    'SimulationResult', 'certify_csv', 'run_simulation', 'simulate',
    'study_dimred_damped', 'study_dimred_undamped', 'study_nu_to_zero', 'SweepManager',
]
