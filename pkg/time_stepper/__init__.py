"""Staggered scheme for the adhesive-contact system and its certification."""
from time_stepper.certify import (
    BalanceReport,
    SemistabilityAudit,
    audit_trajectory,
    check_unidirectional,
    dt_halving_ratio,
    first_order_in_dt,
    verify_energy_balance,
    verify_semistability,
)
from time_stepper.interface import project_initial_z, semistable_update_z
from time_stepper.scheme import (
    SchemeConfig,
    SystemState,
    Trajectory,
    initial_state,
    momentum_step,
    run_scheme,
    step,
)
from time_stepper.system import DiscreteSystem, EnergySnapshot

__all__ = [
    'BalanceReport', 'SemistabilityAudit', 'audit_trajectory', 'check_unidirectional', 'dt_halving_ratio',
    'first_order_in_dt', 'verify_energy_balance', 'verify_semistability', 'project_initial_z',
    'semistable_update_z',
    'SchemeConfig', 'SystemState', 'Trajectory', 'initial_state', 'momentum_step', 'run_scheme', 'step',
    'DiscreteSystem', 'EnergySnapshot',
]
