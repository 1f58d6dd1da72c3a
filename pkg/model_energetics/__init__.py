"""Energies, dissipations and loads of the adhesive-contact model."""
from model_energetics.functionals import (
    INADMISSIBLE,
    Inadmissible,
    bulk_energy,
    dissipation_R,
    kinetic,
    perimeter,
    power_of_loads,
    surface_energy,
    viscous_dissipation,
    viscous_power,
    yosida_pair,
)
from model_energetics.loads import DirichletField, LoadData, LoadOperator, LoadProfile
from model_energetics.params import AdhesionField, ModelParams

__all__ = [
    'INADMISSIBLE', 'Inadmissible', 'bulk_energy', 'dissipation_R', 'kinetic', 'perimeter',
    'power_of_loads', 'surface_energy', 'viscous_dissipation', 'viscous_power', 'yosida_pair',
    'DirichletField', 'LoadData', 'LoadOperator', 'LoadProfile', 'AdhesionField', 'ModelParams',
]
