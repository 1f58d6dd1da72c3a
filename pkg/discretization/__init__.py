"""Meshes, finite-element forms, KL lifts and the Korn check."""
from discretization.assembly import AssembledForms, assemble_forms, jump_operator
from discretization.kl import KLField, KLProjector, kl_lift, kl_lift_operator, kl_project, kl_strain_samples
from discretization.korn import KornResult, korn_check
from discretization.mesh import PlateMesh, SlabMesh, build_plate_mesh, build_slab_mesh
from discretization.variant import ModelVariant

__all__ = [
    'AssembledForms', 'assemble_forms', 'jump_operator', 'KLField', 'KLProjector', 'kl_lift', 'kl_lift_operator', 'kl_project',
    'kl_strain_samples', 'KornResult', 'korn_check', 'PlateMesh', 'SlabMesh', 'build_plate_mesh',
    'build_slab_mesh', 'ModelVariant',
]
