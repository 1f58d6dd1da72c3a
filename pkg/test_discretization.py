"""Tests for meshes, assembled forms, KL lifts and projections, and the Korn check."""
import json

import numpy as np
import pytest

from discretization import (
    KLProjector,
    ModelVariant,
    assemble_forms,
    build_plate_mesh,
    build_slab_mesh,
    jump_operator,
    kl_lift,
    kl_project,
    kl_strain_samples,
    korn_check,
)
from discretization.assembly import assemble_slab_form
from discretization.export import mesh_to_json, write_coo
from model_energetics import DirichletField
from tensor_algebra import apply_M, identity_tensor, make_decoupled, make_isotropic, quadratic_form, reduced_tensor
from utils.exceptions import AssemblyError, ConfigError, DomainError, GridMismatchError

EPS_LIST = [1.0, 0.5, 0.25, 0.125]

KL_FIELD = DirichletField(
    kind='kl',
    inplane_matrix=[[0.1, 0.05], [-0.02, 0.2]],
    inplane_offset=[0.0, 0.01],
    deflection=[0.01, 0.02, -0.01, 0.03, 0.015, -0.02],
)


def random_plate_dofs(plate, seed: int = 0) -> np.ndarray:
    dofs = np.random.default_rng(seed).normal(size=plate.n_dofs)
    dofs[plate.dirichlet_dofs] = 0.0
    return dofs


# ============================================================================
# Meshes
# ============================================================================

def test_smallest_slab_mesh():
    """Test the (2,1,1) slab: two hexahedra and one duplicated 2x2 node sheet."""
    mesh = build_slab_mesh(2, 1, 1)
    assert mesh.n_cells == 2
    assert mesh.n_grid_nodes == 12
    assert mesh.n_nodes == 16
    assert len(mesh.plus_nodes) == 4
    np.testing.assert_array_equal(mesh.coordinates[mesh.plus_nodes], mesh.coordinates[mesh.minus_nodes])
    # the plus-side hexahedron uses the copies, the minus side the grid nodes
    assert set(mesh.cells[1]) & set(mesh.plus_nodes.tolist())
    assert not set(mesh.cells[0]) & set(mesh.plus_nodes.tolist())


def test_odd_nx_is_rejected():
    with pytest.raises(ConfigError, match="nx"):
        build_slab_mesh(3, 2, 2)
    with pytest.raises(ConfigError):
        build_plate_mesh(5, 2)


def test_dirichlet_dofs_on_end_faces():
    mesh = build_slab_mesh(4, 2, 2)
    nodes = np.unique(mesh.dirichlet_dofs // 3)
    np.testing.assert_allclose(np.abs(mesh.coordinates[nodes, 0]), 1.0)
    assert len(mesh.free_dofs) + len(mesh.dirichlet_dofs) == mesh.n_dofs


def test_interface_grid_of_thin_slab():
    mesh = build_slab_mesh(2, 4, 2, thickness=0.5)
    grid = mesh.interface
    assert grid.shape == (4, 2)
    assert grid.areas.sum() == pytest.approx(0.5)
    np.testing.assert_allclose(np.unique(grid.midpoints[:, 1]), [-0.125, 0.125])


# ============================================================================
# Slab forms
# ============================================================================

def test_free_stiffness_is_spd():
    forms = assemble_forms(build_slab_mesh(2, 2, 2), make_isotropic(1.0, 1.0), None, ModelVariant('rescaled3D'))
    K = forms.restrict(forms.stiffness).toarray()
    np.testing.assert_allclose(K, K.T, atol=1e-12)
    assert np.linalg.eigvalsh(K)[0] > 0.0


def test_rescaled_mass_weights():
    eps = 0.5
    mesh = build_slab_mesh(2, 2, 2)
    forms = assemble_forms(mesh, make_isotropic(1.0, 1.0), None, ModelVariant('rescaled3D', eps), rho=2.0)
    for component, weight in enumerate([eps ** 2, eps ** 2, 1.0]):
        field = np.zeros(mesh.n_dofs)
        field[component::3] = 1.0
        assert field @ forms.mass @ field == pytest.approx(2.0 * weight * mesh.volume)


def test_physical_variant_needs_thin_slab():
    with pytest.raises(GridMismatchError):
        assemble_forms(build_slab_mesh(2, 2, 2), make_isotropic(1.0, 1.0), None, ModelVariant('physical3D', 0.5))
    forms = assemble_forms(build_slab_mesh(2, 2, 2, thickness=0.5), make_isotropic(1.0, 1.0), None,
                           ModelVariant('physical3D', 0.5))
    assert not forms.is_damped


def test_assembly_rejects_wrong_mesh_and_tensor():
    with pytest.raises(AssemblyError):
        assemble_forms(build_slab_mesh(2, 2, 2), make_isotropic(1.0, 1.0), None, ModelVariant('limit_undamped'))
    with pytest.raises(AssemblyError):
        assemble_forms(build_plate_mesh(2, 2), make_isotropic(1.0, 1.0), None, ModelVariant('rescaled3D'))
    with pytest.raises(AssemblyError):
        assemble_forms(build_slab_mesh(2, 2, 2), identity_tensor().scaled(-1.0), None, ModelVariant('rescaled3D'))


def test_slab_jumps():
    mesh = build_slab_mesh(4, 2, 2)
    affine = (mesh.coordinates @ np.array([[0.1, 0.2, 0.3], [0.0, 0.1, 0.0], [0.3, 0.0, 0.2]]).T).ravel()
    np.testing.assert_allclose(jump_operator(mesh) @ affine, 0.0, atol=1e-14)

    opened = np.zeros((mesh.n_nodes, 3))
    plus_side = mesh.coordinates[:, 0] > 0
    plus_side[mesh.plus_nodes] = True
    opened[plus_side] = [0.5, -0.25, 0.125]
    jumps = (jump_operator(mesh) @ opened.ravel()).reshape(-1, 3)
    np.testing.assert_allclose(jumps, np.tile([0.5, -0.25, 0.125], (mesh.interface.n_cells, 1)))


def test_variant_parameters():
    assert ModelVariant('physical3D', 0.5).thickness == 0.5
    np.testing.assert_allclose(ModelVariant('physical3D', 0.5).jump_weights, [1.0, 1.0, 0.25])
    np.testing.assert_allclose(ModelVariant('rescaled3D', 0.5).cone_mask, [1.0, 1.0, 0.0])
    assert ModelVariant('rescaled3D', 0.5).damping_weight == 0.5
    assert ModelVariant('limit_damped').is_damped_limit
    with pytest.raises(DomainError):
        ModelVariant('rescaled3D', 0.0)
    with pytest.raises(DomainError):
        ModelVariant('membrane')


# ============================================================================
# Plate forms and KL lifts
# ============================================================================

def test_plate_energy_of_kl_field():
    """Test membrane plus bending energy of an exactly represented KL field."""
    plate = build_plate_mesh(4, 2, 2)
    tensor = make_isotropic(1.0, 1.0)
    forms = assemble_forms(plate, tensor, None, ModelVariant('limit_undamped'))
    dofs = KL_FIELD.plate_values(plate.coordinates).ravel()

    c, c1, c2, c11, c12, c22 = KL_FIELD.deflection
    g = np.array(KL_FIELD.inplane_matrix)
    membrane = np.array([g[0, 0], g[1, 1], np.sqrt(2.0) * 0.5 * (g[0, 1] + g[1, 0])])
    curvature = np.array([2 * c11, 2 * c22, np.sqrt(2.0) * c12])
    reduced = reduced_tensor(tensor).voigt3
    expected = 2.0 * (membrane @ reduced @ membrane + curvature @ reduced @ curvature / 12.0)
    assert dofs @ forms.stiffness @ dofs == pytest.approx(expected, rel=1e-10)
    np.testing.assert_allclose(forms.jumps(dofs), 0.0, atol=1e-14)


def test_kl_lift_matches_nodal_kl_field():
    plate, slab = build_plate_mesh(4, 2, 2), build_slab_mesh(4, 2, 2)
    lifted = kl_lift(plate, slab, KL_FIELD.plate_values(plate.coordinates).ravel())
    np.testing.assert_allclose(lifted, KL_FIELD.slab_values(slab.coordinates).ravel(), atol=1e-14)


def test_kl_strains_are_planar_and_fixed_by_M():
    """Test that lifted strains have no (i,3) part and M leaves their planar part complete."""
    plate, slab = build_plate_mesh(4, 2, 2), build_slab_mesh(4, 2, 2)
    tensor = make_decoupled(0.5, 1.0, 2.0, 0.7)
    rng = np.random.default_rng(6)
    for seed in range(20):
        strains, weights, _ = kl_strain_samples(plate, slab, random_plate_dofs(plate, seed), inplane_order=2)
        assert weights.sum() == pytest.approx(slab.volume)
        np.testing.assert_allclose(strains[:, :, 2], 0.0, atol=1e-12)
        for strain in strains[rng.choice(len(strains), 5, replace=False)]:
            np.testing.assert_allclose(apply_M(tensor, strain[:2, :2]), strain, atol=1e-8)


def test_kl_strains_match_slab_strains_of_lifted_tilt():
    """Test KL strains against the slab element strains of the same lifted field.

    A tilted plane w = c + c1 x1 + c2 x2 lifts to a linear slab field, which
    trilinear elements reproduce exactly, so both energies must agree.
    """
    plate, slab = build_plate_mesh(4, 2, 2), build_slab_mesh(4, 2, 2)
    tilt = DirichletField(kind='kl', inplane_matrix=[[0.1, 0.05], [-0.02, 0.2]], inplane_offset=[0.0, 0.01],
                          deflection=[0.01, 0.3, -0.2, 0.0, 0.0, 0.0])
    tensor = make_isotropic(0.5, 1.0)
    strains, weights, _ = kl_strain_samples(plate, slab, tilt.plate_values(plate.coordinates).ravel(), 2)
    kl_energy = sum(w * quadratic_form(tensor, e) for w, e in zip(weights, strains))

    u = tilt.slab_values(slab.coordinates).ravel()
    slab_energy = 0.5 * u @ (assemble_slab_form(slab, tensor.mandel) @ u)
    assert kl_energy == pytest.approx(slab_energy, rel=1e-10)


def test_kl_strain_of_polynomial_field():
    plate, slab = build_plate_mesh(4, 2, 2), build_slab_mesh(4, 2, 2)
    strains, _, points = kl_strain_samples(plate, slab, KL_FIELD.plate_values(plate.coordinates).ravel(), 2)
    c, c1, c2, c11, c12, c22 = KL_FIELD.deflection
    g = np.array(KL_FIELD.inplane_matrix)
    x3 = points[:, 2]
    np.testing.assert_allclose(strains[:, 0, 0], g[0, 0] - 2 * c11 * x3, atol=1e-12)
    np.testing.assert_allclose(strains[:, 1, 1], g[1, 1] - 2 * c22 * x3, atol=1e-12)
    np.testing.assert_allclose(strains[:, 0, 1], 0.5 * (g[0, 1] + g[1, 0]) - c12 * x3, atol=1e-12)


def test_projection_recovers_lifted_field():
    plate, slab = build_plate_mesh(4, 2, 2), build_slab_mesh(4, 2, 2)
    projector = KLProjector.build(slab, plate)
    field = kl_lift(plate, slab, random_plate_dofs(plate, 7))
    projected, distance = projector.project(field)
    scale = np.sqrt(field @ (projector.gram @ field))
    assert distance <= 1e-8 * scale
    np.testing.assert_allclose(kl_lift(plate, slab, projected), field, atol=1e-8 * np.abs(field).max())


def test_projection_distance_of_non_kl_field():
    plate, slab = build_plate_mesh(4, 2, 2), build_slab_mesh(4, 2, 2)
    field = np.zeros(slab.n_dofs)
    field[2::3] = slab.coordinates[:, 2] ** 2      # u3 = x3^2 is not a KL field
    projected, distance = kl_project(slab, plate, field)
    assert distance > 1e-3
    assert distance <= np.sqrt(field @ (KLProjector.build(slab, plate).gram @ field)) + 1e-12


def test_projection_grid_checks():
    plate, slab = build_plate_mesh(4, 2, 2), build_slab_mesh(4, 2, 2)
    with pytest.raises(GridMismatchError):
        KLProjector.build(slab, plate).project(np.zeros(5))
    with pytest.raises(GridMismatchError):
        KLProjector.build(build_slab_mesh(2, 2, 2), plate)
    with pytest.raises(GridMismatchError):
        KLProjector.build(build_slab_mesh(4, 2, 2, thickness=0.5), plate)


# ============================================================================
# Korn check
# ============================================================================

def test_korn_ratio_stays_positive():
    """Test the observed Korn ratio over 200 fields for D_eps = eps D_star."""
    mesh = build_slab_mesh(4, 2, 2)
    d_star = identity_tensor()
    ratios = [korn_check(mesh, d_star.scaled(eps), eps, 200, seed=3).min_ratio for eps in EPS_LIST]
    assert min(ratios) >= 1e-4


def test_korn_skips_fields_without_deflection_gradient():
    mesh = build_slab_mesh(2, 2, 2)
    samples = np.zeros((2, mesh.n_dofs))
    samples[0, 0::3] = 1.0
    samples[1, 2::3] = np.arange(mesh.n_nodes, dtype=float)
    result = korn_check(mesh, identity_tensor(), 1.0, 0, samples=samples)
    assert result.n_skipped == 1
    assert result.n_used == 1
    assert result.min_ratio > 0.0


# ============================================================================
# Exports
# ============================================================================

def test_mesh_export_is_json_ready():
    payload = mesh_to_json(build_plate_mesh(2, 1, 2))
    assert payload['kind'] == 'plate'
    assert payload['dofs_per_node'] == 6
    assert len(payload['coordinates']) == 3 * 2 + 2
    json.dumps(payload)


def test_matrix_export_coordinate_format(tmp_path):
    forms = assemble_forms(build_slab_mesh(2, 1, 1), make_isotropic(1.0, 1.0), None, ModelVariant('rescaled3D'))
    path = tmp_path / "stiffness.coo"
    write_coo(forms.stiffness, path)
    lines = path.read_text().splitlines()
    assert lines[0] == f"# {forms.n_dofs} {forms.n_dofs}"
    assert len(lines) == 1 + forms.stiffness.tocoo().nnz
    i, j, value = lines[1].split()
    assert forms.stiffness[int(i), int(j)] == pytest.approx(float(value))
