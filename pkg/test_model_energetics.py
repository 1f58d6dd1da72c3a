"""Tests for energies, dissipations, adhesion fields and loads."""
import numpy as np
import pydantic
import pytest

from discretization import ModelVariant, assemble_forms, build_slab_mesh
from discretization.mesh import InterfaceGrid
from model_energetics import (
    INADMISSIBLE,
    AdhesionField,
    DirichletField,
    LoadData,
    LoadOperator,
    LoadProfile,
    ModelParams,
    bulk_energy,
    dissipation_R,
    perimeter,
    surface_energy,
    viscous_dissipation,
    viscous_power,
    yosida_pair,
)
from tensor_algebra import identity_tensor, make_isotropic
from tensor_algebra.reduction import rescale_strain
from utils.exceptions import ConfigError, ConstraintError, GridMismatchError


def make_params(**overrides) -> ModelParams:
    values = dict(kappa=2.0, lambda_yosida=0.5, a0=0.1, a1=0.2)
    values.update(overrides)
    return ModelParams(**values)


def unit_field(ny: int = 4, nz: int = 4, value=1.0) -> AdhesionField:
    return AdhesionField.on_grid(InterfaceGrid.uniform(ny, nz, 1.0), value)


# ============================================================================
# Yosida cone penalty
# ============================================================================

def test_yosida_vanishes_inside_cone():
    n = np.array([1.0, 0.0, 0.0])
    alpha, alpha_hat = yosida_pair(np.array([0.3, -2.0, 5.0]), n, 0.1)
    assert alpha_hat == 0.0
    np.testing.assert_array_equal(alpha, 0.0)


def test_yosida_outside_cone():
    n = np.array([0.0, 0.6, 0.8])
    v = np.array([1.0, -0.6, -0.8])
    alpha, alpha_hat = yosida_pair(v, n, 0.5)
    assert alpha_hat == pytest.approx(1.0 / 0.5)
    np.testing.assert_allclose(alpha, -4.0 * n)


def test_yosida_gradient_matches_finite_differences():
    """Test alpha against central differences of alpha_hat, cone boundary included."""
    rng = np.random.default_rng(5)
    lam, h = 0.5, 1e-7
    n = rng.normal(size=3)
    n /= np.linalg.norm(n)
    points = rng.normal(size=(100, 3))
    # half the points within 1e-6 of the cone boundary
    points[::2] -= np.outer(points[::2] @ n - rng.uniform(-1e-6, 1e-6, 50), n)
    for v in points:
        alpha, _ = yosida_pair(v, n, lam)
        numeric = np.array([
            (yosida_pair(v + h * e, n, lam)[1] - yosida_pair(v - h * e, n, lam)[1]) / (2 * h)
            for e in np.eye(3)])
        np.testing.assert_allclose(alpha, numeric, atol=1e-6)


def test_yosida_on_rows():
    n = np.array([1.0, 0.0, 0.0])
    alpha, alpha_hat = yosida_pair(np.array([[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]), n, 1.0)
    np.testing.assert_allclose(alpha_hat, [1.0, 0.0])
    assert alpha.shape == (2, 3)


# ============================================================================
# Adhesion field, dissipation and perimeter
# ============================================================================

def test_dissipation_of_decrease():
    z_old = unit_field(2, 2)
    z_new = z_old.with_values([[1.0, 0.5], [0.0, 1.0]])
    assert dissipation_R(z_old, z_new, 0.2) == pytest.approx(0.2 * 0.25 * 1.5)


def test_dissipation_of_increase_is_inadmissible():
    z_old = unit_field(2, 2, 0.5)
    z_new = z_old.with_values([[0.5, 0.6], [0.5, 0.5]])
    assert dissipation_R(z_old, z_new, 0.2) is INADMISSIBLE
    assert not INADMISSIBLE


def test_dissipation_grid_mismatch():
    with pytest.raises(GridMismatchError):
        dissipation_R(unit_field(2, 2), unit_field(2, 4), 0.1)


def test_perimeter_of_centered_block():
    """Test that a 2x2 bonded block inside a 4x4 grid has perimeter 8 h."""
    values = np.zeros((4, 4))
    values[1:3, 1:3] = 1.0
    assert perimeter(unit_field(value=values)) == pytest.approx(8 * 0.25)


def test_perimeter_of_uniform_field_is_zero():
    assert perimeter(unit_field()) == 0.0


def test_perimeter_rejects_fractional_values():
    with pytest.raises(ConstraintError):
        perimeter(unit_field(value=0.5))
    assert perimeter(unit_field(value=0.5), binary=False) == 0.0


def test_adhesion_field_admissibility():
    unit_field(value=0.3).check_admissible()
    with pytest.raises(ConstraintError):
        unit_field(value=0.3).check_admissible(binary=True)
    with pytest.raises(ConstraintError):
        unit_field().with_values(np.full((4, 4), 1.5)).check_admissible()


def test_adhesion_field_shape_check():
    with pytest.raises(GridMismatchError):
        AdhesionField(values=np.ones((2, 2)), cell_areas=np.ones((2, 3)), hy=0.5, hz=0.5)


def test_model_params_validation():
    with pytest.raises(pydantic.ValidationError):
        make_params(kappa=0.0)
    with pytest.raises(pydantic.ValidationError):
        make_params(n_interface=(1.0, 1.0, 0.0))
    assert make_params(b=0.1).binary
    assert not make_params().binary


# ============================================================================
# Surface and bulk energies
# ============================================================================

def test_surface_energy_terms():
    params = make_params(nu=1.0, b=0.5)
    z = unit_field(2, 2).with_values([[1.0, 0.0], [1.0, 1.0]])
    jumps = np.zeros((4, 3))
    jumps[0] = [-0.5, 0.0, 0.0]     # interpenetration in a bonded cell
    jumps[3] = [0.2, 0.1, 0.0]
    area = 0.25
    adhesive = 0.5 * 2.0 * area * (0.25 + (0.04 + 0.01))
    cone = 1.0 * area * 0.25 / 0.5
    expected = adhesive - 0.1 * 3 * area + cone + 0.5 * perimeter(z)
    assert surface_energy(jumps, z, params) == pytest.approx(expected)


def test_surface_energy_weights_and_cone_mask():
    params = make_params(nu=1.0)
    z = unit_field(1, 1)
    jumps = np.array([[-1.0, 0.0, 2.0]])
    weighted = surface_energy(jumps, z, params, jump_weights=(1.0, 1.0, 0.25), cone_mask=(1.0, 1.0, 1.0))
    assert weighted == pytest.approx(0.5 * 2.0 * (1.0 + 1.0) - 0.1 + 1.0 / 0.5)
    without_cone = surface_energy(jumps, z, params, include_cone=False)
    assert without_cone == pytest.approx(0.5 * 2.0 * 5.0 - 0.1)


def test_surface_energy_grid_mismatch():
    with pytest.raises(GridMismatchError):
        surface_energy(np.zeros((3, 3)), unit_field(2, 2), make_params())


def test_bulk_energy_and_viscous_dissipation_match_assembly():
    """Test quadratic forms of affine fields against their exact integrals."""
    eps = 0.5
    mesh = build_slab_mesh(2, 2, 2)
    elasticity, viscosity = make_isotropic(1.0, 1.5), identity_tensor().scaled(0.3)
    forms = assemble_forms(mesh, elasticity, viscosity, ModelVariant('rescaled3D', eps))
    gradient = np.array([[0.1, 0.2, -0.3], [0.0, 0.4, 0.1], [0.2, -0.1, 0.5]])
    u = (mesh.coordinates @ gradient.T).ravel()
    strain = rescale_strain(0.5 * (gradient + gradient.T), eps)
    volume = 2.0

    stress = elasticity.apply(strain)
    assert bulk_energy(forms.stiffness, u) == pytest.approx(0.5 * volume * np.sum(stress * strain), rel=1e-10)
    expected = viscous_dissipation(viscosity, strain[None], np.array([volume]), eps_weight=eps)
    assert viscous_power(u, forms.damping) == pytest.approx(expected, rel=1e-10)


# ============================================================================
# Loads
# ============================================================================

def test_polynomial_profile_derivatives():
    profile = LoadProfile(coefficients=[1.0, 2.0, 3.0])
    assert profile.value(2.0) == pytest.approx(17.0)
    assert profile.value(2.0, 1) == pytest.approx(14.0)
    assert profile.value(2.0, 2) == pytest.approx(6.0)
    assert profile.value(2.0, 3) == 0.0


def test_sine_profile_derivatives():
    profile = LoadProfile(kind='sine', amplitude=2.0, omega=3.0, phase=0.1)
    t = 0.7
    assert profile.value(t) == pytest.approx(2.0 * np.sin(2.2))
    assert profile.value(t, 1) == pytest.approx(6.0 * np.cos(2.2))
    assert profile.value(t, 2) == pytest.approx(-18.0 * np.sin(2.2))
    assert profile.value(t, 3) == pytest.approx(-54.0 * np.cos(2.2))


def test_kl_dirichlet_field_on_slab_and_plate():
    field = DirichletField(kind='kl', inplane_matrix=[[0.1, 0.2], [0.0, 0.3]], inplane_offset=[0.5, -0.5],
                           deflection=[0.1, 0.2, 0.0, 0.3, 0.4, 0.0])
    points = np.array([[0.5, 0.25, 0.0], [0.5, 0.25, 0.5]])
    slab = field.slab_values(points)
    plate = field.plate_values(points[:1, :2])
    np.testing.assert_allclose(slab[0], plate[0, :3])
    q1, q2 = plate[0, 3], plate[0, 4]
    np.testing.assert_allclose(slab[1], slab[0] - 0.5 * np.array([q1, q2, 0.0]))
    assert q1 == pytest.approx(0.2 + 2 * 0.3 * 0.5 + 0.4 * 0.25)
    assert field.is_kirchhoff_love()


def test_affine_dirichlet_field_is_slab_only():
    field = DirichletField(kind='affine', matrix=[[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    assert not field.is_kirchhoff_love()
    with pytest.raises(ConfigError):
        field.plate_values(np.zeros((1, 2)))
    rotation = DirichletField(kind='affine', matrix=[[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])
    assert rotation.is_kirchhoff_love()


def test_translating_lift_carries_no_load():
    """Test that a uniformly moving boundary loads a rigid body with nothing."""
    mesh = build_slab_mesh(2, 2, 2)
    forms = assemble_forms(mesh, make_isotropic(1.0, 1.0), identity_tensor(), ModelVariant('rescaled3D'))
    data = LoadData(dirichlet=DirichletField(kind='affine', offset=[1.0, 0.0, 0.0]),
                    dirichlet_profile=LoadProfile(coefficients=[0.0, 1.0]))
    loads = LoadOperator.build(forms, data)
    np.testing.assert_allclose(loads.load(0.5), 0.0, atol=1e-12)
    np.testing.assert_allclose(loads.lift_at(0.5).reshape(-1, 3)[:, 0], 0.5)


def test_load_rate_and_power():
    mesh = build_slab_mesh(2, 2, 2)
    forms = assemble_forms(mesh, make_isotropic(1.0, 1.0), None, ModelVariant('rescaled3D'))
    data = LoadData(force=[0.0, 0.0, -1.0], force_profile=LoadProfile(coefficients=[0.0, 2.0]))
    loads = LoadOperator.build(forms, data)
    np.testing.assert_allclose(loads.load(1.5), 1.5 * loads.rate(0.0))
    u = np.ones(len(forms.free_dofs))
    assert loads.power(0.3, u) == pytest.approx(-float(loads.rate(0.3) @ u))
    # total force on the free nodes points down
    assert loads.load(1.0).reshape(-1, 3)[:, 2].sum() < 0
    assert not data.is_static
    assert LoadData().is_static
