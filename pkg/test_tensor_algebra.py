"""Tests for tensor algebra: validation, planar reduction and visco-elastic completion."""
import numpy as np
import pytest
from scipy.optimize import minimize

from tensor_algebra import (
    StrainTrajectory,
    SymTensor4,
    apply_M,
    check_planar_condition,
    identity_tensor,
    make_decoupled,
    make_isotropic,
    mix,
    mve_evolve,
    planar_block,
    quadratic_form,
    reduced_tensor,
    require_valid,
    rescale_strain,
    tensor_from_json,
    tensor_to_json,
    validate_tensor,
)
from tensor_algebra.reduction import energy_of_completion
from utils.exceptions import DomainError, SingularSystemError, ValidationError

LAME_PAIRS = [(1.0, 1.0), (2.0, 1.0), (1.0, 3.0)]


def random_tensor(rng: np.random.Generator) -> SymTensor4:
    a = rng.normal(size=(6, 6))
    return SymTensor4.from_mandel(a @ a.T + 0.5 * np.eye(6))


def random_planar_strain(rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(2, 2))
    return 0.5 * (a + a.T)


def plane_stress(lambda_lame: float, mu: float, xi: np.ndarray) -> np.ndarray:
    return 2.0 * mu * xi + (2.0 * mu * lambda_lame / (lambda_lame + 2.0 * mu)) * np.trace(xi) * np.eye(2)


# ============================================================================
# Tensors
# ============================================================================

def test_isotropic_eigenvalues():
    """Test Mandel eigenvalues of an isotropic tensor: 3 lambda + 2 mu once, 2 mu five times."""
    report = validate_tensor(make_isotropic(1.0, 2.0))
    assert report.is_valid
    assert report.min_eigenvalue == pytest.approx(4.0)
    assert report.max_eigenvalue == pytest.approx(7.0)


def test_isotropic_quadratic_form():
    strain = np.array([[1.0, 0.5, 0.0], [0.5, -2.0, 0.25], [0.0, 0.25, 0.5]])
    lam, mu = 2.0, 1.5
    expected = 0.5 * (lam * np.trace(strain) ** 2 + 2.0 * mu * np.sum(strain * strain))
    assert quadratic_form(make_isotropic(lam, mu), strain) == pytest.approx(expected)


def test_make_isotropic_rejects_bad_moduli():
    with pytest.raises(DomainError):
        make_isotropic(1.0, 0.0)
    with pytest.raises(DomainError):
        make_isotropic(-1.0, 1.0)


def test_require_valid_rejects_indefinite_tensor():
    with pytest.raises(ValidationError, match="positive definite"):
        require_valid(SymTensor4.from_mandel(-np.eye(6)))


def test_require_valid_rejects_broken_symmetry():
    entries = make_isotropic(1.0, 1.0).entries.copy()
    entries[0, 1, 2, 2] += 0.1
    with pytest.raises(ValidationError, match="symmetry"):
        require_valid(SymTensor4(entries))


def test_tensor_from_json_revalidates():
    payload = tensor_to_json(make_isotropic(1.0, 1.0))
    assert np.allclose(tensor_from_json(payload).entries, make_isotropic(1.0, 1.0).entries)

    payload['voigt'][0][0] = -10.0
    with pytest.raises(ValidationError):
        tensor_from_json(payload)
    with pytest.raises(ValidationError, match="missing"):
        tensor_from_json({})


# ============================================================================
# Planar reduction
# ============================================================================

@pytest.mark.parametrize("lambda_lame,mu", LAME_PAIRS)
def test_reduced_tensor_matches_plane_stress(lambda_lame, mu):
    """Test the reduced isotropic tensor against the plane-stress closed form."""
    rng = np.random.default_rng(1)
    reduced = reduced_tensor(make_isotropic(lambda_lame, mu))
    for _ in range(10):
        xi = random_planar_strain(rng)
        np.testing.assert_allclose(reduced.apply(xi), plane_stress(lambda_lame, mu, xi), rtol=0, atol=1e-10)


@pytest.mark.parametrize("lambda_lame,mu", LAME_PAIRS)
def test_reduced_energy_matches_minimization(lambda_lame, mu):
    """Test half the reduced energy against a numerical minimum over the out-of-plane components."""
    rng = np.random.default_rng(2)
    tensor = make_isotropic(lambda_lame, mu)
    reduced = reduced_tensor(tensor)
    for _ in range(3):
        xi = random_planar_strain(rng)
        found = minimize(lambda eta: energy_of_completion(tensor, xi, eta), np.zeros(3),
                         method='BFGS', options={'gtol': 1e-12})
        assert reduced.quadratic(xi) == pytest.approx(found.fun, rel=1e-8)


def test_reduced_energy_is_minimal():
    rng = np.random.default_rng(3)
    tensor = random_tensor(rng)
    reduced = reduced_tensor(tensor)
    xi = random_planar_strain(rng)
    floor = reduced.quadratic(xi)
    etas = rng.normal(scale=2.0, size=(1000, 3))
    energies = np.array([energy_of_completion(tensor, xi, eta) for eta in etas])
    assert np.all(energies >= floor - 1e-12)
    completed = apply_M(tensor, xi)
    assert energy_of_completion(tensor, xi, completed[2, :]) == pytest.approx(floor, rel=1e-10)


def test_apply_M_gives_planar_stress():
    """Test that the completed strain has vanishing out-of-plane stress for random tensors."""
    rng = np.random.default_rng(4)
    for _ in range(100):
        tensor = random_tensor(rng)
        xi = random_planar_strain(rng)
        completed = apply_M(tensor, xi)
        np.testing.assert_array_equal(completed[:2, :2], xi)
        stress = tensor.apply(completed)
        np.testing.assert_allclose(stress[:, 2], 0.0, atol=1e-11)


def test_apply_M_isotropic_completion():
    lam, mu = 2.0, 1.0
    xi = np.array([[1.0, 0.2], [0.2, 0.5]])
    completed = apply_M(make_isotropic(lam, mu), xi)
    assert completed[2, 2] == pytest.approx(-lam * np.trace(xi) / (lam + 2.0 * mu))
    assert completed[0, 2] == pytest.approx(0.0, abs=1e-14)
    assert completed[1, 2] == pytest.approx(0.0, abs=1e-14)


def test_planar_condition():
    assert check_planar_condition(make_isotropic(0.0, 1.0))
    assert not check_planar_condition(make_isotropic(1.0, 1.0))
    assert check_planar_condition(make_decoupled(0.5, 1.0, 2.0, 0.7))
    assert check_planar_condition(identity_tensor())


def test_planar_block_equals_reduced_for_decoupled_tensor():
    tensor = make_decoupled(0.5, 1.0, 2.0, 0.7)
    np.testing.assert_allclose(planar_block(tensor).voigt3, reduced_tensor(tensor).voigt3, atol=1e-14)


def test_rescale_strain():
    strain = np.array([[1.0, 2.0, 4.0], [2.0, 3.0, 6.0], [4.0, 6.0, 8.0]])
    scaled = rescale_strain(strain, 0.5)
    np.testing.assert_allclose(scaled, [[1.0, 2.0, 8.0], [2.0, 3.0, 12.0], [8.0, 12.0, 32.0]])
    with pytest.raises(DomainError):
        rescale_strain(strain, 0.0)


def test_mix_places_blocks():
    m = mix(np.array([[1.0, 2.0], [2.0, 3.0]]), np.array([4.0, 5.0, 6.0]))
    np.testing.assert_array_equal(m, [[1.0, 2.0, 4.0], [2.0, 3.0, 5.0], [4.0, 5.0, 6.0]])


# ============================================================================
# Visco-elastic completion
# ============================================================================

def ramp_history(n: int = 41) -> StrainTrajectory:
    times = np.linspace(0.0, 1.0, n)
    xi = np.array([[1.0, 0.3], [0.3, -0.5]])
    return StrainTrajectory(times, times[:, None, None] * xi + 0.1 * np.sin(3 * times)[:, None, None] * np.eye(2))


def test_mve_is_trivial_under_planar_condition():
    """Test that decoupled tensors complete a planar history with zeros."""
    history = ramp_history()
    result = mve_evolve(make_decoupled(0.5, 1.0, 2.0, 1.0), make_decoupled(0.0, 0.1, 0.2, 0.1), history)
    np.testing.assert_allclose(result.trajectory.values[:, 2, :], 0.0, atol=1e-12)
    np.testing.assert_array_equal(result.trajectory.values[:, :2, :2], history.values)
    assert result.max_residual < 1e-8


def test_mve_keeps_static_completion_of_constant_history():
    elasticity = make_isotropic(2.0, 1.0)
    xi = np.array([[0.4, 0.1], [0.1, 0.2]])
    history = StrainTrajectory(np.linspace(0.0, 1.0, 11), np.repeat(xi[None], 11, axis=0))
    result = mve_evolve(elasticity, identity_tensor().scaled(0.1), history)
    static = apply_M(elasticity, xi)
    for value in result.trajectory.values:
        np.testing.assert_allclose(value, static, atol=1e-12)


def test_mve_out_of_plane_stress_balance():
    """Test that C Y + D Y' has vanishing (i,3) entries at step midpoints."""
    elasticity, viscosity = make_isotropic(1.0, 1.0), make_isotropic(0.5, 0.2)
    history = ramp_history(201)
    values = mve_evolve(elasticity, viscosity, history).trajectory.values
    dt = np.diff(history.times)
    for n in range(len(dt)):
        mid = 0.5 * (values[n] + values[n + 1])
        rate = (values[n + 1] - values[n]) / dt[n]
        stress = elasticity.apply(mid) + viscosity.apply(rate)
        np.testing.assert_allclose(stress[:, 2], 0.0, atol=1e-10)


def test_mve_rejects_degenerate_viscosity():
    viscosity = SymTensor4.from_mandel(np.diag([1.0, 1.0, 0.0, 0.0, 0.0, 1.0]))
    with pytest.raises(SingularSystemError):
        mve_evolve(make_isotropic(1.0, 1.0), viscosity, ramp_history())


def test_strain_trajectory_requires_increasing_times():
    with pytest.raises(DomainError):
        StrainTrajectory(np.array([0.0, 0.0]), np.zeros((2, 2, 2)))
