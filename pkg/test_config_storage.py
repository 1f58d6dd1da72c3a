"""Tests for configuration loading/validation and the run store."""
import json
from pathlib import Path

import pytest
import yaml

from config.loader import Settings, load_run_config, settings
from config.validator import (
    validate_damped_family,
    validate_nu_study,
    validate_run_config,
    validate_undamped_family,
)
from storage.file_store import RunStore, format_value, read_csv_file
from utils.exceptions import ConfigError, HypothesisError, StorageError

CONFIGS = Path(__file__).parent / "configs"


def base_config(**sections) -> dict:
    config = {
        'params': {'kappa': 1.0, 'lambda_yosida': 0.1, 'a0': 0.1, 'a1': 0.1},
        'scheme': {'dt': 0.1},
    }
    config.update(sections)
    return config


def study_config(name: str) -> dict:
    return load_run_config(str(CONFIGS / name))


# ============================================================================
# Loading
# ============================================================================

def test_load_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_run_config(str(tmp_path / "absent.yaml"))


def test_load_rejects_non_mapping(tmp_path):
    path = tmp_path / "list.yaml"
    path.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError, match="mapping"):
        load_run_config(str(path))


def test_load_rejects_invalid_yaml(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("params: [unclosed\n")
    with pytest.raises(ConfigError, match="Invalid YAML"):
        load_run_config(str(path))


def test_load_json_document(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(base_config()))
    assert load_run_config(str(path))['scheme'] == {'dt': 0.1}


def test_bare_name_is_looked_up_in_configs_dir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setattr(settings, 'configs_dir', str(CONFIGS))
    assert load_run_config("minimal.yaml")['name'] == 'minimal'


def test_all_shipped_configs_validate():
    for path in sorted(CONFIGS.glob("*.yaml")):
        run = validate_run_config(load_run_config(str(path)))
        assert run.name == path.stem


@pytest.mark.filterwarnings("error")
def test_settings_read_prefixed_environment(monkeypatch):
    monkeypatch.setenv('ADHESIVE_DEFAULT_SEED', '5')
    monkeypatch.setenv('ADHESIVE_MAX_WORKERS', '2')
    configured = Settings(_env_file=None)
    assert Settings.model_config['env_prefix'] == 'ADHESIVE_'
    assert configured.default_seed == 5
    assert configured.max_workers == 2


# ============================================================================
# Validation
# ============================================================================

def test_missing_section():
    with pytest.raises(ConfigError, match="Missing required field: scheme"):
        validate_run_config({'params': base_config()['params']})


def test_missing_parameter_names_field():
    config = base_config()
    del config['params']['kappa']
    with pytest.raises(ConfigError) as info:
        validate_run_config(config)
    assert str(info.value) == "Missing required field: params.kappa (kappa)"


def test_invalid_field_names_path():
    with pytest.raises(ConfigError, match=r"Invalid field scheme\.dt"):
        validate_run_config(base_config(scheme={'dt': -1.0}))
    with pytest.raises(ConfigError, match=r"Invalid field mesh\.nx"):
        validate_run_config(base_config(mesh={'nx': 'many'}))


def test_unknown_field_is_rejected():
    with pytest.raises(ConfigError, match="Invalid field"):
        validate_run_config(base_config(solver={'kind': 'cg'}))


def test_defaults():
    run = validate_run_config(base_config())
    assert run.name == 'run'
    assert run.seed == settings.default_seed
    assert run.material.viscosity is None
    assert run.initial.z == 1.0
    assert run.scheme.n_steps == 10
    assert run.certification.balance_rel_tol == 1e-3


def test_indefinite_tensor_is_rejected():
    material = {'elasticity': {'kind': 'voigt', 'voigt': [[-1.0 if i == j else 0.0 for j in range(6)]
                                                          for i in range(6)]}}
    with pytest.raises(ConfigError, match="material.elasticity"):
        validate_run_config(base_config(material=material))


def test_fractional_initial_adhesion_needs_zero_perimeter():
    config = base_config(initial={'z': 0.5})
    assert validate_run_config(config).initial.z == 0.5
    config['params']['b'] = 0.1
    with pytest.raises(ConfigError, match="initial.z"):
        validate_run_config(config)


def test_z_pattern_range():
    with pytest.raises(ConfigError, match="z_pattern"):
        validate_run_config(base_config(initial={'z_pattern': [[0.0, 2.0]]}))


# ============================================================================
# Study requirements
# ============================================================================

def test_shipped_studies_satisfy_their_requirements():
    assert validate_nu_study(validate_run_config(study_config("study_nu.yaml"))).include_undamped
    validate_undamped_family(validate_run_config(study_config("study_dimred_undamped.yaml")))
    validate_damped_family(validate_run_config(study_config("study_dimred_damped.yaml")))


def test_nu_list_must_decrease():
    config = study_config("study_nu.yaml")
    config['study']['nu_list'] = [1e-2, 1e-1]
    with pytest.raises(HypothesisError, match="nu_list"):
        validate_nu_study(validate_run_config(config))


def test_eps_list_must_decrease():
    config = study_config("study_dimred_undamped.yaml")
    config['study']['eps_list'] = [0.5, 0.5]
    with pytest.raises(HypothesisError, match="strictly decreasing"):
        validate_undamped_family(validate_run_config(config))


def test_damping_exponent_range():
    config = study_config("study_dimred_undamped.yaml")
    config['study']['delta'] = 3.5
    with pytest.raises(HypothesisError, match="delta"):
        validate_undamped_family(validate_run_config(config))


def test_undamped_family_needs_vanishing_cone_weight():
    config = study_config("study_dimred_undamped.yaml")
    config['study']['nu'] = {'limit': 0.5}
    with pytest.raises(HypothesisError, match="vanish"):
        validate_undamped_family(validate_run_config(config))


def test_family_parameters_stay_positive():
    config = study_config("study_dimred_undamped.yaml")
    config['study']['a1'] = {'limit': 0.05, 'coefficient': -1.0, 'power': 1.0}
    with pytest.raises(HypothesisError, match="a1"):
        validate_undamped_family(validate_run_config(config))


def test_damped_family_needs_inverse_rule():
    config = study_config("study_dimred_damped.yaml")
    config['study']['damping_rule'] = 'power'
    with pytest.raises(HypothesisError, match="inverse"):
        validate_damped_family(validate_run_config(config))


def test_study_requirements_need_kl_dirichlet_field():
    config = study_config("study_dimred_undamped.yaml")
    config['loads']['dirichlet'] = {'kind': 'affine', 'matrix': [[0.0, 0.0, 0.0]] * 3}
    with pytest.raises(HypothesisError, match="kl"):
        validate_undamped_family(validate_run_config(config))


def test_study_section_is_required():
    with pytest.raises(ConfigError):
        validate_nu_study(validate_run_config(base_config()))


# ============================================================================
# Run store
# ============================================================================

def test_json_roundtrip_leaves_no_temp_files(tmp_path):
    store = RunStore(tmp_path / "run")
    store.save_json("summary.json", {'passed': True, 'values': [1.0, 2.5]})
    assert store.load_json("summary.json") == {'passed': True, 'values': [1.0, 2.5]}
    assert [p.name for p in store.out_dir.iterdir()] == ["summary.json"]


def test_json_errors(tmp_path):
    store = RunStore(tmp_path)
    with pytest.raises(StorageError, match="not found"):
        store.load_json("absent.json")
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(StorageError, match="Invalid JSON"):
        store.load_json("bad.json")
    with pytest.raises(StorageError, match="serialize"):
        store.save_json("set.json", {'values': {1, 2}})


def test_csv_cells_are_exact(tmp_path):
    store = RunStore(tmp_path)
    value = 0.1 + 0.2
    store.write_csv("table.csv", ['a', 'b'], [[value, None], [1e-300, 'x']])
    assert (tmp_path / "table.csv").read_text().splitlines()[1] == f"{value!r},"
    columns, rows = read_csv_file(tmp_path / "table.csv")
    assert columns == ['a', 'b']
    assert rows == [[value, None], [1e-300, 'x']]
    with pytest.raises(StorageError, match="row has"):
        store.write_csv("short.csv", ['a', 'b'], [[1.0]])


def test_format_value():
    assert format_value(True) == 'true'
    assert format_value(None) == ''
    assert format_value(3) == '3'


def test_checkpoints(tmp_path):
    store = RunStore(tmp_path)
    assert store.list_checkpoints() == []
    store.save_checkpoint(50, {'step': 50})
    store.save_checkpoint(0, {'step': 0})
    assert store.list_checkpoints() == [0, 50]
    assert store.load_checkpoint(50) == {'step': 50}
    assert (tmp_path / "checkpoints" / "step_000050.json").exists()


def test_store_directory_failure(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(StorageError, match="Cannot create"):
        RunStore(blocker / "sub")
    with pytest.raises(StorageError, match="not found"):
        read_csv_file(tmp_path / "absent.csv")


def test_yaml_and_store_agree_on_floats(tmp_path):
    """Test that YAML-loaded values survive a store round trip unchanged."""
    data = yaml.safe_load("value: 1.0e-3\n")
    store = RunStore(tmp_path)
    store.save_json("v.json", data)
    assert store.load_json("v.json")['value'] == 1e-3
