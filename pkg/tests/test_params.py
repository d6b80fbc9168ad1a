import math

import numpy as np
import pytest

from squeeze_sim.errors import NonPositive, PhiOutOfRange, UnknownPreset, UnphysicalState
from squeeze_sim.params import (
    GaussianState,
    SystemParams,
    load_preset,
    params_from_dict,
    params_from_file,
    params_to_dict,
    params_to_file,
    thermal_initial_state,
    validate_params,
)


def test_defaults_validate_cleanly():
    p, warnings = validate_params(SystemParams(G=20.0, phi=math.pi / 2, t0=0.01))
    assert p.omega_m == 1.0
    assert warnings == []


@pytest.mark.parametrize("field,value", [
    ("omega_m", 0.0), ("omega_m", -1.0), ("t0", 0.0), ("kappa", -0.1),
    ("gamma", -1e-9), ("n_th", -0.5), ("n_m", -1.0), ("G", -2.0),
])
def test_hard_invariants_raise(field, value):
    with pytest.raises(NonPositive):
        validate_params(SystemParams(**{field: value}))


def test_phi_range_enforced():
    with pytest.raises(PhiOutOfRange):
        validate_params(SystemParams(phi=3.5))


def test_soft_conditions_warn_not_raise():
    # slow-pulse and weak-coupling regimes are legal but flagged
    _, warnings = validate_params(SystemParams(G=1.0, t0=0.2, phi=math.pi / 2))
    assert any("omega_m*t0" in w for w in warnings)
    assert any("coupling" in w for w in warnings)


def test_gt0_warning():
    _, warnings = validate_params(SystemParams(G=30.0, t0=0.02, phi=math.pi / 2))
    assert any("G*t0" in w for w in warnings)


def test_presets():
    fig2 = load_preset("fig2")
    assert fig2.G == pytest.approx(math.sqrt(750.0))
    assert fig2.t0 == 0.01
    assert load_preset("fig3_neg").phi == -math.pi / 2
    assert load_preset("fig3_pos").phi == math.pi / 2
    with pytest.raises(UnknownPreset):
        load_preset("fig99")


def test_with_overrides_returns_new_instance():
    p = load_preset("fig4")
    q = p.with_overrides(kappa=0.1)
    assert q.kappa == 0.1 and p.kappa == 0.0
    assert q.G == p.G


def test_thermal_initial_state():
    s = thermal_initial_state(0.0, 2.0)
    assert np.allclose(s.mean, 0.0)
    assert np.allclose(s.cov, np.diag([1.0, 1.0, 5.0, 5.0]))


def test_gaussian_state_symmetrizes_small_asymmetry():
    cov = np.eye(4)
    cov[0, 1] = 1e-14  # asymmetric at rounding level
    s = GaussianState(np.zeros(4), cov)
    assert np.array_equal(s.cov, s.cov.T)


def test_gaussian_state_rejects_gross_asymmetry():
    cov = np.eye(4)
    cov[0, 1] = 0.5
    with pytest.raises(UnphysicalState):
        GaussianState(np.zeros(4), cov)


def test_gaussian_state_rejects_nonfinite():
    cov = np.eye(4)
    cov[2, 2] = np.inf
    with pytest.raises(UnphysicalState):
        GaussianState(np.zeros(4), cov)


def test_state_blocks():
    cov = np.diag([1.0, 2.0, 3.0, 4.0])
    s = GaussianState(np.zeros(4), cov)
    assert np.allclose(s.optical_block, np.diag([1.0, 2.0]))
    assert np.allclose(s.mechanical_block, np.diag([3.0, 4.0]))
    assert np.allclose(s.cross_block, 0.0)


def test_params_serialization_roundtrip(tmp_path):
    p = load_preset("fig3_neg").with_overrides(kappa=0.05, n_m=3.0)
    assert params_from_dict(params_to_dict(p)) == p
    path = tmp_path / "params.json"
    params_to_file(p, path)
    assert params_from_file(path) == p
