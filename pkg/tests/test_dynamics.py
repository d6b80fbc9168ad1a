import json
import math

import numpy as np
import pytest

from squeeze_sim.dynamics import (
    CSV_SCHEMA_HEADER,
    TRAJECTORY_COLUMNS,
    apply_pulse,
    drift_diffusion,
    drift_matrix,
    drift_matrix_general,
    erased_information_fraction,
    evolve_interval,
    interval_propagator,
    pulse_matrix,
    run_schedule,
    squeezing_report,
)
from squeeze_sim.errors import NonFiniteResult
from squeeze_sim.params import GaussianState, load_preset, thermal_initial_state
from squeeze_sim.schedule import four_pulse_schedule


def test_drift_matrix_structure():
    p = load_preset("fig2").with_overrides(kappa=0.3, gamma=0.02)
    A = drift_matrix(p, delta_prime=0.5)
    G = p.G
    expected = np.array([
        [-0.15, -0.5, 0.0, 0.0],
        [0.5, -0.15, -2.0 * G, 0.0],
        [0.0, 0.0, -0.01, 1.0],
        [-2.0 * G, 0.0, -1.0, -0.01],
    ])
    assert np.allclose(A, expected)


def test_drift_matrix_general_reduces_to_real():
    p = load_preset("fig2")
    assert np.allclose(drift_matrix(p, 0.0),
                       drift_matrix_general(1.0, 0.0, 0.0, 0.0, p.G + 0.0j))


def test_pulse_inverse_identity():
    state = thermal_initial_state(0.0, 1.0)
    state = GaussianState(np.array([0.3, -0.2, 1.0, 0.5]), state.cov)
    for theta in (0.3, math.pi / 2, -2.0):
        back = apply_pulse(apply_pulse(state, theta), -theta)
        assert np.allclose(back.mean, state.mean, atol=1e-12)
        assert np.allclose(back.cov, state.cov, atol=1e-12)


def test_pulse_matrix_is_optical_rotation():
    S = pulse_matrix(math.pi / 2)
    assert np.allclose(S[:2, :2], [[0.0, -1.0], [1.0, 0.0]], atol=1e-15)
    assert np.allclose(S[2:, 2:], np.eye(2))


def test_interval_propagator_matches_pure_decay():
    # G = 0 decouples the modes: optical variance relaxes to 1 at rate kappa
    p = load_preset("fig2").with_overrides(G=0.0, kappa=0.8, gamma=0.0)
    dd = drift_diffusion(p)
    state = GaussianState(np.array([2.0, 0.0, 0.0, 0.0]), np.diag([5.0, 5.0, 1.0, 1.0]))
    out = evolve_interval(state, dd, 0.7)
    decay = math.exp(-0.8 * 0.7)
    assert out.mean[0] == pytest.approx(2.0 * math.cos(0.0) * math.exp(-0.4 * 0.7))
    assert out.cov[0, 0] == pytest.approx(1.0 + 4.0 * decay, rel=1e-10)
    assert out.cov[2, 2] == pytest.approx(1.0)


def test_interval_propagator_zero_duration():
    p = load_preset("fig2")
    state = thermal_initial_state(0.0, 1.0)
    assert evolve_interval(state, drift_diffusion(p), 0.0) is state
    with pytest.raises(ValueError):
        evolve_interval(state, drift_diffusion(p), -0.1)


def test_propagator_accumulates_diffusion():
    p = load_preset("fig2").with_overrides(G=0.0, gamma=0.5, n_m=2.0)
    phi, Q = interval_propagator(drift_diffusion(p), 50.0)
    # mechanical block equilibrates to (1+2n_m) I; tolerance covers the
    # residual e^{-gamma t/2} transient and conditioning of the augmented
    # exponential at durations much longer than 1/gamma
    assert np.allclose(Q[2:, 2:], 5.0 * np.eye(2), atol=5e-5)
    assert np.allclose(phi[2:, 2:], 0.0, atol=1e-5)


def test_squeezing_report_axes():
    V = np.eye(4)
    V[2, 2], V[3, 3] = 0.25, 4.0
    r = squeezing_report(GaussianState(np.zeros(4), V))
    assert r.var_YM == pytest.approx(0.25)
    assert r.theta == pytest.approx(0.0)  # X_M squeezed
    V[2, 2], V[3, 3] = 4.0, 0.25
    r = squeezing_report(GaussianState(np.zeros(4), V))
    assert r.var_YM == pytest.approx(0.25)
    assert r.theta == pytest.approx(math.pi)  # P_M squeezed
    assert r.det_mech == pytest.approx(1.0)


def test_run_schedule_rk4_matches_exact():
    p = load_preset("fig2").with_overrides(kappa=0.1, gamma=0.01, n_m=1.0)
    sch = four_pulse_schedule(p.phi, p.t0, 4)
    init = thermal_initial_state(0.0, p.n_th)
    exact = run_schedule(init, p, sch)
    rk4 = run_schedule(init, p, sch, method="rk4")
    assert np.allclose(exact.var_YM, rk4.var_YM, rtol=1e-9, atol=1e-11)
    assert np.allclose(exact.var_XM, rk4.var_XM, rtol=1e-9)


def test_run_schedule_unknown_method():
    p = load_preset("fig2")
    sch = four_pulse_schedule(p.phi, p.t0, 1)
    with pytest.raises(ValueError):
        run_schedule(thermal_initial_state(0.0, 0.0), p, sch, method="euler")


def test_record_every_subdivides():
    p = load_preset("fig2")
    sch = four_pulse_schedule(p.phi, p.t0, 1)
    traj = run_schedule(thermal_initial_state(0.0, 0.0), p, sch, record_every=0.0025)
    assert len(traj.t) == 17  # t=0 plus 4 samples per interval
    with pytest.raises(ValueError):
        run_schedule(thermal_initial_state(0.0, 0.0), p, sch, record_every=-1.0)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_divergence_raises_nonfinite():
    # strongly unstable regime pushed far past overflow
    p = load_preset("fig2").with_overrides(G=200.0, phi=-math.pi / 2, t0=0.05)
    sch = four_pulse_schedule(p.phi, p.t0, 600)
    with pytest.raises(NonFiniteResult):
        run_schedule(thermal_initial_state(0.0, 0.0), p, sch)


def test_erased_information_fraction_small_after_period():
    p = load_preset("fig2")
    sch = four_pulse_schedule(p.phi, p.t0, 1)
    traj = run_schedule(thermal_initial_state(0.0, 0.0), p, sch)
    frac = erased_information_fraction(traj, 4.0 * p.t0)
    assert 0.0 <= frac < 0.10


def test_trajectory_exports(tmp_path):
    p = load_preset("fig2")
    sch = four_pulse_schedule(p.phi, p.t0, 2)
    traj = run_schedule(thermal_initial_state(0.0, 0.0), p, sch)

    csv_path = tmp_path / "traj.csv"
    traj.to_csv(csv_path)
    lines = csv_path.read_text().splitlines()
    assert lines[0] == CSV_SCHEMA_HEADER
    assert lines[1] == ",".join(TRAJECTORY_COLUMNS)
    data = np.loadtxt(csv_path, delimiter=",", skiprows=2)
    assert data.shape == (9, len(TRAJECTORY_COLUMNS))
    assert np.allclose(data[:, 0], traj.t)

    json_path = tmp_path / "traj.json"
    traj.to_json(json_path)
    payload = json.loads(json_path.read_text())
    assert payload["columns"] == list(TRAJECTORY_COLUMNS)
    assert len(payload["rows"]) == 9
    assert "schedule" in payload
