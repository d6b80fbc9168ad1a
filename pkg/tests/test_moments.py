import math

import numpy as np
import pytest

from squeeze_sim.dynamics import run_schedule
from squeeze_sim.errors import StepTooLarge
from squeeze_sim.moments import (
    MomentVector,
    apply_pulse_to_moments,
    cov_to_moments,
    effective_moment_rhs,
    integrate_effective,
    integrate_moments,
    moment_rhs,
    moments_to_cov,
)
from squeeze_sim.params import GaussianState, load_preset, thermal_initial_state
from squeeze_sim.schedule import four_pulse_schedule


def test_vacuum_is_fixed_point():
    p = load_preset("fig2").with_overrides(G=0.0, kappa=0.0, gamma=0.3, n_m=0.0)
    d = moment_rhs(MomentVector().to_array(), p, 0.0)
    assert np.allclose(d, 0.0)


def test_decoupled_mechanical_relaxation():
    # G = 0, Delta' = 0: d<b'b>/dt = -gamma <b'b> + gamma n_m
    p = load_preset("fig2").with_overrides(G=0.0, gamma=0.25, n_m=3.0)
    m = MomentVector(nbb=1.0).to_array()
    d = moment_rhs(m, p, 0.0)
    assert d[1] == pytest.approx(-0.25 * 1.0 + 0.25 * 3.0)
    assert np.allclose(np.delete(d, 1), 0.0)


def test_pulse_phase_map():
    m = MomentVector(naa=2.0, nbb=1.0, ab=1 + 1j, ab_dag=2 - 1j, aa=3j, bb=0.5).to_array()
    out = apply_pulse_to_moments(m, 0.4)
    ph = np.exp(0.4j)
    assert out[0] == m[0] and out[1] == m[1] and out[5] == m[5]
    assert out[2] == pytest.approx(m[2] * ph)
    assert out[3] == pytest.approx(m[3] * ph)
    assert out[4] == pytest.approx(m[4] * ph * ph)


def test_pulse_inverse_and_full_turn():
    m = MomentVector(ab=1 + 2j, ab_dag=-1j, aa=0.3, bb=1.0).to_array()
    back = apply_pulse_to_moments(apply_pulse_to_moments(m, 1.1), -1.1)
    assert np.allclose(back, m, atol=1e-12)
    assert np.allclose(apply_pulse_to_moments(m, 2.0 * math.pi), m, atol=1e-12)


def test_moment_cov_mapping_roundtrip():
    rng = np.random.default_rng(5)
    M = rng.normal(size=(4, 4))
    cov = M @ M.T + 4.0 * np.eye(4)
    state = GaussianState(np.zeros(4), cov)
    assert np.allclose(moments_to_cov(cov_to_moments(state)), cov, atol=1e-12)


def test_oracle_matches_gaussian_dynamics():
    p = load_preset("fig2").with_overrides(kappa=0.1, gamma=0.01, n_m=1.0)
    sch = four_pulse_schedule(p.phi, p.t0, 4)
    traj = run_schedule(thermal_initial_state(0.0, p.n_th), p, sch)
    times, samples = integrate_moments(MomentVector.thermal(0.0, p.n_th), p, sch)
    for t, mom in zip(times, samples):
        i = int(np.argmin(np.abs(traj.t - t)))
        V = moments_to_cov(mom)
        assert traj.var_XM[i] == pytest.approx(V[2, 2], rel=1e-8)
        assert traj.var_PM[i] == pytest.approx(V[3, 3], rel=1e-8)


def test_step_ceiling_enforced():
    p = load_preset("fig2")
    sch = four_pulse_schedule(p.phi, p.t0, 2)
    with pytest.raises(StepTooLarge):
        integrate_moments(MomentVector.thermal(0.0, 0.0), p, sch, step_divisor=4)


def test_effective_rhs_reduction():
    # d<b^2>/dt at sigma with nbb = 0, bb = 0 gives -2i sigma (2*0+1)
    d = effective_moment_rhs(np.array([0.0 + 0.0j, 0.0 + 0.0j]), 0.3, 1.0, 0.0, 0.0)
    assert d[1] == pytest.approx(-2j * 0.3)
    # relaxation term present in occupation equation
    d = effective_moment_rhs(np.array([2.0 + 0.0j, 0.0 + 0.0j]), 0.0, 1.0, 0.4, 1.0)
    assert d[0] == pytest.approx(-0.4 * 2.0 + 0.4 * 1.0)


def test_effective_model_reaches_squeezing_limit():
    # gamma = 0, n_th = 0: squeezed variance at t_s equals omega_m/(omega_m+4 sigma)
    sigma = 3.75
    ws = math.sqrt(1.0 + 4.0 * sigma)
    t_s = math.pi / (2.0 * ws)
    nbb, re_b2, im_b2 = integrate_effective(sigma, 1.0, 0.0, 0.0, 0.0, [t_s])
    var_ym = 1.0 + 2.0 * (nbb[-1] - math.hypot(re_b2[-1], im_b2[-1]))
    assert var_ym == pytest.approx(1.0 / 16.0, abs=1e-6)


def test_integrate_effective_grid_validation():
    with pytest.raises(ValueError):
        integrate_effective(0.1, 1.0, 0.0, 0.0, 0.0, [1.0, 0.5])
