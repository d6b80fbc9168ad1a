"""Gaussian-state propagation through a pulse schedule.

Between pulses the drift/diffusion coefficients are constant, so each free
interval is advanced exactly with the augmented-matrix (Van Loan) exponential;
pulses are instantaneous symplectic rotations of the optical quadratures.
A fixed-step RK4 path over the same moment equations is kept as an internal
cross-check selectable per run.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import NonFiniteResult
from .params import GaussianState, SqueezingReport, SystemParams, params_to_dict
from .schedule import FREE, PULSE, PulseSchedule, schedule_to_text

CSV_SCHEMA_HEADER = "# squeeze-sim schema v1"

TRAJECTORY_COLUMNS = (
    "t", "var_XL", "var_PL", "var_XM", "var_PM", "var_YM", "theta",
    "cov_XMPM", "det_mech", "cross_norm",
    "mean_XL", "mean_PL", "mean_XM", "mean_PM",
)


@dataclass(frozen=True)
class DriftDiffusion:
    """First-moment drift A and covariance diffusion D (dV/dt = AV + VA' + D)."""

    A: np.ndarray
    D: np.ndarray


def drift_matrix(params: SystemParams, delta_prime: float) -> np.ndarray:
    """Quadrature drift for real coupling G, rows over (X_L, P_L, X_M, P_M)."""
    return drift_matrix_general(
        params.omega_m, params.kappa, params.gamma, delta_prime, params.G + 0.0j
    )


def drift_matrix_general(omega_m, kappa, gamma, delta_prime, G: complex) -> np.ndarray:
    """Drift for complex coupling G = G_R + i*G_I (interaction (G a' + G* a) X_M)."""
    gr, gi = G.real, G.imag
    return np.array(
        [
            [-kappa / 2.0, -delta_prime, 2.0 * gi, 0.0],
            [delta_prime, -kappa / 2.0, -2.0 * gr, 0.0],
            [0.0, 0.0, -gamma / 2.0, omega_m],
            [-2.0 * gr, -2.0 * gi, -omega_m, -gamma / 2.0],
        ]
    )


def diffusion_matrix(params: SystemParams) -> np.ndarray:
    """Vacuum optical bath plus mechanical bath at occupation n_m."""
    mech = params.gamma * (2.0 * params.n_m + 1.0)
    return np.diag([params.kappa, params.kappa, mech, mech])


def drift_diffusion(params: SystemParams, delta_prime: float | None = None) -> DriftDiffusion:
    if delta_prime is None:
        delta_prime = params.delta0_prime
    return DriftDiffusion(drift_matrix(params, delta_prime), diffusion_matrix(params))


def interval_propagator(dd: DriftDiffusion, duration: float):
    """Exact (Phi, Q): mean -> Phi mean, cov -> Phi cov Phi' + Q.

    Van Loan construction: exponentiate [[-A, D], [0, A']] * duration; the
    lower-right block transposed is Phi and Phi times the upper-right block
    is the accumulated diffusion integral Q.
    """
    n = dd.A.shape[0]
    M = np.zeros((2 * n, 2 * n))
    M[:n, :n] = -dd.A
    M[:n, n:] = dd.D
    M[n:, n:] = dd.A.T
    E = expm(M * duration)
    phi = E[n:, n:].T
    Q = phi @ E[:n, n:]
    return phi, 0.5 * (Q + Q.T)


def evolve_interval(state: GaussianState, dd: DriftDiffusion, duration: float) -> GaussianState:
    """Exact constant-coefficient evolution over one free interval."""
    if duration < 0:
        raise ValueError("duration must be >= 0")
    if duration == 0:
        return state
    phi, Q = interval_propagator(dd, duration)
    return _advance(state, phi, Q)


def _advance(state: GaussianState, phi: np.ndarray, Q: np.ndarray) -> GaussianState:
    mean = phi @ state.mean
    cov = phi @ state.cov @ phi.T + Q
    if not np.all(np.isfinite(cov)):
        raise NonFiniteResult("covariance overflow during interval evolution")
    return GaussianState(mean, 0.5 * (cov + cov.T))


def pulse_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    S = np.eye(4)
    S[0, 0] = c
    S[0, 1] = -s
    S[1, 0] = s
    S[1, 1] = c
    return S


def apply_pulse(state: GaussianState, theta: float) -> GaussianState:
    """Instantaneous rotation of the optical quadratures by theta."""
    S = pulse_matrix(theta)
    return GaussianState(S @ state.mean, S @ state.cov @ S.T)


def squeezing_report(state: GaussianState) -> SqueezingReport:
    """Eigen-decomposition of the mechanical block.

    var_YM is the smaller eigenvalue; theta follows the Y_M = b e^{-i theta/2}
    + h.c. convention (theta = 0: X_M squeezed, theta = pi: P_M squeezed).
    """
    B = state.mechanical_block
    evals, evecs = np.linalg.eigh(B)
    v = evecs[:, 0]  # minor axis
    if v[0] < 0 or (v[0] == 0 and v[1] < 0):
        v = -v
    theta = (2.0 * math.atan2(v[1], v[0])) % (2.0 * math.pi)
    return SqueezingReport(
        var_XM=float(B[0, 0]),
        var_PM=float(B[1, 1]),
        var_YM=float(evals[0]),
        theta=float(theta),
        cov_XP=float(B[0, 1]),
        det_mech=float(np.linalg.det(B)),
    )


class Trajectory:
    """Time-stamped record of one propagated schedule."""

    def __init__(self, schedule: PulseSchedule):
        self.schedule = schedule
        self.times: list[float] = []
        self.reports: list[SqueezingReport] = []
        self.var_XL: list[float] = []
        self.var_PL: list[float] = []
        self.cross_norm: list[float] = []
        self.means: list[np.ndarray] = []
        self.final_state: GaussianState | None = None

    def record(self, t: float, state: GaussianState) -> None:
        self.times.append(t)
        self.reports.append(squeezing_report(state))
        self.var_XL.append(float(state.cov[0, 0]))
        self.var_PL.append(float(state.cov[1, 1]))
        self.cross_norm.append(float(np.linalg.norm(state.cross_block)))
        self.means.append(np.array(state.mean))

    # -- queries ---------------------------------------------------------

    @property
    def t(self) -> np.ndarray:
        return np.array(self.times)

    @property
    def var_YM(self) -> np.ndarray:
        return np.array([r.var_YM for r in self.reports])

    @property
    def var_XM(self) -> np.ndarray:
        return np.array([r.var_XM for r in self.reports])

    @property
    def var_PM(self) -> np.ndarray:
        return np.array([r.var_PM for r in self.reports])

    @property
    def theta(self) -> np.ndarray:
        return np.array([r.theta for r in self.reports])

    @property
    def det_mech(self) -> np.ndarray:
        return np.array([r.det_mech for r in self.reports])

    def min_var_YM(self) -> tuple[float, float]:
        """(minimum squeezed variance, time of the minimum)."""
        i = int(np.argmin(self.var_YM))
        return float(self.var_YM[i]), float(self.times[i])

    # -- serialization ---------------------------------------------------

    def rows(self) -> np.ndarray:
        out = np.empty((len(self.times), len(TRAJECTORY_COLUMNS)))
        for i, (t, r, vxl, vpl, cn, m) in enumerate(
            zip(self.times, self.reports, self.var_XL, self.var_PL, self.cross_norm, self.means)
        ):
            out[i] = (t, vxl, vpl, r.var_XM, r.var_PM, r.var_YM, r.theta,
                      r.cov_XP, r.det_mech, cn, m[0], m[1], m[2], m[3])
        return out

    def to_csv(self, path) -> None:
        header = CSV_SCHEMA_HEADER + "\n" + ",".join(TRAJECTORY_COLUMNS)
        np.savetxt(path, self.rows(), delimiter=",", header=header, comments="",
                   fmt="%.12g")

    def to_json(self, path) -> None:
        payload = {
            "schema": "squeeze-sim schema v1",
            "columns": list(TRAJECTORY_COLUMNS),
            "rows": self.rows().tolist(),
            "schedule": schedule_to_text(self.schedule),
            "switch_time": self.schedule.switch_time,
        }
        with open(path, "w") as fh:
            json.dump(payload, fh)


def run_schedule(
    initial: GaussianState,
    params: SystemParams,
    schedule: PulseSchedule,
    record_every: float | None = None,
    method: str = "exact",
) -> Trajectory:
    """Propagate a state through a schedule, sampling at event boundaries.

    Free intervals longer than record_every are subdivided for sampling.
    method="rk4" integrates the same moment equations with fixed steps
    (step <= t0/200) instead of exact exponentials.
    """
    if record_every is not None and record_every <= 0:
        raise ValueError("record_every must be > 0")
    dd = drift_diffusion(params)
    traj = Trajectory(schedule)
    state = initial
    t = 0.0
    traj.record(t, state)
    cache: dict[float, tuple[np.ndarray, np.ndarray]] = {}

    for ev in schedule.events:
        if ev.kind == PULSE:
            state = apply_pulse(state, ev.angle)
            continue
        chunks = [ev.duration]
        if record_every is not None and ev.duration > record_every:
            n = int(math.ceil(ev.duration / record_every))
            chunks = [ev.duration / n] * n
        for dur in chunks:
            if method == "exact":
                prop = cache.get(dur)
                if prop is None:
                    prop = interval_propagator(dd, dur)
                    cache[dur] = prop
                state = _advance(state, *prop)
            elif method == "rk4":
                state = _evolve_rk4(state, dd, dur, max_step=ev.duration / 200.0)
            else:
                raise ValueError(f"unknown method {method!r}")
            t += dur
            traj.record(t, state)
    traj.final_state = state
    return traj


def _evolve_rk4(state: GaussianState, dd: DriftDiffusion, duration: float,
                max_step: float) -> GaussianState:
    """Fixed-step RK4 on dm/dt = A m, dV/dt = A V + V A' + D."""
    n_steps = max(1, int(math.ceil(duration / max_step)))
    h = duration / n_steps
    A, D = dd.A, dd.D

    def rhs(m, V):
        return A @ m, A @ V + V @ A.T + D

    m = np.array(state.mean)
    V = np.array(state.cov)
    for _ in range(n_steps):
        k1m, k1v = rhs(m, V)
        k2m, k2v = rhs(m + 0.5 * h * k1m, V + 0.5 * h * k1v)
        k3m, k3v = rhs(m + 0.5 * h * k2m, V + 0.5 * h * k2v)
        k4m, k4v = rhs(m + h * k3m, V + h * k3v)
        m = m + (h / 6.0) * (k1m + 2 * k2m + 2 * k3m + k4m)
        V = V + (h / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v)
    if not np.all(np.isfinite(V)):
        raise NonFiniteResult("covariance overflow during RK4 interval evolution")
    return GaussianState(m, 0.5 * (V + V.T))


def erased_information_fraction(traj: Trajectory, period: float) -> float:
    """Cross-block norm at the first period boundary over its in-period peak.

    Operationalizes the claim that a full four-pulse sequence erases the
    mechanical information written on the optical field.
    """
    t = traj.t
    mask = t <= period * (1 + 1e-9)
    norms = np.array(traj.cross_norm)[mask]
    peak = norms.max()
    if peak == 0:
        return 0.0
    i_end = int(np.argmin(np.abs(t - period)))
    return float(traj.cross_norm[i_end] / peak)
