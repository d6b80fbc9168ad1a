"""Independent cross-check path: complex second-moment integration.

Works directly with the operator moments <a'a>, <b'b>, <ab>, <ab'>, <a^2>,
<b^2> in the (a, b) basis, integrated by fixed-step RK4.  Deliberately a
different parameterization and integrator from the covariance path so that
agreement between the two is evidential rather than tautological.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import StepTooLarge
from .params import GaussianState, SystemParams
from .schedule import FREE, PULSE, PulseSchedule

LOCAL_ERROR_CEILING = 1e-9


@dataclass(frozen=True)
class MomentVector:
    """Second moments; conjugate moments are implied."""

    naa: float = 0.0     # <a'a>
    nbb: float = 0.0     # <b'b>
    ab: complex = 0.0    # <ab>
    ab_dag: complex = 0.0  # <ab'>
    aa: complex = 0.0    # <a^2>
    bb: complex = 0.0    # <b^2>

    def to_array(self) -> np.ndarray:
        return np.array([self.naa, self.nbb, self.ab, self.ab_dag, self.aa, self.bb],
                        dtype=complex)

    @staticmethod
    def from_array(v: np.ndarray) -> "MomentVector":
        return MomentVector(naa=v[0].real, nbb=v[1].real, ab=v[2], ab_dag=v[3],
                            aa=v[4], bb=v[5])

    @staticmethod
    def thermal(n_opt: float, n_mech: float) -> "MomentVector":
        return MomentVector(naa=n_opt, nbb=n_mech)


def moment_rhs(m: np.ndarray, params: SystemParams, delta_prime: float) -> np.ndarray:
    """Linear moment equations of the full two-mode model (real coupling G)."""
    G = params.G
    kappa, gamma = params.kappa, params.gamma
    wm, nm = params.omega_m, params.n_m
    naa, nbb, ab, ab_dag, aa, bb = m
    out = np.empty(6, dtype=complex)
    out[0] = -kappa * naa - 2.0 * G * (ab + ab_dag).imag
    out[1] = -gamma * nbb + gamma * nm - 2.0 * G * (ab - ab_dag).imag
    out[2] = (
        (1j * delta_prime - 1j * wm - (kappa + gamma) / 2.0) * ab
        - 1j * G * (bb + nbb + aa + naa + 1.0)
    )
    out[3] = (
        (1j * delta_prime + 1j * wm - (kappa + gamma) / 2.0) * ab_dag
        - 1j * G * (nbb + 1.0 + np.conj(bb))
        + 1j * G * (aa + naa + 1.0)
    )
    out[4] = (2j * delta_prime - kappa) * aa - 2j * G * (ab + ab_dag)
    out[5] = (-2j * wm - gamma) * bb - 2j * G * (ab + np.conj(ab_dag))
    return out


def apply_pulse_to_moments(m: np.ndarray, theta: float) -> np.ndarray:
    """Phase map a -> a e^{i theta} on the moment vector."""
    ph = cmath.exp(1j * theta)
    out = np.array(m, dtype=complex)
    out[2] *= ph
    out[3] *= ph
    out[4] *= ph * ph
    return out


def _rk4_span(m, rhs, t_span, n_steps):
    h = t_span / n_steps
    for _ in range(n_steps):
        k1 = rhs(m)
        k2 = rhs(m + 0.5 * h * k1)
        k3 = rhs(m + 0.5 * h * k2)
        k4 = rhs(m + h * k3)
        m = m + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return m


def integrate_moments(
    initial: MomentVector,
    params: SystemParams,
    schedule: PulseSchedule,
    step_divisor: int = 500,
) -> tuple[np.ndarray, list[MomentVector]]:
    """RK4 through a schedule; samples after every free interval.

    Each interval is also re-integrated with doubled steps; if the two
    endpoints differ by more than the local-error ceiling the step is
    considered too coarse.
    """
    def rhs(m):
        return moment_rhs(m, params, params.delta0_prime)

    m = initial.to_array()
    t = 0.0
    times = [0.0]
    samples = [initial]
    for ev in schedule.events:
        if ev.kind == PULSE:
            m = apply_pulse_to_moments(m, ev.angle)
            continue
        n_steps = max(1, int(math.ceil(step_divisor * ev.duration / params.t0)))
        m_fine = _rk4_span(m, rhs, ev.duration, n_steps)
        m_check = _rk4_span(m, rhs, ev.duration, max(1, n_steps // 2))
        err = np.max(np.abs(m_fine - m_check))
        scale = max(1.0, float(np.max(np.abs(m_fine))))
        if err / scale > LOCAL_ERROR_CEILING:
            raise StepTooLarge(
                f"moment integrator error estimate {err / scale:.3e} > {LOCAL_ERROR_CEILING}"
            )
        m = m_fine
        t += ev.duration
        times.append(t)
        samples.append(MomentVector.from_array(m))
    return np.array(times), samples


def effective_moment_rhs(y: np.ndarray, sigma, omega_m, gamma, n_m) -> np.ndarray:
    """Reduced model after adiabatic elimination of the optical mode.

    y = (nbb, bb) complex pair.
    """
    nbb, bb = y
    out = np.empty(2, dtype=complex)
    out[0] = -gamma * nbb + gamma * n_m - 4.0 * sigma * bb.imag
    out[1] = (-gamma - 2j * omega_m - 4j * sigma) * bb - 2j * sigma * (2.0 * nbb.real + 1.0)
    return out


def integrate_effective(sigma, omega_m, gamma, n_th, n_m, times, steps_per_unit=2000):
    """Fixed-step RK4 of the reduced model sampled on a given time grid.

    Returns arrays (nbb, re_b2, im_b2) aligned with times.
    """
    times = np.asarray(times, dtype=float)
    y = np.array([n_th + 0.0j, 0.0 + 0.0j])

    def rhs(y):
        return effective_moment_rhs(y, sigma, omega_m, gamma, n_m)

    nbb = np.empty(len(times))
    re_b2 = np.empty(len(times))
    im_b2 = np.empty(len(times))
    t_prev = 0.0
    for i, t in enumerate(times):
        span = t - t_prev
        if span > 0:
            n_steps = max(1, int(math.ceil(span * steps_per_unit)))
            y = _rk4_span(y, rhs, span, n_steps)
            t_prev = t
        elif span < 0:
            raise ValueError("times must be non-decreasing")
        nbb[i] = y[0].real
        re_b2[i] = y[1].real
        im_b2[i] = y[1].imag
    return nbb, re_b2, im_b2


def moments_to_cov(m: MomentVector) -> np.ndarray:
    """Map complex moments to the 4x4 quadrature covariance (zero mean)."""
    V = np.empty((4, 4))
    V[0, 0] = 1.0 + 2.0 * (m.naa + m.aa.real)
    V[1, 1] = 1.0 + 2.0 * (m.naa - m.aa.real)
    V[0, 1] = V[1, 0] = 2.0 * m.aa.imag
    V[2, 2] = 1.0 + 2.0 * (m.nbb + m.bb.real)
    V[3, 3] = 1.0 + 2.0 * (m.nbb - m.bb.real)
    V[2, 3] = V[3, 2] = 2.0 * m.bb.imag
    w = m.ab + m.ab_dag
    z = m.ab - m.ab_dag
    V[0, 2] = V[2, 0] = 2.0 * w.real
    V[0, 3] = V[3, 0] = 2.0 * z.imag
    V[1, 2] = V[2, 1] = 2.0 * w.imag
    V[1, 3] = V[3, 1] = -2.0 * z.real
    return V


def cov_to_moments(state: GaussianState) -> MomentVector:
    """Inverse of moments_to_cov for zero-mean states."""
    V = state.cov
    naa = (V[0, 0] + V[1, 1] - 2.0) / 4.0
    aa = complex((V[0, 0] - V[1, 1]) / 4.0, V[0, 1] / 2.0)
    nbb = (V[2, 2] + V[3, 3] - 2.0) / 4.0
    bb = complex((V[2, 2] - V[3, 3]) / 4.0, V[2, 3] / 2.0)
    w = complex(V[0, 2] / 2.0, V[1, 2] / 2.0)
    z = complex(-V[1, 3] / 2.0, V[0, 3] / 2.0)
    ab = (w + z) / 2.0
    ab_dag = (w - z) / 2.0
    return MomentVector(naa=naa, nbb=nbb, ab=ab, ab_dag=ab_dag, aa=aa, bb=bb)
