"""Closed-form predictions for the pulsed squeezing protocol.

Houses the effective-model quantities (sigma, omega_s, epsilon, t_s, t'),
the lossless variance evolution in all three regimes, the dissipative
closed-form moments, steady states, the parametric-resonance envelope, the
drive-matching condition for detuning switches, and feasibility arithmetic.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBranch, NegativeTime, OutOfRegime
from .params import EffectiveModel, SystemParams

PLANCK_H = 6.62607015e-34  # J/Hz, exact

REGIME_TOL = 1e-12


def effective_sigma(G: float, t0: float, phi: float) -> float:
    """Squeezing coefficient of the effective mechanical Hamiltonian."""
    if t0 <= 0:
        raise ValueError(f"t0 must be > 0, got {t0}")
    return 0.5 * G**2 * t0 * math.sin(phi)


def classify_regime(sigma: float, omega_m: float, tol: float = REGIME_TOL) -> str:
    threshold = -omega_m / 4.0
    if sigma > threshold + tol:
        return "Stable"
    if sigma < threshold - tol:
        return "Unstable"
    return "Threshold"


def effective_model(params: SystemParams) -> EffectiveModel:
    """Derived analytic quantities for one parameter set."""
    sigma = effective_sigma(params.G, params.t0, params.phi)
    omega_m = params.omega_m
    regime = classify_regime(sigma, omega_m)
    mu = 0.25 * params.G * params.t0 * (1.0 + cmath.exp(1j * params.phi))
    omega_s_prime = omega_m + 4.0 * sigma

    omega_s = epsilon = t_s = t_prime = None
    if regime == "Stable":
        omega_s = math.sqrt(omega_m * (omega_m + 4.0 * sigma))
        t_s = math.pi / (2.0 * omega_s)
        t_prime = 2.0 * params.t0 * (1.0 + 2.0 * sigma / omega_m)
    elif regime == "Unstable":
        epsilon = math.sqrt(-omega_m * (omega_m + 4.0 * sigma))
    else:
        omega_s = 0.0
        epsilon = 0.0
    return EffectiveModel(
        sigma=sigma,
        omega_s=omega_s,
        epsilon=epsilon,
        omega_s_prime=omega_s_prime,
        mu=mu,
        t_s=t_s,
        t_prime=t_prime,
        regime=regime,
    )


def squeezing_limit(sigma: float, omega_m: float, n_th: float) -> float:
    """Minimal variance of the squeezed quadrature (lossless, below threshold)."""
    if sigma <= -omega_m / 4.0:
        raise OutOfRegime(f"sigma = {sigma} at or above threshold -omega_m/4")
    if sigma < 0:
        return (1.0 + 2.0 * n_th) * (omega_m + 4.0 * sigma) / omega_m
    return (1.0 + 2.0 * n_th) * omega_m / (omega_m + 4.0 * sigma)


def variance_evolution(sigma, omega_m, n_th, t):
    """Lossless (gamma = 0) closed forms for (var_YM, var_XM, var_PM).

    Regime-dispatched; the stable squeezed-quadrature expression is evaluated
    in a rearranged form without the cot^2 singularity at omega_s*t = k*pi.
    Accepts scalar or array t.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise NegativeTime("t must be >= 0")
    base = 1.0 + 2.0 * n_th
    regime = classify_regime(sigma, omega_m)

    if regime == "Stable":
        ws2 = omega_m * (omega_m + 4.0 * sigma)
        ws = math.sqrt(ws2)
        sin2 = np.sin(ws * t) ** 2
        cos2 = np.cos(ws * t) ** 2
        # sin^2 * sqrt((w_m+2s)^2 + ws^2 cot^2) == sqrt((w_m+2s)^2 sin^4 + ws^2 sin^2 cos^2)
        root = np.sqrt((omega_m + 2.0 * sigma) ** 2 * sin2**2 + ws2 * sin2 * cos2)
        var_ym = base + (4.0 / ws2) * base * (2.0 * sigma**2 * sin2 - abs(sigma) * root)
        osc = 1.0 - np.cos(2.0 * ws * t)
        var_pm = base * (1.0 + (2.0 * sigma / omega_m) * osc)
        var_xm = base * (1.0 - (2.0 * sigma / (omega_m + 4.0 * sigma)) * osc)
    elif regime == "Threshold":
        wt2 = (omega_m * t) ** 2
        corr = np.where(wt2 > 0, 0.5 * wt2 * (np.sqrt(1.0 + 4.0 / np.maximum(wt2, 1e-300)) - 1.0), 0.0)
        var_ym = base * (1.0 - corr)
        var_xm = base * (1.0 + wt2)
        var_pm = base * np.ones_like(t)
    else:
        eps2 = -omega_m * (omega_m + 4.0 * sigma)
        eps = math.sqrt(eps2)
        e2 = np.exp(2.0 * eps * t)
        root = np.sqrt((e2 - 1.0) ** 2 + e2 * eps2 / sigma**2)
        var_ym = base * (
            1.0 - (2.0 * sigma**2 / eps2) * (1.0 - np.exp(-2.0 * eps * t)) * (root - (e2 - 1.0))
        )
        # analytic continuation of the stable forms: cos(2 w_s t) -> cosh(2 eps t)
        osc = 1.0 - np.cosh(2.0 * eps * t)
        var_pm = base * (1.0 + (2.0 * sigma / omega_m) * osc)
        var_xm = base * (1.0 - (2.0 * sigma / (omega_m + 4.0 * sigma)) * osc)
    return var_ym, var_xm, var_pm


def main_text_variance_ym(sigma, omega_m, n_th, t):
    """The main-text printed variant of the squeezed-quadrature evolution.

    Kept verbatim for the regression test that documents its disagreement
    with the (authoritative) appendix-style expression: it does not reduce to
    1 + 2*n_th at t = 0 and does not reach the squeezing limit at t_s.
    """
    t = np.asarray(t, dtype=float)
    ws2 = omega_m * (omega_m + 4.0 * sigma)
    ws = math.sqrt(ws2)
    cos2 = np.cos(ws * t) ** 2
    # rearranged so cos -> 0 is harmless:
    # (2 s^2/ws^2) cos^2 (sqrt(1 + ws^2/(s^2 cos^2)) - 1)
    #   == (2/ws^2) (sqrt(s^4 cos^4 + s^2 ws^2 cos^2) - s^2 cos^2)
    root = np.sqrt(sigma**4 * cos2**2 + sigma**2 * ws2 * cos2)
    return (1.0 + 2.0 * n_th) * (1.0 - (2.0 / ws2) * (root - sigma**2 * cos2))


@dataclass(frozen=True)
class ExactSolutionConstants:
    """Real/imaginary parts of (gamma*n_m + i*omega_s)/(gamma - 2i*omega_s)."""

    c_a: float
    c_b: float


def exact_solution_constants(omega_s: float, gamma: float, n_m: float) -> ExactSolutionConstants:
    z = (gamma * n_m + 1j * omega_s) / (gamma - 2j * omega_s)
    return ExactSolutionConstants(c_a=z.real, c_b=z.imag)


def exact_dissipative_solution(sigma, omega_m, gamma, n_th, n_m, t):
    """Closed-form (<b'b>, Re<b^2>, Im<b^2>) of the effective-model master equation.

    Dispatches on regime.  Accepts scalar or array t; returns arrays matching t.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise NegativeTime("t must be >= 0")
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    regime = classify_regime(sigma, omega_m)
    eg = np.exp(-gamma * t)

    if regime == "Stable":
        ws2 = omega_m * (omega_m + 4.0 * sigma)
        ws = math.sqrt(ws2)
        c = exact_solution_constants(ws, gamma, n_m)
        cos2 = np.cos(2.0 * ws * t)
        sin2 = np.sin(2.0 * ws * t)
        osc = (n_th - c.c_a) * cos2 + (gamma / (2.0 * ws)) * (n_m - c.c_a) * sin2
        nbb = (
            -(4.0 * sigma**2 / ws2) * (c.c_a + eg * osc)
            + ((omega_m + 2.0 * sigma) ** 2 / ws2) * (n_m + (n_th - n_m) * eg)
        )
        re_b2 = (2.0 * sigma * (omega_m + 2.0 * sigma) / ws2) * (
            c.c_a - n_m + eg * (osc + n_m - n_th)
        )
        im_b2 = -(2.0 * sigma / ws) * (
            c.c_b * (1.0 - eg * (cos2 + (gamma / (2.0 * ws)) * sin2))
            + eg * (n_th + 0.5) * sin2
        )
        return nbb, re_b2, im_b2

    if regime == "Threshold":
        if gamma == 0:
            # direct integration of the threshold system at gamma = 0:
            # Im<b^2> = w_m(n_th+1/2)t, Re<b^2> = w_m^2(n_th+1/2)t^2/2, <b'b> = n_th + Re<b^2>
            im_b2 = omega_m * (n_th + 0.5) * t
            re_b2 = 0.5 * omega_m**2 * (n_th + 0.5) * t**2
            nbb = n_th + re_b2
            return np.asarray(nbb), np.asarray(re_b2), np.asarray(im_b2)
        w2g2 = omega_m**2 / (2.0 * gamma**2)
        poly = (gamma * t) ** 2 * (n_th - n_m) - (gamma * t + 1.0) * (2.0 * n_m + 1.0)
        nbb = w2g2 * poly * eg + (n_th - n_m) * eg + w2g2 * (2.0 * n_m + 1.0) + n_m
        re_b2 = w2g2 * poly * eg + w2g2 * (2.0 * n_m + 1.0)
        im_b2 = (omega_m / (2.0 * gamma)) * (
            (2.0 * gamma * t * (n_th - n_m) - (2.0 * n_m + 1.0)) * eg + (2.0 * n_m + 1.0)
        )
        return nbb, re_b2, im_b2

    # Unstable
    eps = math.sqrt(-omega_m * (omega_m + 4.0 * sigma))
    if abs(gamma - eps) < 1e-12 or abs(gamma - 2.0 * eps) < 1e-12:
        raise DegenerateBranch(f"gamma = {gamma} degenerate with epsilon = {eps}")
    w0 = 2.0 * (omega_m + 2.0 * sigma)
    ep = np.exp(2.0 * eps * t)
    em = np.exp(-2.0 * eps * t)
    gm = gamma - 2.0 * eps
    gp = gamma + 2.0 * eps
    g24 = gamma**2 - 4.0 * eps**2
    nbb = (
        (-(w0**2) + 8.0 * sigma**2 * (ep + em)) * n_th / (4.0 * eps**2) * eg
        + (w0**2 + gamma**2) / g24 * n_m
        - (-(w0**2) + 8.0 * sigma**2 * (gamma / gm * ep + gamma / gp * em)) * n_m / (4.0 * eps**2) * eg
        + 8.0 * sigma**2 / g24
        - (ep / gm - em / gp) * (2.0 * sigma**2 / eps) * eg
    )
    re_b2 = (
        (1.0 - 0.5 * (ep + em)) * sigma * w0 * n_th / eps**2 * eg
        - 4.0 * sigma * w0 / g24 * n_m
        - (1.0 - (gamma / gm * ep + gamma / gp * em)) * sigma * w0 * n_m / eps**2 * eg
        - 2.0 * sigma * w0 / g24
        + (ep / gm - em / gp) * (w0 * sigma / (2.0 * eps)) * eg
    )
    im_b2 = (
        -(ep - em) * sigma * n_th / eps * eg
        - 4.0 * sigma * gamma / g24 * n_m
        + (ep / gm - em / gp) * sigma * gamma * n_m / eps * eg
        - 2.0 * gamma * sigma / g24
        + (ep / gm + em / gp) * sigma * eg
    )
    return nbb, re_b2, im_b2


def moments_to_variances(nbb, re_b2, im_b2):
    """(var_XM, var_PM, var_YM, cov_XP) from effective-model moments."""
    var_xm = 1.0 + 2.0 * (nbb + re_b2)
    var_pm = 1.0 + 2.0 * (nbb - re_b2)
    var_ym = 1.0 + 2.0 * (nbb - np.hypot(re_b2, im_b2))
    cov_xp = 2.0 * im_b2
    return var_xm, var_pm, var_ym, cov_xp


def steady_state_variances(sigma, omega_m, gamma, n_m):
    """Long-time (var_XM, var_PM) of the damped effective model."""
    if classify_regime(sigma, omega_m) != "Stable":
        raise OutOfRegime(f"steady state requires sigma > -omega_m/4, got {sigma}")
    ws2 = omega_m * (omega_m + 4.0 * sigma)
    denom = gamma**2 / 4.0 + ws2
    var_pm = (1.0 + 2.0 * n_m) * (1.0 + 2.0 * sigma * (omega_m + 4.0 * sigma) / denom)
    var_xm = (1.0 + 2.0 * n_m) * (1.0 - 2.0 * sigma * omega_m / denom)
    return var_xm, var_pm


def parametric_theory(xi0, gamma, n_m, t):
    """Adiabatic squeezed-quadrature envelope under parametric modulation."""
    if xi0 < 0:
        raise ValueError("xi0 must be >= 0")
    t = np.asarray(t, dtype=float)
    rate = gamma + xi0
    decay = np.exp(-rate * t)
    if rate == 0:
        return np.ones_like(t)
    return decay + gamma * (2.0 * n_m + 1.0) / rate * (1.0 - decay)


@dataclass(frozen=True)
class CavitySwitchSpec:
    """Cavity/drive data for one detuning switch."""

    omega0: float
    omega1: float
    omega2: float
    A1: complex
    kappa: float
    tau_roundtrip: float
    tau_switch: float


def required_drive_for_switch(spec: CavitySwitchSpec) -> complex:
    """Drive amplitude after the switch that preserves the intracavity field."""
    if spec.kappa <= 0:
        raise ValueError("kappa must be > 0")
    return spec.A1 * (
        (1j * (spec.omega2 - spec.omega0) + spec.kappa / 2.0)
        / (1j * (spec.omega1 - spec.omega0) + spec.kappa / 2.0)
    )


def validate_switch_timescales(spec: CavitySwitchSpec, G: float, omega_m: float):
    """Ordered pass/fail report on the switching-ramp timescale window."""
    checks = []
    checks.append(
        (
            "slower than cavity round trip",
            spec.tau_switch > spec.tau_roundtrip,
            f"tau_switch = {spec.tau_switch:.3e}, tau_roundtrip = {spec.tau_roundtrip:.3e}",
        )
    )
    scales = {"1/G": 1.0 / G if G > 0 else math.inf,
              "1/kappa": 1.0 / spec.kappa if spec.kappa > 0 else math.inf,
              "1/omega_m": 1.0 / omega_m}
    limit = 0.1 * min(scales.values())
    slowest = min(scales, key=scales.get)
    checks.append(
        (
            "much faster than system timescales",
            spec.tau_switch < limit,
            f"tau_switch = {spec.tau_switch:.3e}, 0.1*min({slowest}) = {limit:.3e}",
        )
    )
    return checks


def intracavity_photons(power_W, omega_L_Hz, kappa_Hz, delta_Hz, convention="cyclic"):
    """Mean intracavity photon number of a detuned driven cavity.

    The cyclic (Hz) convention reproduces the reference power threshold; the
    angular alternative divides the result by 2*pi and is exposed for
    transparency.
    """
    n = (power_W / (PLANCK_H * omega_L_Hz)) * kappa_Hz / (
        (kappa_Hz / 2.0) ** 2 + delta_Hz**2
    )
    if convention == "cyclic":
        return n
    if convention == "angular":
        return n / (2.0 * math.pi)
    raise ValueError(f"unknown convention {convention!r}")
