"""Core domain types: system parameters, Gaussian states, presets.

Internal units: the mechanical frequency sets the scale (omega_m = 1 in all
dimensionless presets) and time is measured in 1/omega_m.  SI values appear
only in the ``microwave3d`` preset, which feeds the feasibility arithmetic.

Covariance convention: quadratures X = a + a', P = i(a' - a), and
V_ij = (1/2)<{dr_i, dr_j}>, so the vacuum covariance is the identity
(vacuum quadrature variance 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace, fields

import numpy as np

from .errors import (
    NegativeOccupation,
    NonPositive,
    PhiOutOfRange,
    UnknownPreset,
    UnphysicalState,
)

# Soft-condition thresholds used by validate_params.
OMEGA_T0_WARN = 0.05      # omega_m * t0 above this is no longer "small"
GT0_WARN = 0.5            # |G * t0| at or above this invalidates the BCH truncation
COUPLING_RATIO_WARN = 10.0  # |G sin(phi)| should exceed this times max(|detuning|, omega_m)

SYM_TOL = 1e-12


@dataclass(frozen=True)
class SystemParams:
    """All physical rates and pulse parameters of one scenario.

    Rates are angular frequencies in units of omega_m unless the instance
    carries SI values (microwave3d).  G is taken real non-negative; the phase
    of the enhanced coupling is absorbed into the optical quadratures.
    """

    omega_m: float = 1.0
    G: float = 0.0
    g: float = 0.0
    delta0_prime: float = 0.0
    kappa: float = 0.0
    gamma: float = 0.0
    n_th: float = 0.0
    n_m: float = 0.0
    phi: float = 0.0
    t0: float = 0.01

    def with_overrides(self, **kwargs) -> "SystemParams":
        return replace(self, **kwargs)


def validate_params(raw: SystemParams) -> tuple[SystemParams, list[str]]:
    """Check hard invariants and collect soft-condition warnings.

    Hard violations raise; soft violations of the approximation conditions
    behind the effective-Hamiltonian picture are returned as warning strings.
    """
    if not raw.omega_m > 0:
        raise NonPositive("omega_m", raw.omega_m)
    if not raw.t0 > 0:
        raise NonPositive("t0", raw.t0)
    if raw.kappa < 0:
        raise NonPositive("kappa", raw.kappa)
    if raw.gamma < 0:
        raise NonPositive("gamma", raw.gamma)
    if raw.n_th < 0:
        raise NonPositive("n_th", raw.n_th)
    if raw.n_m < 0:
        raise NonPositive("n_m", raw.n_m)
    if raw.G < 0:
        raise NonPositive("G", raw.G)
    if not -math.pi <= raw.phi <= math.pi:
        raise PhiOutOfRange(f"phi = {raw.phi} outside [-pi, pi]")

    warnings = []
    if raw.omega_m * raw.t0 > OMEGA_T0_WARN:
        warnings.append(
            f"omega_m*t0 not small: {raw.omega_m * raw.t0:.3g} > {OMEGA_T0_WARN}"
        )
    if abs(raw.G * raw.t0) >= GT0_WARN:
        warnings.append(f"|G*t0| large: {abs(raw.G * raw.t0):.3g} >= {GT0_WARN}")
    scale = max(abs(raw.delta0_prime), raw.omega_m)
    if abs(raw.G * math.sin(raw.phi)) < COUPLING_RATIO_WARN * scale:
        warnings.append(
            "coupling not strong: |G*sin(phi)| = "
            f"{abs(raw.G * math.sin(raw.phi)):.3g} < {COUPLING_RATIO_WARN}*{scale:.3g}"
        )
    return raw, warnings


# G for the figure-2/figure-4 scenario is fixed by requiring an effective
# frequency of 4*omega_m at t0 = 0.01 and phi = pi/2:
# 16 = 1 + 4*sigma = 1 + 2*G^2*t0, hence G = sqrt(750) ~ 27.386.
_PRESETS = {
    "fig2": SystemParams(omega_m=1.0, G=math.sqrt(750.0), t0=0.01, phi=math.pi / 2),
    "fig4": SystemParams(omega_m=1.0, G=math.sqrt(750.0), t0=0.01, phi=math.pi / 2),
    "fig3_neg": SystemParams(omega_m=1.0, G=8.0, t0=0.005, phi=-math.pi / 2),
    "fig3_pos": SystemParams(omega_m=1.0, G=8.0, t0=0.005, phi=math.pi / 2),
    # SI, cyclic-frequency (Hz) convention; used by feasibility operations only.
    "microwave3d": SystemParams(
        omega_m=9.696e6, g=167.0, kappa=1.0e6, t0=0.01 / 9.696e6, phi=math.pi / 2
    ),
}

PRESET_NAMES = tuple(sorted(_PRESETS))


def load_preset(name: str) -> SystemParams:
    try:
        return _PRESETS[name]
    except KeyError:
        raise UnknownPreset(
            f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}"
        ) from None


@dataclass(frozen=True)
class GaussianState:
    """Gaussian state of the (optical, mechanical) pair.

    mean: 4-vector (<X_L>, <P_L>, <X_M>, <P_M>)
    cov:  symmetric 4x4 covariance matrix, vacuum = identity.
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(4)
        cov = np.asarray(self.cov, dtype=float).reshape(4, 4)
        if not np.all(np.isfinite(mean)) or not np.all(np.isfinite(cov)):
            raise UnphysicalState("non-finite mean or covariance")
        asym = np.max(np.abs(cov - cov.T))
        if asym > max(SYM_TOL, SYM_TOL * np.max(np.abs(cov))):
            raise UnphysicalState(f"covariance asymmetry {asym:.3e}")
        cov = 0.5 * (cov + cov.T)
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def optical_block(self) -> np.ndarray:
        return self.cov[:2, :2]

    @property
    def mechanical_block(self) -> np.ndarray:
        return self.cov[2:, 2:]

    @property
    def cross_block(self) -> np.ndarray:
        return self.cov[:2, 2:]

    def check_physical(self, tol: float = 1e-9) -> None:
        """Positive definiteness and the per-mode uncertainty bound."""
        eig = np.linalg.eigvalsh(self.cov)
        if eig[0] <= 0:
            raise UnphysicalState(f"covariance not positive definite: min eig {eig[0]:.3e}")
        for block in (self.optical_block, self.mechanical_block):
            det = float(np.linalg.det(block))
            if det < 1.0 - tol:
                raise UnphysicalState(f"mode block det {det} < 1 - {tol}")


def thermal_initial_state(n_opt: float, n_mech: float) -> GaussianState:
    """Product of thermal states; (0, 0) gives the joint vacuum."""
    if n_opt < 0 or n_mech < 0:
        raise NegativeOccupation(f"occupations must be >= 0, got ({n_opt}, {n_mech})")
    v_opt = 2.0 * n_opt + 1.0
    v_mech = 2.0 * n_mech + 1.0
    return GaussianState(np.zeros(4), np.diag([v_opt, v_opt, v_mech, v_mech]))


@dataclass(frozen=True)
class SqueezingReport:
    """Mechanical-block summary extracted from one Gaussian state."""

    var_XM: float
    var_PM: float
    var_YM: float
    theta: float
    cov_XP: float
    det_mech: float


@dataclass(frozen=True)
class EffectiveModel:
    """Closed-form quantities derived from one parameter set.

    Exactly one of (omega_s, epsilon) is set away from threshold; at the
    threshold both are zero.  t_s and t_prime exist only in the stable regime.
    """

    sigma: float
    omega_s: float | None
    epsilon: float | None
    omega_s_prime: float
    mu: complex
    t_s: float | None
    t_prime: float | None
    regime: str  # "Stable" | "Threshold" | "Unstable"


def params_to_dict(p: SystemParams) -> dict:
    return {f.name: getattr(p, f.name) for f in fields(p)}


def params_from_dict(d: dict) -> SystemParams:
    known = {f.name for f in fields(SystemParams)}
    unknown = set(d) - known
    if unknown:
        raise KeyError(f"unknown parameter keys: {sorted(unknown)}")
    return SystemParams(**{k: float(v) for k, v in d.items()})


def params_from_file(path) -> SystemParams:
    """Read a key = value scenario file (# starts a comment)."""
    values = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, val = line.partition("=")
            values[key.strip()] = float(val)
    return params_from_dict(values)


def params_to_file(p: SystemParams, path) -> None:
    with open(path, "w") as fh:
        fh.write("# squeeze-sim scenario (rates in units of omega_m)\n")
        for key, val in params_to_dict(p).items():
            fh.write(f"{key} = {val!r}\n")
