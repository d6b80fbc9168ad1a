"""Gaussian Wigner fields on rectangular grids.

Marginalizing a Gaussian state onto one mode is exact: take the 2x2
covariance block and mean of that mode and evaluate the normal density in
the (X, P) quadrature convention (vacuum variance 1).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import SingularCovariance
from .params import GaussianState

OPTICAL = "optical"
MECHANICAL = "mechanical"

DEFAULT_POINTS = 201
DEFAULT_SIGMA_SPAN = 6.0

_BLOCK_SLICE = {OPTICAL: slice(0, 2), MECHANICAL: slice(2, 4)}

_trapz = getattr(np, "trapezoid", None) or np.trapz


@dataclass(frozen=True)
class WignerField:
    """Evaluated density on a rectangular (x, y) grid."""

    x: np.ndarray          # shape (nx,)
    y: np.ndarray          # shape (ny,)
    values: np.ndarray     # shape (ny, nx)
    subsystem: str

    def integral(self) -> float:
        """Trapezoidal integral over the grid."""
        return float(_trapz(_trapz(self.values, self.x, axis=1), self.y))

    def numerical_moments(self) -> tuple[np.ndarray, np.ndarray]:
        """(mean 2-vector, 2x2 covariance) recomputed from the field."""
        X, Y = np.meshgrid(self.x, self.y)
        w = self.values
        norm = self.integral()

        def avg(f):
            return float(_trapz(_trapz(f * w, self.x, axis=1), self.y)) / norm

        mx, my = avg(X), avg(Y)
        cov = np.array(
            [
                [avg((X - mx) ** 2), avg((X - mx) * (Y - my))],
                [avg((X - mx) * (Y - my)), avg((Y - my) ** 2)],
            ]
        )
        return np.array([mx, my]), cov

    def to_csv(self, path) -> None:
        """Long-format (x, y, value) rows under the versioned schema header."""
        X, Y = np.meshgrid(self.x, self.y)
        rows = np.column_stack([X.ravel(), Y.ravel(), self.values.ravel()])
        header = "# squeeze-sim schema v1\nx,y,value"
        np.savetxt(path, rows, delimiter=",", header=header, comments="", fmt="%.9g")

    def axes_json(self) -> dict:
        return {
            "schema": "squeeze-sim schema v1",
            "subsystem": self.subsystem,
            "x": {"min": float(self.x[0]), "max": float(self.x[-1]), "n": len(self.x)},
            "y": {"min": float(self.y[0]), "max": float(self.y[-1]), "n": len(self.y)},
        }

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.axes_json(), fh)


def default_grid(state: GaussianState, subsystem: str,
                 n_points: int = DEFAULT_POINTS,
                 sigma_span: float = DEFAULT_SIGMA_SPAN):
    """Symmetric grid about the subsystem mean, +/- sigma_span max std devs."""
    sl = _BLOCK_SLICE[subsystem]
    B = state.cov[sl, sl]
    m = state.mean[sl]
    half = sigma_span * np.sqrt(np.max(np.linalg.eigvalsh(B)))
    x = np.linspace(m[0] - half, m[0] + half, n_points)
    y = np.linspace(m[1] - half, m[1] + half, n_points)
    return x, y


def wigner_marginal(
    state: GaussianState,
    subsystem: str,
    grid: tuple[np.ndarray, np.ndarray] | None = None,
) -> WignerField:
    """Exact single-mode Wigner density W(r) = exp(-(r-m)'B^-1(r-m)/2)/(2 pi sqrt det B)."""
    if subsystem not in _BLOCK_SLICE:
        raise ValueError(f"subsystem must be one of {sorted(_BLOCK_SLICE)}, got {subsystem!r}")
    sl = _BLOCK_SLICE[subsystem]
    B = state.cov[sl, sl]
    m = state.mean[sl]
    det = float(np.linalg.det(B))
    if det < 1e-14:
        raise SingularCovariance(f"det of {subsystem} block = {det:.3e} < 1e-14")
    if grid is None:
        grid = default_grid(state, subsystem)
    x, y = np.asarray(grid[0], dtype=float), np.asarray(grid[1], dtype=float)
    if len(x) < 2 or len(y) < 2:
        raise ValueError("grid axes need at least 2 points")
    Binv = np.linalg.inv(B)
    X, Y = np.meshgrid(x - m[0], y - m[1])
    quad = Binv[0, 0] * X**2 + 2.0 * Binv[0, 1] * X * Y + Binv[1, 1] * Y**2
    values = np.exp(-0.5 * quad) / (2.0 * np.pi * np.sqrt(det))
    return WignerField(x=x, y=y, values=values, subsystem=subsystem)
