"""Optical-depth scaling of singles and coincidence rates, plus the fits
used to extract exponents from scan data.

The collective-emission model: singles grow linearly with optical depth,
coincidences quadratically, and the idler (which is resonant with the
lower leg) is reabsorbed on the way out, giving each idler-carrying rate
an exp(-r * od) roll-off.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError, EstimationError


@dataclass(frozen=True)
class ODScanPoint:
    """One optical-depth scan sample: rates in counts per second."""

    od: float
    n_signal: float
    n_idler: float
    n_coincidence: float


@dataclass(frozen=True)
class ScalingParams:
    """Model coefficients: n_s = a_s od, n_i = a_i od e^{-r od},
    n_c = b od^2 e^{-r od}."""

    a_signal: float
    a_idler: float
    b_coincidence: float
    reabsorption: float = 0.0

    def __post_init__(self):
        for name in ("a_signal", "a_idler", "b_coincidence", "reabsorption"):
            val = getattr(self, name)
            if not np.isfinite(val) or val < 0:
                raise ConfigError(f"{name} must be >= 0 and finite, got {val!r}")


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    prefactor: float
    stderr: float


@dataclass(frozen=True)
class LinearQuadraticFit:
    """Through-origin fits y = a x and y = b x^2 with their residual sums
    of squares."""

    linear_coeff: float
    quadratic_coeff: float
    linear_residual: float
    quadratic_residual: float


def od_from_transmission(i_transmitted: float, i_incident: float) -> float:
    """Optical depth from a transmission measurement, ln(I_0 / I_t)."""
    if not np.isfinite(i_incident) or i_incident <= 0:
        raise DomainError(f"i_incident must be positive, got {i_incident!r}")
    if not np.isfinite(i_transmitted) or i_transmitted <= 0:
        raise DomainError(f"i_transmitted must be positive, got {i_transmitted!r}")
    if i_transmitted > i_incident:
        raise DomainError("transmitted intensity exceeds incident intensity")
    return float(np.log(i_incident / i_transmitted))


def predict_rates(od: float, params: ScalingParams) -> ODScanPoint:
    """Model rates at one optical depth."""
    if not np.isfinite(od) or od < 0:
        raise DomainError(f"od must be >= 0, got {od!r}")
    roll = np.exp(-params.reabsorption * od)
    return ODScanPoint(
        od=od,
        n_signal=params.a_signal * od,
        n_idler=params.a_idler * od * roll,
        n_coincidence=params.b_coincidence * od * od * roll,
    )


def _as_xy(points):
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DomainError("points must be a sequence of (x, y) pairs")
    return arr[:, 0], arr[:, 1]


def powerlaw_fit(points) -> PowerLawFit:
    """Ordinary least squares of ln y on ln x: y = prefactor * x^exponent.

    stderr is the standard error of the exponent from the residual
    variance with n - 2 degrees of freedom.
    """
    x, y = _as_xy(points)
    if len(x) < 3:
        raise DomainError(f"powerlaw_fit needs >= 3 points, got {len(x)}")
    if np.any(x <= 0) or np.any(y <= 0):
        raise DomainError("powerlaw_fit requires strictly positive x and y")
    lx = np.log(x)
    ly = np.log(y)
    mx = lx.mean()
    my = ly.mean()
    sxx = np.sum((lx - mx) ** 2)
    if sxx == 0:
        raise EstimationError("all x values identical; exponent is not identifiable")
    slope = float(np.sum((lx - mx) * (ly - my)) / sxx)
    intercept = my - slope * mx
    resid = ly - (slope * lx + intercept)
    ssr = float(np.sum(resid ** 2))
    stderr = float(np.sqrt(ssr / (len(x) - 2) / sxx))
    return PowerLawFit(exponent=slope, prefactor=float(np.exp(intercept)), stderr=stderr)


def polyfit_linear_quadratic(points) -> LinearQuadraticFit:
    """Least-squares through-origin linear and quadratic fits to the same
    data, for comparing singles-like and coincidence-like growth."""
    x, y = _as_xy(points)
    if len(x) < 2:
        raise DomainError(f"polyfit_linear_quadratic needs >= 2 points, got {len(x)}")
    sx2 = float(np.sum(x * x))
    sx4 = float(np.sum(x ** 4))
    if sx2 == 0 or sx4 == 0:
        raise EstimationError("degenerate design matrix: all x are zero")
    a = float(np.sum(x * y) / sx2)
    b = float(np.sum(x * x * y) / sx4)
    r_lin = float(np.sum((y - a * x) ** 2))
    r_quad = float(np.sum((y - b * x * x) ** 2))
    return LinearQuadraticFit(linear_coeff=a, quadratic_coeff=b,
                              linear_residual=r_lin, quadratic_residual=r_quad)
