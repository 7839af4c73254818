"""Ladder-system parameters, thermal velocity statistics, and the
velocity-dependent two-photon coefficient of a cascade pair source.

The three-level cascade is ground (1) -> intermediate (2-ish, 780 nm leg)
-> upper (775.8 nm leg) driven by a pump on the lower leg and a coupling
field on the upper leg, counter-propagating through warm vapor.  Photon
pairs emerge with the signal on the upper leg and the idler on the lower
leg; the idler wavelength coincides with the pump leg and is the one that
can be reabsorbed by the vapor.

All frequencies inside this package are angular (rad/s).  Configuration
files and CSV interfaces speak ordinary frequency (Hz); the conversion
happens once, in the config layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.constants import k as K_BOLTZMANN

from .errors import ConfigError, DomainError

# Rb-87 mass in kg.
RB87_MASS = 1.44316e-25

# Default decay rates, rad/s.  Standard alkali cascade values used as
# configuration, not asserted ground truth.
GAMMA31_DEFAULT = 2.0 * np.pi * 6.07e6   # intermediate -> ground
GAMMA32_DEFAULT = 2.0 * np.pi * 0.66e6   # upper -> intermediate

TWO_SQRT_2LN2 = 2.0 * np.sqrt(2.0 * np.log(2.0))


@dataclass(frozen=True)
class LadderSystem:
    """Static level structure and beam geometry.

    gamma31 and gamma32 are angular decay rates (rad/s) of the lower and
    upper legs.  Wavelengths are in meters; wave numbers derive from them.
    """

    gamma31: float = GAMMA31_DEFAULT
    gamma32: float = GAMMA32_DEFAULT
    lambda_pump: float = 780.2e-9
    lambda_coupling: float = 775.8e-9
    lambda_idler: float = 780.2e-9
    lambda_signal: float = 775.8e-9
    atom_mass: float = RB87_MASS

    def __post_init__(self):
        for name in ("gamma31", "gamma32", "lambda_pump", "lambda_coupling",
                     "lambda_idler", "lambda_signal", "atom_mass"):
            val = getattr(self, name)
            if not np.isfinite(val) or val <= 0:
                raise DomainError(f"{name} must be positive and finite, got {val!r}")

    @property
    def k_pump(self) -> float:
        return 2.0 * np.pi / self.lambda_pump

    @property
    def k_coupling(self) -> float:
        return 2.0 * np.pi / self.lambda_coupling

    @property
    def k_idler(self) -> float:
        return 2.0 * np.pi / self.lambda_idler

    @property
    def k_signal(self) -> float:
        return 2.0 * np.pi / self.lambda_signal


@dataclass(frozen=True)
class FieldParams:
    """Drive-field strengths and detunings (all angular, rad/s).

    Defaults put the pump 810 MHz above the lower leg and the coupling an
    equal amount below the upper leg, so the two-photon detuning is zero.
    """

    rabi_pump: float
    rabi_coupling: float
    detuning_pump: float = 2.0 * np.pi * 810e6
    detuning_coupling: float = -2.0 * np.pi * 810e6

    def __post_init__(self):
        for name in ("rabi_pump", "rabi_coupling"):
            val = getattr(self, name)
            if not np.isfinite(val) or val < 0:
                raise DomainError(f"{name} must be nonnegative and finite, got {val!r}")
        for name in ("detuning_pump", "detuning_coupling"):
            if not np.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")

    @property
    def two_photon_detuning(self) -> float:
        return self.detuning_pump + self.detuning_coupling


@dataclass(frozen=True)
class VaporCell:
    """Vapor cell state: temperature (K), length (m), on-resonance optical
    depth of the idler leg."""

    temperature: float = 325.15
    length: float = 12.5e-3
    optical_depth: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.temperature) or self.temperature <= 0:
            raise DomainError(f"temperature must be positive, got {self.temperature!r}")
        if not np.isfinite(self.length) or self.length <= 0:
            raise DomainError(f"length must be positive, got {self.length!r}")
        if not np.isfinite(self.optical_depth) or self.optical_depth < 0:
            raise DomainError(f"optical_depth must be >= 0, got {self.optical_depth!r}")


@dataclass(frozen=True)
class VelocityGrid:
    """Quadrature nodes and weights for one-dimensional velocity averages.

    Weights are nonnegative and sum to one, so averaging a constant returns
    that constant exactly.
    """

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        weights = np.array(self.weights, dtype=float)
        if nodes.ndim != 1 or nodes.shape != weights.shape:
            raise DomainError("nodes and weights must be 1-d arrays of equal length")
        if np.any(np.diff(nodes) <= 0):
            raise DomainError("velocity nodes must be strictly increasing")
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise DomainError("weights must be nonnegative and finite")
        if abs(weights.sum() - 1.0) > 1e-9:
            raise DomainError(f"weights must sum to 1, got {weights.sum()!r}")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def average(self, samples: np.ndarray) -> complex:
        """Weighted sum along the node axis (last axis of samples)."""
        return samples @ self.weights


def sigma_v(temperature: float, mass: float) -> float:
    """One-dimensional rms thermal velocity, sqrt(kB T / m), in m/s."""
    if not np.isfinite(temperature) or temperature <= 0:
        raise DomainError(f"temperature must be positive, got {temperature!r}")
    if not np.isfinite(mass) or mass <= 0:
        raise DomainError(f"mass must be positive, got {mass!r}")
    return float(np.sqrt(K_BOLTZMANN * temperature / mass))


def maxwell_boltzmann_pdf(v, temperature: float, mass: float):
    """1-d Maxwell-Boltzmann velocity density f(v), normalized to unit area."""
    s = sigma_v(temperature, mass)
    v = np.asarray(v, dtype=float)
    return np.exp(-(v * v) / (2.0 * s * s)) / (s * np.sqrt(2.0 * np.pi))


def make_velocity_grid(temperature: float, mass: float, n_nodes: int = 513,
                       span_sigmas: float = 6.0) -> VelocityGrid:
    """Build a renormalized-trapezoid quadrature over [-span, +span] sigmas.

    Trapezoid weights times the thermal density, rescaled so they sum to
    exactly one.  On a Gaussian-decaying integrand this rule is
    exponentially accurate, so 513 nodes over 6 sigma is far more than is
    needed for per-mille work.
    """
    if n_nodes < 16:
        raise ConfigError(f"n_nodes must be >= 16, got {n_nodes}")
    if span_sigmas < 4.0:
        raise ConfigError(f"span_sigmas must be >= 4, got {span_sigmas}")
    s = sigma_v(temperature, mass)
    nodes = np.linspace(-span_sigmas * s, span_sigmas * s, n_nodes)
    w = maxwell_boltzmann_pdf(nodes, temperature, mass)
    trap = np.full(n_nodes, 1.0)
    trap[0] = trap[-1] = 0.5
    weights = w * trap
    weights = weights / weights.sum()
    return VelocityGrid(nodes=nodes, weights=weights)


def two_photon_coefficient(v, system: LadderSystem, fields: FieldParams,
                           geometry: str = "counter"):
    """Velocity-dependent two-photon excitation coefficient A(v).

    A(v) = Omega_p Omega_c / {[gamma31/2 + i(delta_p + k_p v)]
                              * [gamma32/2 + i(delta_p + delta_c + dk v)]}

    with dk = k_p - k_c for counter-propagating drive beams (the residual
    two-photon Doppler term) and k_p + k_c for the co-propagating variant.
    Normalized so |A(0)| = 1 when the two-photon detuning is zero: the
    returned value is A(v) divided by the magnitude it would have at v = 0
    with delta_c = -delta_p.  Either Rabi frequency at zero gives A == 0.
    """
    v = np.asarray(v, dtype=float)
    if fields.rabi_pump == 0.0 or fields.rabi_coupling == 0.0:
        return np.zeros(v.shape, dtype=complex) if v.ndim else 0j
    if geometry == "counter":
        dk = system.k_pump - system.k_coupling
    elif geometry == "co":
        dk = system.k_pump + system.k_coupling
    else:
        raise ConfigError(f"geometry must be 'counter' or 'co', got {geometry!r}")
    d1 = system.gamma31 / 2.0 + 1j * (fields.detuning_pump + system.k_pump * v)
    d2 = system.gamma32 / 2.0 + 1j * (fields.two_photon_detuning + dk * v)
    reference = abs(system.gamma31 / 2.0 + 1j * fields.detuning_pump) * (system.gamma32 / 2.0)
    out = reference / (d1 * d2)
    return out if v.ndim else complex(out)


def doppler_fwhm(temperature: float, mass: float, wavelength: float) -> float:
    """Doppler full width at half maximum, in Hz, of a line at the given
    wavelength: (sigma_v / lambda) * 2 sqrt(2 ln 2)."""
    if not np.isfinite(wavelength) or wavelength <= 0:
        raise DomainError(f"wavelength must be positive, got {wavelength!r}")
    return sigma_v(temperature, mass) / wavelength * TWO_SQRT_2LN2
