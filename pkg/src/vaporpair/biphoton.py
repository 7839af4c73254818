"""Two-photon time correlation of the cascade source.

The joint signal-idler amplitude for an atom of velocity v is a decaying
phase-rotating exponential

    psi_v(tau) = A(v) * exp[(-gamma31/2 + i k_I v) tau],   tau >= 0,

where tau is the idler-minus-signal detection delay, gamma31 the lower-leg
decay rate, and k_I the idler wave number.  Averaging the amplitude over
the thermal velocity distribution before squaring gives the Glauber
cross-correlation

    G(tau) = | sum_j w_j psi_{v_j}(tau) |^2 ,

whose width is set by Doppler dephasing of the velocity classes rather
than by the natural lifetime.
"""

from __future__ import annotations

import csv as _csv
import io
from dataclasses import dataclass, field

import numpy as np

from .atomic import FieldParams, LadderSystem, VelocityGrid, two_photon_coefficient
from .errors import DomainError, EstimationError, WindowingError


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid: samples at t_start + j*dt for j in [0, n)."""

    t_start: float
    dt: float
    n: int

    def __post_init__(self):
        if not np.isfinite(self.t_start):
            raise DomainError("t_start must be finite")
        if not np.isfinite(self.dt) or self.dt <= 0:
            raise DomainError(f"dt must be positive, got {self.dt!r}")
        if self.n < 2:
            raise DomainError(f"n must be >= 2, got {self.n}")

    @property
    def times(self) -> np.ndarray:
        return self.t_start + self.dt * np.arange(self.n)

    @property
    def t_end(self) -> float:
        return self.t_start + self.dt * (self.n - 1)


def symmetric_grid(dt: float, n: int) -> TimeGrid:
    """Grid with n samples centered so that t = 0 is the sample at n//2."""
    return TimeGrid(t_start=-dt * (n // 2), dt=dt, n=n)


@dataclass(frozen=True)
class CorrelationFunction:
    """Nonnegative real samples on a TimeGrid, e.g. G(tau) or |h(t)|^2.

    meta carries bookkeeping flags (resampling, clipping); it never takes
    part in equality or serialization of the samples themselves.
    """

    grid: TimeGrid
    values: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1 or vals.shape[0] != self.grid.n:
            raise DomainError("values must be a 1-d array matching the grid length")
        if not np.all(np.isfinite(vals)):
            raise DomainError("correlation samples must be finite")
        if np.any(vals < 0):
            raise DomainError("correlation samples must be nonnegative")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv_text())

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        buf.write("tau_s,value\n")
        for t, v in zip(self.grid.times, self.values):
            buf.write(f"{t:.12g},{v:.12g}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, path) -> "CorrelationFunction":
        with open(path, newline="") as fh:
            rows = list(_csv.reader(fh))
        if not rows or rows[0] != ["tau_s", "value"]:
            raise DomainError(f"{path}: expected header 'tau_s,value'")
        body = [(float(a), float(b)) for a, b in rows[1:]]
        if len(body) < 2:
            raise DomainError(f"{path}: need at least two samples")
        taus = np.array([r[0] for r in body])
        vals = np.array([r[1] for r in body])
        dts = np.diff(taus)
        dt = float(np.median(dts))
        if dt <= 0 or np.any(np.abs(dts - dt) > 1e-6 * dt):
            raise DomainError(f"{path}: time column is not a uniform grid")
        grid = TimeGrid(t_start=float(taus[0]), dt=dt, n=len(taus))
        return cls(grid=grid, values=vals)


@dataclass(frozen=True)
class ComplexWaveform:
    """Complex samples on a TimeGrid (amplitudes, impulse responses)."""

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex)
        if vals.ndim != 1 or vals.shape[0] != self.grid.n:
            raise DomainError("values must be a 1-d array matching the grid length")
        if not np.all(np.isfinite(vals)):
            raise DomainError("waveform samples must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


def two_photon_amplitude(v, tau, system: LadderSystem, fields: FieldParams):
    """psi_v(tau) = A(v) exp[(-gamma31/2 + i k_I v) tau] for tau >= 0, else 0.

    Broadcasts over v and tau.
    """
    v = np.asarray(v, dtype=float)
    tau = np.asarray(tau, dtype=float)
    a = two_photon_coefficient(v, system, fields)
    rate = -system.gamma31 / 2.0 + 1j * system.k_idler * v
    out = a * np.exp(rate * tau)
    return np.where(tau >= 0, out, 0.0 + 0.0j)


def velocity_averaged_amplitude(grid: TimeGrid, vgrid: VelocityGrid,
                                system: LadderSystem, fields: FieldParams,
                                flat_amplitude: bool = False) -> ComplexWaveform:
    """Velocity-coherent sum Phi(tau) = sum_j w_j A(v_j) e^{i k_I v_j tau}.

    This is the dephasing part of the averaged amplitude with the gamma31
    decay factored out, well defined for either sign of tau.  With
    flat_amplitude the coefficient A is replaced by 1, which reduces the
    sum to the characteristic function of the velocity distribution.
    """
    tau = grid.times
    if flat_amplitude:
        coeff = np.ones(len(vgrid.nodes), dtype=complex)
    else:
        coeff = two_photon_coefficient(vgrid.nodes, system, fields)
    phases = np.exp(1j * system.k_idler * np.outer(tau, vgrid.nodes))
    vals = phases @ (vgrid.weights * coeff)
    return ComplexWaveform(grid=grid, values=vals)


def dephasing_envelope(grid: TimeGrid, vgrid: VelocityGrid,
                       system: LadderSystem, fields: FieldParams,
                       flat_amplitude: bool = False) -> CorrelationFunction:
    """|Phi(tau)|^2, the decay-free Doppler-dephasing envelope.

    Even in tau for a flat coefficient; the quantity whose width and
    amplitude spectrum reproduce the thermal line shape.  Related to the
    causal correlation by G(tau) = envelope(tau) * e^{-gamma31 tau} on
    tau >= 0.
    """
    phi = velocity_averaged_amplitude(grid, vgrid, system, fields, flat_amplitude)
    return CorrelationFunction(grid=grid, values=np.abs(phi.values) ** 2)


def correlation_gsi(grid: TimeGrid, vgrid: VelocityGrid,
                    system: LadderSystem, fields: FieldParams,
                    flat_amplitude: bool = False) -> CorrelationFunction:
    """Causal signal-idler correlation G(tau) on the given grid.

    G(tau) = |sum_j w_j A(v_j) e^{i k_I v_j tau}|^2 e^{-gamma31 tau} for
    tau >= 0 and exactly zero for tau < 0 (the cascade emits the signal
    photon first; detector-side smearing is applied separately).
    """
    phi = velocity_averaged_amplitude(grid, vgrid, system, fields, flat_amplitude)
    tau = grid.times
    vals = np.abs(phi.values) ** 2 * np.exp(-system.gamma31 * np.clip(tau, 0.0, None))
    vals = np.where(tau >= 0, vals, 0.0)
    return CorrelationFunction(grid=grid, values=vals)


def _interp_crossing(x0, y0, x1, y1, level):
    """x where the segment (x0,y0)-(x1,y1) crosses level."""
    if y1 == y0:
        return x0
    return x0 + (level - y0) * (x1 - x0) / (y1 - y0)


def _fwhm_linear(x: np.ndarray, y: np.ndarray) -> float:
    """Full width at half maximum of a peaked curve, half level measured
    from zero, crossings located by linear interpolation."""
    i_pk = int(np.argmax(y))
    peak = y[i_pk]
    if peak <= 0:
        raise EstimationError("curve has no positive peak")
    if i_pk == 0 or i_pk == len(y) - 1:
        raise EstimationError("peak sits on the grid edge; widen the grid")
    if np.all(y == peak):
        raise EstimationError("curve is flat; width undefined")
    half = peak / 2.0
    left = None
    for i in range(i_pk, 0, -1):
        if y[i - 1] < half <= y[i]:
            left = _interp_crossing(x[i - 1], y[i - 1], x[i], y[i], half)
            break
    right = None
    for i in range(i_pk, len(y) - 1):
        if y[i + 1] < half <= y[i]:
            right = _interp_crossing(x[i], y[i], x[i + 1], y[i + 1], half)
            break
    if left is None or right is None:
        raise EstimationError("curve does not fall below half maximum on both sides")
    return float(right - left)


def correlation_time(corr: CorrelationFunction) -> float:
    """FWHM of the correlation curve, in seconds.

    The curve must peak away from the grid edges and fall below half of
    its maximum on both sides inside the grid.
    """
    return _fwhm_linear(corr.grid.times, corr.values)


def bandwidth_from_correlation(corr: CorrelationFunction, pad_factor: int = 8) -> float:
    """Spectral FWHM, in Hz, of the amplitude |DFT of sqrt(G)|.

    The square root recovers the averaged amplitude's modulus, whose
    transform is the emission line shape.  The curve must be decayed below
    1% of peak at both grid ends; the transform is zero-padded by
    pad_factor for smooth peak interpolation.
    """
    vals = corr.values
    peak = vals.max()
    if peak <= 0:
        raise EstimationError("correlation is identically zero")
    if vals[0] > 0.01 * peak or vals[-1] > 0.01 * peak:
        raise WindowingError("correlation has not decayed below 1% of peak at the grid ends")
    amp = np.sqrt(vals)
    n = corr.grid.n
    n_pad = 1
    while n_pad < pad_factor * n:
        n_pad *= 2
    spec = np.abs(np.fft.fft(amp, n_pad))
    freqs = np.fft.fftfreq(n_pad, d=corr.grid.dt)
    spec = np.fft.fftshift(spec)
    freqs = np.fft.fftshift(freqs)
    return _fwhm_linear(freqs, spec)
