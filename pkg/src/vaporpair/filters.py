"""Spectral filtering of the idler line and its time-domain signature.

The detection chain multiplies the idler spectrum by a transmission
profile

    F(omega) = T(omega) * exp[-alpha * A(omega)]

where T is a unit-peak etalon passband, A a unit-peak absorption profile
of the vapor line, and alpha the absorption optical depth.  For alpha
above a threshold set by the width ratio, F develops two symmetric lobes;
the corresponding impulse response |h(t)|^2 oscillates at the lobe
separation, and convolving it with the source correlation puts beats on
the measured coincidence histogram.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .biphoton import ComplexWaveform, CorrelationFunction, TimeGrid
from .errors import ConfigError, DomainError, EstimationError, WindowingError

# Etalon passband FWHM presets, Hz.  The first is the modeling default;
# the second is the measured-hardware variant.  Both unit peak.
ETALON_FWHM_DEFAULT = 940e6
ETALON_FWHM_HARDWARE = 950e6

ABSORPTION_FWHM_DEFAULT = 540e6

FOUR_LN2 = 4.0 * np.log(2.0)


@dataclass(frozen=True)
class FilterSpec:
    """Filter-chain parameters.  Widths and offsets in Hz (ordinary
    frequency, measured from the idler line center); alpha dimensionless."""

    etalon_fwhm: float = ETALON_FWHM_DEFAULT
    absorption_fwhm: float = ABSORPTION_FWHM_DEFAULT
    alpha: float = 0.0
    etalon_center_offset: float = 0.0
    absorption_center_offset: float = 0.0
    etalon_shape: str = "gaussian"

    def __post_init__(self):
        if not np.isfinite(self.etalon_fwhm) or self.etalon_fwhm <= 0:
            raise DomainError(f"etalon_fwhm must be positive, got {self.etalon_fwhm!r}")
        if not np.isfinite(self.absorption_fwhm) or self.absorption_fwhm <= 0:
            raise DomainError(f"absorption_fwhm must be positive, got {self.absorption_fwhm!r}")
        if not np.isfinite(self.alpha) or self.alpha < 0:
            raise DomainError(f"alpha must be >= 0, got {self.alpha!r}")
        if self.etalon_shape not in ("gaussian", "lorentzian"):
            raise ConfigError(f"etalon_shape must be gaussian or lorentzian, got {self.etalon_shape!r}")

    @property
    def beat_onset_alpha(self) -> float:
        """Threshold alpha above which F(omega) is two-lobed (gaussian
        etalon, coincident centers): (absorption_fwhm / etalon_fwhm)^2."""
        return (self.absorption_fwhm / self.etalon_fwhm) ** 2


@dataclass(frozen=True)
class SpectralFunction:
    """Complex samples on a uniform angular-frequency grid (rad/s)."""

    omega: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        om = np.array(self.omega, dtype=float)
        vals = np.array(self.values, dtype=complex)
        if om.ndim != 1 or om.shape != vals.shape or om.size < 4:
            raise DomainError("omega and values must be equal-length 1-d arrays (>= 4 samples)")
        d = np.diff(om)
        if np.any(d <= 0) or np.any(np.abs(d - d[0]) > 1e-9 * abs(d[0])):
            raise DomainError("omega grid must be uniform and increasing")
        if not np.all(np.isfinite(vals)):
            raise DomainError("spectral samples must be finite")
        om.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "omega", om)
        object.__setattr__(self, "values", vals)

    @property
    def domega(self) -> float:
        return float(self.omega[1] - self.omega[0])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv_text())

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        buf.write("omega_rad_s,re,im\n")
        for w, v in zip(self.omega, self.values):
            buf.write(f"{w:.12g},{v.real:.12g},{v.imag:.12g}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, path) -> "SpectralFunction":
        import csv as _csv
        with open(path, newline="") as fh:
            rows = list(_csv.reader(fh))
        if not rows or rows[0] != ["omega_rad_s", "re", "im"]:
            raise DomainError(f"{path}: expected header 'omega_rad_s,re,im'")
        om = np.array([float(r[0]) for r in rows[1:]])
        vals = np.array([float(r[1]) + 1j * float(r[2]) for r in rows[1:]])
        return cls(omega=om, values=vals)

    def power_csv_text(self) -> str:
        """CSV of |F|^2 against angular frequency, for plotting consumers."""
        buf = io.StringIO()
        buf.write("omega_rad_s,fsq\n")
        p = np.abs(self.values) ** 2
        for w, v in zip(self.omega, p):
            buf.write(f"{w:.12g},{v:.12g}\n")
        return buf.getvalue()


def uniform_omega_grid(span_hz: float, n: int) -> np.ndarray:
    """Angular-frequency grid of n points covering +- span_hz/2 around 0,
    with omega = 0 landing exactly on sample n//2."""
    domega = 2.0 * np.pi * span_hz / n
    return (np.arange(n) - n // 2) * domega


def _unit_gaussian(omega, center_omega, fwhm_omega):
    x = omega - center_omega
    return np.exp(-FOUR_LN2 * (x / fwhm_omega) ** 2)


def _unit_lorentzian(omega, center_omega, fwhm_omega):
    x = 2.0 * (omega - center_omega) / fwhm_omega
    return 1.0 / (1.0 + x * x)


def filter_response(spec: FilterSpec, omega: np.ndarray) -> SpectralFunction:
    """Sampled F(omega) = T(omega) exp[-alpha A(omega)] on the given grid.

    The grid must span at least six times the wider of the two profile
    widths, otherwise the later transform would wrap appreciably.
    """
    omega = np.asarray(omega, dtype=float)
    span = omega.max() - omega.min()
    need = 6.0 * 2.0 * np.pi * max(spec.etalon_fwhm, spec.absorption_fwhm)
    if span < need:
        raise WindowingError(
            f"omega grid span {span:.3e} rad/s is below the required {need:.3e} rad/s")
    shape = _unit_gaussian if spec.etalon_shape == "gaussian" else _unit_lorentzian
    t = shape(omega, 2.0 * np.pi * spec.etalon_center_offset,
              2.0 * np.pi * spec.etalon_fwhm)
    a = _unit_gaussian(omega, 2.0 * np.pi * spec.absorption_center_offset,
                       2.0 * np.pi * spec.absorption_fwhm)
    return SpectralFunction(omega=omega, values=t * np.exp(-spec.alpha * a))


def impulse_response(sf: SpectralFunction) -> ComplexWaveform:
    """Time-domain response h(t) = (1/2pi) integral F(omega) e^{-i omega t} domega.

    Sampled on the conjugate grid t_k = (k - n//2) * 2pi/(n domega).  The
    spectrum must be decayed below 1e-6 of its peak at both grid edges.
    """
    vals = sf.values
    peak = np.abs(vals).max()
    if peak == 0:
        raise DomainError("spectrum is identically zero")
    if abs(vals[0]) > 1e-6 * peak or abs(vals[-1]) > 1e-6 * peak:
        raise WindowingError("spectrum has not decayed below 1e-6 of peak at the grid edges")
    n = len(vals)
    domega = sf.domega
    omega_c = sf.omega[n // 2]
    dt = 2.0 * np.pi / (n * domega)
    times = (np.arange(n) - n // 2) * dt
    ft = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(vals))) * (domega / (2.0 * np.pi))
    if omega_c != 0.0:
        ft = ft * np.exp(-1j * omega_c * times)
    return ComplexWaveform(grid=TimeGrid(t_start=times[0], dt=dt, n=n), values=ft)


def detector_correlation(gsi: CorrelationFunction, sf: SpectralFunction) -> CorrelationFunction:
    """Measured correlation after filtering: G_det(t) = (|h|^2 * G)(t).

    The filter's impulse-response power is convolved with the source
    correlation on the source's time step; a mismatched kernel step is
    linearly resampled first and flagged in the result's meta.  The full
    (uncropped) convolution is returned, so the output integral equals the
    product of the input integrals.
    """
    h = impulse_response(sf)
    kernel = np.abs(h.values) ** 2
    k_grid = h.grid
    meta = {}
    if abs(k_grid.dt - gsi.grid.dt) > 1e-9 * gsi.grid.dt:
        n_new = max(int(round((k_grid.t_end - k_grid.t_start) / gsi.grid.dt)) + 1, 2)
        new_times = k_grid.t_start + gsi.grid.dt * np.arange(n_new)
        kernel = np.interp(new_times, k_grid.times, kernel)
        k_grid = TimeGrid(t_start=k_grid.t_start, dt=gsi.grid.dt, n=n_new)
        meta["resampled"] = True
    dt = gsi.grid.dt
    out = np.convolve(gsi.values, kernel) * dt
    # roundoff can leave ~ -1e-17 * peak entries; they are not signal
    out = np.clip(out, 0.0, None)
    grid = TimeGrid(t_start=gsi.grid.t_start + k_grid.t_start, dt=dt,
                    n=gsi.grid.n + k_grid.n - 1)
    return CorrelationFunction(grid=grid, values=out, meta=meta)


def _local_maxima(values: np.ndarray, floor: float) -> list:
    idx = []
    for i in range(1, len(values) - 1):
        if values[i] > values[i - 1] and values[i] > values[i + 1] and values[i] > floor:
            idx.append(i)
    return idx


def beat_frequency_estimate(sf: SpectralFunction) -> float:
    """Lobe separation of a two-lobed |F|^2, in Hz.

    Locates local maxima of |F|^2, refines each by parabolic interpolation,
    and returns their spacing.  Any lobe count other than two is an error:
    a single-lobed filter has no beat, and more structure than two lobes
    means the spectrum is not the modeled passband-times-absorption shape.
    """
    p = np.abs(sf.values) ** 2
    peaks = _local_maxima(p, floor=1e-9 * p.max())
    if len(peaks) != 2:
        raise EstimationError(f"expected exactly 2 spectral lobes, found {len(peaks)}")
    refined = []
    for i in peaks:
        y0, y1, y2 = p[i - 1], p[i], p[i + 1]
        denom = y0 - 2.0 * y1 + y2
        delta = 0.0 if denom == 0 else 0.5 * (y0 - y2) / denom
        refined.append(sf.omega[i] + delta * sf.domega)
    return float(abs(refined[1] - refined[0]) / (2.0 * np.pi))
