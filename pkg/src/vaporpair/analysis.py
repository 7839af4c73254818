"""Coincidence counting and correlation estimators for timestamp streams.

Multi-stop start-stop histograms, windowed coincidence rates with
accidental subtraction, dead-time correction, pair-rate and heralding
estimators, normalized g2 curves, the three-detector heralded
autocorrelation, and the Cauchy-Schwarz violation factor.
"""

from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass, field, fields as _dc_fields

import numpy as np

from .biphoton import CorrelationFunction, TimeGrid
from .errors import DomainError, EstimationError, SaturationError
from .montecarlo import EventStream


@dataclass(frozen=True)
class CoincidenceHistogram:
    """Delay histogram: counts[k] covers [offset + k*bw, offset + (k+1)*bw)."""

    bin_width: float
    offset: float
    counts: np.ndarray

    def __post_init__(self):
        if not np.isfinite(self.bin_width) or self.bin_width <= 0:
            raise DomainError(f"bin_width must be positive, got {self.bin_width!r}")
        counts = np.array(self.counts, dtype=np.int64)
        if counts.ndim != 1 or counts.size < 1:
            raise DomainError("counts must be a nonempty 1-d array")
        if np.any(counts < 0):
            raise DomainError("counts must be nonnegative")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def bin_centers(self) -> np.ndarray:
        return self.offset + self.bin_width * (np.arange(self.counts.size) + 0.5)

    @property
    def n_bins(self) -> int:
        return self.counts.size


def start_stop_histogram(start: EventStream, stop: EventStream,
                         bin_width: float, delay_range: float) -> CoincidenceHistogram:
    """Multi-stop delay histogram of stop minus start times.

    Every stop event within [-delay_range, +delay_range) of each start is
    binned, not just the first, so pile-up at high rates is avoided and
    the wings converge to the accidental floor R_start * R_stop * bw * T.
    """
    if bin_width <= 0 or delay_range <= 0:
        raise DomainError("bin_width and delay_range must be positive")
    n_bins = int(round(2.0 * delay_range / bin_width))
    if n_bins < 1 or abs(n_bins * bin_width - 2.0 * delay_range) > 1e-9 * bin_width:
        raise DomainError("delay_range must cover a whole number of bins")
    s = start.timestamps
    p = stop.timestamps
    counts = np.zeros(n_bins, dtype=np.int64)
    if s.size and p.size:
        lo = np.searchsorted(p, s - delay_range, side="left")
        hi = np.searchsorted(p, s + delay_range, side="left")
        per = hi - lo
        total = int(per.sum())
        if total:
            # gather p[lo_i : hi_i] for every start i without a python loop
            starts_rep = np.repeat(s, per)
            base = np.repeat(np.cumsum(per) - per, per)
            gather = np.arange(total) - base + np.repeat(lo, per)
            delays = p[gather] - starts_rep
            idx = np.floor((delays + delay_range) / bin_width).astype(np.int64)
            idx = np.clip(idx, 0, n_bins - 1)
            counts = np.bincount(idx, minlength=n_bins).astype(np.int64)
    return CoincidenceHistogram(bin_width=bin_width, offset=-delay_range, counts=counts)


@dataclass(frozen=True)
class CoincidenceRates:
    """Windowed coincidence result, counts per second.  net is floored at
    zero; clipped records whether the floor was applied."""

    raw: float
    accidental: float
    net: float
    clipped: bool = False


def coincidence_rate(hist: CoincidenceHistogram, window: float, acquisition: float,
                     wing: tuple = (20e-9, 40e-9)) -> CoincidenceRates:
    """Coincidence rate in a window centered on the peak bin, with the
    accidental floor estimated from the |tau| wings and subtracted.

    window must cover a whole number of bins.  The wing interval is taken
    on both sides relative to tau = 0 and must contain at least one bin.
    """
    if acquisition <= 0:
        raise DomainError(f"acquisition must be positive, got {acquisition!r}")
    n_win = int(round(window / hist.bin_width))
    if n_win < 1 or abs(n_win * hist.bin_width - window) > 1e-6 * hist.bin_width:
        raise DomainError("window must cover a whole number of bins")
    centers = hist.bin_centers
    i_peak = int(np.argmax(hist.counts))
    half = n_win // 2
    lo = max(i_peak - half, 0)
    hi = min(lo + n_win, hist.n_bins)
    lo = max(hi - n_win, 0)
    raw_counts = int(hist.counts[lo:hi].sum())
    wing_lo, wing_hi = wing
    wing_mask = (np.abs(centers) >= wing_lo) & (np.abs(centers) <= wing_hi)
    # keep the peak window itself out of the floor estimate
    wing_mask[lo:hi] = False
    if not np.any(wing_mask):
        raise EstimationError("histogram has no off-peak wing region for the accidental floor")
    floor_per_bin = float(hist.counts[wing_mask].mean())
    accidental_counts = floor_per_bin * n_win
    net_counts = raw_counts - accidental_counts
    clipped = net_counts < 0
    if clipped:
        net_counts = 0.0
    return CoincidenceRates(
        raw=raw_counts / acquisition,
        accidental=accidental_counts / acquisition,
        net=net_counts / acquisition,
        clipped=bool(clipped),
    )


def dead_time_correct(measured_rate: float, dead_time: float) -> float:
    """Invert non-paralyzable dead-time loss: true = m / (1 - m * tau_d)."""
    if measured_rate < 0 or not np.isfinite(measured_rate):
        raise DomainError(f"measured_rate must be >= 0, got {measured_rate!r}")
    if dead_time < 0 or not np.isfinite(dead_time):
        raise DomainError(f"dead_time must be >= 0, got {dead_time!r}")
    loss = measured_rate * dead_time
    if loss >= 1.0:
        raise SaturationError(
            f"measured rate {measured_rate:g} at dead time {dead_time:g} is saturated")
    return measured_rate / (1.0 - loss)


def pair_rate_estimate(n_signal: float, n_idler: float, n_coincidence: float) -> float:
    """Total generated pair rate from singles and coincidences,
    N_s * N_i / N_c: channel efficiencies cancel."""
    for name, val in (("n_signal", n_signal), ("n_idler", n_idler)):
        if val < 0 or not np.isfinite(val):
            raise DomainError(f"{name} must be >= 0, got {val!r}")
    if n_coincidence <= 0 or not np.isfinite(n_coincidence):
        raise EstimationError(
            f"pair rate is undefined at n_coincidence = {n_coincidence!r}")
    return n_signal * n_idler / n_coincidence


def heralding_efficiency(n_coincidence: float, n_single: float) -> float:
    """Heralded detection probability N_c / N_single, clamped to 1.

    A ratio above one is unphysical (it means the inputs are inconsistent,
    e.g. mismatched windows); it is clamped and a warning is raised rather
    than propagating silently.
    """
    if n_coincidence < 0 or not np.isfinite(n_coincidence):
        raise DomainError(f"n_coincidence must be >= 0, got {n_coincidence!r}")
    if n_single <= 0 or not np.isfinite(n_single):
        raise EstimationError(f"heralding efficiency undefined at n_single = {n_single!r}")
    eta = n_coincidence / n_single
    if eta > 1.0:
        warnings.warn(f"heralding efficiency {eta:.3g} > 1 clamped; check window/rates",
                      RuntimeWarning, stacklevel=2)
        return 1.0
    return eta


def normalized_g2(hist: CoincidenceHistogram, rate_start: float, rate_stop: float,
                  acquisition: float) -> CorrelationFunction:
    """g2 curve: counts divided by the accidental expectation
    R_start * R_stop * bin_width * acquisition.  Far wings approach one."""
    if rate_start <= 0 or rate_stop <= 0 or acquisition <= 0:
        raise DomainError("rates and acquisition must be positive for normalization")
    denom = rate_start * rate_stop * hist.bin_width * acquisition
    g2 = hist.counts / denom
    grid = TimeGrid(t_start=float(hist.bin_centers[0]), dt=hist.bin_width, n=hist.n_bins)
    return CorrelationFunction(grid=grid, values=g2)


def auto_correlation_g2(stream_a: EventStream, stream_b: EventStream,
                        bin_width: float, delay_range: float,
                        acquisition: float) -> CorrelationFunction:
    """Normalized cross-histogram of two half-streams (e.g. the two output
    ports of a balanced splitter), same normalization as normalized_g2."""
    if acquisition <= 0:
        raise DomainError(f"acquisition must be positive, got {acquisition!r}")
    if len(stream_a) == 0 or len(stream_b) == 0:
        raise EstimationError("autocorrelation needs nonempty streams")
    hist = start_stop_histogram(stream_a, stream_b, bin_width, delay_range)
    return normalized_g2(hist, len(stream_a) / acquisition,
                         len(stream_b) / acquisition, acquisition)


def g2_zero(corr: CorrelationFunction, mode: str = "peak") -> float:
    """Scalar g2(0) readout from a g2 curve: the peak bin (default) or the
    bin containing tau = 0."""
    if mode == "peak":
        return float(corr.values.max())
    if mode == "zero":
        idx = int(np.argmin(np.abs(corr.grid.times)))
        return float(corr.values[idx])
    raise DomainError(f"mode must be 'peak' or 'zero', got {mode!r}")


def _window_flags(starts: np.ndarray, stops: np.ndarray, window: float,
                  center: float) -> np.ndarray:
    lo = np.searchsorted(stops, starts + center - window / 2.0, side="left")
    hi = np.searchsorted(stops, starts + center + window / 2.0, side="left")
    return hi > lo


def heralded_g2c(signal: EventStream, idler1: EventStream, idler2: EventStream,
                 window: float, center: float = 0.0) -> float:
    """Heralded (conditioned) zero-delay autocorrelation with a splitter:

        g2c = N_triple * N_signal / (N_si1 * N_si2)

    where N_si1, N_si2 count signals with at least one port-1 (port-2)
    event inside the window around the signal, and N_triple counts signals
    with both.  Near zero for a single-photon source, 1 for coherent
    light.
    """
    if window <= 0:
        raise DomainError(f"window must be positive, got {window!r}")
    n_s = len(signal)
    if n_s == 0:
        raise EstimationError("no herald events")
    b1 = _window_flags(signal.timestamps, idler1.timestamps, window, center)
    b2 = _window_flags(signal.timestamps, idler2.timestamps, window, center)
    n_1 = int(np.sum(b1))
    n_2 = int(np.sum(b2))
    n_12 = int(np.sum(b1 & b2))
    if n_1 == 0 or n_2 == 0:
        raise EstimationError("no heralded coincidences on one of the splitter ports")
    return n_12 * n_s / (n_1 * n_2)


def cauchy_schwarz_factor(g2_si0: float, g2_ss0: float, g2_ii0: float) -> float:
    """Violation factor [g2_si(0)]^2 / (g2_ss(0) * g2_ii(0)); classical
    fields obey <= 1."""
    for name, val in (("g2_si0", g2_si0), ("g2_ss0", g2_ss0), ("g2_ii0", g2_ii0)):
        if val <= 0 or not np.isfinite(val):
            raise DomainError(f"{name} must be positive, got {val!r}")
    return g2_si0 * g2_si0 / (g2_ss0 * g2_ii0)


@dataclass(frozen=True)
class CountingSummary:
    """Scalar results of one counting run.  None means not measurable with
    the channels present."""

    acquisition: float
    window: float
    n_signal: float
    n_idler: float
    n_coincidence_raw: float
    n_coincidence_accidental: float
    n_coincidence: float
    pair_rate: float | None = None
    eta_signal: float | None = None
    eta_idler: float | None = None
    g2_si0: float | None = None
    g2_ii0: float | None = None
    g2_ss0: float | None = None
    g2_c0: float | None = None
    cs_factor: float | None = None
    extra: dict = field(default_factory=dict, compare=False)

    def to_text(self) -> str:
        buf = io.StringIO()
        for f in _dc_fields(self):
            if f.name == "extra":
                continue
            val = getattr(self, f.name)
            if val is None:
                continue
            buf.write(f"{f.name}={val:.10g}\n" if isinstance(val, float)
                      else f"{f.name}={val}\n")
        for key in sorted(self.extra):
            buf.write(f"{key}={self.extra[key]}\n")
        return buf.getvalue()

    @classmethod
    def from_text(cls, text: str) -> "CountingSummary":
        known = {f.name: f for f in _dc_fields(cls) if f.name != "extra"}
        kwargs = {}
        extra = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or "=" not in line:
                continue
            key, val = line.split("=", 1)
            if key in known:
                kwargs[key] = float(val)
            else:
                extra[key] = val
        return cls(extra=extra, **kwargs)


def histogram_csv_text(hist: CoincidenceHistogram, g2: CorrelationFunction | None = None) -> str:
    """CSV rows 'tau_ns,counts,g2'; g2 column is empty when no
    normalization is available."""
    if g2 is not None and g2.grid.n != hist.n_bins:
        raise DomainError("g2 curve does not match the histogram binning")
    buf = io.StringIO()
    buf.write("tau_ns,counts,g2\n")
    centers_ns = hist.bin_centers * 1e9
    for i in range(hist.n_bins):
        g = f"{g2.values[i]:.12g}" if g2 is not None else ""
        buf.write(f"{centers_ns[i]:.12g},{hist.counts[i]},{g}\n")
    return buf.getvalue()


def histogram_from_csv_text(text: str):
    """Inverse of histogram_csv_text: returns (hist, g2 or None)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "tau_ns,counts,g2":
        raise DomainError("expected header 'tau_ns,counts,g2'")
    centers = []
    counts = []
    g2_vals = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 3:
            raise DomainError(f"bad histogram row: {ln!r}")
        centers.append(float(parts[0]) * 1e-9)
        counts.append(int(parts[1]))
        g2_vals.append(float(parts[2]) if parts[2] else math.nan)
    centers = np.asarray(centers)
    if len(centers) < 2:
        raise DomainError("histogram needs at least two bins")
    bw = float(np.median(np.diff(centers)))
    hist = CoincidenceHistogram(bin_width=bw, offset=float(centers[0] - bw / 2.0),
                                counts=np.asarray(counts))
    g2_arr = np.asarray(g2_vals)
    if np.all(np.isnan(g2_arr)):
        return hist, None
    grid = TimeGrid(t_start=float(centers[0]), dt=bw, n=len(centers))
    return hist, CorrelationFunction(grid=grid, values=np.nan_to_num(g2_arr))
