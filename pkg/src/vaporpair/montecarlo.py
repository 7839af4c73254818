"""Event-level Monte Carlo of pair generation and photon counting.

Pairs are born as a homogeneous Poisson process over the acquisition
window.  Each pair's idler delay is drawn from a supplied correlation
waveform by inverse-CDF sampling.  Detection channels thin the stream
(transmission times quantum efficiency), smear timestamps with Gaussian
jitter, add Poisson dark counts, and then apply non-paralyzable dead-time
pruning.  Everything is reproducible from explicit integer seeds.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .biphoton import CorrelationFunction
from .errors import ConfigError, DomainError

# Gaussian FWHM to sigma divisor used for timing jitter.
JITTER_FWHM_OVER_SIGMA = 2.355

DEFAULT_JITTER_SIGMA = 300e-12 / JITTER_FWHM_OVER_SIGMA


@dataclass(frozen=True)
class DetectorSpec:
    """Single-photon detector: quantum efficiency, Gaussian timing jitter
    (sigma, seconds), non-paralyzable dead time (s), dark rate (cps)."""

    efficiency: float = 0.40
    jitter_sigma: float = DEFAULT_JITTER_SIGMA
    dead_time: float = 50e-9
    dark_rate: float = 200.0

    def __post_init__(self):
        if not 0.0 <= self.efficiency <= 1.0:
            raise DomainError(f"efficiency must be in [0, 1], got {self.efficiency!r}")
        if self.jitter_sigma < 0 or not np.isfinite(self.jitter_sigma):
            raise DomainError(f"jitter_sigma must be >= 0, got {self.jitter_sigma!r}")
        if self.dead_time < 0 or not np.isfinite(self.dead_time):
            raise DomainError(f"dead_time must be >= 0, got {self.dead_time!r}")
        if self.dark_rate < 0 or not np.isfinite(self.dark_rate):
            raise DomainError(f"dark_rate must be >= 0, got {self.dark_rate!r}")


@dataclass(frozen=True)
class ChannelSpec:
    """One collection-plus-detection arm: optical transmission times the
    detector that terminates it."""

    transmission: float = 0.50
    detector: DetectorSpec = field(default_factory=DetectorSpec)

    def __post_init__(self):
        if not 0.0 <= self.transmission <= 1.0:
            raise DomainError(f"transmission must be in [0, 1], got {self.transmission!r}")

    @property
    def throughput(self) -> float:
        return self.transmission * self.detector.efficiency


@dataclass(frozen=True)
class PairSourceSpec:
    """Pair source: mean pair rate (pairs/s), idler-delay waveform,
    acquisition duration (s), and the master seed."""

    pair_rate: float
    waveform: CorrelationFunction
    duration: float
    seed: int

    def __post_init__(self):
        if not np.isfinite(self.pair_rate) or self.pair_rate <= 0:
            raise DomainError(f"pair_rate must be positive, got {self.pair_rate!r}")
        if not np.isfinite(self.duration) or self.duration <= 0:
            raise DomainError(f"duration must be positive, got {self.duration!r}")
        if self.waveform.values.sum() <= 0:
            raise DomainError("waveform must have positive total mass")
        if not isinstance(self.seed, (int, np.integer)):
            raise ConfigError(f"seed must be an integer, got {self.seed!r}")


@dataclass(frozen=True)
class EventStream:
    """Detection timestamps (seconds) of one channel, strictly increasing."""

    channel: str
    timestamps: np.ndarray

    def __post_init__(self):
        ts = np.array(self.timestamps, dtype=float)
        if ts.ndim != 1:
            raise DomainError("timestamps must be a 1-d array")
        if ts.size and (np.any(~np.isfinite(ts)) or np.any(np.diff(ts) <= 0)):
            raise DomainError(f"channel {self.channel}: timestamps must be finite and strictly increasing")
        ts.setflags(write=False)
        object.__setattr__(self, "timestamps", ts)

    def __len__(self):
        return self.timestamps.size


def sample_delays(waveform: CorrelationFunction, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n delays from the waveform by inverse-CDF sampling.

    The waveform is treated as a piecewise-constant density: each sample
    value is the mass of the bin centered on its time stamp, and draws are
    uniform within a bin.  Normalization is internal, so any positive
    scaling of the waveform samples gives identical statistics.
    """
    w = waveform.values
    cdf = np.cumsum(w)
    total = cdf[-1]
    if total <= 0:
        raise DomainError("waveform must have positive total mass")
    cdf = cdf / total
    u = rng.random(n)
    idx = np.searchsorted(cdf, u, side="right")
    idx = np.clip(idx, 0, len(w) - 1)
    frac = rng.random(n) - 0.5
    return waveform.grid.times[idx] + frac * waveform.grid.dt


def generate_pairs(src: PairSourceSpec) -> np.ndarray:
    """Emit pair birth and idler detection-side times.

    Returns an (N, 2) array with column 0 the signal time and column 1 the
    idler time (signal time plus the sampled delay), signal times sorted.
    N is Poisson with mean pair_rate * duration.
    """
    rng = np.random.default_rng(src.seed)
    n = rng.poisson(src.pair_rate * src.duration)
    t_signal = np.sort(rng.uniform(0.0, src.duration, n))
    delays = sample_delays(src.waveform, n, rng)
    return np.column_stack([t_signal, t_signal + delays])


def dead_time_prune(times: np.ndarray, dead_time: float) -> np.ndarray:
    """Non-paralyzable dead-time filter on a sorted timestamp array.

    After an accepted event, every event strictly within dead_time is
    discarded; an event exactly dead_time later is accepted.  Rejected
    events do not extend the dead window.
    """
    if dead_time < 0:
        raise DomainError(f"dead_time must be >= 0, got {dead_time!r}")
    if times.size == 0:
        return times.copy()
    if dead_time == 0.0:
        # no dead window: only exact ties are dropped (first of a tie kept)
        keep = np.empty(times.size, dtype=bool)
        keep[0] = True
        np.greater(times[1:], times[:-1], out=keep[1:])
        return times[keep].astype(float)
    kept = []
    # list iteration is several times faster than indexing the ndarray
    last = -np.inf
    for t in times.tolist():
        if t - last >= dead_time and t != last:
            kept.append(t)
            last = t
    return np.asarray(kept, dtype=float)


def apply_channel(events: np.ndarray, chan: ChannelSpec, duration: float,
                  seed: int) -> np.ndarray:
    """Push photon arrival times through one detection arm.

    Bernoulli thinning at the arm throughput, Gaussian jitter, Poisson
    dark counts over [0, duration], a sort, a clip to the acquisition
    window, then dead-time pruning.  Returns the recorded timestamps.
    """
    if duration <= 0 or not np.isfinite(duration):
        raise DomainError(f"duration must be positive, got {duration!r}")
    rng = np.random.default_rng(seed)
    events = np.asarray(events, dtype=float)
    det = chan.detector
    keep = rng.random(events.size) < chan.throughput
    kept = events[keep]
    if det.jitter_sigma > 0 and kept.size:
        kept = kept + rng.normal(0.0, det.jitter_sigma, kept.size)
    n_dark = rng.poisson(det.dark_rate * duration)
    darks = rng.uniform(0.0, duration, n_dark)
    merged = np.sort(np.concatenate([kept, darks]))
    merged = merged[(merged >= 0.0) & (merged <= duration)]
    return dead_time_prune(merged, det.dead_time)


def simulate_run(src: PairSourceSpec, chan_signal: ChannelSpec,
                 chan_idler: ChannelSpec, chan_idler2: ChannelSpec | None = None) -> dict:
    """Full source-to-detectors run.

    Returns {"signal": EventStream, "idler": EventStream} or, when a
    second idler channel is given, the idler photons are first routed
    50/50 to two arms ("idler1", "idler2") as by a balanced fiber
    splitter.  All channel seeds derive from the source seed, so a run is
    reproducible end to end from one integer.
    """
    ss = np.random.SeedSequence(src.seed)
    seeds = [int(s.generate_state(1)[0]) for s in ss.spawn(4)]
    pairs = generate_pairs(src)
    t_signal = pairs[:, 0]
    t_idler = pairs[:, 1]
    out = {"signal": EventStream("signal", apply_channel(t_signal, chan_signal,
                                                         src.duration, seeds[0]))}
    if chan_idler2 is None:
        out["idler"] = EventStream("idler", apply_channel(t_idler, chan_idler,
                                                          src.duration, seeds[1]))
    else:
        route = np.random.default_rng(seeds[3]).random(t_idler.size) < 0.5
        out["idler1"] = EventStream("idler1", apply_channel(t_idler[route], chan_idler,
                                                            src.duration, seeds[1]))
        out["idler2"] = EventStream("idler2", apply_channel(t_idler[~route], chan_idler2,
                                                            src.duration, seeds[2]))
    return out


def write_event_streams(path, streams: dict, metadata: dict) -> None:
    """Write streams as 'channel<TAB>timestamp_ns' lines (3 decimal digits,
    i.e. picosecond resolution), channels concatenated, each channel's
    block time-sorted.  Metadata goes to a flat key=value sidecar at
    path + '.meta'."""
    path = str(path)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        for name in sorted(streams):
            for t in streams[name].timestamps:
                fh.write(f"{name}\t{t * 1e9:.3f}\n")
    os.replace(tmp, path)
    meta_tmp = path + ".meta.tmp"
    with open(meta_tmp, "w") as fh:
        for key in sorted(metadata):
            fh.write(f"{key}={metadata[key]}\n")
    os.replace(meta_tmp, path + ".meta")


def read_event_streams(path):
    """Read a stream file written by write_event_streams.

    Returns (streams, metadata); metadata is {} when no sidecar exists.
    The format quantizes timestamps to 1 ps, so two events closer than
    half a picosecond collapse into one record on the way back in.
    """
    path = str(path)
    by_channel: dict[str, list] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise DomainError(f"{path}:{lineno}: expected 'channel<TAB>timestamp_ns'")
            by_channel.setdefault(parts[0], []).append(float(parts[1]) * 1e-9)
    streams = {name: EventStream(name, np.unique(np.asarray(ts)))
               for name, ts in by_channel.items()}
    metadata = {}
    meta_path = path + ".meta"
    if os.path.exists(meta_path):
        with open(meta_path) as fh:
            for line in fh:
                line = line.strip()
                if line and "=" in line:
                    key, val = line.split("=", 1)
                    metadata[key] = val
    return streams, metadata
