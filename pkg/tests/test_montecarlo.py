"""Event-level simulation: delay sampling, channel effects, dead time,
stream serialization."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from vaporpair import biphoton, montecarlo
from vaporpair.errors import DomainError


@pytest.fixture(scope="module")
def waveform(system, fields, vgrid, tgrid):
    return biphoton.correlation_gsi(tgrid, vgrid, system, fields)


def _clean_detector(**kw):
    base = dict(efficiency=1.0, jitter_sigma=0.0, dead_time=0.0, dark_rate=0.0)
    base.update(kw)
    return montecarlo.DetectorSpec(**base)


def test_sample_delays_distribution(waveform):
    rng = np.random.default_rng(123)
    n = 40000
    delays = montecarlo.sample_delays(waveform, n, rng)
    # piecewise-linear CDF of the binned waveform
    t = waveform.grid.times
    dt = waveform.grid.dt
    edges = np.concatenate([t - dt / 2, [t[-1] + dt / 2]])
    cdf_vals = np.concatenate([[0.0], np.cumsum(waveform.values)])
    cdf_vals = cdf_vals / cdf_vals[-1]
    res = stats.kstest(delays, lambda x: np.interp(x, edges, cdf_vals))
    assert res.pvalue > 1e-3
    assert delays.min() >= edges[0]
    assert delays.max() <= edges[-1]


def test_sample_delays_causal_support(waveform):
    rng = np.random.default_rng(5)
    delays = montecarlo.sample_delays(waveform, 5000, rng)
    # the causal waveform has no mass below tau = 0; draws can land at
    # most half a bin below it
    assert delays.min() >= -waveform.grid.dt / 2


def test_sample_delays_rejects_zero_mass():
    grid = biphoton.symmetric_grid(1e-10, 16)
    corr = biphoton.CorrelationFunction(grid=grid, values=np.zeros(16))
    with pytest.raises(DomainError):
        montecarlo.sample_delays(corr, 10, np.random.default_rng(0))


def test_generate_pairs_counts_and_order(waveform):
    src = montecarlo.PairSourceSpec(pair_rate=1e5, waveform=waveform,
                                    duration=1.0, seed=99)
    pairs = montecarlo.generate_pairs(src)
    n = pairs.shape[0]
    # Poisson(1e5): four sigma bounds
    assert abs(n - 1e5) < 4 * np.sqrt(1e5)
    assert np.all(np.diff(pairs[:, 0]) >= 0)
    delays = pairs[:, 1] - pairs[:, 0]
    assert delays.min() >= -waveform.grid.dt / 2
    # the bulk of the correlation mass sits inside a few nanoseconds
    assert np.median(delays) < 5e-9


def test_generate_pairs_deterministic(waveform):
    src = montecarlo.PairSourceSpec(pair_rate=5e4, waveform=waveform,
                                    duration=0.5, seed=7)
    a = montecarlo.generate_pairs(src)
    b = montecarlo.generate_pairs(src)
    assert np.array_equal(a, b)


def test_dead_time_prune_examples():
    times = np.array([0.0, 10e-9, 60e-9, 119e-9, 180e-9])
    out = montecarlo.dead_time_prune(times, 50e-9)
    assert np.allclose(out, [0.0, 60e-9, 119e-9, 180e-9])
    # exact tie: second event dropped even with zero dead time
    out0 = montecarlo.dead_time_prune(np.array([5.0, 5.0, 8.0]), 0.0)
    assert np.allclose(out0, [5.0, 8.0])
    # an event exactly dead_time later is accepted
    out2 = montecarlo.dead_time_prune(np.array([0.0, 50e-9]), 50e-9)
    assert out2.size == 2


def test_dead_time_prune_rejects_negative():
    with pytest.raises(DomainError):
        montecarlo.dead_time_prune(np.array([1.0]), -1e-9)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(min_value=0.0, max_value=1e-3,
                          allow_nan=False), min_size=0, max_size=200),
       st.floats(min_value=1e-9, max_value=1e-4))
def test_dead_time_prune_gap_property(raw, dead):
    times = np.sort(np.asarray(raw, dtype=float))
    out = montecarlo.dead_time_prune(times, dead)
    if out.size > 1:
        assert np.diff(out).min() >= dead
    # idempotent
    again = montecarlo.dead_time_prune(out, dead)
    assert np.array_equal(out, again)


def test_apply_channel_identity():
    events = np.sort(np.random.default_rng(3).uniform(0, 1.0, 500))
    chan = montecarlo.ChannelSpec(transmission=1.0, detector=_clean_detector())
    out = montecarlo.apply_channel(events, chan, 1.0, seed=1)
    assert np.allclose(out, events)


def test_apply_channel_thinning_statistics():
    events = np.sort(np.random.default_rng(4).uniform(0, 1.0, 100000))
    chan = montecarlo.ChannelSpec(transmission=0.6,
                                  detector=_clean_detector(efficiency=0.5))
    out = montecarlo.apply_channel(events, chan, 1.0, seed=2)
    p = 0.3  # throughput = transmission * efficiency
    sigma = np.sqrt(100000 * p * (1 - p))
    assert abs(out.size - 100000 * p) < 4 * sigma


def test_apply_channel_jitter_spread():
    events = np.arange(1, 1000) * 1e-6  # 1 us spacing, no overlap risk
    sig = 100e-12
    chan = montecarlo.ChannelSpec(transmission=1.0,
                                  detector=_clean_detector(jitter_sigma=sig))
    out = montecarlo.apply_channel(events, chan, 1.0, seed=8)
    assert out.size == events.size
    d = np.sort(out) - events
    assert np.std(d) == pytest.approx(sig, rel=0.1)


def test_apply_channel_darks_only():
    chan = montecarlo.ChannelSpec(transmission=1.0,
                                  detector=_clean_detector(dark_rate=5000.0))
    out = montecarlo.apply_channel(np.array([]), chan, 2.0, seed=21)
    lam = 5000.0 * 2.0
    assert abs(out.size - lam) < 4 * np.sqrt(lam)
    assert out.min() >= 0.0 and out.max() <= 2.0


def test_apply_channel_clips_to_acquisition():
    events = np.array([1e-12, 0.9999999])
    chan = montecarlo.ChannelSpec(
        transmission=1.0, detector=_clean_detector(jitter_sigma=1e-6))
    out = montecarlo.apply_channel(events, chan, 1.0, seed=5)
    if out.size:
        assert out.min() >= 0.0 and out.max() <= 1.0


def test_apply_channel_dead_time_enforced():
    events = np.sort(np.random.default_rng(6).uniform(0, 1e-3, 20000))
    chan = montecarlo.ChannelSpec(
        transmission=1.0, detector=_clean_detector(dead_time=100e-9))
    out = montecarlo.apply_channel(events, chan, 1e-3, seed=6)
    assert np.diff(out).min() >= 100e-9


def test_simulate_run_deterministic(waveform):
    src = montecarlo.PairSourceSpec(pair_rate=2e5, waveform=waveform,
                                    duration=0.2, seed=31)
    chan = montecarlo.ChannelSpec(transmission=0.3, detector=_clean_detector())
    a = montecarlo.simulate_run(src, chan, chan)
    b = montecarlo.simulate_run(src, chan, chan)
    assert set(a) == {"signal", "idler"}
    for k in a:
        assert np.array_equal(a[k].timestamps, b[k].timestamps)
    src2 = montecarlo.PairSourceSpec(pair_rate=2e5, waveform=waveform,
                                     duration=0.2, seed=32)
    c = montecarlo.simulate_run(src2, chan, chan)
    assert not np.array_equal(a["signal"].timestamps, c["signal"].timestamps)


def test_simulate_run_splitter_balance(waveform):
    src = montecarlo.PairSourceSpec(pair_rate=3e5, waveform=waveform,
                                    duration=0.3, seed=12)
    chan = montecarlo.ChannelSpec(transmission=0.5, detector=_clean_detector())
    st_ = montecarlo.simulate_run(src, chan, chan, chan_idler2=chan)
    assert set(st_) == {"signal", "idler1", "idler2"}
    n1, n2 = len(st_["idler1"]), len(st_["idler2"])
    # both ports see half the idler flux
    assert abs(n1 - n2) < 4 * np.sqrt(n1 + n2)


def test_event_stream_validation():
    with pytest.raises(DomainError):
        montecarlo.EventStream("x", np.array([1.0, 1.0]))
    with pytest.raises(DomainError):
        montecarlo.EventStream("x", np.array([2.0, 1.0]))
    s = montecarlo.EventStream("x", np.array([1.0, 2.0]))
    assert len(s) == 2
    with pytest.raises(ValueError):
        s.timestamps[0] = 0.0


def test_stream_file_round_trip(tmp_path):
    streams = {
        "signal": montecarlo.EventStream("signal", np.array([1.5e-9, 7.25e-9, 1e-3])),
        "idler": montecarlo.EventStream("idler", np.array([2.125e-9])),
    }
    meta = {"duration_s": "0.001", "seed": "42"}
    path = tmp_path / "events.tsv"
    montecarlo.write_event_streams(path, streams, meta)
    text = path.read_text()
    assert text.splitlines()[0] == "idler\t2.125"
    back, meta_back = montecarlo.read_event_streams(path)
    assert meta_back == meta
    # picosecond quantization is exact for these values
    assert np.allclose(back["signal"].timestamps, streams["signal"].timestamps,
                       rtol=0, atol=0.5e-12)
    assert not (tmp_path / "events.tsv.tmp").exists()


def test_stream_file_quantization_merges_ties(tmp_path):
    ts = np.array([1.0e-9, 1.0001e-9, 5.0e-9])  # first two collide at 1 ps
    streams = {"signal": montecarlo.EventStream("signal", ts)}
    path = tmp_path / "ev.tsv"
    montecarlo.write_event_streams(path, streams, {})
    back, _ = montecarlo.read_event_streams(path)
    assert len(back["signal"]) == 2


def test_read_event_streams_bad_line(tmp_path):
    p = tmp_path / "bad.tsv"
    p.write_text("signal 1.0\n")  # space, not tab
    with pytest.raises(DomainError):
        montecarlo.read_event_streams(p)


def test_read_event_streams_no_sidecar(tmp_path):
    p = tmp_path / "plain.tsv"
    p.write_text("signal\t1.000\nsignal\t2.000\n")
    streams, meta = montecarlo.read_event_streams(p)
    assert meta == {}
    assert len(streams["signal"]) == 2


def test_pair_source_spec_guards(waveform):
    with pytest.raises(DomainError):
        montecarlo.PairSourceSpec(pair_rate=-1.0, waveform=waveform,
                                  duration=1.0, seed=0)
    with pytest.raises(DomainError):
        montecarlo.PairSourceSpec(pair_rate=1.0, waveform=waveform,
                                  duration=0.0, seed=0)


def test_detector_spec_guards():
    with pytest.raises(DomainError):
        montecarlo.DetectorSpec(efficiency=1.5)
    with pytest.raises(DomainError):
        montecarlo.DetectorSpec(dead_time=-1e-9)
    with pytest.raises(DomainError):
        montecarlo.ChannelSpec(transmission=2.0, detector=montecarlo.DetectorSpec())
