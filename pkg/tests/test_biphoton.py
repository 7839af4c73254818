"""Correlation curves: causality, the dephasing envelope, widths, and the
spectral readout."""

import numpy as np
import pytest

from vaporpair import atomic, biphoton
from vaporpair.errors import DomainError, EstimationError, WindowingError

FOUR_LN2 = 4.0 * np.log(2.0)


def test_symmetric_grid_zero_sample():
    g = biphoton.symmetric_grid(10e-12, 4096)
    assert g.times[2048] == 0.0
    assert g.n == 4096
    assert g.times[0] == pytest.approx(-2048 * 10e-12)


def test_two_photon_amplitude_causal(system, fields):
    psi = biphoton.two_photon_amplitude(0.0, -1e-9, system, fields)
    assert psi == 0j
    psi = biphoton.two_photon_amplitude(0.0, np.array([-2e-9, -1e-12]), system, fields)
    assert np.all(psi == 0)


def test_two_photon_amplitude_formula(system, fields):
    v, tau = 37.0, 0.8e-9
    got = biphoton.two_photon_amplitude(v, tau, system, fields)
    a = atomic.two_photon_coefficient(v, system, fields)
    expect = a * np.exp((-system.gamma31 / 2 + 1j * system.k_idler * v) * tau)
    assert got == pytest.approx(expect, rel=1e-12)


def test_amplitude_decay_rate(system, fields):
    # at v = 0 the magnitude decays at exactly gamma31/2
    t1, t2 = 1e-9, 3e-9
    p1 = abs(biphoton.two_photon_amplitude(0.0, t1, system, fields))
    p2 = abs(biphoton.two_photon_amplitude(0.0, t2, system, fields))
    assert p2 / p1 == pytest.approx(np.exp(-system.gamma31 / 2 * (t2 - t1)), rel=1e-10)


def test_flat_amplitude_matches_characteristic_function(system, fields, vgrid, tgrid):
    """With A = 1 the velocity sum is the characteristic function of the
    Maxwell distribution: a Gaussian exp[-(k_I sigma_v tau)^2 / 2]."""
    phi = biphoton.velocity_averaged_amplitude(tgrid, vgrid, system, fields,
                                               flat_amplitude=True)
    s = atomic.sigma_v(325.15, system.atom_mass)
    tau = tgrid.times
    expect = np.exp(-((system.k_idler * s * tau) ** 2) / 2.0)
    mask = expect > 1e-4
    rel = np.abs(np.abs(phi.values[mask]) - expect[mask]) / expect[mask]
    assert rel.max() < 5e-3


def test_dephasing_envelope_even(system, fields, vgrid, tgrid):
    env = biphoton.dephasing_envelope(tgrid, vgrid, system, fields, flat_amplitude=True)
    v = env.values
    n = tgrid.n
    # sample n//2 + k against n//2 - k
    for k in (1, 7, 100, 500):
        assert v[n // 2 + k] == pytest.approx(v[n // 2 - k], rel=1e-9)


def test_correlation_gsi_causality_and_identity(system, fields, vgrid, tgrid):
    gsi = biphoton.correlation_gsi(tgrid, vgrid, system, fields)
    env = biphoton.dephasing_envelope(tgrid, vgrid, system, fields)
    tau = tgrid.times
    assert np.all(gsi.values[tau < 0] == 0)
    pos = tau >= 0
    # G(tau) e^{gamma31 tau} recovers the envelope exactly on tau >= 0
    recovered = gsi.values[pos] * np.exp(system.gamma31 * tau[pos])
    assert np.allclose(recovered, env.values[pos], rtol=1e-10, atol=0)


def test_correlation_time_flat_envelope(system, fields, vgrid, tgrid):
    env = biphoton.dephasing_envelope(tgrid, vgrid, system, fields, flat_amplitude=True)
    fwhm = biphoton.correlation_time(env)
    assert fwhm == pytest.approx(1.17233e-9, rel=1e-4)
    # analytic width of exp[-(k sigma tau)^2]: 2 sqrt(ln 2) / (k sigma)
    s = atomic.sigma_v(325.15, system.atom_mass)
    analytic = 2.0 * np.sqrt(np.log(2.0)) / (system.k_idler * s)
    assert fwhm == pytest.approx(analytic, rel=5e-3)


def test_correlation_time_model_amplitude(system, fields, vgrid, tgrid):
    env = biphoton.dephasing_envelope(tgrid, vgrid, system, fields)
    fwhm = biphoton.correlation_time(env)
    # the structured coefficient reshapes the envelope somewhat; it stays
    # in the nanosecond regime
    assert 0.5e-9 < fwhm < 3.0e-9


def test_fwhm_edge_peak_raises():
    grid = biphoton.TimeGrid(t_start=0.0, dt=1e-10, n=64)
    vals = np.exp(-np.arange(64) / 8.0)  # peak on the first sample
    corr = biphoton.CorrelationFunction(grid=grid, values=vals)
    with pytest.raises(EstimationError):
        biphoton.correlation_time(corr)


def test_fwhm_no_crossing_raises():
    grid = biphoton.symmetric_grid(1e-10, 64)
    vals = 1.0 - 0.01 * (np.abs(np.arange(64) - 32) / 32.0)  # never below half
    corr = biphoton.CorrelationFunction(grid=grid, values=vals)
    with pytest.raises(EstimationError):
        biphoton.correlation_time(corr)


def test_bandwidth_flat_envelope(system, fields, vgrid, tgrid):
    env = biphoton.dephasing_envelope(tgrid, vgrid, system, fields, flat_amplitude=True)
    bw = biphoton.bandwidth_from_correlation(env)
    assert bw == pytest.approx(532.329e6, rel=1e-4)
    # equals the Doppler width of the reabsorbed line
    dop = atomic.doppler_fwhm(325.15, system.atom_mass, 780.2e-9)
    assert bw == pytest.approx(dop, rel=1e-3)


def test_bandwidth_gaussian_pair_product():
    """For a Gaussian correlation the amplitude-FWHM product is
    dt * df = 4 ln 2 / pi."""
    dt_g = 1.5e-9
    grid = biphoton.symmetric_grid(5e-12, 8192)
    tau = grid.times
    vals = np.exp(-FOUR_LN2 * (tau / dt_g) ** 2)
    corr = biphoton.CorrelationFunction(grid=grid, values=vals)
    bw = biphoton.bandwidth_from_correlation(corr)
    dt_amp = np.sqrt(2.0) * dt_g  # FWHM of sqrt of the curve
    assert bw * dt_amp == pytest.approx(FOUR_LN2 / np.pi, rel=1e-3)


def test_bandwidth_requires_decayed_edges():
    grid = biphoton.symmetric_grid(1e-12, 512)  # +-256 ps, envelope ~ 1
    tau = grid.times
    vals = np.exp(-FOUR_LN2 * (tau / 5e-9) ** 2)
    corr = biphoton.CorrelationFunction(grid=grid, values=vals)
    with pytest.raises(WindowingError):
        biphoton.bandwidth_from_correlation(corr)


def test_correlation_function_validation():
    grid = biphoton.symmetric_grid(1e-10, 16)
    with pytest.raises(DomainError):
        biphoton.CorrelationFunction(grid=grid, values=-np.ones(16))
    with pytest.raises(DomainError):
        biphoton.CorrelationFunction(grid=grid, values=np.full(16, np.nan))
    with pytest.raises(DomainError):
        biphoton.CorrelationFunction(grid=grid, values=np.ones(8))


def test_correlation_csv_round_trip(tmp_path, system, fields, vgrid):
    grid = biphoton.symmetric_grid(20e-12, 256)
    env = biphoton.dephasing_envelope(grid, vgrid, system, fields, flat_amplitude=True)
    path = tmp_path / "corr.csv"
    env.to_csv(path)
    text = path.read_text()
    assert text.splitlines()[0] == "tau_s,value"
    back = biphoton.CorrelationFunction.from_csv(path)
    assert back.grid.n == env.grid.n
    assert np.allclose(back.values, env.values, rtol=1e-10)
    assert back.grid.dt == pytest.approx(env.grid.dt, rel=1e-9)


def test_correlation_csv_rejects_bad_header(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("time,val\n0,1\n")
    with pytest.raises(DomainError):
        biphoton.CorrelationFunction.from_csv(p)


def test_zero_rabi_gives_zero_curve(system, vgrid, tgrid):
    off = atomic.FieldParams(rabi_pump=0.0, rabi_coupling=0.0)
    gsi = biphoton.correlation_gsi(tgrid, vgrid, system, off)
    assert np.all(gsi.values == 0)
