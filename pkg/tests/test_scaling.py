import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vaporpair import scaling
from vaporpair.errors import ConfigError, DomainError, EstimationError


def test_od_from_transmission_basic():
    assert scaling.od_from_transmission(1.0, 1.0) == 0.0
    assert scaling.od_from_transmission(np.exp(-3.0), 1.0) == pytest.approx(3.0, rel=1e-12)


def test_od_from_transmission_guards():
    with pytest.raises(DomainError):
        scaling.od_from_transmission(0.0, 1.0)
    with pytest.raises(DomainError):
        scaling.od_from_transmission(1.0, 0.0)
    with pytest.raises(DomainError):
        scaling.od_from_transmission(2.0, 1.0)


@settings(max_examples=50, deadline=None)
@given(od=st.floats(min_value=0.01, max_value=20.0),
       i0=st.floats(min_value=1e-6, max_value=1e6))
def test_od_transmission_round_trip(od, i0):
    it = i0 * np.exp(-od)
    assert scaling.od_from_transmission(it, i0) == pytest.approx(od, rel=1e-9)


def test_predict_rates_no_reabsorption():
    p = scaling.ScalingParams(a_signal=100.0, a_idler=80.0, b_coincidence=5.0)
    r = scaling.predict_rates(3.0, p)
    assert r.n_signal == pytest.approx(300.0)
    assert r.n_idler == pytest.approx(240.0)
    assert r.n_coincidence == pytest.approx(45.0)


def test_predict_rates_roll_off_peak():
    # od^2 e^{-r od} peaks at od = 2/r
    r = 0.3
    p = scaling.ScalingParams(a_signal=1.0, a_idler=1.0, b_coincidence=1.0,
                              reabsorption=r)
    ods = np.linspace(0.1, 20.0, 4000)
    nc = np.array([scaling.predict_rates(od, p).n_coincidence for od in ods])
    od_peak = ods[np.argmax(nc)]
    assert od_peak == pytest.approx(2.0 / r, rel=2e-3)


def test_scaling_params_guard():
    with pytest.raises(ConfigError):
        scaling.ScalingParams(a_signal=-1.0, a_idler=1.0, b_coincidence=1.0)


def test_powerlaw_fit_exact():
    x = np.array([1.0, 2.0, 4.0, 8.0])
    fit = scaling.powerlaw_fit(list(zip(x, 0.37 * x ** 1.71)))
    assert fit.exponent == pytest.approx(1.71, abs=1e-12)
    assert fit.prefactor == pytest.approx(0.37, rel=1e-12)
    assert fit.stderr == pytest.approx(0.0, abs=1e-12)


def test_powerlaw_fit_guards():
    with pytest.raises(DomainError):
        scaling.powerlaw_fit([(1.0, 1.0), (2.0, 2.0)])
    with pytest.raises(DomainError):
        scaling.powerlaw_fit([(1.0, 1.0), (-2.0, 2.0), (3.0, 3.0)])
    with pytest.raises(EstimationError):
        scaling.powerlaw_fit([(2.0, 1.0), (2.0, 2.0), (2.0, 3.0)])


def test_powerlaw_fit_noisy_stderr():
    rng = np.random.default_rng(11)
    od = np.linspace(1.0, 7.0, 20)
    y = 0.01 * od ** 1.71 * (1 + 0.05 * rng.standard_normal(20))
    fit = scaling.powerlaw_fit(list(zip(od, y)))
    assert fit.exponent == pytest.approx(1.71, abs=3 * fit.stderr)
    assert 0.0 < fit.stderr < 0.1


@settings(max_examples=40, deadline=None)
@given(expo=st.floats(min_value=0.2, max_value=3.5),
       pref=st.floats(min_value=1e-3, max_value=1e3))
def test_powerlaw_fit_recovers_any_exponent(expo, pref):
    x = np.array([0.5, 1.0, 2.0, 3.0, 5.0])
    fit = scaling.powerlaw_fit(list(zip(x, pref * x ** expo)))
    assert fit.exponent == pytest.approx(expo, rel=1e-9, abs=1e-9)


def test_polyfit_linear_quadratic_selects_right_model():
    x = np.linspace(1.0, 7.0, 15)
    quad = 2.5 * x ** 2
    fit = scaling.polyfit_linear_quadratic(list(zip(x, quad)))
    assert fit.quadratic_coeff == pytest.approx(2.5, rel=1e-12)
    assert fit.quadratic_residual == pytest.approx(0.0, abs=1e-18)
    assert fit.linear_residual > 1.0
    lin = 4.0 * x
    fit2 = scaling.polyfit_linear_quadratic(list(zip(x, lin)))
    assert fit2.linear_coeff == pytest.approx(4.0, rel=1e-12)
    assert fit2.linear_residual == pytest.approx(0.0, abs=1e-18)
    assert fit2.quadratic_residual > 1.0


def test_polyfit_guards():
    with pytest.raises(DomainError):
        scaling.polyfit_linear_quadratic([(1.0, 1.0)])
    with pytest.raises(EstimationError):
        scaling.polyfit_linear_quadratic([(0.0, 1.0), (0.0, 2.0)])


def test_reabsorption_distorts_loglog_slope():
    """With reabsorption on, the apparent coincidence exponent drops below
    2 over a rising scan range because e^{-r od} bends the log-log line."""
    p = scaling.ScalingParams(a_signal=9000.0, a_idler=9000.0, b_coincidence=110.0,
                              reabsorption=0.25)
    ods = np.linspace(1.0, 7.0, 20)
    pts = [(od, scaling.predict_rates(od, p).n_coincidence) for od in ods]
    fit = scaling.powerlaw_fit(pts)
    assert fit.exponent < 1.9
