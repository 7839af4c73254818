"""Photon-pair generation in warm ladder-type vapor: correlation
functions with velocity averaging, spectral filtering, event-level
Monte Carlo, and coincidence analysis."""

from .atomic import (FieldParams, LadderSystem, VaporCell, VelocityGrid,
                     doppler_fwhm, make_velocity_grid, maxwell_boltzmann_pdf,
                     sigma_v, two_photon_coefficient)
from .biphoton import (ComplexWaveform, CorrelationFunction, TimeGrid,
                       bandwidth_from_correlation, correlation_gsi,
                       correlation_time, dephasing_envelope, symmetric_grid,
                       two_photon_amplitude, velocity_averaged_amplitude)
from .errors import (ConfigError, DomainError, EstimationError,
                     SaturationError, WindowingError)
from .filters import (FilterSpec, SpectralFunction, beat_frequency_estimate,
                      detector_correlation, filter_response, impulse_response,
                      uniform_omega_grid)
from .montecarlo import (ChannelSpec, DetectorSpec, EventStream,
                         PairSourceSpec, apply_channel, dead_time_prune,
                         generate_pairs, read_event_streams, sample_delays,
                         simulate_run, write_event_streams)
from .scaling import (LinearQuadraticFit, ODScanPoint, PowerLawFit,
                      ScalingParams, od_from_transmission,
                      polyfit_linear_quadratic, powerlaw_fit, predict_rates)
from .analysis import (CoincidenceHistogram, CoincidenceRates,
                       CountingSummary, auto_correlation_g2,
                       cauchy_schwarz_factor, coincidence_rate,
                       dead_time_correct, g2_zero, heralded_g2c,
                       heralding_efficiency, normalized_g2,
                       pair_rate_estimate, start_stop_histogram)

__version__ = "0.1.0"

__all__ = [
    "ChannelSpec", "CoincidenceHistogram", "CoincidenceRates",
    "ComplexWaveform", "ConfigError", "CorrelationFunction",
    "CountingSummary", "DetectorSpec", "DomainError", "EstimationError",
    "EventStream", "FieldParams", "FilterSpec", "LadderSystem",
    "LinearQuadraticFit", "ODScanPoint", "PairSourceSpec", "PowerLawFit",
    "SaturationError", "ScalingParams", "SpectralFunction", "TimeGrid",
    "VaporCell", "VelocityGrid", "WindowingError", "apply_channel",
    "auto_correlation_g2", "bandwidth_from_correlation",
    "beat_frequency_estimate", "cauchy_schwarz_factor", "coincidence_rate",
    "correlation_gsi", "correlation_time", "dead_time_correct",
    "dead_time_prune", "dephasing_envelope", "detector_correlation",
    "doppler_fwhm", "filter_response", "g2_zero", "generate_pairs",
    "heralded_g2c", "heralding_efficiency", "impulse_response",
    "make_velocity_grid", "maxwell_boltzmann_pdf", "normalized_g2",
    "od_from_transmission", "pair_rate_estimate",
    "polyfit_linear_quadratic", "powerlaw_fit", "predict_rates",
    "read_event_streams", "sample_delays", "sigma_v", "simulate_run",
    "start_stop_histogram", "symmetric_grid", "two_photon_amplitude",
    "two_photon_coefficient", "uniform_omega_grid",
    "velocity_averaged_amplitude", "write_event_streams",
]
