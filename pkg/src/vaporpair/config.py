"""Flat key=value run configuration with dotted section names.

Files look like

    # comment
    cell.temperature_k = 325.15
    beats.alphas = 2,6

Frequencies in configs are ordinary frequency (Hz); this module is the
single place where they are converted to the angular (rad/s) quantities
the physics layer uses.  All seeds are explicit integers, never clock
derived.
"""

from __future__ import annotations

import hashlib
import os

from .atomic import FieldParams, LadderSystem, VaporCell
from .errors import ConfigError
from .filters import FilterSpec
from .montecarlo import ChannelSpec, DetectorSpec, JITTER_FWHM_OVER_SIGMA
from .scaling import ScalingParams

TWO_PI = 6.283185307179586

DEFAULTS = {
    "scenario": "default",
    "system.gamma31_hz": 6.07e6,
    "system.gamma32_hz": 0.66e6,
    "system.lambda_pump_m": 780.2e-9,
    "system.lambda_coupling_m": 775.8e-9,
    "system.lambda_idler_m": 780.2e-9,
    "system.lambda_signal_m": 775.8e-9,
    "system.atom_mass_kg": 1.44316e-25,
    "fields.rabi_pump_hz": 5.0e6,
    "fields.rabi_coupling_hz": 20.0e6,
    "fields.detuning_pump_hz": 810e6,
    "fields.detuning_coupling_hz": -810e6,
    "cell.temperature_k": 325.15,
    "cell.length_m": 12.5e-3,
    "cell.optical_depth": 10.0,
    "grid.dt_s": 10e-12,
    "grid.n": 4096,
    "velocity.n_nodes": 513,
    "velocity.span_sigmas": 6.0,
    "filter.etalon_fwhm_hz": 940e6,
    "filter.absorption_fwhm_hz": 540e6,
    "filter.alpha": 6.0,
    "filter.etalon_center_offset_hz": 0.0,
    "filter.absorption_center_offset_hz": 0.0,
    "filter.etalon_shape": "gaussian",
    "beats.alphas": [2.0, 6.0],
    "beats.n_omega": 16384,
    "beats.span_hz": 100e9,
    "detector.efficiency": 0.40,
    "detector.jitter_fwhm_s": 300e-12,
    "detector.dead_time_s": 50e-9,
    "detector.dark_rate_cps": 200.0,
    "channel.signal.transmission": 0.145,
    "channel.idler.transmission": 0.145,
    "source.pair_rate_cps": 1.0e6,
    "source.duration_s": 1.0,
    "source.seed": 20260821,
    "mc.splitter": False,
    "mc.filtered_waveform": False,
    "mc.bin_width_s": 0.1e-9,
    "mc.delay_range_s": 40e-9,
    "mc.window_s": 4.1e-9,
    "mc.wing_lo_s": 20e-9,
    "mc.wing_hi_s": 40e-9,
    "odsweep.mode": "model",
    "odsweep.od_min": 1.0,
    "odsweep.od_max": 7.0,
    "odsweep.n_points": 20,
    "odsweep.a_signal": 9000.0,
    "odsweep.a_idler": 9000.0,
    "odsweep.b_coincidence": 110.0,
    "odsweep.reabsorption": 0.0,
    "odsweep.planted_exponent": 1.71,
    "odsweep.planted_prefactor": 0.01,
    "odsweep.noise_frac": 0.05,
    "odsweep.seed": 42,
}


def _coerce(raw: str):
    raw = raw.strip()
    low = raw.lower()
    if low in ("true", "false"):
        return low == "true"
    if "," in raw:
        return [float(p) for p in raw.split(",") if p.strip()]
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        return raw


def parse_config_text(text: str, source: str = "<config>") -> dict:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, val = stripped.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        out[key] = _coerce(val)
    return out


def load_config(path=None, overrides=None) -> dict:
    """Defaults, overlaid by an optional config file, overlaid by
    'key=value' override strings (the --set mechanism)."""
    cfg = dict(DEFAULTS)
    if path is not None:
        if not os.path.exists(path):
            raise ConfigError(f"config file not found: {path}")
        with open(path) as fh:
            file_cfg = parse_config_text(fh.read(), source=str(path))
        unknown = set(file_cfg) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"{path}: unknown config keys: {', '.join(sorted(unknown))}")
        cfg.update(file_cfg)
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, val = item.split("=", 1)
        key = key.strip()
        if key not in DEFAULTS:
            raise ConfigError(f"unknown config key: {key}")
        cfg[key] = _coerce(val)
    return cfg


def config_text(cfg: dict) -> str:
    lines = []
    for key in sorted(cfg):
        val = cfg[key]
        if isinstance(val, list):
            val = ",".join(f"{v:g}" for v in val)
        elif isinstance(val, bool):
            val = "true" if val else "false"
        elif isinstance(val, float):
            val = f"{val:.12g}"
        lines.append(f"{key} = {val}")
    return "\n".join(lines) + "\n"


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(config_text(cfg).encode()).hexdigest()


def build_system(cfg: dict) -> LadderSystem:
    return LadderSystem(
        gamma31=TWO_PI * float(cfg["system.gamma31_hz"]),
        gamma32=TWO_PI * float(cfg["system.gamma32_hz"]),
        lambda_pump=float(cfg["system.lambda_pump_m"]),
        lambda_coupling=float(cfg["system.lambda_coupling_m"]),
        lambda_idler=float(cfg["system.lambda_idler_m"]),
        lambda_signal=float(cfg["system.lambda_signal_m"]),
        atom_mass=float(cfg["system.atom_mass_kg"]),
    )


def build_fields(cfg: dict) -> FieldParams:
    return FieldParams(
        rabi_pump=TWO_PI * float(cfg["fields.rabi_pump_hz"]),
        rabi_coupling=TWO_PI * float(cfg["fields.rabi_coupling_hz"]),
        detuning_pump=TWO_PI * float(cfg["fields.detuning_pump_hz"]),
        detuning_coupling=TWO_PI * float(cfg["fields.detuning_coupling_hz"]),
    )


def build_cell(cfg: dict) -> VaporCell:
    return VaporCell(
        temperature=float(cfg["cell.temperature_k"]),
        length=float(cfg["cell.length_m"]),
        optical_depth=float(cfg["cell.optical_depth"]),
    )


def build_filter(cfg: dict, alpha: float | None = None) -> FilterSpec:
    return FilterSpec(
        etalon_fwhm=float(cfg["filter.etalon_fwhm_hz"]),
        absorption_fwhm=float(cfg["filter.absorption_fwhm_hz"]),
        alpha=float(cfg["filter.alpha"] if alpha is None else alpha),
        etalon_center_offset=float(cfg["filter.etalon_center_offset_hz"]),
        absorption_center_offset=float(cfg["filter.absorption_center_offset_hz"]),
        etalon_shape=str(cfg["filter.etalon_shape"]),
    )


def build_detector(cfg: dict) -> DetectorSpec:
    return DetectorSpec(
        efficiency=float(cfg["detector.efficiency"]),
        jitter_sigma=float(cfg["detector.jitter_fwhm_s"]) / JITTER_FWHM_OVER_SIGMA,
        dead_time=float(cfg["detector.dead_time_s"]),
        dark_rate=float(cfg["detector.dark_rate_cps"]),
    )


def build_channel(cfg: dict, arm: str) -> ChannelSpec:
    key = f"channel.{arm}.transmission"
    if key not in cfg:
        raise ConfigError(f"no such channel arm: {arm}")
    return ChannelSpec(transmission=float(cfg[key]), detector=build_detector(cfg))


def build_scaling_params(cfg: dict) -> ScalingParams:
    return ScalingParams(
        a_signal=float(cfg["odsweep.a_signal"]),
        a_idler=float(cfg["odsweep.a_idler"]),
        b_coincidence=float(cfg["odsweep.b_coincidence"]),
        reabsorption=float(cfg["odsweep.reabsorption"]),
    )


def write_text_atomic(path, text: str) -> None:
    """Write a file via a temp name and rename, so readers never observe a
    partial file."""
    path = str(path)
    tmp = path + ".tmp"
    with open(tmp, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)
