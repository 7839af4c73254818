"""Command-line pipelines: correlation curves, filter beats, Monte Carlo
counting runs, scaling fits, and stream analysis.

Exit codes: 0 success, 2 configuration problems, 3 numerical or
estimation failures.  All outputs are written atomically and each run
drops a manifest.txt carrying the scenario name and the hash of the
effective configuration, so results can be traced to their inputs.
"""

from __future__ import annotations

import argparse
import csv as _csv
import io
import sys
from pathlib import Path

import numpy as np

from . import analysis, biphoton, filters, montecarlo, scaling
from .atomic import doppler_fwhm, make_velocity_grid, sigma_v
from .config import (build_cell, build_channel, build_fields, build_filter,
                     build_scaling_params, build_system, config_hash,
                     config_text, load_config, write_text_atomic)
from .errors import ConfigError, DomainError, EstimationError, WindowingError


def _write_manifest(outdir: Path, command: str, cfg: dict, outputs: list) -> None:
    lines = [
        f"command={command}",
        f"scenario={cfg['scenario']}",
        f"config_sha256={config_hash(cfg)}",
        f"seed={cfg['source.seed']}",
        "outputs=" + ",".join(sorted(outputs)),
    ]
    write_text_atomic(outdir / "manifest.txt", "\n".join(lines) + "\n")
    write_text_atomic(outdir / "config.resolved", config_text(cfg))


def _report_text(pairs) -> str:
    buf = io.StringIO()
    for key, val in pairs:
        buf.write(f"{key}={val:.10g}\n" if isinstance(val, float) else f"{key}={val}\n")
    return buf.getvalue()


def _symmetric_grid(cfg: dict) -> biphoton.TimeGrid:
    return biphoton.symmetric_grid(float(cfg["grid.dt_s"]), int(cfg["grid.n"]))


def _model_pieces(cfg: dict):
    system = build_system(cfg)
    fields = build_fields(cfg)
    cell = build_cell(cfg)
    vgrid = make_velocity_grid(cell.temperature, system.atom_mass,
                               n_nodes=int(cfg["velocity.n_nodes"]),
                               span_sigmas=float(cfg["velocity.span_sigmas"]))
    return system, fields, cell, vgrid


def cmd_correlation(cfg: dict, outdir: Path) -> int:
    system, fields, cell, vgrid = _model_pieces(cfg)
    grid = _symmetric_grid(cfg)
    gsi = biphoton.correlation_gsi(grid, vgrid, system, fields)
    env_flat = biphoton.dephasing_envelope(grid, vgrid, system, fields, flat_amplitude=True)
    env_model = biphoton.dephasing_envelope(grid, vgrid, system, fields)
    outputs = []
    for name, corr in (("gsi.csv", gsi), ("envelope_flat.csv", env_flat),
                       ("envelope.csv", env_model)):
        write_text_atomic(outdir / name, corr.to_csv_text())
        outputs.append(name)
    fwhm_flat = biphoton.correlation_time(env_flat)
    fwhm_model = biphoton.correlation_time(env_model)
    bw_flat = biphoton.bandwidth_from_correlation(env_flat)
    bw_model = biphoton.bandwidth_from_correlation(env_model)
    report = _report_text([
        ("sigma_v_m_s", sigma_v(cell.temperature, system.atom_mass)),
        ("doppler_fwhm_idler_hz", doppler_fwhm(cell.temperature, system.atom_mass,
                                               system.lambda_idler)),
        ("correlation_fwhm_flat_s", fwhm_flat),
        ("correlation_fwhm_flat_ns", fwhm_flat * 1e9),
        ("correlation_fwhm_model_s", fwhm_model),
        ("correlation_fwhm_model_ns", fwhm_model * 1e9),
        ("bandwidth_flat_hz", bw_flat),
        ("bandwidth_flat_mhz", bw_flat / 1e6),
        ("bandwidth_model_hz", bw_model),
        ("bandwidth_model_mhz", bw_model / 1e6),
    ])
    write_text_atomic(outdir / "report.txt", report)
    outputs.append("report.txt")
    _write_manifest(outdir, "correlation", cfg, outputs)
    print(f"correlation: fwhm_flat={fwhm_flat * 1e9:.4g} ns "
          f"bandwidth_flat={bw_flat / 1e6:.4g} MHz -> {outdir}")
    return 0


def _alpha_tag(alpha: float) -> str:
    return f"{alpha:g}".replace(".", "p")


def cmd_beats(cfg: dict, outdir: Path) -> int:
    system, fields, cell, vgrid = _model_pieces(cfg)
    grid = _symmetric_grid(cfg)
    gsi = biphoton.correlation_gsi(grid, vgrid, system, fields)
    omega = filters.uniform_omega_grid(float(cfg["beats.span_hz"]), int(cfg["beats.n_omega"]))
    alphas = cfg["beats.alphas"]
    if not isinstance(alphas, list):
        alphas = [float(alphas)]
    outputs = ["gsi.csv"]
    write_text_atomic(outdir / "gsi.csv", gsi.to_csv_text())
    report_pairs = []
    for alpha in alphas:
        tag = _alpha_tag(alpha)
        fspec = build_filter(cfg, alpha=alpha)
        sf = filters.filter_response(fspec, omega)
        beat_hz = filters.beat_frequency_estimate(sf)
        gdet = filters.detector_correlation(gsi, sf)
        for name, text in ((f"filter_alpha{tag}.csv", sf.to_csv_text()),
                           (f"fsq_alpha{tag}.csv", sf.power_csv_text()),
                           (f"gdet_alpha{tag}.csv", gdet.to_csv_text())):
            write_text_atomic(outdir / name, text)
            outputs.append(name)
        report_pairs.append((f"alpha{tag}_beat_hz", beat_hz))
        report_pairs.append((f"alpha{tag}_beat_period_s", 1.0 / beat_hz))
    write_text_atomic(outdir / "beat_report.txt", _report_text(report_pairs))
    outputs.append("beat_report.txt")
    _write_manifest(outdir, "beats", cfg, outputs)
    print(f"beats: alphas={','.join(f'{a:g}' for a in alphas)} -> {outdir}")
    return 0


def _build_waveform(cfg: dict) -> biphoton.CorrelationFunction:
    system, fields, cell, vgrid = _model_pieces(cfg)
    grid = _symmetric_grid(cfg)
    gsi = biphoton.correlation_gsi(grid, vgrid, system, fields)
    if cfg["mc.splitter"] and not cfg["mc.filtered_waveform"]:
        return gsi
    if cfg["mc.filtered_waveform"]:
        omega = filters.uniform_omega_grid(float(cfg["beats.span_hz"]),
                                           int(cfg["beats.n_omega"]))
        sf = filters.filter_response(build_filter(cfg), omega)
        return filters.detector_correlation(gsi, sf)
    return gsi


def _analyze_streams(cfg: dict, streams: dict, acquisition: float, outdir: Path,
                     outputs: list) -> None:
    bw = float(cfg["mc.bin_width_s"])
    rng = float(cfg["mc.delay_range_s"])
    window = float(cfg["mc.window_s"])
    wing = (float(cfg["mc.wing_lo_s"]), float(cfg["mc.wing_hi_s"]))
    sig = streams["signal"]
    if "idler" in streams:
        idl = streams["idler"]
        splitter = False
    else:
        merged = np.sort(np.concatenate([streams["idler1"].timestamps,
                                         streams["idler2"].timestamps]))
        # ties across ports are possible in principle; keep strict monotonicity
        if merged.size and np.any(np.diff(merged) <= 0):
            merged = np.unique(merged)
        idl = montecarlo.EventStream("idler", merged)
        splitter = True
    n_s = len(sig) / acquisition
    n_i = len(idl) / acquisition
    hist = analysis.start_stop_histogram(sig, idl, bw, rng)
    rates = analysis.coincidence_rate(hist, window, acquisition, wing=wing)
    g2 = analysis.normalized_g2(hist, n_s, n_i, acquisition)
    write_text_atomic(outdir / "hist_si.csv", analysis.histogram_csv_text(hist, g2))
    outputs.append("hist_si.csv")
    g2_si0 = analysis.g2_zero(g2)
    g2_ii0 = None
    g2_c0 = None
    if splitter:
        g2_ii = analysis.auto_correlation_g2(streams["idler1"], streams["idler2"],
                                             bw, rng, acquisition)
        hist_ii = analysis.start_stop_histogram(streams["idler1"], streams["idler2"], bw, rng)
        write_text_atomic(outdir / "hist_ii.csv", analysis.histogram_csv_text(hist_ii, g2_ii))
        outputs.append("hist_ii.csv")
        # across splitter ports there is no pair enhancement, so read the
        # zero-delay bin instead of hunting for a peak in shot noise
        g2_ii0 = analysis.g2_zero(g2_ii, mode="zero")
        g2_c0 = analysis.heralded_g2c(sig, streams["idler1"], streams["idler2"], window)
    n_c = rates.net
    summary = analysis.CountingSummary(
        acquisition=acquisition,
        window=window,
        n_signal=n_s,
        n_idler=n_i,
        n_coincidence_raw=rates.raw,
        n_coincidence_accidental=rates.accidental,
        n_coincidence=n_c,
        pair_rate=analysis.pair_rate_estimate(n_s, n_i, n_c) if n_c > 0 else None,
        eta_signal=analysis.heralding_efficiency(n_c, n_i) if n_c > 0 else None,
        eta_idler=analysis.heralding_efficiency(n_c, n_s) if n_c > 0 else None,
        g2_si0=g2_si0,
        g2_ii0=g2_ii0,
        g2_c0=g2_c0,
    )
    write_text_atomic(outdir / "counting_summary.txt", summary.to_text())
    outputs.append("counting_summary.txt")


def cmd_montecarlo(cfg: dict, outdir: Path, od_sweep: bool = False) -> int:
    if od_sweep:
        return _cmd_od_sweep(cfg, outdir)
    waveform = _build_waveform(cfg)
    src = montecarlo.PairSourceSpec(
        pair_rate=float(cfg["source.pair_rate_cps"]),
        waveform=waveform,
        duration=float(cfg["source.duration_s"]),
        seed=int(cfg["source.seed"]),
    )
    chan_s = build_channel(cfg, "signal")
    chan_i = build_channel(cfg, "idler")
    streams = montecarlo.simulate_run(
        src, chan_s, chan_i, chan_idler2=chan_i if cfg["mc.splitter"] else None)
    meta = {
        "duration_s": f"{src.duration:.12g}",
        "pair_rate_cps": f"{src.pair_rate:.12g}",
        "seed": src.seed,
        "config_sha256": config_hash(cfg),
        "channels": ",".join(sorted(streams)),
    }
    montecarlo.write_event_streams(outdir / "events.tsv", streams, meta)
    outputs = ["events.tsv", "events.tsv.meta"]
    _analyze_streams(cfg, streams, src.duration, outdir, outputs)
    _write_manifest(outdir, "montecarlo", cfg, outputs)
    print(f"montecarlo: {', '.join(f'{k}:{len(v)}' for k, v in sorted(streams.items()))} "
          f"events -> {outdir}")
    return 0


def od_scan_csv_text(points) -> str:
    buf = io.StringIO()
    buf.write("od,n_s,n_i,n_c\n")
    for p in points:
        buf.write(f"{p.od:.12g},{p.n_signal:.12g},{p.n_idler:.12g},{p.n_coincidence:.12g}\n")
    return buf.getvalue()


def od_scan_from_csv(path):
    with open(path, newline="") as fh:
        rows = list(_csv.reader(fh))
    if not rows or rows[0] != ["od", "n_s", "n_i", "n_c"]:
        raise DomainError(f"{path}: expected header 'od,n_s,n_i,n_c'")
    points = []
    for r in rows[1:]:
        points.append(scaling.ODScanPoint(od=float(r[0]), n_signal=float(r[1]),
                                          n_idler=float(r[2]), n_coincidence=float(r[3])))
    if len(points) < 3:
        raise DomainError(f"{path}: need at least 3 scan points")
    return points


def _cmd_od_sweep(cfg: dict, outdir: Path) -> int:
    ods = np.linspace(float(cfg["odsweep.od_min"]), float(cfg["odsweep.od_max"]),
                      int(cfg["odsweep.n_points"]))
    rng = np.random.default_rng(int(cfg["odsweep.seed"]))
    noise = float(cfg["odsweep.noise_frac"])
    mode = str(cfg["odsweep.mode"])
    params = build_scaling_params(cfg)
    points = []
    for od in ods:
        p = scaling.predict_rates(float(od), params)
        if mode == "model":
            pass
        elif mode == "planted":
            # overwrite the coincidence column so that eta_i = n_c/n_s follows
            # a pure power law of known exponent
            eta = (float(cfg["odsweep.planted_prefactor"])
                   * od ** float(cfg["odsweep.planted_exponent"]))
            p = scaling.ODScanPoint(od=p.od, n_signal=p.n_signal, n_idler=p.n_idler,
                                    n_coincidence=eta * p.n_signal)
        else:
            raise ConfigError(f"odsweep.mode must be model or planted, got {mode!r}")
        if noise > 0:
            fac = 1.0 + noise * rng.standard_normal(3)
            fac = np.clip(fac, 0.05, None)
            p = scaling.ODScanPoint(od=p.od, n_signal=p.n_signal * fac[0],
                                    n_idler=p.n_idler * fac[1],
                                    n_coincidence=p.n_coincidence * fac[2])
        points.append(p)
    write_text_atomic(outdir / "odscan.csv", od_scan_csv_text(points))
    outputs = ["odscan.csv"]
    outputs += _fit_outputs(points, outdir)
    _write_manifest(outdir, "montecarlo", cfg, outputs)
    print(f"od sweep: {len(points)} points -> {outdir}")
    return 0


def _fit_outputs(points, outdir: Path) -> list:
    nc_fit = scaling.powerlaw_fit([(p.od, p.n_coincidence) for p in points])
    eta_fit = scaling.powerlaw_fit([(p.od, p.n_coincidence / p.n_signal) for p in points])
    lin_s = scaling.polyfit_linear_quadratic([(p.od, p.n_signal) for p in points])
    lin_i = scaling.polyfit_linear_quadratic([(p.od, p.n_idler) for p in points])
    lin_c = scaling.polyfit_linear_quadratic([(p.od, p.n_coincidence) for p in points])
    rows = [
        ("powerlaw_nc_exponent", nc_fit.exponent),
        ("powerlaw_nc_prefactor", nc_fit.prefactor),
        ("powerlaw_nc_stderr", nc_fit.stderr),
        ("powerlaw_eta_exponent", eta_fit.exponent),
        ("powerlaw_eta_prefactor", eta_fit.prefactor),
        ("powerlaw_eta_stderr", eta_fit.stderr),
        ("ns_linear_coeff", lin_s.linear_coeff),
        ("ns_linear_residual", lin_s.linear_residual),
        ("ns_quadratic_coeff", lin_s.quadratic_coeff),
        ("ns_quadratic_residual", lin_s.quadratic_residual),
        ("ni_linear_coeff", lin_i.linear_coeff),
        ("ni_linear_residual", lin_i.linear_residual),
        ("ni_quadratic_coeff", lin_i.quadratic_coeff),
        ("ni_quadratic_residual", lin_i.quadratic_residual),
        ("nc_linear_coeff", lin_c.linear_coeff),
        ("nc_linear_residual", lin_c.linear_residual),
        ("nc_quadratic_coeff", lin_c.quadratic_coeff),
        ("nc_quadratic_residual", lin_c.quadratic_residual),
    ]
    buf = io.StringIO()
    buf.write("name,value\n")
    for name, val in rows:
        buf.write(f"{name},{val:.12g}\n")
    write_text_atomic(outdir / "fits.csv", buf.getvalue())
    write_text_atomic(outdir / "fit_report.txt", _report_text(rows))
    return ["fits.csv", "fit_report.txt"]


def cmd_fit(cfg: dict, outdir: Path, input_path: str) -> int:
    points = od_scan_from_csv(input_path)
    outputs = _fit_outputs(points, outdir)
    _write_manifest(outdir, "fit", cfg, outputs)
    eta_fit = scaling.powerlaw_fit([(p.od, p.n_coincidence / p.n_signal) for p in points])
    print(f"fit: eta exponent {eta_fit.exponent:.4g} +- {eta_fit.stderr:.2g} -> {outdir}")
    return 0


def cmd_analyze(cfg: dict, outdir: Path, input_path: str) -> int:
    streams, meta = montecarlo.read_event_streams(input_path)
    if "signal" not in streams:
        raise DomainError(f"{input_path}: no 'signal' channel present")
    if "idler" not in streams and not {"idler1", "idler2"} <= set(streams):
        raise DomainError(f"{input_path}: need 'idler' or 'idler1'+'idler2' channels")
    acquisition = float(meta.get("duration_s", cfg["source.duration_s"]))
    outputs = []
    _analyze_streams(cfg, streams, acquisition, outdir, outputs)
    _write_manifest(outdir, "analyze", cfg, outputs)
    print(f"analyze: {', '.join(sorted(streams))} -> {outdir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vaporpair",
        description="Photon-pair correlation, filtering, and counting pipelines.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="key=value config file")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override the run seed")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="override one config key")

    p_corr = sub.add_parser("correlation", help="source correlation curves and widths")
    common(p_corr)
    p_corr.add_argument("--temperature", type=float, default=None,
                        help="cell temperature in K (shorthand for --set cell.temperature_k=...)")

    p_beats = sub.add_parser("beats", help="filter response and filtered correlation per alpha")
    common(p_beats)
    p_beats.add_argument("--temperature", type=float, default=None)

    p_mc = sub.add_parser("montecarlo", help="event-level counting simulation")
    common(p_mc)
    p_mc.add_argument("--od-sweep", action="store_true",
                      help="emit a synthetic optical-depth scan and fit it")

    p_fit = sub.add_parser("fit", help="fit scaling exponents to an od scan CSV")
    common(p_fit)
    p_fit.add_argument("--input", required=True, help="od,n_s,n_i,n_c CSV file")

    p_an = sub.add_parser("analyze", help="histogram and summarize an event stream file")
    common(p_an)
    p_an.add_argument("--input", required=True, help="event stream file")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        overrides = list(args.overrides)
        if getattr(args, "temperature", None) is not None:
            overrides.append(f"cell.temperature_k={args.temperature}")
        cfg = load_config(args.config, overrides)
        if args.seed is not None:
            cfg["source.seed"] = int(args.seed)
            cfg["odsweep.seed"] = int(args.seed)
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        if args.command == "correlation":
            return cmd_correlation(cfg, outdir)
        if args.command == "beats":
            return cmd_beats(cfg, outdir)
        if args.command == "montecarlo":
            return cmd_montecarlo(cfg, outdir, od_sweep=args.od_sweep)
        if args.command == "fit":
            return cmd_fit(cfg, outdir, args.input)
        if args.command == "analyze":
            return cmd_analyze(cfg, outdir, args.input)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, WindowingError, EstimationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
