"""Command-line front end.

Commands: ``sweep``, ``trace``, ``analyze``, ``fft``, ``fit-gap``.  Runs
are configured by presets and/or a JSON config file; command-line flags
override file values.  The effective configuration is embedded as a
comment header in every artifact, so a run can be reproduced from its
output alone.  Exit codes: 0 success, 2 validation error, 3 numeric
failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import analysis
from .errors import (
    FitError,
    IntegrationError,
    LzspecError,
    ValidationError,
)
from .presets import PRESETS, get_preset
from .propagator import StepperConfig, evolve
from .qubit import QubitSpectrum, TrianglePulse
from .sweep import (
    GridSpec,
    InterferenceMap,
    read_csv,
    run_sweep,
    write_csv,
    write_pgm,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"bad config file {path}: {exc}")
    if not isinstance(data, dict):
        raise ValidationError(f"config file {path} must hold a JSON object")
    return data


def _build_run(args) -> tuple[QubitSpectrum, GridSpec, StepperConfig, str]:
    """Assemble (spectrum, grid, stepper, name) from preset/config/flags."""
    cfg = _load_config(getattr(args, "config", None))
    preset_name = getattr(args, "preset", None) or cfg.get("preset")
    if preset_name:
        preset = get_preset(preset_name)
        spectrum, grid, stepper = preset.spectrum, preset.grid, preset.stepper
        name = preset.name
    else:
        spectrum = grid = None
        stepper = StepperConfig()
        name = "run"

    if "spectrum" in cfg:
        spectrum = QubitSpectrum.from_dict(cfg["spectrum"])
    if "grid" in cfg:
        g = cfg["grid"]
        try:
            grid = GridSpec(
                tuple(g["phi_f"]), tuple(g["tau"]), float(g["phi_i"])
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"bad grid config: {exc}")
    if "stepper" in cfg:
        try:
            stepper = StepperConfig(**{**asdict(stepper), **cfg["stepper"]})
        except TypeError as exc:
            raise ValidationError(f"bad stepper config: {exc}")

    if getattr(args, "tolerance", None) is not None:
        rel = float(args.tolerance)
        stepper = StepperConfig(**{**asdict(stepper),
                                   "rel_tol": rel, "abs_tol": rel * 1e-2})
    if spectrum is None:
        raise ValidationError("no spectrum: give --preset or a config file")
    if grid is None:
        raise ValidationError("no grid: give --preset or a config file")
    return spectrum, grid, stepper, name


def _artifact_config(spectrum, grid, stepper) -> dict:
    return {
        "phi_i": grid.phi_i,
        "grid": {"phi_f": list(grid.phi_f_range), "tau": list(grid.tau_range)},
        "spectrum": spectrum.to_dict(),
        "stepper": asdict(stepper),
    }


def _cmd_sweep(args) -> int:
    spectrum, grid, stepper, name = _build_run(args)
    imap = run_sweep(grid, spectrum, stepper, workers=args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{name}.csv"
    write_csv(imap, csv_path)
    print(csv_path)
    if args.pgm:
        pgm_path = out / f"{name}.pgm"
        write_pgm(imap, pgm_path)
        print(pgm_path)
    return EXIT_OK


def _cmd_trace(args) -> int:
    spectrum, grid, stepper, name = _build_run(args)
    pulse = TrianglePulse(grid.phi_i, args.phi_f, args.tau)
    result = evolve(spectrum, pulse, stepper, record_trajectory=True)
    times, states = result.trajectory
    dim = spectrum.dim
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{name}_trace.csv"
    cfg = _artifact_config(spectrum, grid, stepper)
    cfg["pulse"] = {"phi_i": grid.phi_i, "phi_f": args.phi_f, "tau": args.tau}
    header = ["t_ns", "W_11", "W_22"] + (["W_33"] if dim == 3 else []) \
        + ["Re_W_12", "Im_W_12"]
    with open(path, "w", newline="") as fh:
        fh.write("# lzspec trajectory\n")
        fh.write("# config: " + json.dumps(cfg, sort_keys=True,
                                           separators=(",", ":")) + "\n")
        fh.write(",".join(header) + "\n")
        for t, rho in zip(times, states):
            row = [f"{t:.9g}", f"{rho[0, 0].real:.9g}", f"{rho[1, 1].real:.9g}"]
            if dim == 3:
                row.append(f"{rho[2, 2].real:.9g}")
            row += [f"{rho[0, 1].real:.9g}", f"{rho[0, 1].imag:.9g}"]
            fh.write(",".join(row) + "\n")
    print(path)
    return EXIT_OK


def _parse_points(text: str, imap: InterferenceMap | None):
    """Points as 'phi_f,tau[,pop];...'; missing pops are read off the map."""
    points = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = [p.strip() for p in chunk.split(",")]
        if len(parts) not in (2, 3):
            raise ValidationError(
                f"bad point {chunk!r}: expected phi_f,tau or phi_f,tau,population"
            )
        try:
            vals = [float(p) for p in parts]
        except ValueError:
            raise ValidationError(f"bad point {chunk!r}: not numeric")
        if len(vals) == 2:
            if imap is None:
                raise ValidationError(
                    f"point {chunk!r} gives no population and no map is available"
                )
            pf, tau = vals
            j = int(np.argmin(np.abs(imap.phi_f_axis - pf)))
            i = int(np.argmin(np.abs(imap.tau_axis - tau)))
            vals = [float(imap.phi_f_axis[j]), float(imap.tau_axis[i]),
                    float(imap.values[i, j])]
        points.append(tuple(vals))
    if not points:
        raise ValidationError("no points given")
    return points


def _write_report(path_txt, path_kv, fit: analysis.SpectroscopyFit, source: str):
    lines = [
        "LZS spectroscopy fit",
        f"source: {source}",
        f"slope estimate: {fit.slope_estimate:.6g} GHz/mPhi0",
    ]
    for loc, gap in fit.gap_estimates:
        lines.append(f"gap estimate: {gap:.6g} GHz at {loc:.6g} mPhi0")
    if fit.anticrossing_locations:
        locs = ", ".join(f"{x:.6g}" for x in fit.anticrossing_locations)
        lines.append(f"anticrossing locations (mPhi0): {locs}")
    k12, k13 = fit.region_rates
    if k12 is not None:
        lines.append(f"characteristic rate k12: {k12:.6g} mPhi0/ns")
    if k13 is not None:
        lines.append(f"characteristic rate k13: {k13:.6g} mPhi0/ns")
    text = "\n".join(lines) + "\n"
    path_txt.write_text(text)

    def dump(value):
        return json.dumps(value, sort_keys=True)

    kv = [
        f"slope_estimate={fit.slope_estimate!r}",
        f"gap_estimates={dump([list(g) for g in fit.gap_estimates])}",
        f"anticrossing_locations={dump(fit.anticrossing_locations)}",
        f"k12={dump(k12)}",
        f"k13={dump(k13)}",
        f"residuals={dump({k: v for k, v in fit.residuals.items()})}",
    ]
    path_kv.write_text("\n".join(kv) + "\n")
    return text


def _cmd_analyze(args) -> int:
    imap = read_csv(args.map_csv)
    points = _parse_points(args.points, imap) if args.points else None
    gap_range = tuple(float(x) for x in args.gap_range.split(","))
    fit = analysis.analyze_map(
        imap,
        phi_f_ref=args.phi_f_ref,
        gap_points=points,
        gap_range=gap_range,
        gap_step=args.gap_step,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(args.map_csv).stem
    text = _write_report(out / f"{stem}_report.txt", out / f"{stem}_report.kv",
                         fit, str(args.map_csv))
    print(text, end="")
    print(out / f"{stem}_report.txt")
    print(out / f"{stem}_report.kv")
    return EXIT_OK


def _cmd_fft(args) -> int:
    imap = read_csv(args.map_csv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{Path(args.map_csv).stem}_fft.csv"
    with open(path, "w", newline="") as fh:
        fh.write("phi_f_mPhi0,dominant_omega_rad_ns,power,resolution_rad_ns\n")
        for pf in imap.phi_f_axis:
            cs = analysis.column_fft(imap, float(pf))
            fh.write(f"{cs.phi_f:.9g},{cs.dominant_omega:.9g},"
                     f"{cs.power:.9g},{cs.resolution:.9g}\n")
    print(path)
    if args.phi_f_min is not None:
        slope, residual = analysis.fft_linearity(imap, args.phi_f_min)
        print(f"linear fit for phi_f >= {args.phi_f_min:g}: "
              f"slope {slope:.6g} GHz/mPhi0, rms residual {residual:.3g} rad/ns")
    return EXIT_OK


def _cmd_fit_gap(args) -> int:
    imap = read_csv(args.map_csv) if args.map_csv else None
    points = _parse_points(args.points, imap)
    gap_range = tuple(float(x) for x in args.gap_range.split(","))
    fit = analysis.fit_gap(points, args.slope, args.phi_i,
                           gap_range=gap_range, step=args.gap_step)
    print(f"gap estimate: {fit.gap:.6g} GHz (objective {fit.objective:.3g})")
    for gap, obj in fit.candidates[1:]:
        print(f"  also consistent: {gap:.6g} GHz (objective {obj:.3g})")
    return EXIT_OK


def _make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lzspec",
        description="Triangle-pulse LZS interferometry: sweeps and spectrum fits",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run_opts(p):
        p.add_argument("--preset", choices=sorted(PRESETS),
                       help="named parameter set")
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--tolerance", type=float,
                       help="relative integration tolerance override")

    p_sweep = sub.add_parser("sweep", help="run an interference-map sweep")
    add_run_opts(p_sweep)
    p_sweep.add_argument("--workers", type=int, help="worker thread count")
    p_sweep.add_argument("--pgm", action="store_true",
                         help="also emit a 16-bit PGM heatmap")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_trace = sub.add_parser("trace", help="record one pulse trajectory")
    add_run_opts(p_trace)
    p_trace.add_argument("--phi-f", type=float, required=True, dest="phi_f")
    p_trace.add_argument("--tau", type=float, required=True)
    p_trace.set_defaults(func=_cmd_trace)

    p_an = sub.add_parser("analyze", help="extract spectrum parameters from a map CSV")
    p_an.add_argument("map_csv")
    p_an.add_argument("--out", default=".")
    p_an.add_argument("--phi-f-ref", type=float, dest="phi_f_ref",
                      help="large-amplitude column for the slope fit")
    p_an.add_argument("--points",
                      help="gap-fit points 'phi_f,tau[,pop];...' "
                           "(populations default to map values)")
    p_an.add_argument("--gap-range", default="0.01,12.0", dest="gap_range")
    p_an.add_argument("--gap-step", type=float, default=0.01, dest="gap_step")
    p_an.set_defaults(func=_cmd_analyze)

    p_fft = sub.add_parser("fft", help="per-column dominant frequencies of a map CSV")
    p_fft.add_argument("map_csv")
    p_fft.add_argument("--out", default=".")
    p_fft.add_argument("--phi-f-min", type=float, dest="phi_f_min",
                       help="also fit the linear 2*pi/T vs phi_f relation")
    p_fft.set_defaults(func=_cmd_fft)

    p_gap = sub.add_parser("fit-gap", help="fit the gap from population points")
    p_gap.add_argument("--points", required=True,
                       help="'phi_f,tau,pop;...' or 'phi_f,tau;...' with --map")
    p_gap.add_argument("--slope", type=float, required=True)
    p_gap.add_argument("--phi-i", type=float, required=True, dest="phi_i")
    p_gap.add_argument("--map", dest="map_csv",
                       help="map CSV to read populations from")
    p_gap.add_argument("--gap-range", default="0.01,12.0", dest="gap_range")
    p_gap.add_argument("--gap-step", type=float, default=0.01, dest="gap_step")
    p_gap.set_defaults(func=_cmd_fit_gap)

    return parser


def main(argv=None) -> int:
    parser = _make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (IntegrationError, FitError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return EXIT_IO
    except LzspecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
