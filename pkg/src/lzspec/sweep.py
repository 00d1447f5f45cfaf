"""Interference-map engine: grid sweeps plus CSV/PGM emission.

A map is the final population in the initial state |L0> over a 2-D grid
of pulse parameters (phi_f, tau) at fixed phi_i.  Cells are independent
pulse integrations from the same pure initial state, so the sweep is
embarrassingly parallel; each worker writes to a disjoint slot of the
preallocated output and the result is identical for any worker count.

CSV format (long): comment header lines starting with '#', then the
column header ``phi_f_mPhi0,tau_ns,population`` and one row per cell with
9 significant digits, ordered by phi_f then tau.  The full run
configuration is embedded in the comment header; nothing run-dependent
(timestamps, worker counts) is written, so repeated runs are bitwise
identical.

PGM format: plain P2, 16-bit, rows = tau descending, columns = phi_f
ascending, value = round(population * 65535).
"""

from __future__ import annotations

import io
import json
import math
import time
from dataclasses import asdict, dataclass, field

import numba
import numpy as np

from . import _kernels as K
from .errors import IntegrationError, SchemaError, ValidationError
from .propagator import StepperConfig
from .qubit import QubitSpectrum

__all__ = [
    "GridSpec",
    "InterferenceMap",
    "SweepDiagnostics",
    "run_sweep",
    "extract_column",
    "write_csv",
    "read_csv",
    "write_pgm",
]

CSV_HEADER = "phi_f_mPhi0,tau_ns,population"
VALUE_TOL = 1e-8


@dataclass(frozen=True)
class GridSpec:
    """(min, max, count) ranges for phi_f and tau plus the fixed phi_i."""

    phi_f_range: tuple[float, float, int]
    tau_range: tuple[float, float, int]
    phi_i: float

    def __post_init__(self):
        for name, (lo, hi, count) in (
            ("phi_f_range", self.phi_f_range),
            ("tau_range", self.tau_range),
        ):
            if int(count) != count or count < 1:
                raise ValidationError(f"{name} count must be a positive integer")
            if count > 1 and not lo < hi:
                raise ValidationError(f"{name} needs min < max when count > 1")
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValidationError(f"{name} bounds must be finite")
        if self.tau_range[0] <= 0.0:
            raise ValidationError("all tau values must be positive")
        if not math.isfinite(self.phi_i):
            raise ValidationError("phi_i must be finite")

    def phi_f_axis(self) -> np.ndarray:
        lo, hi, count = self.phi_f_range
        return np.linspace(lo, hi, int(count))

    def tau_axis(self) -> np.ndarray:
        lo, hi, count = self.tau_range
        return np.linspace(lo, hi, int(count))


@dataclass
class InterferenceMap:
    """Final |L0> populations over the (tau, phi_f) grid.

    values[i, j] is the population for tau_axis[i], phi_f_axis[j].
    spectrum/stepper record how the map was produced; created_at is kept
    in memory only and never written to artifacts.
    """

    phi_f_axis: np.ndarray
    tau_axis: np.ndarray
    phi_i: float
    values: np.ndarray
    spectrum: QubitSpectrum | None = None
    stepper: StepperConfig | None = None
    created_at: float | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.phi_f_axis = np.asarray(self.phi_f_axis, dtype=float)
        self.tau_axis = np.asarray(self.tau_axis, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        expected = (self.tau_axis.size, self.phi_f_axis.size)
        if self.values.shape != expected:
            raise ValidationError(
                f"values shape {self.values.shape} does not match grid {expected}"
            )
        if self.values.size and (
            self.values.min() < -VALUE_TOL or self.values.max() > 1.0 + VALUE_TOL
        ):
            raise ValidationError(
                "populations outside [0, 1] beyond tolerance: "
                f"range [{self.values.min():g}, {self.values.max():g}]"
            )

    def grid(self) -> GridSpec:
        pf, tau = self.phi_f_axis, self.tau_axis
        return GridSpec(
            (float(pf[0]), float(pf[-1]), pf.size),
            (float(tau[0]), float(tau[-1]), tau.size),
            self.phi_i,
        )

    def config_dict(self) -> dict:
        cfg: dict = {
            "phi_i": self.phi_i,
            "grid": {
                "phi_f": [float(self.phi_f_axis[0]), float(self.phi_f_axis[-1]),
                          int(self.phi_f_axis.size)],
                "tau": [float(self.tau_axis[0]), float(self.tau_axis[-1]),
                        int(self.tau_axis.size)],
            },
        }
        if self.spectrum is not None:
            cfg["spectrum"] = self.spectrum.to_dict()
        if self.stepper is not None:
            cfg["stepper"] = asdict(self.stepper)
        return cfg


@dataclass
class SweepDiagnostics:
    """Per-cell integrator diagnostics of one sweep."""

    final_states: np.ndarray
    max_trace_deviation: np.ndarray
    step_counts: np.ndarray
    rhs_eval_counts: np.ndarray


def set_workers(workers: int | None) -> int:
    """Set the sweep thread count, clamped to what the host allows."""
    limit = numba.config.NUMBA_NUM_THREADS
    if workers is None:
        n = limit
    else:
        if workers < 1:
            raise ValidationError(f"workers must be >= 1, got {workers}")
        n = min(int(workers), limit)
    numba.set_num_threads(n)
    return n


def run_sweep(
    grid: GridSpec,
    spectrum: QubitSpectrum,
    config: StepperConfig | None = None,
    workers: int | None = None,
    return_diagnostics: bool = False,
):
    """Run one pulse integration per grid cell and collect W_11(tau).

    Any cell failure aborts the sweep (fail-fast): a partial map is
    scientifically misleading.  The error names the first failing cell in
    row-major (tau, phi_f) order.
    """
    config = config or StepperConfig()
    if config.method != "adaptive-rk":
        raise ValidationError("sweeps support only the adaptive-rk stepper")
    set_workers(workers)
    pf_axis = grid.phi_f_axis()
    tau_axis = grid.tau_axis()
    a = spectrum.slope_vector()
    b = spectrum.offset_matrix()
    w11, finals, trace_dev, steps, rhs_evals, status, t_fail = K._sweep_adaptive(
        a, b, grid.phi_i, pf_axis, tau_axis,
        config.rel_tol, config.abs_tol, config.max_step, config.initial_step,
    )
    if status.any():
        i, j = np.argwhere(status != 0)[0]
        raise IntegrationError(
            f"integration failed at cell phi_f={pf_axis[j]:.6g} mPhi0, "
            f"tau={tau_axis[i]:.6g} ns (reached t={t_fail[i, j]:.6g} ns)",
            t_reached=float(t_fail[i, j]),
            cell=(float(pf_axis[j]), float(tau_axis[i])),
        )
    result = InterferenceMap(
        phi_f_axis=pf_axis,
        tau_axis=tau_axis,
        phi_i=grid.phi_i,
        values=w11,
        spectrum=spectrum,
        stepper=config,
        created_at=time.time(),
    )
    if return_diagnostics:
        return result, SweepDiagnostics(finals, trace_dev, steps, rhs_evals)
    return result


def nearest_column_index(imap: InterferenceMap, phi_f: float) -> int:
    """Index of the grid column nearest to phi_f (ties to the lower node)."""
    axis = imap.phi_f_axis
    if phi_f < axis[0] or phi_f > axis[-1]:
        raise ValidationError(
            f"phi_f={phi_f} outside the map range [{axis[0]}, {axis[-1]}]"
        )
    return int(np.argmin(np.abs(axis - phi_f)))


def extract_column(imap: InterferenceMap, phi_f: float):
    """(tau, W_11) series of the column nearest to phi_f, sorted by tau."""
    j = nearest_column_index(imap, phi_f)
    return imap.tau_axis.copy(), imap.values[:, j].copy()


def _format_header(imap: InterferenceMap, extra_config: dict | None) -> list[str]:
    cfg = imap.config_dict()
    if extra_config:
        cfg.update(extra_config)
    return [
        "# lzspec interference map",
        "# config: " + json.dumps(cfg, sort_keys=True, separators=(",", ":")),
    ]


def write_csv(imap: InterferenceMap, path_or_file, extra_config: dict | None = None):
    """Emit the map as long-format CSV, phi_f-major, 9 significant digits."""

    def _write(fh):
        for line in _format_header(imap, extra_config):
            fh.write(line + "\n")
        fh.write(CSV_HEADER + "\n")
        for j, pf in enumerate(imap.phi_f_axis):
            col = imap.values[:, j]
            for i, tau in enumerate(imap.tau_axis):
                fh.write(f"{pf:.9g},{tau:.9g},{col[i]:.9g}\n")

    if isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__"):
        with open(path_or_file, "w", newline="") as fh:
            _write(fh)
    else:
        _write(path_or_file)


def read_csv(path_or_file) -> InterferenceMap:
    """Parse a map CSV back into an InterferenceMap.

    The grid is reconstructed from the unique phi_f/tau values; the file
    must contain exactly one row per grid cell.  Schema violations are
    reported with the 1-based line number and column.
    """
    if isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__"):
        with open(path_or_file, "r") as fh:
            return _read_csv_stream(fh)
    return _read_csv_stream(path_or_file)


def _read_csv_stream(fh: io.TextIOBase) -> InterferenceMap:
    config = None
    header_seen = False
    rows = []
    for lineno, raw in enumerate(fh, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("config:"):
                try:
                    config = json.loads(body[len("config:"):])
                except json.JSONDecodeError as exc:
                    raise SchemaError(f"line {lineno}: bad config JSON: {exc}")
            continue
        if not header_seen:
            if line != CSV_HEADER:
                raise SchemaError(
                    f"line {lineno}: expected header {CSV_HEADER!r}, got {line!r}"
                )
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise SchemaError(f"line {lineno}: expected 3 fields, got {len(parts)}")
        values = []
        for col, part in enumerate(parts, start=1):
            try:
                values.append(float(part))
            except ValueError:
                raise SchemaError(
                    f"line {lineno}, column {col}: not a number: {part!r}"
                )
        rows.append(values)
    if not header_seen:
        raise SchemaError(f"missing header line {CSV_HEADER!r}")
    if not rows:
        raise SchemaError("no data rows")

    data = np.asarray(rows)
    pf_axis = np.unique(data[:, 0])
    tau_axis = np.unique(data[:, 1])
    if pf_axis.size * tau_axis.size != data.shape[0]:
        raise SchemaError(
            f"incomplete grid: {data.shape[0]} rows for "
            f"{pf_axis.size} x {tau_axis.size} cells"
        )
    values = np.empty((tau_axis.size, pf_axis.size))
    ji = np.searchsorted(pf_axis, data[:, 0])
    ii = np.searchsorted(tau_axis, data[:, 1])
    values[ii, ji] = data[:, 2]

    phi_i = None
    spectrum = None
    stepper = None
    if config:
        phi_i = config.get("phi_i")
        if "spectrum" in config:
            spectrum = QubitSpectrum.from_dict(config["spectrum"])
        if "stepper" in config:
            try:
                stepper = StepperConfig(**config["stepper"])
            except TypeError as exc:
                raise SchemaError(f"bad stepper config: {exc}")
    if phi_i is None:
        raise SchemaError("map header does not record phi_i")
    return InterferenceMap(
        phi_f_axis=pf_axis,
        tau_axis=tau_axis,
        phi_i=float(phi_i),
        values=values,
        spectrum=spectrum,
        stepper=stepper,
        extra=config or {},
    )


def write_pgm(imap: InterferenceMap, path_or_file, extra_config: dict | None = None):
    """Emit a plain (P2) 16-bit grayscale heatmap of the map."""
    levels = np.rint(np.clip(imap.values, 0.0, 1.0) * 65535.0).astype(np.int64)

    def _write(fh):
        fh.write("P2\n")
        for line in _format_header(imap, extra_config):
            fh.write(line + "\n")
        fh.write(f"{imap.phi_f_axis.size} {imap.tau_axis.size}\n")
        fh.write("65535\n")
        for i in range(imap.tau_axis.size - 1, -1, -1):
            fh.write(" ".join(str(v) for v in levels[i]) + "\n")

    if isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__"):
        with open(path_or_file, "w", newline="") as fh:
            _write(fh)
    else:
        _write(path_or_file)
