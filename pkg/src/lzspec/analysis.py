"""Inverse analysis: extract spectrum parameters from interference maps.

The forward problem maps (slope l, gaps, anticrossing locations) to a
population map W_11(phi_f, tau).  This module inverts it:

* dominant fringe frequency per column by mean-subtracted DFT with
  parabolic peak refinement;
* slope l from the large-amplitude phase relation 2*pi/T = l*phi_f**2/(phi_f-phi_i);
* its extreme-amplitude linearity check 2*pi/T ~ l*phi_f;
* gap delta by an exhaustive 1-D scan of the closed-form population
  against a handful of measured map points (the objective is oscillatory
  with many local minima, so a scan mirrors the graphical procedure and a
  gradient method would be unreliable);
* anticrossing locations from the fringe-edge (variance onset) and, for
  multi-level maps, from the onset of fringe-spacing distortion;
* the three-region partition of a two-anticrossing map by characteristic
  sweep rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks

from .analytic import (
    LARGE_AMPLITUDE_RATIO,
    characteristic_sweep_rate,
    population_from_phase,
)
from .errors import FitError, RegimeError, ValidationError
from .qubit import TrianglePulse
from .sweep import InterferenceMap, extract_column, nearest_column_index

__all__ = [
    "ColumnSpectrum",
    "GapFit",
    "SpectroscopyFit",
    "THETA_VAR",
    "THETA_DIST",
    "column_fft",
    "fit_slope",
    "fft_linearity",
    "fit_gap",
    "column_fringe_minima",
    "fringe_spacing_field",
    "predicted_fringe_spacing",
    "locate_anticrossings",
    "classify_regions",
    "sweep_rate_grid",
    "analyze_map",
]

# Fringe-edge detection threshold: column variance relative to the squared
# full-map contrast.  Relative, so the locator is invariant under a uniform
# rescaling of the population contrast.
THETA_VAR = 1e-3

# Distortion threshold: relative deviation of the local fringe spacing from
# the one-anticrossing prediction.
THETA_DIST = 0.2


@dataclass(frozen=True)
class ColumnSpectrum:
    """Dominant fringe frequency of one map column.

    dominant_omega is the angular frequency 2*pi/T of the strongest
    spectral component (rad/ns); resolution is the frequency-bin width
    2*pi/(tau span) of the underlying transform.
    """

    phi_f: float
    dominant_omega: float
    power: float
    resolution: float


@dataclass(frozen=True)
class GapFit:
    """Result of the exhaustive gap scan.

    candidates holds every near-degenerate local minimum below the
    consistency threshold, ordered best first; gap is candidates[0].
    """

    gap: float
    objective: float
    candidates: tuple[tuple[float, float], ...]
    scan_range: tuple[float, float]
    scan_step: float


@dataclass
class SpectroscopyFit:
    """Spectrum parameters extracted from one map."""

    slope_estimate: float
    gap_estimates: list[tuple[float, float]] = field(default_factory=list)
    anticrossing_locations: list[float] = field(default_factory=list)
    region_rates: tuple[float | None, float | None] = (None, None)
    residuals: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.slope_estimate > 0.0:
            raise ValidationError(
                f"slope estimate must be positive, got {self.slope_estimate}"
            )
        for loc, gap in self.gap_estimates:
            if gap < 0.0:
                raise ValidationError(f"gap estimate must be >= 0, got {gap}")


def column_fft(imap: InterferenceMap, phi_f: float, pad_factor: int = 8,
               window: str | None = None) -> ColumnSpectrum:
    """Dominant oscillation frequency of the column nearest phi_f.

    Mean-subtracted DFT with a flat window by default (a Hann window can
    be requested for noisy data); the peak bin is refined by 3-point
    parabolic interpolation on the magnitude spectrum.  Zero padding
    refines the peak location only; `resolution` still reports the
    physical bin width of the tau span.
    """
    tau, values = extract_column(imap, phi_f)
    j = nearest_column_index(imap, phi_f)
    node = float(imap.phi_f_axis[j])
    n = tau.size
    if n < 16:
        raise ValidationError(f"column needs >= 16 samples, got {n}")
    steps = np.diff(tau)
    dt = steps.mean()
    if not np.allclose(steps, dt, rtol=1e-5, atol=0.0):
        raise ValidationError("tau grid is not uniform; cannot FFT the column")
    span = tau[-1] - tau[0]
    resolution = 2.0 * math.pi / span

    y = values - values.mean()
    if window == "hann":
        y = y * np.hanning(n)
    elif window is not None:
        raise ValidationError(f"unknown window {window!r}")
    nfft = int(pad_factor) * n
    mag = np.abs(np.fft.rfft(y, nfft))
    # content slower than two cycles per span is drift, not a fringe; its
    # leakage would otherwise shadow a weak oscillation peak
    min_bin = max(1, int(math.ceil(2.0 * nfft / n)))
    if mag.size <= min_bin + 1 or mag[min_bin:].max() <= 1e-12 * n:
        return ColumnSpectrum(node, 0.0, 0.0, resolution)
    peak = min_bin + int(np.argmax(mag[min_bin:]))
    if 0 < peak < mag.size - 1:
        alpha, beta, gamma = mag[peak - 1], mag[peak], mag[peak + 1]
        denom = alpha - 2.0 * beta + gamma
        shift = 0.5 * (alpha - gamma) / denom if denom != 0.0 else 0.0
    else:
        shift = 0.0
    omega = 2.0 * math.pi * (peak + shift) / (nfft * dt)
    power = (2.0 * mag[peak] / n) ** 2
    return ColumnSpectrum(node, float(omega), float(power), resolution)


def fit_slope(imap: InterferenceMap, phi_f_ref: float,
              gap_hint: float | None = None, min_periods: float = 3.0) -> float:
    """Spectrum slope from the dominant period of one large-amplitude column.

    Inverts 2*pi/T = l*phi_f**2/(phi_f - phi_i).  The reference column
    must show at least `min_periods` oscillation periods; when a gap hint
    is available the large-amplitude ratio l*phi_f/delta is checked too.
    """
    cs = column_fft(imap, phi_f_ref)
    if cs.phi_f <= 0.0:
        raise RegimeError(
            f"reference column phi_f={cs.phi_f:g} never crosses the anticrossing"
        )
    span = imap.tau_axis[-1] - imap.tau_axis[0]
    periods = cs.dominant_omega * span / (2.0 * math.pi)
    if periods < min_periods:
        raise RegimeError(
            f"column at phi_f={cs.phi_f:g} shows only {periods:.2f} oscillation "
            f"periods (need >= {min_periods:g}); not in the large-amplitude regime"
        )
    slope = cs.dominant_omega * (cs.phi_f - imap.phi_i) / cs.phi_f**2
    if gap_hint is not None and gap_hint > 0.0:
        ratio = slope * cs.phi_f / gap_hint
        if ratio < LARGE_AMPLITUDE_RATIO:
            raise RegimeError(
                f"l*phi_f/delta = {ratio:.2f} below the large-amplitude "
                f"threshold {LARGE_AMPLITUDE_RATIO:g} at phi_f={cs.phi_f:g}"
            )
    return float(slope)


def fft_linearity(imap: InterferenceMap, phi_f_min: float):
    """Least-squares line through (phi_f, dominant omega) for phi_f >= phi_f_min.

    In the extreme-amplitude regime 2*pi/T ~ l*phi_f, so the fitted slope
    estimates l.  Returns (slope, rms residual in rad/ns).
    """
    xs, ys = [], []
    for j, pf in enumerate(imap.phi_f_axis):
        if pf < phi_f_min:
            continue
        cs = column_fft(imap, float(pf))
        if cs.dominant_omega > 0.0 and cs.power > 1e-10:
            xs.append(pf)
            ys.append(cs.dominant_omega)
    if len(xs) < 4:
        raise ValidationError(
            f"only {len(xs)} qualifying columns with phi_f >= {phi_f_min:g}; need >= 4"
        )
    xs = np.asarray(xs)
    ys = np.asarray(ys)
    coeffs = np.polyfit(xs, ys, 1)
    fit = np.polyval(coeffs, xs)
    residual = float(np.sqrt(np.mean((fit - ys) ** 2)))
    return float(coeffs[0]), residual


def _phase_closed_form(slope: float, gaps: np.ndarray, pulse: TrianglePulse) -> np.ndarray:
    """Vectorized closed-form phase over an array of gap values."""
    tau_star = pulse.effective_width()
    lpf = slope * pulse.phi_f
    gaps = np.asarray(gaps, dtype=float)
    out = tau_star * (np.hypot(gaps, lpf) + np.where(
        gaps > 0.0,
        gaps * gaps / lpf * np.arcsinh(np.divide(lpf, gaps, out=np.ones_like(gaps),
                                                 where=gaps > 0.0)),
        0.0,
    ))
    return out


def fit_gap(points, slope: float, phi_i: float,
            gap_range: tuple[float, float] = (0.01, 12.0),
            step: float = 0.01,
            point_tolerance: float = 0.1) -> GapFit:
    """Gap delta by exhaustive scan of the closed-form population.

    points : iterable of (phi_f, tau, population) measured on the map.
    For every candidate delta the closed-form phase is turned into a
    population and compared to the measurements in the least-squares
    sense.  All local minima whose summed squared error stays below
    n_points * point_tolerance**2 are reported (the closed form neglects
    the finite Landau-Zener amplitude, so residuals up to ~0.1 per point
    are expected); if no minimum qualifies the points are inconsistent.
    """
    pts = [(float(pf), float(tau), float(pop)) for pf, tau, pop in points]
    if not pts:
        raise ValidationError("need at least one (phi_f, tau, population) point")
    for pf, tau, pop in pts:
        if pf <= 0.0:
            raise ValidationError(f"point at phi_f={pf:g} never crosses the anticrossing")
        if not -1e-6 <= pop <= 1.0 + 1e-6:
            raise ValidationError(f"population {pop:g} outside [0, 1]")
    if slope <= 0.0:
        raise ValidationError(f"slope must be positive, got {slope}")
    lo, hi = gap_range
    if not (0.0 < lo < hi) or step <= 0.0:
        raise ValidationError(f"bad scan range {gap_range} / step {step}")

    gaps = np.arange(lo, hi + 0.5 * step, step)
    objective = np.zeros_like(gaps)
    for pf, tau, pop in pts:
        pulse = TrianglePulse(phi_i, pf, tau)
        model = population_from_phase(_phase_closed_form(slope, gaps, pulse))
        objective += (model - pop) ** 2

    interior = (objective[1:-1] <= objective[:-2]) & (objective[1:-1] <= objective[2:])
    minima = [0] if objective[0] < objective[1] else []
    minima += list(1 + np.flatnonzero(interior))
    if objective[-1] < objective[-2]:
        minima.append(len(objective) - 1)
    threshold = len(pts) * point_tolerance**2
    qualifying = sorted(
        ((float(gaps[i]), float(objective[i])) for i in minima
         if objective[i] <= threshold),
        key=lambda pair: pair[1],
    )
    if not qualifying:
        best = float(objective.min())
        raise FitError(
            f"inconsistent points: best scan residual {best:.4g} exceeds "
            f"threshold {threshold:.4g} over delta in [{lo:g}, {hi:g}]"
        )
    best_gap, best_obj = qualifying[0]
    return GapFit(best_gap, best_obj, tuple(qualifying), (float(lo), float(hi)),
                  float(step))


def column_fringe_minima(tau: np.ndarray, values: np.ndarray,
                         prominence_rel: float = 0.1) -> np.ndarray:
    """tau positions of interference minima in one column.

    The prominence floor (relative to the column contrast) rejects the
    shallow ripple produced by initializing in a diabatic state, which is
    not an interference fringe.
    """
    contrast = values.max() - values.min()
    if contrast <= 0.0:
        return np.empty(0)
    idx, _ = find_peaks(-values, prominence=prominence_rel * contrast)
    return tau[idx]


def predicted_fringe_spacing(slope: float, phi_i: float, phi_f):
    """Large-amplitude fringe period in tau: 2*pi*(phi_f-phi_i)/(l*phi_f^2)."""
    phi_f = np.asarray(phi_f, dtype=float)
    return 2.0 * math.pi * (phi_f - phi_i) / (slope * phi_f**2)


def fringe_spacing_field(imap: InterferenceMap, prominence_rel: float = 0.05):
    """Local fringe spacing per cell (NaN where not measurable).

    Each spacing between adjacent minima of a column is assigned to the
    grid rows between those minima, giving a per-cell field that can be
    intersected with region labels.
    """
    tau = imap.tau_axis
    spacing = np.full(imap.values.shape, np.nan)
    for j in range(imap.phi_f_axis.size):
        minima = column_fringe_minima(tau, imap.values[:, j], prominence_rel)
        if minima.size < 2:
            continue
        for t0, t1 in zip(minima, minima[1:]):
            rows = (tau >= t0) & (tau <= t1)
            spacing[rows, j] = t1 - t0
    return spacing


def sweep_rate_grid(imap: InterferenceMap) -> np.ndarray:
    """Per-cell sweep rate k = 2*(phi_f - phi_i)/tau (mPhi0/ns)."""
    pf = imap.phi_f_axis[np.newaxis, :]
    tau = imap.tau_axis[:, np.newaxis]
    return 2.0 * (pf - imap.phi_i) / tau


def locate_anticrossings(imap: InterferenceMap,
                         theta_var: float = THETA_VAR,
                         theta_dist: float = THETA_DIST,
                         fit_columns: int = 6) -> list[float]:
    """Anticrossing locations from fringe edges.

    The first location is the left edge of the first fringe: the smallest
    phi_f whose column variance (relative to the squared full-map
    contrast) exceeds theta_var *and* whose fringes dip through half the
    map contrast.  The depth condition keeps the shallow variance tail
    radiated by a near-missed crossing (which decays smoothly over a gap
    width 2*delta/l of detuning) from firing the edge early; the edge
    resolution is accordingly a fraction of the gap width, not a grid
    step.

    A second location is reported where the fringe-spacing field departs
    from the one-anticrossing prediction by more than theta_dist for two
    consecutive measurable columns.  Spacings come from each column's
    dominant DFT frequency (measurable: a clear peak showing at least 2.5
    periods over the tau span).  Columns just past the fringe edge
    oscillate with a different (partial-passage) law, so the prediction is
    anchored on the first run of four measurable columns that are
    internally consistent with the one-anticrossing spacing shape, and the
    departure scan starts after that anchor.
    """
    values = imap.values
    contrast = values.max() - values.min()
    if contrast <= 1e-12:
        return []
    variances = values.var(axis=0)
    depths = values.max(axis=0) - values.min(axis=0)
    live = (variances > theta_var * contrast * contrast) \
        & (depths > 0.5 * contrast)
    if not live.any():
        return []
    first_idx = int(np.argmax(live))
    locations = [float(imap.phi_f_axis[first_idx])]

    col_spacing = np.full(imap.phi_f_axis.size, np.nan)
    for j in range(first_idx, imap.phi_f_axis.size):
        if imap.phi_f_axis[j] <= 0.0:
            continue
        cs = column_fft(imap, float(imap.phi_f_axis[j]))
        enough_periods = cs.dominant_omega >= 2.5 * cs.resolution
        strong = cs.power >= (0.05 * contrast) ** 2
        if enough_periods and strong:
            col_spacing[j] = 2.0 * math.pi / cs.dominant_omega
    measurable = [j for j in range(imap.phi_f_axis.size)
                  if np.isfinite(col_spacing[j])]

    def fit_window_slope(js):
        pf_fit = imap.phi_f_axis[js]
        geom = pf_fit**2 / (pf_fit - imap.phi_i)
        # least squares for 1/S = (l/2pi)*geom; the geom^2 leverage makes
        # the large-amplitude columns dominate the fit
        inv_s = 1.0 / col_spacing[js]
        return 2.0 * math.pi * np.sum(geom * inv_s) / np.sum(geom**2)

    window = 4
    if len(measurable) < window + 2:
        return locations
    anchor_end = None
    slope_eff = None
    for w in range(len(measurable) - window + 1):
        js = measurable[w:w + window]
        candidate = fit_window_slope(js)
        preds = predicted_fringe_spacing(candidate, imap.phi_i,
                                         imap.phi_f_axis[js])
        devs = np.abs(col_spacing[js] - preds) / preds
        if devs.max() <= 0.5 * theta_dist:
            anchor_end = w + window
            slope_eff = candidate
            break
    if anchor_end is None:
        return locations

    streak = 0
    for j in measurable[anchor_end:]:
        pred = predicted_fringe_spacing(slope_eff, imap.phi_i, imap.phi_f_axis[j])
        dev = abs(col_spacing[j] - pred) / pred
        if dev > theta_dist:
            streak += 1
            if streak >= 2:
                locations.append(float(imap.phi_f_axis[j - streak + 1]))
                break
        else:
            streak = 0
    return locations


def classify_regions(imap: InterferenceMap, gap12: float, gap13: float,
                     slope: float) -> np.ndarray:
    """Label each cell 1, 2 or 3 by its sweep rate.

    Region 1: k <= k12 (only the smaller anticrossing acts); region 2:
    k >= k13 (only the larger one); region 3: in between, both act.
    Requires gap12 < gap13 so the two characteristic rates are ordered.
    """
    k12 = characteristic_sweep_rate(gap12, slope)
    k13 = characteristic_sweep_rate(gap13, slope)
    if not k12 < k13:
        raise ValidationError(
            f"region partition needs gap12 < gap13 (rates k12={k12:g}, k13={k13:g})"
        )
    k = sweep_rate_grid(imap)
    labels = np.full(k.shape, 3, dtype=np.int8)
    labels[k <= k12] = 1
    labels[k >= k13] = 2
    return labels


def _default_gap_points(imap: InterferenceMap,
                        targets=((1.0, 3.85), (2.0, 3.85))):
    """Populations read at the map cells nearest the target coordinates."""
    points = []
    for pf, tau in targets:
        if not (imap.phi_f_axis[0] <= pf <= imap.phi_f_axis[-1]
                and imap.tau_axis[0] <= tau <= imap.tau_axis[-1]):
            continue
        j = nearest_column_index(imap, pf)
        i = int(np.argmin(np.abs(imap.tau_axis - tau)))
        points.append((float(imap.phi_f_axis[j]), float(imap.tau_axis[i]),
                       float(imap.values[i, j])))
    return points


def analyze_map(imap: InterferenceMap,
                phi_f_ref: float | None = None,
                gap_points=None,
                gap_range: tuple[float, float] = (0.01, 12.0),
                gap_step: float = 0.01) -> SpectroscopyFit:
    """Full extraction pipeline for one map.

    Fits the slope from a large-amplitude column (default: the paper
    geometry's phi_f = 8 when covered, otherwise the rightmost column),
    then the gap from two lower-region points (default (1.0, 3.85) and
    (2.0, 3.85) ns when covered, populations read off the map), and wraps
    up locations and characteristic rates.
    """
    pf_axis = imap.phi_f_axis
    if phi_f_ref is None:
        phi_f_ref = 8.0 if pf_axis[0] <= 8.0 <= pf_axis[-1] else float(pf_axis[-1])
    slope = fit_slope(imap, phi_f_ref)

    residuals: dict = {}
    cs = column_fft(imap, phi_f_ref)
    residuals["slope_column_power"] = cs.power
    residuals["slope_column_omega"] = cs.dominant_omega

    gap_estimates: list[tuple[float, float]] = []
    defaulted = gap_points is None
    if defaulted:
        gap_points = _default_gap_points(imap)
    locations = locate_anticrossings(imap)
    if gap_points:
        try:
            fit = fit_gap(gap_points, slope, imap.phi_i, gap_range, gap_step)
        except FitError as exc:
            # best effort on auto-selected points: simulated populations
            # deviate from the two-path closed form wherever the passage
            # visibility is partial, which can leave no consistent gap
            if not defaulted:
                raise
            residuals["gap_fit_error"] = str(exc)
        else:
            location = locations[0] if locations else 0.0
            gap_estimates.append((location, fit.gap))
            residuals["gap_fit_objective"] = fit.objective
            residuals["gap_fit_candidates"] = list(fit.candidates)

    k12 = None
    k13 = None
    if gap_estimates and gap_estimates[0][1] > 0.0:
        k12 = characteristic_sweep_rate(gap_estimates[0][1], slope)
    if len(gap_estimates) > 1 and gap_estimates[1][1] > 0.0:
        k13 = characteristic_sweep_rate(gap_estimates[1][1], slope)

    return SpectroscopyFit(
        slope_estimate=slope,
        gap_estimates=gap_estimates,
        anticrossing_locations=locations,
        region_rates=(k12, k13),
        residuals=residuals,
    )
