"""Closed-form interferometry quantities.

The phase accumulated between the two passages of the anticrossing at
dphi = 0 controls the return-population fringes.  Everything here is a
pure function of the spectrum parameters (slope l, gap delta) and the
pulse; the numeric propagator is never consulted except by the optional
Landau-Zener prefactor calibration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import AnticrossingNotCrossedError, ValidationError
from .qubit import TrianglePulse

__all__ = [
    "PhaseResult",
    "LARGE_AMPLITUDE_RATIO",
    "EXTREME_AMPLITUDE_RATIO",
    "stueckelberg_phase",
    "phase_by_quadrature",
    "phase_large_amplitude",
    "phase_extreme_amplitude",
    "population_from_phase",
    "lz_probability",
    "characteristic_sweep_rate",
    "calibrate_lz_prefactor",
]

# l*phi_f/delta at or above this ratio: the large-amplitude phase formula
# is accurate to a few percent (the slope fit is performed at ratio 8).
LARGE_AMPLITUDE_RATIO = 4.0

# |phi_f| / |phi_i| at or above this ratio (on top of the large-amplitude
# condition): the phase is effectively linear in phi_f.
EXTREME_AMPLITUDE_RATIO = 8.0


@dataclass(frozen=True)
class PhaseResult:
    """Accumulated Stueckelberg phase plus regime bookkeeping.

    phi : accumulated phase in rad (>= 0 for phi_f > 0).
    large_amplitude : l*phi_f/delta >= LARGE_AMPLITUDE_RATIO.
    extreme_amplitude : additionally |phi_f| >= EXTREME_AMPLITUDE_RATIO*|phi_i|.
    """

    phi: float
    large_amplitude: bool
    extreme_amplitude: bool


def _check_crossed(pulse: TrianglePulse):
    if pulse.phi_f <= 0.0 or pulse.phi_i >= 0.0:
        raise AnticrossingNotCrossedError(
            "phase is defined for pulses with phi_i < 0 < phi_f "
            f"(got phi_i={pulse.phi_i}, phi_f={pulse.phi_f})"
        )


def stueckelberg_phase(slope: float, gap: float, pulse: TrianglePulse) -> PhaseResult:
    """Closed-form phase between the two anticrossing passages.

    phi = tau* * ( sqrt(delta^2 + (l*phi_f)^2)
                   + (delta^2/(l*phi_f)) * asinh(l*phi_f/delta) )

    with tau* = phi_f*tau/(phi_f - phi_i).  The gap = 0 limit drops the
    (vanishing) logarithmic term.
    """
    _check_crossed(pulse)
    if slope <= 0.0:
        raise ValidationError(f"slope must be positive, got {slope}")
    if gap < 0.0:
        raise ValidationError(f"gap must be >= 0, got {gap}")
    tau_star = pulse.effective_width()
    lpf = slope * pulse.phi_f
    if gap == 0.0:
        phi = tau_star * lpf
        return PhaseResult(phi, True, pulse.phi_f >= EXTREME_AMPLITUDE_RATIO * abs(pulse.phi_i))
    ratio = lpf / gap
    phi = tau_star * (math.hypot(gap, lpf) + gap * gap / lpf * math.asinh(ratio))
    large = ratio >= LARGE_AMPLITUDE_RATIO
    extreme = large and pulse.phi_f >= EXTREME_AMPLITUDE_RATIO * abs(pulse.phi_i)
    return PhaseResult(phi, large, extreme)


def phase_by_quadrature(
    slope: float, gap: float, pulse: TrianglePulse, target: float = 1e-12
) -> float:
    """Adaptive quadrature of the level-splitting integral.

    Integrates nu_1(t) - nu_0(t) = 2*sqrt((l*dphi(t))^2 + delta^2) between
    the two crossing times, with the apex flagged as a breakpoint.  This is
    the independent oracle for `stueckelberg_phase`; it never uses the
    closed form.
    """
    _check_crossed(pulse)
    t1, t2 = pulse.crossing_times(0.0)

    def splitting(t):
        dphi = pulse.detuning_at(t)
        return 2.0 * math.hypot(slope * dphi, gap)

    value, _ = quad(
        splitting, t1, t2,
        points=[0.5 * pulse.tau],
        epsabs=target, epsrel=target, limit=200,
    )
    return value


def phase_large_amplitude(slope: float, pulse: TrianglePulse) -> float:
    """Large-amplitude phase l*phi_f^2*tau/(phi_f - phi_i).

    Valid when l*phi_f/delta >> 1; the caller is responsible for the
    regime check (see PhaseResult.large_amplitude).
    """
    return slope * pulse.phi_f**2 * pulse.tau / (pulse.phi_f - pulse.phi_i)


def phase_extreme_amplitude(slope: float, pulse: TrianglePulse) -> float:
    """Extreme-amplitude phase l*phi_f*tau (additionally |phi_f| >> |phi_i|)."""
    return slope * pulse.phi_f * pulse.tau


def population_from_phase(phi):
    """Return-state population (1 + cos(phi))/2; element-wise on arrays."""
    return 0.5 * (1.0 + np.cos(phi))


def lz_probability(gap: float, slope: float, rate: float, prefactor: float = 2.0) -> float:
    """Diabatic passage probability exp(-prefactor*pi*delta^2/(k*l)).

    The default prefactor 2 is the convention used to define the
    characteristic sweep rates that partition multi-level maps.  The
    numerically calibrated value for the Hamiltonian convention used here
    (diagonal -l*dphi/+l*dphi, coupling delta, hence gap 2*delta) is
    prefactor = 1; see `calibrate_lz_prefactor`.
    """
    if rate <= 0.0 or slope <= 0.0:
        raise ValidationError(
            f"rate and slope must be positive (got k={rate}, l={slope})"
        )
    return math.exp(-prefactor * math.pi * gap * gap / (rate * slope))


def characteristic_sweep_rate(gap: float, slope: float) -> float:
    """Sweep rate k at which 2*pi*delta^2/(k*l) = 1 (mPhi0/ns)."""
    if gap <= 0.0 or slope <= 0.0:
        raise ValidationError(
            f"gap and slope must be positive (got delta={gap}, l={slope})"
        )
    return 2.0 * math.pi * gap * gap / slope


def calibrate_lz_prefactor(
    gap: float = 2.0,
    slope: float = 2.0,
    rates: tuple[float, ...] = (8.0, 12.0, 16.0),
    reach: float = 60.0,
    config=None,
) -> float:
    """Calibrate c in P = exp(-c*pi*delta^2/(k*l)) against the propagator.

    Runs a single linear passage through an isolated anticrossing (ramp
    from -reach to +reach at each rate) and inverts the measured survival
    probability.  Returns the mean fitted prefactor; the expected value
    for this Hamiltonian convention is 1.
    """
    from .propagator import evolve_ramp
    from .qubit import QubitSpectrum

    spectrum = QubitSpectrum.two_level(slope, gap)
    cs = []
    for k in rates:
        result = evolve_ramp(spectrum, -reach, reach, k, config=config)
        p = result.final_state[0, 0].real
        cs.append(-math.log(p) * k * slope / (math.pi * gap * gap))
    return float(np.mean(cs))
