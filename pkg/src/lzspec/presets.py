"""Named experiment presets.

Spectrum constants follow the reference two- and three-level parameter
sets (slope 2 GHz/mPhi0, initial detuning -5 mPhi0, gaps as listed); the
grid resolutions are declared defaults of this package.  The three-level
presets share one grid wide enough to cover both anticrossings and both
characteristic sweep rates.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError
from .propagator import StepperConfig
from .qubit import QubitSpectrum
from .sweep import GridSpec

__all__ = ["Preset", "PRESETS", "get_preset"]


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    spectrum: QubitSpectrum
    grid: GridSpec
    stepper: StepperConfig


_STEPPER = StepperConfig()

# Two-level interference map: slope 2, gap 2, phi_i = -5,
# tau 0.01..4 ns, phi_f -2..10 mPhi0.
_FIG1B_GRID = GridSpec((-2.0, 10.0, 240), (0.01, 4.0, 400), -5.0)

# Three-level maps reach past the second anticrossing at 8 mPhi0.
_THREE_LEVEL_GRID = GridSpec((-2.0, 16.0, 200), (0.01, 4.0, 320), -5.0)

PRESETS: dict[str, Preset] = {
    "fig1b": Preset(
        "fig1b",
        "two-level map, slope 2, gap 2",
        QubitSpectrum.two_level(2.0, 2.0),
        _FIG1B_GRID,
        _STEPPER,
    ),
    "fig4a": Preset(
        "fig4a",
        "three-level map, gap ratio 10 (gap12=1, gap13=10)",
        QubitSpectrum.three_level(2.0, 1.0, 10.0),
        _THREE_LEVEL_GRID,
        _STEPPER,
    ),
    "fig4b": Preset(
        "fig4b",
        "three-level map, gap ratio 4 (gap12=2, gap13=8)",
        QubitSpectrum.three_level(2.0, 2.0, 8.0),
        _THREE_LEVEL_GRID,
        _STEPPER,
    ),
    "fig4c": Preset(
        "fig4c",
        "three-level map, gap ratio 1:4 (gap12=8, gap13=2)",
        QubitSpectrum.three_level(2.0, 8.0, 2.0),
        _THREE_LEVEL_GRID,
        _STEPPER,
    ),
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(PRESETS))
        raise ValidationError(f"unknown preset {name!r}; expected one of: {known}")
