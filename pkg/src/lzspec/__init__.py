"""Triangle-pulse Landau-Zener-Stueckelberg interferometry toolkit.

Forward problem: propagate a flux-qubit density matrix through a single
triangle flux pulse and collect interference maps of the final
initial-state population over the pulse parameters.  Inverse problem:
extract the energy spectrum (branch slope, tunneling gaps, anticrossing
locations) from those maps.

Unit convention: energies and gaps are angular frequencies in rad/ns but
are labelled "GHz" throughout, matching the convention in which a slope
of 2 "GHz"/mPhi0 produces a ~0.64 ns fringe period at phi_f = 8 mPhi0.
"""

from .analytic import (
    PhaseResult,
    characteristic_sweep_rate,
    lz_probability,
    phase_by_quadrature,
    phase_extreme_amplitude,
    phase_large_amplitude,
    population_from_phase,
    stueckelberg_phase,
)
from .analysis import (
    ColumnSpectrum,
    GapFit,
    SpectroscopyFit,
    analyze_map,
    classify_regions,
    column_fft,
    fft_linearity,
    fit_gap,
    fit_slope,
    locate_anticrossings,
)
from .errors import (
    AnticrossingNotCrossedError,
    FitError,
    IntegrationError,
    LzspecError,
    RegimeError,
    SchemaError,
    ValidationError,
)
from .presets import PRESETS, get_preset
from .propagator import (
    EvolutionResult,
    StepperConfig,
    evolve,
    evolve_constant,
    evolve_ramp,
    initial_state,
    liouville_rhs,
    validate_density_matrix,
)
from .qubit import Anticrossing, QubitSpectrum, TrianglePulse
from .sweep import (
    GridSpec,
    InterferenceMap,
    extract_column,
    read_csv,
    run_sweep,
    write_csv,
    write_pgm,
)

__version__ = "0.1.0"
