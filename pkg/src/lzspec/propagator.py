"""Density-matrix propagation over one triangle pulse.

The Liouville equation d(rho)/dt = -i[H(t), rho] is integrated with the
decay tensor set to zero: the pulse is much shorter than the relaxation
times, so the evolution is unitary and trace, Hermiticity, positivity and
purity of the state are all preserved up to integration error.  This
makes the density-matrix invariants strong integrator-quality checks.

Every pulse integration is split at the apex t = tau/2 where the sweep
slope changes sign; stepping across that kink would silently corrupt the
embedded error estimates of the adaptive scheme.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import IntegrationError, ValidationError
from .qubit import QubitSpectrum, TrianglePulse

__all__ = [
    "StepperConfig",
    "EvolutionResult",
    "initial_state",
    "liouville_rhs",
    "validate_density_matrix",
    "evolve",
    "evolve_constant",
    "evolve_ramp",
]

TRACE_TOL = 1e-8
HERMITICITY_TOL = 1e-8
POSITIVITY_TOL = 1e-8

# Trajectory capacity per integration; ~26 MB of complex128 for a 2x2 state.
_MAX_RECORDED_STEPS = 400_000

ADAPTIVE = "adaptive-rk"
FIXED_RK4 = "fixed-rk4"


@dataclass(frozen=True)
class StepperConfig:
    """Integrator selection and tolerances.

    method : "adaptive-rk" (embedded Dormand-Prince 5(4)) or "fixed-rk4".
    rel_tol, abs_tol : per-step error tolerances of the adaptive scheme.
    max_step, initial_step : step bounds in ns.
    fixed_step : nominal step of the fixed-RK4 scheme in ns.

    The defaults resolve the fastest level splitting in scope by orders of
    magnitude; adaptivity pays because a full interference map needs on
    the order of 1e5 pulse integrations.
    """

    method: str = ADAPTIVE
    rel_tol: float = 1e-9
    abs_tol: float = 1e-11
    max_step: float = 0.1
    initial_step: float = 1e-3
    fixed_step: float = 1e-4

    def __post_init__(self):
        if self.method not in (ADAPTIVE, FIXED_RK4):
            raise ValidationError(
                f"unknown method {self.method!r}; "
                f"expected {ADAPTIVE!r} or {FIXED_RK4!r}"
            )
        for name in ("rel_tol", "abs_tol", "max_step", "initial_step", "fixed_step"):
            value = getattr(self, name)
            if not (value > 0.0 and np.isfinite(value)):
                raise ValidationError(f"{name} must be positive, got {value}")


@dataclass(frozen=True)
class EvolutionResult:
    """Final state plus diagnostics of one integration.

    trajectory is None unless recording was requested; otherwise it is a
    (times, states) pair sampled at every accepted integrator step,
    including the initial condition at t = 0.
    """

    final_state: np.ndarray
    trajectory: tuple[np.ndarray, np.ndarray] | None
    step_count: int
    rhs_eval_count: int
    max_trace_deviation: float


def initial_state(dim: int) -> np.ndarray:
    """Pure state on |L0>: diag(1, 0[, 0])."""
    if dim not in (2, 3):
        raise ValidationError(f"dim must be 2 or 3, got {dim}")
    rho = np.zeros((dim, dim), np.complex128)
    rho[0, 0] = 1.0
    return rho


def liouville_rhs(hamiltonian: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """-i [H, rho]; traceless and Hermitian for Hermitian inputs."""
    h = np.asarray(hamiltonian)
    r = np.asarray(rho, dtype=np.complex128)
    if h.shape != r.shape or h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValidationError(
            f"shape mismatch: H {h.shape} vs rho {r.shape}"
        )
    return -1j * (h @ r - r @ h)


def validate_density_matrix(
    rho: np.ndarray,
    trace_tol: float = TRACE_TOL,
    hermiticity_tol: float = HERMITICITY_TOL,
    positivity_tol: float = POSITIVITY_TOL,
):
    """Raise ValidationError unless rho is a physical state within tolerance."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] not in (2, 3):
        raise ValidationError(f"expected a 2x2 or 3x3 matrix, got shape {rho.shape}")
    herm = np.abs(rho - rho.conj().T).max()
    if herm > hermiticity_tol:
        raise ValidationError(f"state is not Hermitian: max |rho - rho^+| = {herm:g}")
    tr_dev = abs(rho.trace() - 1.0)
    if tr_dev > trace_tol:
        raise ValidationError(f"state trace deviates from 1 by {tr_dev:g}")
    min_eig = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
    if min_eig < -positivity_tol:
        raise ValidationError(f"state is not PSD: min eigenvalue {min_eig:g}")


def _run_legs(a, b, legs, config, rho0, record):
    """Integrate consecutive linear legs [(c0, c1, t0, t1), ...] in place."""
    y = np.array(rho0, dtype=np.complex128, order="C", copy=True)
    stats = np.zeros(K.STATS_LEN)
    if record:
        dim = y.shape[0]
        rec_t = np.empty(_MAX_RECORDED_STEPS)
        rec_y = np.empty((_MAX_RECORDED_STEPS, dim, dim), np.complex128)
    else:
        rec_t = np.empty(0)
        rec_y = np.empty((0, y.shape[0], y.shape[1]), np.complex128)

    for c0, c1, t0, t1 in legs:
        if config.method == ADAPTIVE:
            status, t_reached = K._dp45_segment(
                a, b, c0, c1, t0, t1, y,
                config.rel_tol, config.abs_tol, config.max_step,
                config.initial_step, rec_t, rec_y, stats,
            )
        else:
            status, t_reached = K._rk4_segment(
                a, b, c0, c1, t0, t1, config.fixed_step, y, rec_t, rec_y, stats,
            )
        if status == 1:
            raise IntegrationError(
                f"step size underflow at t = {t_reached:.6g} ns",
                t_reached=t_reached,
            )
        if status == 2:
            raise IntegrationError(
                f"trajectory buffer exhausted at t = {t_reached:.6g} ns "
                "(loosen tolerances or disable recording)",
                t_reached=t_reached,
            )

    trajectory = None
    if record:
        n = int(stats[K.N_RECORDED])
        times = np.empty(n + 1)
        states = np.empty((n + 1,) + y.shape, np.complex128)
        times[0] = legs[0][2]
        states[0] = np.asarray(rho0, dtype=np.complex128)
        times[1:] = rec_t[:n]
        states[1:] = rec_y[:n]
        trajectory = (times, states)

    return EvolutionResult(
        final_state=y,
        trajectory=trajectory,
        step_count=int(stats[K.N_ACCEPTED]),
        rhs_eval_count=int(stats[K.N_RHS]),
        max_trace_deviation=float(stats[K.MAX_TRACE_DEV]),
    )


def evolve(
    spectrum: QubitSpectrum,
    pulse: TrianglePulse,
    config: StepperConfig | None = None,
    rho0: np.ndarray | None = None,
    record_trajectory: bool = False,
    validate_final: bool = True,
) -> EvolutionResult:
    """Propagate rho through one triangle pulse from t = 0 to t = tau."""
    config = config or StepperConfig()
    if rho0 is None:
        rho0 = initial_state(spectrum.dim)
    else:
        rho0 = np.asarray(rho0, dtype=np.complex128)
        if rho0.shape != (spectrum.dim, spectrum.dim):
            raise ValidationError(
                f"rho0 shape {rho0.shape} does not match spectrum dim {spectrum.dim}"
            )
    a = spectrum.slope_vector()
    b = spectrum.offset_matrix()
    k = pulse.sweep_rate
    legs = [
        (pulse.phi_i, k, 0.0, 0.5 * pulse.tau),
        (pulse.phi_i + k * pulse.tau, -k, 0.5 * pulse.tau, pulse.tau),
    ]
    result = _run_legs(a, b, legs, config, rho0, record_trajectory)
    if validate_final:
        validate_density_matrix(result.final_state)
    return result


def evolve_constant(
    hamiltonian: np.ndarray,
    duration: float,
    config: StepperConfig | None = None,
    rho0: np.ndarray | None = None,
    record_trajectory: bool = False,
) -> EvolutionResult:
    """Propagate under a constant Hamiltonian for `duration` ns."""
    config = config or StepperConfig()
    b = np.ascontiguousarray(hamiltonian, dtype=np.float64)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ValidationError(f"hamiltonian must be square, got shape {b.shape}")
    if duration <= 0.0:
        raise ValidationError(f"duration must be positive, got {duration}")
    if rho0 is None:
        rho0 = initial_state(b.shape[0])
    a = np.zeros(b.shape[0])
    legs = [(0.0, 0.0, 0.0, float(duration))]
    return _run_legs(a, b, legs, config, rho0, record_trajectory)


def evolve_ramp(
    spectrum: QubitSpectrum,
    dphi_start: float,
    dphi_stop: float,
    rate: float,
    config: StepperConfig | None = None,
    rho0: np.ndarray | None = None,
) -> EvolutionResult:
    """Single linear detuning ramp at `rate` mPhi0/ns (no apex)."""
    config = config or StepperConfig()
    if rate <= 0.0:
        raise ValidationError(f"rate must be positive, got {rate}")
    if dphi_stop <= dphi_start:
        raise ValidationError("dphi_stop must exceed dphi_start")
    if rho0 is None:
        rho0 = initial_state(spectrum.dim)
    a = spectrum.slope_vector()
    b = spectrum.offset_matrix()
    duration = (dphi_stop - dphi_start) / rate
    legs = [(float(dphi_start), float(rate), 0.0, duration)]
    return _run_legs(a, b, legs, config, rho0, False)
