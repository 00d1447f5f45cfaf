"""Flux-qubit spectrum model and triangle drive signal.

Units
-----
Flux detunings are measured in milli-flux-quanta (mPhi0), times in ns.
All energies and tunneling gaps are *angular* frequencies in rad/ns.
Following the common convention for this kind of experiment they are
nevertheless labelled "GHz" throughout the docs: a slope of 2 "GHz"/mPhi0
means the diabatic branch energy changes by 2 rad/ns per mPhi0.

The diabatic basis is (|L0>, |R0>[, |R1>]).  The left-well ground state
|L0> has energy -l*dphi; each right-well branch j with slope l_j and
anticrossing location x_j has energy l_j*(dphi - x_j) - l*x_j, which by
construction crosses the |L0> branch exactly at dphi = x_j.  Off-diagonal
couplings (the tunneling gaps) connect |L0> to each right-well state; the
right-well states are mutually uncoupled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AnticrossingNotCrossedError, ValidationError

__all__ = [
    "TrianglePulse",
    "Anticrossing",
    "QubitSpectrum",
]


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class TrianglePulse:
    """Single triangle flux pulse.

    Parameters
    ----------
    phi_i : float
        Initial flux detuning (mPhi0).  The pulse starts and ends here.
    phi_f : float
        Detuning reached at the apex t = tau/2 (mPhi0).
    tau : float
        Total pulse width (ns).
    """

    phi_i: float
    phi_f: float
    tau: float

    def __post_init__(self):
        _require_finite("phi_i", self.phi_i)
        _require_finite("phi_f", self.phi_f)
        _require_finite("tau", self.tau)
        if self.tau <= 0.0:
            raise ValidationError(f"tau must be positive, got {self.tau}")
        if self.phi_f == self.phi_i:
            raise ValidationError(
                "degenerate pulse: phi_f must differ from phi_i "
                f"(both {self.phi_i})"
            )

    @property
    def sweep_rate(self) -> float:
        """Sweep rate k = 2*(phi_f - phi_i)/tau in mPhi0/ns."""
        return 2.0 * (self.phi_f - self.phi_i) / self.tau

    def signal_at(self, t: float) -> float:
        """Triangle offset at time t: k*t rising, k*(tau - t) falling.

        The falling leg is written with the sign that keeps the signal
        continuous at the apex (offset phi_f - phi_i) and zero at t = tau.
        """
        t = float(t)
        if t < 0.0 or t > self.tau:
            raise ValidationError(
                f"t = {t} outside the pulse window [0, {self.tau}]"
            )
        k = self.sweep_rate
        if t <= 0.5 * self.tau:
            return k * t
        return k * (self.tau - t)

    def detuning_at(self, t: float) -> float:
        """Flux detuning phi_i + Trgl(t) at time t (mPhi0)."""
        return self.phi_i + self.signal_at(t)

    def effective_width(self) -> float:
        """Interval tau* between the two passages of a crossing at dphi = 0.

        tau* = phi_f * tau / (phi_f - phi_i).  Requires phi_i < 0 < phi_f,
        i.e. the pulse actually sweeps through the anticrossing twice.
        """
        if self.phi_f <= 0.0 or self.phi_i >= 0.0:
            raise AnticrossingNotCrossedError(
                "effective width needs phi_i < 0 < phi_f (anticrossing at "
                f"dphi = 0 is not crossed for phi_i={self.phi_i}, "
                f"phi_f={self.phi_f})"
            )
        return self.phi_f * self.tau / (self.phi_f - self.phi_i)

    def crossing_times(self, location: float = 0.0) -> tuple[float, float]:
        """Times at which the detuning passes through `location` (ns)."""
        if not (min(self.phi_i, self.phi_f) < location < max(self.phi_i, self.phi_f)):
            raise AnticrossingNotCrossedError(
                f"detuning never reaches {location} mPhi0 "
                f"(sweep covers [{self.phi_i}, {self.phi_f}])"
            )
        t1 = (location - self.phi_i) / self.sweep_rate
        return t1, self.tau - t1


@dataclass(frozen=True)
class Anticrossing:
    """Avoided crossing between |L0> and one right-well branch.

    gap is the tunneling frequency (rad/ns); the adiabatic levels are
    separated by 2*gap at the crossing.  branch_slope is the slope of the
    right-well branch through this crossing.
    """

    location: float
    gap: float
    branch_slope: float

    def __post_init__(self):
        _require_finite("location", self.location)
        _require_finite("gap", self.gap)
        _require_finite("branch_slope", self.branch_slope)
        if self.gap < 0.0:
            raise ValidationError(f"gap must be >= 0, got {self.gap}")


@dataclass(frozen=True)
class QubitSpectrum:
    """Diabatic branch spectrum: one left branch plus 1 or 2 right branches.

    left_slope is the magnitude l of the |L0> branch slope; the branch
    energy is -l*dphi.  One anticrossing gives the two-level system, two
    give the three-level system.
    """

    left_slope: float
    anticrossings: tuple[Anticrossing, ...] = field(default_factory=tuple)

    def __post_init__(self):
        _require_finite("left_slope", self.left_slope)
        if self.left_slope <= 0.0:
            raise ValidationError(
                f"left_slope must be positive, got {self.left_slope}"
            )
        acs = tuple(self.anticrossings)
        object.__setattr__(self, "anticrossings", acs)
        if len(acs) not in (1, 2):
            raise ValidationError(
                f"expected 1 or 2 anticrossings, got {len(acs)}"
            )
        locs = [a.location for a in acs]
        if any(b <= a for a, b in zip(locs, locs[1:])):
            raise ValidationError(
                f"anticrossing locations must be strictly increasing: {locs}"
            )

    @classmethod
    def two_level(cls, slope: float, gap: float, location: float = 0.0):
        """|L0>/|R0> system with a single gap at `location`."""
        return cls(slope, (Anticrossing(location, gap, slope),))

    @classmethod
    def three_level(
        cls,
        slope: float,
        gap12: float,
        gap13: float,
        location12: float = 0.0,
        location13: float = 8.0,
        right_slopes: tuple[float, float] | None = None,
    ):
        """|L0>/|R0>/|R1> system with gaps at `location12` and `location13`.

        The right-branch slopes default to the left slope (symmetric wells).
        """
        s1, s2 = right_slopes if right_slopes is not None else (slope, slope)
        return cls(
            slope,
            (
                Anticrossing(location12, gap12, s1),
                Anticrossing(location13, gap13, s2),
            ),
        )

    @property
    def dim(self) -> int:
        return 1 + len(self.anticrossings)

    def slope_vector(self) -> np.ndarray:
        """Diagonal slopes a_j such that H_jj = a_j*dphi + offset_j."""
        a = np.empty(self.dim)
        a[0] = -self.left_slope
        for j, ac in enumerate(self.anticrossings, start=1):
            a[j] = ac.branch_slope
        return a

    def offset_matrix(self) -> np.ndarray:
        """Detuning-independent part of the Hamiltonian (real symmetric)."""
        b = np.zeros((self.dim, self.dim))
        for j, ac in enumerate(self.anticrossings, start=1):
            b[j, j] = -(ac.branch_slope + self.left_slope) * ac.location
            b[0, j] = b[j, 0] = ac.gap
        return b

    def diagonal(self, dphi: float) -> np.ndarray:
        """Diabatic branch energies (omega_1, omega_2[, omega_3]) at dphi."""
        return self.slope_vector() * float(dphi) + np.diag(self.offset_matrix())

    def hamiltonian(self, dphi: float) -> np.ndarray:
        """Instantaneous Hamiltonian matrix at flux detuning dphi (rad/ns).

        Real symmetric: diag(-l*dphi, omega_2[, omega_3]) with the gaps on
        the first row/column and zero coupling between right-well states.
        """
        h = self.offset_matrix()
        h[np.diag_indices(self.dim)] += self.slope_vector() * float(dphi)
        return h

    def adiabatic_levels(self, dphi: float) -> np.ndarray:
        """Instantaneous eigenvalues at dphi, ascending (rad/ns)."""
        return np.linalg.eigvalsh(self.hamiltonian(dphi))

    def to_dict(self) -> dict:
        return {
            "left_slope": self.left_slope,
            "anticrossings": [
                {
                    "location": ac.location,
                    "gap": ac.gap,
                    "branch_slope": ac.branch_slope,
                }
                for ac in self.anticrossings
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "QubitSpectrum":
        try:
            acs = tuple(
                Anticrossing(d["location"], d["gap"], d["branch_slope"])
                for d in data["anticrossings"]
            )
            return cls(data["left_slope"], acs)
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"bad spectrum description: {exc}") from exc
