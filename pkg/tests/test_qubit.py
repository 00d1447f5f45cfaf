import numpy as np
import pytest

from lzspec.errors import AnticrossingNotCrossedError, ValidationError
from lzspec.qubit import Anticrossing, QubitSpectrum, TrianglePulse


@pytest.fixture
def pulse():
    return TrianglePulse(-5.0, 8.0, 2.0)


class TestTrianglePulse:
    def test_signal_endpoints_and_apex(self, pulse):
        assert pulse.signal_at(0.0) == 0.0
        assert pulse.signal_at(2.0) == 0.0
        # apex offset is phi_f - phi_i = k*tau/2
        assert pulse.signal_at(1.0) == pytest.approx(13.0)

    def test_sweep_rate(self):
        assert TrianglePulse(-5, 8, 2).sweep_rate == pytest.approx(13.0)
        assert TrianglePulse(0, 1, 2).sweep_rate == pytest.approx(1.0)
        assert TrianglePulse(-5, 8, 4).sweep_rate == pytest.approx(6.5)

    def test_signal_continuous_at_apex(self, pulse):
        eps = 1e-9
        lo = pulse.signal_at(1.0 - eps)
        hi = pulse.signal_at(1.0 + eps)
        assert lo == pytest.approx(13.0, abs=1e-6)
        assert hi == pytest.approx(13.0, abs=1e-6)
        assert abs(lo - hi) < 1e-6

    def test_signal_symmetric(self, pulse):
        for t in (0.1, 0.5, 0.9):
            assert pulse.signal_at(t) == pytest.approx(pulse.signal_at(2.0 - t))

    def test_detuning(self, pulse):
        assert pulse.detuning_at(0.0) == pytest.approx(-5.0)
        assert pulse.detuning_at(1.0) == pytest.approx(8.0)
        assert pulse.detuning_at(0.5) == pytest.approx(1.5)
        assert pulse.detuning_at(2.0) == pytest.approx(-5.0)

    def test_time_domain_errors(self, pulse):
        with pytest.raises(ValidationError):
            pulse.signal_at(-0.1)
        with pytest.raises(ValidationError):
            pulse.signal_at(2.1)
        with pytest.raises(ValidationError):
            pulse.detuning_at(2.0000001)

    def test_effective_width(self):
        assert TrianglePulse(-5, 8, 2).effective_width() == pytest.approx(16.0 / 13.0)
        # shrinking the overshoot shrinks the width toward zero
        assert TrianglePulse(-5, 1e-6, 2).effective_width() == pytest.approx(0.0, abs=1e-6)
        # symmetric sweep spends half the pulse past the crossing
        assert TrianglePulse(-3, 3, 2).effective_width() == pytest.approx(1.0)

    def test_effective_width_requires_crossing(self):
        with pytest.raises(AnticrossingNotCrossedError):
            TrianglePulse(-5, -1, 2).effective_width()
        with pytest.raises(AnticrossingNotCrossedError):
            TrianglePulse(1, 8, 2).effective_width()

    def test_crossing_times(self, pulse):
        t1, t2 = pulse.crossing_times(0.0)
        assert pulse.detuning_at(t1) == pytest.approx(0.0, abs=1e-12)
        assert pulse.detuning_at(t2) == pytest.approx(0.0, abs=1e-12)
        assert t2 - t1 == pytest.approx(pulse.effective_width())

    def test_validation(self):
        with pytest.raises(ValidationError):
            TrianglePulse(-5, 8, 0.0)
        with pytest.raises(ValidationError):
            TrianglePulse(-5, 8, -1.0)
        with pytest.raises(ValidationError):
            TrianglePulse(3.0, 3.0, 1.0)
        with pytest.raises(ValidationError):
            TrianglePulse(float("nan"), 8, 1.0)


class TestHamiltonian:
    def test_two_level_at_crossing(self):
        spec = QubitSpectrum.two_level(2.0, 2.0)
        np.testing.assert_allclose(spec.hamiltonian(0.0), [[0, 2], [2, 0]])

    def test_two_level_detuned(self):
        spec = QubitSpectrum.two_level(2.0, 2.0)
        np.testing.assert_allclose(spec.hamiltonian(3.0), [[-6, 2], [2, 6]])

    def test_three_level_structure(self):
        spec = QubitSpectrum.three_level(2.0, 2.0, 8.0)
        h = spec.hamiltonian(8.0)
        # both anticrossing branches meet the left branch at their locations
        np.testing.assert_allclose(np.diag(h), [-16.0, 16.0, -16.0])
        assert h[0, 1] == h[1, 0] == 2.0
        assert h[0, 2] == h[2, 0] == 8.0
        assert h[1, 2] == h[2, 1] == 0.0

    def test_branches_cross_left_branch_at_locations(self):
        spec = QubitSpectrum.three_level(1.7, 1.0, 3.0, location13=6.5)
        for ac in spec.anticrossings:
            diag = spec.diagonal(ac.location)
            left = diag[0]
            assert np.any(np.isclose(diag[1:], left))

    def test_hermitian_always(self, rng):
        for _ in range(50):
            slope = rng.uniform(0.5, 4)
            spec = QubitSpectrum.three_level(
                slope, rng.uniform(0, 4), rng.uniform(0, 10),
                location13=rng.uniform(2, 12),
            )
            h = spec.hamiltonian(rng.uniform(-20, 20))
            np.testing.assert_array_equal(h, h.T)

    def test_adiabatic_levels_two_level(self):
        spec = QubitSpectrum.two_level(2.0, 2.0)
        np.testing.assert_allclose(spec.adiabatic_levels(0.0), [-2.0, 2.0])
        # 3-4-5: detuning energy 3, gap 4 => levels -/+ 5
        spec345 = QubitSpectrum.two_level(2.0, 4.0)
        np.testing.assert_allclose(spec345.adiabatic_levels(1.5), [-5.0, 5.0])

    def test_splitting_identity(self, rng):
        # nu1 - nu0 = 2*sqrt((l*dphi)^2 + gap^2) across random parameters
        for _ in range(1000):
            slope = rng.uniform(0.1, 5)
            gap = rng.uniform(0, 6)
            dphi = rng.uniform(-20, 20)
            spec = QubitSpectrum.two_level(slope, gap)
            lo, hi = spec.adiabatic_levels(dphi)
            expected = 2.0 * np.hypot(slope * dphi, gap)
            assert hi - lo == pytest.approx(expected, rel=1e-12, abs=1e-12)

    def test_zero_gap_levels_are_diagonal(self):
        spec = QubitSpectrum.three_level(2.0, 0.0, 0.0)
        for dphi in (-3.0, 0.0, 5.0, 11.0):
            levels = spec.adiabatic_levels(dphi)
            np.testing.assert_allclose(levels, np.sort(spec.diagonal(dphi)),
                                       atol=1e-12)

    def test_far_detuned_levels_near_diagonal(self):
        spec = QubitSpectrum.three_level(2.0, 2.0, 8.0)
        dphi = 30.0
        diag = np.sort(spec.diagonal(dphi))
        levels = spec.adiabatic_levels(dphi)
        # second-order level repulsion sets the expected displacement scale
        gaps = np.array([2.0, 8.0])
        spacing = np.diff(diag).min()
        bound = 2.0 * np.sum(gaps**2) / spacing
        np.testing.assert_allclose(levels, diag, atol=bound)


class TestSpectrumValidation:
    def test_slope_positive(self):
        with pytest.raises(ValidationError):
            QubitSpectrum.two_level(0.0, 2.0)
        with pytest.raises(ValidationError):
            QubitSpectrum.two_level(-1.0, 2.0)

    def test_gap_nonnegative(self):
        with pytest.raises(ValidationError):
            Anticrossing(0.0, -0.5, 2.0)

    def test_location_ordering(self):
        with pytest.raises(ValidationError):
            QubitSpectrum(2.0, (Anticrossing(3.0, 1.0, 2.0),
                                Anticrossing(1.0, 1.0, 2.0)))
        with pytest.raises(ValidationError):
            QubitSpectrum(2.0, (Anticrossing(3.0, 1.0, 2.0),
                                Anticrossing(3.0, 1.0, 2.0)))

    def test_anticrossing_count(self):
        with pytest.raises(ValidationError):
            QubitSpectrum(2.0, ())
        acs = tuple(Anticrossing(float(x), 1.0, 2.0) for x in range(3))
        with pytest.raises(ValidationError):
            QubitSpectrum(2.0, acs)

    def test_dict_round_trip(self):
        spec = QubitSpectrum.three_level(2.0, 1.0, 10.0)
        clone = QubitSpectrum.from_dict(spec.to_dict())
        assert clone == spec
