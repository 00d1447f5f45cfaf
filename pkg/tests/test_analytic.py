import math

import numpy as np
import pytest

from lzspec.analytic import (
    EXTREME_AMPLITUDE_RATIO,
    LARGE_AMPLITUDE_RATIO,
    calibrate_lz_prefactor,
    characteristic_sweep_rate,
    lz_probability,
    phase_by_quadrature,
    phase_extreme_amplitude,
    phase_large_amplitude,
    population_from_phase,
    stueckelberg_phase,
)
from lzspec.errors import AnticrossingNotCrossedError, ValidationError
from lzspec.qubit import TrianglePulse

# Oracle values: adaptive quadrature of the level-splitting integral
# (confirmed to 30 digits with mpmath) for slope 2, gap 2, phi_i = -5.
PHASE_PF1_TAU385 = 2.9460035083872208
PHASE_PF2_TAU385 = 6.5073485731962289


class TestStueckelbergPhase:
    def test_frozen_oracle_values(self):
        p1 = TrianglePulse(-5.0, 1.0, 3.85)
        p2 = TrianglePulse(-5.0, 2.0, 3.85)
        assert stueckelberg_phase(2.0, 2.0, p1).phi == pytest.approx(
            PHASE_PF1_TAU385, rel=1e-12)
        assert stueckelberg_phase(2.0, 2.0, p2).phi == pytest.approx(
            PHASE_PF2_TAU385, rel=1e-12)

    def test_matches_quadrature(self):
        pulse = TrianglePulse(-5.0, 8.0, 1.3)
        closed = stueckelberg_phase(2.0, 2.0, pulse).phi
        numeric = phase_by_quadrature(2.0, 2.0, pulse)
        assert closed == pytest.approx(numeric, rel=1e-12)

    def test_matches_quadrature_random(self, rng):
        worst = 0.0
        for _ in range(200):
            slope = rng.uniform(0.5, 4.0)
            gap = rng.uniform(0.05, 6.0)
            pulse = TrianglePulse(
                rng.uniform(-10.0, -0.5), rng.uniform(0.5, 10.0),
                rng.uniform(0.05, 5.0),
            )
            closed = stueckelberg_phase(slope, gap, pulse).phi
            numeric = phase_by_quadrature(slope, gap, pulse)
            worst = max(worst, abs(closed - numeric) / numeric)
        assert worst <= 1e-10

    def test_zero_gap_limit(self):
        pulse = TrianglePulse(-5.0, 8.0, 1.7)
        res = stueckelberg_phase(2.0, 0.0, pulse)
        assert res.phi == pytest.approx(phase_large_amplitude(2.0, pulse), rel=1e-14)
        # and approached continuously from gap > 0
        res_small = stueckelberg_phase(2.0, 1e-8, pulse)
        assert res_small.phi == pytest.approx(res.phi, rel=1e-12)

    def test_positive_phase(self, rng):
        for _ in range(100):
            pulse = TrianglePulse(rng.uniform(-10, -0.1), rng.uniform(0.1, 10),
                                  rng.uniform(0.05, 5))
            assert stueckelberg_phase(2.0, 2.0, pulse).phi > 0.0

    def test_requires_crossing(self):
        with pytest.raises(AnticrossingNotCrossedError):
            stueckelberg_phase(2.0, 2.0, TrianglePulse(-5.0, -0.5, 1.0))
        with pytest.raises(AnticrossingNotCrossedError):
            stueckelberg_phase(2.0, 2.0, TrianglePulse(0.5, 8.0, 1.0))

    def test_regime_flags(self):
        # l*phi_f/gap = 8 at phi_f = 8: large amplitude but not extreme
        res = stueckelberg_phase(2.0, 2.0, TrianglePulse(-5.0, 8.0, 1.0))
        assert res.large_amplitude and not res.extreme_amplitude
        res = stueckelberg_phase(2.0, 2.0, TrianglePulse(-5.0, 3.0, 1.0))
        assert not res.large_amplitude
        res = stueckelberg_phase(2.0, 2.0, TrianglePulse(-5.0, 50.0, 1.0))
        assert res.large_amplitude and res.extreme_amplitude
        assert 50.0 >= EXTREME_AMPLITUDE_RATIO * 5.0

    def test_bad_parameters(self):
        pulse = TrianglePulse(-5.0, 8.0, 1.0)
        with pytest.raises(ValidationError):
            stueckelberg_phase(-1.0, 2.0, pulse)
        with pytest.raises(ValidationError):
            stueckelberg_phase(2.0, -0.1, pulse)


class TestLimits:
    def test_large_amplitude_value(self):
        pulse = TrianglePulse(-5.0, 8.0, 0.638)
        phi = phase_large_amplitude(2.0, pulse)
        # 2*64*0.638/13: one full fringe period at this width
        assert phi == pytest.approx(2.0 * 64.0 * 0.638 / 13.0, rel=1e-14)
        assert phi == pytest.approx(2.0 * math.pi, rel=1e-3)

    def test_large_amplitude_linear_in_tau(self):
        p1 = TrianglePulse(-5.0, 8.0, 1.0)
        p2 = TrianglePulse(-5.0, 8.0, 2.0)
        assert phase_large_amplitude(2.0, p2) == pytest.approx(
            2.0 * phase_large_amplitude(2.0, p1))

    def test_large_amplitude_accuracy_vs_closed_form(self):
        pulse = TrianglePulse(-5.0, 8.0, 1.0)
        exact = stueckelberg_phase(2.0, 2.0, pulse).phi
        approx = phase_large_amplitude(2.0, pulse)
        assert abs(exact - approx) / exact < 0.12

    def test_extreme_amplitude(self):
        pulse = TrianglePulse(-5.0, 50.0, 1.0)
        assert phase_extreme_amplitude(2.0, pulse) == pytest.approx(100.0)
        # implied fringe period 2*pi/(l*phi_f)
        period = 2.0 * math.pi / (2.0 * 50.0)
        assert phase_extreme_amplitude(2.0, TrianglePulse(-5, 50, period)) \
            == pytest.approx(2.0 * math.pi)
        ratio = phase_large_amplitude(2.0, pulse) / phase_extreme_amplitude(2.0, pulse)
        assert ratio == pytest.approx(50.0 / 55.0)

    def test_limit_ordering(self):
        # relative gap between closed form and large-amplitude limit shrinks
        # monotonically once l*phi_f/gap exceeds 3
        rel_errors = []
        for pf in np.linspace(3.5, 50.0, 24):
            pulse = TrianglePulse(-5.0, float(pf), 1.0)
            exact = stueckelberg_phase(2.0, 2.0, pulse).phi
            rel_errors.append(abs(exact - phase_large_amplitude(2.0, pulse)) / exact)
        assert all(b < a for a, b in zip(rel_errors, rel_errors[1:]))


class TestPopulation:
    def test_examples(self):
        assert population_from_phase(0.0) == pytest.approx(1.0)
        assert population_from_phase(math.pi) == pytest.approx(0.0, abs=1e-15)
        assert population_from_phase(PHASE_PF1_TAU385) == pytest.approx(
            0.009535, abs=1e-5)

    def test_bounds_symmetry_periodicity(self, rng):
        phi = rng.uniform(-50, 50, size=500)
        pop = population_from_phase(phi)
        assert np.all((pop >= 0.0) & (pop <= 1.0))
        np.testing.assert_allclose(pop, population_from_phase(-phi), atol=1e-14)
        np.testing.assert_allclose(
            pop, population_from_phase(phi + 2 * math.pi), atol=1e-12)

    def test_fringe_prediction(self):
        # with a tiny gap, population minima in tau are equally spaced with
        # the large-amplitude period
        slope, gap, pf = 2.0, 0.2, 8.0
        taus = np.arange(0.01, 4.0, 0.002)
        phis = np.array([
            stueckelberg_phase(slope, gap, TrianglePulse(-5.0, pf, t)).phi
            for t in taus
        ])
        pops = population_from_phase(phis)
        interior = (pops[1:-1] <= pops[:-2]) & (pops[1:-1] <= pops[2:])
        minima = taus[1:-1][interior]
        spacings = np.diff(minima)
        expected = 2.0 * math.pi * 13.0 / (slope * pf * pf)
        step = taus[1] - taus[0]
        assert np.all(np.abs(spacings - expected) <= 1.5 * step)
        assert abs(spacings.mean() - expected) <= 0.5 * step


class TestLandauZener:
    def test_probability_examples(self):
        assert lz_probability(0.0, 2.0, 5.0) == pytest.approx(1.0)
        k_char = characteristic_sweep_rate(2.0, 2.0)
        assert lz_probability(2.0, 2.0, k_char) == pytest.approx(math.exp(-1.0))
        assert lz_probability(2.0, 2.0, 1e-6) < 1e-300 or \
            lz_probability(2.0, 2.0, 1e-6) == 0.0

    def test_probability_monotone_in_rate(self):
        probs = [lz_probability(2.0, 2.0, k) for k in (1.0, 5.0, 25.0, 125.0)]
        assert all(b > a for a, b in zip(probs, probs[1:]))

    def test_characteristic_rates(self):
        assert characteristic_sweep_rate(2.0, 2.0) == pytest.approx(4.0 * math.pi)
        assert characteristic_sweep_rate(8.0, 2.0) == pytest.approx(64.0 * math.pi)
        assert characteristic_sweep_rate(4.0, 2.0) == pytest.approx(
            4.0 * characteristic_sweep_rate(2.0, 2.0))

    def test_validation(self):
        with pytest.raises(ValidationError):
            lz_probability(2.0, 2.0, 0.0)
        with pytest.raises(ValidationError):
            characteristic_sweep_rate(0.0, 2.0)

    def test_calibrated_prefactor(self):
        # single-passage survival measured with the propagator pins the
        # exponent prefactor at 1 under this Hamiltonian convention (the
        # region-partition logic keeps the conventional prefactor 2)
        c = calibrate_lz_prefactor()
        assert c == pytest.approx(1.0, abs=0.02)

    def test_ratio_threshold_constants(self):
        assert LARGE_AMPLITUDE_RATIO == 4.0
        assert EXTREME_AMPLITUDE_RATIO == 8.0
