#!/usr/bin/env python3
"""
Dispersive Oscillator Tests
===========================

Dispersion roots, partial fractions and the driven response below the band edge.
"""

import math
import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core.errors import DegenerateRoots, ResonanceInBand, ValidationFailed
from src.core.signals import SincExpansion
from src.systems.dispersive import (
    dispersion_curve,
    driven_response,
    greens_partial_fractions,
    solve_dispersion,
)
from src.systems.response import CallableDrive


def binomial_drive(bandlimit=0.5):
    spacing = math.pi / bandlimit
    return SincExpansion.from_weights(bandlimit, [k * spacing for k in range(4)],
                                      [1.0, 3.0, 3.0, 1.0])


class TestDispersion(unittest.TestCase):
    """Test the roots of the quartic dispersion relation."""

    @settings(max_examples=30, deadline=None)
    @given(st.floats(min_value=0.01, max_value=4.9), st.floats(min_value=10.0, max_value=20.0))
    def test_real_roots(self, k, cutoff):
        roots = solve_dispersion(k, cutoff)
        self.assertEqual(roots.branch, 'real')
        self.assertGreaterEqual(roots.omega1, roots.omega2)
        self.assertTrue(all(r < 1e-12 for r in roots.residuals()))
        self.assertAlmostEqual(roots.omega1 * roots.omega2, k * cutoff,
                               delta=1e-12 * k * cutoff)
        self.assertAlmostEqual(roots.omega1 ** 2 + roots.omega2 ** 2, cutoff ** 2,
                               delta=1e-10 * cutoff ** 2)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(min_value=0.05, max_value=4.9), st.floats(min_value=10.0, max_value=20.0))
    def test_agrees_with_polynomial_roots(self, k, cutoff):
        roots = solve_dispersion(k, cutoff)
        quartic = np.roots([1.0 / cutoff ** 2, 0.0, -1.0, 0.0, k ** 2])
        positive = np.sort(quartic.real[(quartic.real > 0) & (np.abs(quartic.imag) < 1e-9)])
        np.testing.assert_allclose([roots.omega2, roots.omega1], positive, rtol=1e-8)

    def test_large_cutoff_limit(self):
        for k in (0.5, 1.0, 2.0):
            cutoff = 20.0 * k
            roots = solve_dispersion(k, cutoff)
            bound = 2.0 * k ** 2 / cutoff ** 2
            self.assertLessEqual(abs(roots.omega1 - cutoff) / cutoff, bound)
            self.assertLessEqual(abs(roots.omega2 - k) / k, bound)

    def test_nearly_degenerate_real_branch(self):
        cutoff = 10.0
        roots = solve_dispersion(0.5 * cutoff - 1e-6, cutoff)
        self.assertEqual(roots.branch, 'real')
        self.assertGreater(roots.omega1, roots.omega2)
        self.assertTrue(all(r < 1e-12 for r in roots.residuals()))
        self.assertAlmostEqual(roots.omega1 * roots.omega2, roots.wavenumber * cutoff,
                               delta=1e-12 * cutoff ** 2)
        self.assertAlmostEqual(roots.omega1 ** 2 + roots.omega2 ** 2, cutoff ** 2,
                               delta=1e-10 * cutoff ** 2)
        green = greens_partial_fractions(roots)
        self.assertLess(green.recombination_residual(np.linspace(0.0, 5.0, 51)), 1e-8)

    def test_degenerate_branch(self):
        roots = solve_dispersion(5.0, 10.0)
        self.assertEqual(roots.branch, 'degenerate')
        self.assertEqual(roots.omega1, roots.omega2)
        with self.assertRaises(DegenerateRoots):
            greens_partial_fractions(roots)

    def test_complex_branch(self):
        roots = solve_dispersion(6.0, 10.0)
        self.assertEqual(roots.branch, 'complex')
        self.assertTrue(all(math.isnan(v) for v in roots.group_velocity))
        self.assertTrue(all(r < 1e-12 for r in roots.residuals()))
        with self.assertRaises(ValidationFailed):
            greens_partial_fractions(roots)
        self.assertIsInstance(roots.to_json()['omega1'], list)

    def test_group_velocity_matches_slope(self):
        h = 1e-6
        slope = (solve_dispersion(1.0 + h, 10.0).omega2
                 - solve_dispersion(1.0 - h, 10.0).omega2) / (2 * h)
        self.assertAlmostEqual(solve_dispersion(1.0, 10.0).group_velocity[1], slope, places=6)

    def test_rejects_nonpositive_inputs(self):
        with self.assertRaises(ValidationFailed) as ctx:
            solve_dispersion(0.0, 10.0)
        self.assertEqual(ctx.exception.field_path, 'k')
        with self.assertRaises(ValidationFailed):
            solve_dispersion(1.0, -1.0)

    def test_curve(self):
        frame = dispersion_curve(10.0, [0.5, 1.0, 6.0])
        self.assertEqual(list(frame['branch']), ['real', 'real', 'complex'])
        self.assertIn('group_velocity2', frame.columns)


class TestGreensFunction(unittest.TestCase):
    """Test the partial-fraction Green's function."""

    def test_recombines_to_direct_form(self):
        green = greens_partial_fractions(solve_dispersion(1.0, 10.0))
        nu = np.random.default_rng(7).uniform(0.0, 20.0, 100)
        self.assertLess(green.recombination_residual(nu), 1e-12)


class TestDrivenResponse(unittest.TestCase):
    """Test the response to a drive below both roots."""

    def setUp(self):
        self.roots = solve_dispersion(1.0, 10.0)
        self.J = binomial_drive()

    def test_response_decays_after_drive(self):
        grid = np.arange(-40, 1201) * 0.5
        result = driven_response(self.roots, self.J, grid, 1e-12)
        self.assertLessEqual(result.decay_ratio, 1e-6)
        self.assertEqual(result.decay_window[1], grid[-1])
        self.assertGreater(result.summary()['peak_response'], 0.0)

    def test_methods_agree(self):
        grid = np.linspace(-20.0, 200.0, 441)
        band = driven_response(self.roots, self.J, grid, 1e-12, method='band').response
        oscillators = driven_response(self.roots, self.J, grid, 1e-12,
                                      method='oscillators').response
        scale = float(np.max(np.abs(band)))
        np.testing.assert_allclose(oscillators, band, rtol=0.0, atol=1e-8 * scale)

    def test_root_inside_band(self):
        roots = solve_dispersion(0.2, 10.0)
        grid = np.linspace(0.0, 10.0, 11)
        with self.assertRaises(ResonanceInBand):
            driven_response(roots, self.J, grid, method='band')
        with self.assertLogs('src.systems.dispersive', level='WARNING'):
            driven_response(roots, self.J, grid, method='oscillators')

    def test_empty_drive(self):
        result = driven_response(self.roots, SincExpansion.empty(0.5), np.linspace(0, 1, 3))
        self.assertFalse(np.any(result.response))

    def test_rejects_callable_drive(self):
        with self.assertRaises(ValidationFailed):
            driven_response(self.roots, CallableDrive(np.cos, 0.5), np.linspace(0, 1, 3))

    def test_rejects_unknown_method(self):
        with self.assertRaises(ValidationFailed):
            driven_response(self.roots, self.J, np.linspace(0, 1, 3), method='modes')


if __name__ == "__main__":
    unittest.main()
