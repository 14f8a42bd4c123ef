#!/usr/bin/env python3
"""
Anharmonic Oscillator Tests
===========================

Truncated quartic spectra, driven transitions and the classical cubic response.
"""

import math
import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import simpson, solve_ivp

from src.core.errors import ValidationFailed
from src.core.signals import SincExpansion
from src.systems.anharmonic import (
    AnharmonicSpec,
    build_hamiltonian,
    classical_perturbative,
    compare_drives,
    cubed_spectrum,
    diagonalize,
    eigenfunctions,
    to_system,
)
from src.systems.harmonic import closed_form_coefficients, ladder_position_matrix
from src.systems.nlevel import integrate_exact
from src.systems.response import CallableDrive, exact_running_integral


class TestSpec(unittest.TestCase):
    """Test oscillator validation."""

    def test_rejects_small_truncation(self):
        with self.assertRaises(ValidationFailed):
            AnharmonicSpec(1.0, 0.1, 1)

    def test_rejects_negative_coupling(self):
        with self.assertRaises(ValidationFailed) as ctx:
            AnharmonicSpec(1.0, -0.1, 8)
        self.assertEqual(ctx.exception.field_path, 'coupling')

    def test_json_round_trip(self):
        spec = AnharmonicSpec(1.5, 0.2, 10)
        self.assertEqual(AnharmonicSpec.from_json(spec.to_json()), spec)


class TestSpectrum(unittest.TestCase):
    """Test the diagonalized quartic Hamiltonian."""

    def test_harmonic_limit(self):
        summary = diagonalize(AnharmonicSpec(2.0, 0.0, 8))
        np.testing.assert_allclose(summary.eigenvalues, (np.arange(8) + 0.5) * 2.0, atol=1e-12)
        np.testing.assert_allclose(summary.gaps, 2.0, atol=1e-12)
        self.assertTrue(summary.converged)

    def test_quartic_ground_state(self):
        summary = diagonalize(AnharmonicSpec(1.0, 1.0, 16))
        self.assertAlmostEqual(summary.eigenvalues[0], 0.8037706512, delta=1e-2)

    def test_quartic_gaps_widen(self):
        summary = diagonalize(AnharmonicSpec(1.0, 1.0, 16), check_convergence=False)
        self.assertTrue(np.all(np.diff(summary.gaps[:8]) > 0), summary.gaps[:8])

    def test_first_order_shift(self):
        n = np.arange(4)
        first_order = 3.0 * (2.0 * n ** 2 + 2.0 * n + 1.0) / 4.0
        residuals = []
        for coupling in (1e-3, 5e-4):
            summary = diagonalize(AnharmonicSpec(1.0, coupling, 16), check_convergence=False)
            shift = summary.eigenvalues[:4] - (n + 0.5)
            residuals.append(float(np.max(np.abs(shift - coupling * first_order))))
        self.assertLess(residuals[0], 1e-3)
        # second order: halving the coupling quarters the residual
        self.assertAlmostEqual(residuals[0] / residuals[1], 4.0, delta=0.5)

    def test_quartic_matrix_elements(self):
        omega, size = 1.5, 10
        H = build_hamiltonian(AnharmonicSpec(omega, 1.0, size))
        n = np.arange(size)
        quartic = H - np.diag((n + 0.5) * omega)
        np.testing.assert_allclose(np.diag(quartic),
                                   3.0 * (2.0 * n ** 2 + 2.0 * n + 1.0) / (4.0 * omega ** 2),
                                   atol=1e-12)
        m = np.arange(size - 4)
        band = np.sqrt((m + 1.0) * (m + 2.0) * (m + 3.0) * (m + 4.0)) / (4.0 * omega ** 2)
        np.testing.assert_allclose(np.diag(quartic, 4), band, atol=1e-12)
        # raising the truncated matrix loses the highest rungs
        naive = np.linalg.matrix_power(ladder_position_matrix(omega, size), 4)
        self.assertAlmostEqual(naive[0, 0], quartic[0, 0], places=12)
        self.assertGreater(abs(naive[-1, -1] - quartic[-1, -1]), 0.1)

    def test_small_basis_not_converged(self):
        summary = diagonalize(AnharmonicSpec(1.0, 1.0, 4))
        self.assertFalse(summary.converged)
        self.assertGreater(summary.stability, 1e-8)

    @settings(max_examples=10, deadline=None)
    @given(st.floats(min_value=0.0, max_value=2.0), st.integers(min_value=4, max_value=20))
    def test_eigenbasis_is_orthonormal(self, coupling, truncation):
        summary = diagonalize(AnharmonicSpec(1.0, coupling, truncation), check_convergence=False)
        vectors = summary.eigenvectors
        np.testing.assert_allclose(vectors.T @ vectors, np.eye(truncation), atol=1e-10)
        np.testing.assert_array_equal(summary.position_matrix, summary.position_matrix.T)
        self.assertTrue(np.all(np.diff(summary.eigenvalues) >= 0))

    def test_hamiltonian_is_symmetric(self):
        H = build_hamiltonian(AnharmonicSpec(1.0, 0.5, 10))
        np.testing.assert_allclose(H, H.T, atol=1e-12)

    def test_parity_selection(self):
        summary = diagonalize(AnharmonicSpec(1.0, 0.5, 16))
        q = summary.position_matrix
        self.assertGreater(abs(q[0, 1]), 0.1)
        self.assertLess(abs(q[0, 2]), 1e-10)

    def test_eigenfunctions_normalized(self):
        summary = diagonalize(AnharmonicSpec(1.0, 0.5, 12), check_convergence=False)
        x = np.linspace(-10.0, 10.0, 4001)
        psi = eigenfunctions(summary, x)
        norms = simpson(psi ** 2, x=x, axis=0)
        np.testing.assert_allclose(norms, 1.0, atol=1e-8)

    def test_gaps_frame(self):
        frame = diagonalize(AnharmonicSpec(1.0, 0.0, 5)).gaps_frame()
        self.assertEqual(list(frame.columns), ['index', 'lower', 'upper', 'gap'])
        self.assertEqual(len(frame), 4)


class TestDriving(unittest.TestCase):
    """Test quantum driving of the diagonalized oscillator."""

    def test_zero_coupling_matches_coherent_state(self):
        J = SincExpansion.from_weights(1.0, [-3.0, 0.0, 3.0], [0.05, -0.1, 0.05])
        omega = 0.5
        grid = np.linspace(-20.0, 20.0, 201)
        summary = diagonalize(AnharmonicSpec(omega, 0.0, 12), check_convergence=False)
        exact = integrate_exact(to_system(summary, 1.0), J, 0, grid, ode_tol=1e-11)
        coherent = closed_form_coefficients(J, omega, grid, n_max=11, quad_tol=1e-11,
                                            tail='none')
        np.testing.assert_allclose(exact.coefficients, coherent, atol=1e-6)

    def test_comparison_frame(self):
        J = SincExpansion.from_weights(1.0, [0.0], [0.1])
        frame = compare_drives(AnharmonicSpec(1.0, 0.3, 6), J, np.linspace(-10.0, 10.0, 41))
        self.assertEqual(list(frame.columns), ['time', 'p1_anharmonic', 'p1_harmonic',
                                               'p0_anharmonic', 'p0_harmonic'])
        self.assertEqual(len(frame), 41)

    def test_to_system(self):
        summary = diagonalize(AnharmonicSpec(1.0, 0.3, 6), check_convergence=False)
        system = to_system(summary, 0.5)
        self.assertEqual(system.size, 6)
        self.assertEqual(system.delta, 0.5)


class TestClassical(unittest.TestCase):
    """Test the fractional resonance of the cubic response."""

    @classmethod
    def setUpClass(cls):
        spacing = math.pi / 0.6
        cls.J = SincExpansion.from_weights(0.6, [-spacing, 0.0, spacing], [1.0, 1.0, 1.0])
        cls.spec = AnharmonicSpec(1.0, 0.01, 8)
        cls.grid = np.linspace(-30.0, 100.0, 1301)
        cls.result = classical_perturbative(cls.spec, cls.J, cls.grid, quad_tol=1e-10,
                                            tail='analytic')

    def test_zeroth_order_has_no_resonance(self):
        self.assertEqual(self.result.q0_asymptotic_amplitude, 0.0)

    def test_cube_resonates(self):
        self.assertGreater(self.result.q1_asymptotic_amplitude, 1e-4)

    def test_matches_ode_oracle(self):
        omega = self.spec.frequency
        J = self.J

        def q0(s):
            return float(np.imag(np.exp(1j * omega * s)
                                 * exact_running_integral(J, -omega, np.array(s))) / omega)

        def rhs(s, y):
            return [y[1], q0(s) ** 3 - omega ** 2 * y[0]]

        oracle = solve_ivp(rhs, (self.grid[0], self.grid[-1]), [0.0, 0.0], method='DOP853',
                           t_eval=self.grid, rtol=1e-10, atol=1e-12, max_step=0.5)
        scale = float(np.max(np.abs(oracle.y[0])))
        self.assertGreater(scale, 0.0)
        np.testing.assert_allclose(self.result.q1, oracle.y[0], atol=0.01 * scale)

    def test_sampled_spectrum_agrees(self):
        sampled = cubed_spectrum(self.grid, self.result.q0 ** 3, self.spec.frequency)[0]
        expected = self.result.q0_cubed_spectrum_at_omega
        self.assertAlmostEqual(abs(sampled - expected), 0.0, delta=1e-3 * max(abs(expected), 1e-6))

    def test_cube_is_bandlimited(self):
        cube = self.result.q0 ** 3
        band = 3.0 * self.J.bandlimit
        inside = np.abs(cubed_spectrum(self.grid, cube, [0.3, 0.9, 1.5]))
        outside = np.abs(cubed_spectrum(self.grid, cube, [band + 0.2, band + 0.6, 2.0 * band]))
        self.assertGreater(float(np.max(inside)), 1e-3)
        self.assertLess(float(np.max(outside)), 1e-3 * float(np.max(inside)))

    def test_requires_closed_form(self):
        with self.assertRaises(ValidationFailed):
            classical_perturbative(self.spec, CallableDrive(np.cos, 1.0), self.grid)


if __name__ == "__main__":
    unittest.main()
