#!/usr/bin/env python3
"""
N-Level System Tests
====================

Exact amplitude integration, first-order amplitudes and their agreement.
"""

import math
import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core.errors import ValidationFailed
from src.core.signals import SincExpansion
from src.systems.nlevel import (
    QuantumSystemSpec,
    integrate_exact,
    perturbative_amplitude,
    perturbative_order,
)
from src.systems.response import CallableDrive


def drive():
    return SincExpansion.from_weights(1.0, [-3.0, 0.0, 3.0], [1.0, -2.0, 1.0])


def two_level(delta=1.0):
    return QuantumSystemSpec([0.0, 0.5], [[0.0, 1.0], [1.0, 0.0]], delta)


class TestSystemSpec(unittest.TestCase):
    """Test system validation."""

    def test_rejects_asymmetric_coupling(self):
        with self.assertRaises(ValidationFailed) as ctx:
            QuantumSystemSpec([0.0, 1.0], [[0.0, 1.0], [0.5, 0.0]])
        self.assertEqual(ctx.exception.field_path, 'coupling')

    def test_rejects_unsorted_energies(self):
        with self.assertRaises(ValidationFailed):
            QuantumSystemSpec([1.0, 0.0], np.eye(2))

    def test_rejects_wrong_shape(self):
        with self.assertRaises(ValidationFailed):
            QuantumSystemSpec([0.0, 1.0, 2.0], np.eye(2))

    def test_rejects_negative_delta(self):
        with self.assertRaises(ValidationFailed):
            QuantumSystemSpec([0.0, 1.0], np.eye(2), -0.1)

    def test_json_round_trip(self):
        system = two_level(0.3)
        copy = QuantumSystemSpec.from_json(system.to_json())
        np.testing.assert_array_equal(copy.energies, system.energies)
        np.testing.assert_array_equal(copy.coupling, system.coupling)
        self.assertEqual(copy.delta, 0.3)

    def test_transition_frequency(self):
        self.assertEqual(two_level().transition_frequency(1, 0), 0.5)


class TestExactIntegration(unittest.TestCase):
    """Test the interaction-picture amplitude equations."""

    def setUp(self):
        self.grid = np.linspace(-20.0, 20.0, 201)

    def test_norm_is_conserved(self):
        trace = integrate_exact(two_level(0.5), drive(), 0, self.grid)
        np.testing.assert_allclose(trace.populations.sum(axis=1), 1.0, atol=1e-7)
        self.assertGreater(trace.nfev, 0)
        self.assertGreater(trace.populations[-1, 1], 0.0)

    def test_energy_shift_is_a_gauge(self):
        system = two_level(0.5)
        base = integrate_exact(system, drive(), 0, self.grid)
        moved = integrate_exact(system.shifted(7.0), drive(), 0, self.grid)
        np.testing.assert_allclose(moved.populations, base.populations, atol=1e-9)

    def test_zero_drive_leaves_state(self):
        trace = integrate_exact(two_level(), SincExpansion.empty(1.0), 1, self.grid)
        np.testing.assert_allclose(trace.populations[:, 1], 1.0)

    def test_initial_vector(self):
        initial = np.array([1.0, 1.0j]) / math.sqrt(2.0)
        trace = integrate_exact(two_level(0.1), drive(), initial, self.grid)
        np.testing.assert_allclose(trace.coefficients[0], initial)

    def test_rejects_unnormalized_initial(self):
        with self.assertRaises(ValidationFailed):
            integrate_exact(two_level(), drive(), [1.0, 1.0], self.grid)

    def test_rejects_level_out_of_range(self):
        with self.assertRaises(ValidationFailed):
            integrate_exact(two_level(), drive(), 2, self.grid)

    def test_rejects_complex_drive(self):
        complex_drive = CallableDrive(lambda t: (1.0 + 0.5j) * np.cos(0.5 * t), 0.5)
        with self.assertRaises(ValidationFailed) as ctx:
            integrate_exact(two_level(0.1), complex_drive, 0, self.grid)
        self.assertEqual(ctx.exception.field_path, 'signal')

    def test_complex_typed_real_drive(self):
        real = CallableDrive(lambda t: 0.1 * np.cos(0.5 * t), 0.5)
        typed = CallableDrive(lambda t: (0.1 + 0j) * np.cos(0.5 * t), 0.5)
        expected = integrate_exact(two_level(), real, 0, self.grid).coefficients
        actual = integrate_exact(two_level(), typed, 0, self.grid).coefficients
        np.testing.assert_allclose(actual, expected, atol=1e-12)

    def test_frame_columns(self):
        frame = integrate_exact(two_level(0.1), drive(), 0, self.grid[:5]).to_frame()
        self.assertEqual(list(frame.columns), ['time', 're_c0', 'im_c0', 're_c1', 'im_c1'])

    @settings(max_examples=5, deadline=None)
    @given(st.lists(st.floats(min_value=-1.0, max_value=1.0), min_size=3, max_size=3),
           st.floats(min_value=0.1, max_value=2.0))
    def test_three_levels_conserve_norm(self, couplings, top):
        a, b, c = couplings
        system = QuantumSystemSpec([0.0, 0.4, 0.4 + top], [[0.0, a, b], [a, 0.0, c], [b, c, 0.0]],
                                   0.3)
        trace = integrate_exact(system, drive(), 0, self.grid)
        self.assertLessEqual(trace.norm_drift, 1e-6)


class TestPerturbative(unittest.TestCase):
    """Test first-order amplitudes and the observed order of the remainder."""

    def setUp(self):
        self.grid = np.linspace(-20.0, 20.0, 401)

    def test_first_order_agrees_at_weak_coupling(self):
        system = two_level(1e-3)
        exact = integrate_exact(system, drive(), 0, self.grid).coefficients[:, 1]
        first = perturbative_amplitude(system, drive(), 0, 1, self.grid, tail='none')
        scale = float(np.max(np.abs(first)))
        self.assertGreater(scale, 0.0)
        self.assertLess(float(np.max(np.abs(exact - first))), 1e-3 * scale)

    def test_remainder_is_third_order(self):
        result = perturbative_order(two_level(), drive(), 0, 1, self.grid)
        self.assertEqual(len(result.orders), 3)
        self.assertAlmostEqual(result.order, 3.0, delta=0.3)
        self.assertEqual(result.to_json()['order'], result.order)

    def test_uncoupled_pair_is_zero(self):
        system = QuantumSystemSpec([0.0, 0.5, 1.0], [[0, 1, 0], [1, 0, 1], [0, 1, 0]])
        first = perturbative_amplitude(system, drive(), 0, 2, self.grid)
        self.assertFalse(np.any(first))

    def test_same_level_rejected(self):
        with self.assertRaises(ValidationFailed):
            perturbative_amplitude(two_level(), drive(), 1, 1, self.grid)

    def test_ladder_needs_two_rungs(self):
        with self.assertRaises(ValidationFailed):
            perturbative_order(two_level(), drive(), 0, 1, self.grid, deltas=(0.1,))


if __name__ == "__main__":
    unittest.main()
