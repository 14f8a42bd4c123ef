#!/usr/bin/env python3
"""
Configuration Tests
===================

Default constants, run-scoped overrides, input validation and the
experiment presets.
"""

import tempfile
import unittest
from pathlib import Path
from unittest import mock

import config
from config.presets.experiment_presets import PRESETS, get_preset
from src.core.errors import ValidationFailed
from src.core.utils import config_overrides
from src.systems.sweep import ExperimentManifest, run_experiment
from tools.config_validator import validate_config
from tools.validation import input_validator


class TestDefaults(unittest.TestCase):
    """Test that the shipped configuration validates cleanly."""

    def test_no_issues_or_warnings(self):
        issues, warnings = validate_config()
        self.assertEqual(issues, [])
        self.assertEqual(warnings, [])

    def test_increasing_ladder_is_an_issue(self):
        with mock.patch.object(config, 'PERTURBATIVE_DELTAS', (0.1, 0.2)):
            issues, _ = validate_config()
        self.assertTrue(any('PERTURBATIVE_DELTAS' in issue for issue in issues))

    def test_loose_tolerance_is_a_warning(self):
        with mock.patch.object(config, 'DEFAULT_QUAD_TOL', 1e-5):
            issues, warnings = validate_config()
        self.assertEqual(issues, [])
        self.assertEqual(len(warnings), 1)


class TestOverrides(unittest.TestCase):
    """Test run-scoped configuration overrides."""

    def test_values_restored(self):
        with config_overrides({'DEFAULT_QUAD_TOL': 1e-8, 'PERTURBATIVE_DELTAS': [0.2, 0.1]}):
            self.assertEqual(config.DEFAULT_QUAD_TOL, 1e-8)
            self.assertEqual(config.PERTURBATIVE_DELTAS, (0.2, 0.1))
        self.assertEqual(config.DEFAULT_QUAD_TOL, 1e-9)
        self.assertEqual(config.PERTURBATIVE_DELTAS, (0.1, 0.05, 0.025, 0.0125))

    def test_restored_after_error(self):
        with self.assertRaises(RuntimeError):
            with config_overrides({'CSV_DIGITS': 16}):
                raise RuntimeError('boom')
        self.assertEqual(config.CSV_DIGITS, 17)

    def test_unknown_name(self):
        with self.assertRaises(ValidationFailed) as ctx:
            with config_overrides({'NOT_A_SETTING': 1}):
                pass
        self.assertEqual(ctx.exception.field_path, 'config.NOT_A_SETTING')


class TestInputValidator(unittest.TestCase):
    """Test the override and input file checks."""

    def test_setting_names(self):
        self.assertTrue(input_validator.validate_setting_name('DEFAULT_QUAD_TOL')[0])
        self.assertFalse(input_validator.validate_setting_name('default_quad_tol')[0])
        self.assertFalse(input_validator.validate_setting_name('UNKNOWN_TOL')[0])
        self.assertFalse(input_validator.validate_setting_name('X' * 60)[0])

    def test_setting_values(self):
        check = input_validator.validate_setting_value
        self.assertTrue(check(1e-8, 'DEFAULT_QUAD_TOL')[0])
        self.assertFalse(check(0.5, 'DEFAULT_QUAD_TOL')[0])
        self.assertFalse(check(0.0, 'DEFAULT_QUAD_TOL')[0])
        self.assertFalse(check(float('nan'), 'CONDITION_THRESHOLD')[0])
        self.assertFalse(check('quad', 'DEFAULT_PRECISION')[0])
        self.assertTrue(check('extended', 'DEFAULT_PRECISION')[0])
        self.assertFalse(check('mirror', 'DEFAULT_TAIL_MODE')[0])
        self.assertFalse(check(True, 'CSV_DIGITS')[0])
        self.assertFalse(check(14, 'CSV_DIGITS')[0])
        self.assertFalse(check(1.5, 'MAX_LEVELS')[0])
        self.assertFalse(check('8', 'GAUSS_LEGENDRE_ORDER')[0])
        self.assertFalse(check({'a': 1}, 'MAX_LEVELS')[0])

    def test_input_paths(self):
        with tempfile.TemporaryDirectory() as tmp:
            good = Path(tmp) / 'signal.json'
            good.write_text('{}')
            bad = Path(tmp) / 'signal.txt'
            bad.write_text('{}')
            self.assertTrue(input_validator.validate_input_path(good, {'.json'})[0])
            self.assertFalse(input_validator.validate_input_path(bad, {'.json'})[0])
            self.assertFalse(input_validator.validate_input_path(Path(tmp) / 'absent.json')[0])
            self.assertFalse(input_validator.validate_input_path(tmp)[0])


class TestPresets(unittest.TestCase):
    """Test the ready-made manifests."""

    def test_every_preset_is_a_manifest(self):
        for name in PRESETS:
            manifest = ExperimentManifest.from_json(get_preset(name))
            self.assertIn(manifest.kind, ('synthesize', 'respond', 'anharmonic', 'parametric',
                                          'dispersive'), name)

    def test_presets_are_fresh_copies(self):
        first = get_preset('fig1')
        first['inputs']['constraints']['bandlimit'] = 9.0
        self.assertEqual(get_preset('fig1')['inputs']['constraints']['bandlimit'],
                         config.FIG1_BANDLIMIT)

    def test_names_are_sanitized(self):
        self.assertEqual(get_preset(' FIG3 ')['kind'], 'anharmonic')

    def test_unknown_preset(self):
        with self.assertRaises(ValidationFailed) as ctx:
            get_preset('fig7')
        self.assertEqual(ctx.exception.field_path, 'preset')
        with self.assertRaises(ValidationFailed):
            get_preset(None)

    def test_gap_preset_runs(self):
        with tempfile.TemporaryDirectory() as tmp:
            result = run_experiment(get_preset('fig3'), tmp)
            self.assertIn('gaps.csv', result.outputs)
            self.assertIn('converged', result.summary)
            self.assertAlmostEqual(result.summary['ground_energy'], 0.8038, delta=2e-2)


if __name__ == "__main__":
    unittest.main()
