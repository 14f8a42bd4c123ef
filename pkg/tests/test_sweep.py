#!/usr/bin/env python3
"""
Experiment & Sweep Tests
========================

Manifest validation, digest-addressed output directories and sweep ordering.
"""

import json
import tempfile
import unittest
from pathlib import Path

from src.core.errors import ValidationFailed
from src.systems.sweep import ExperimentManifest, run_experiment, run_sweep, set_path

CONSTRAINTS = {'bandlimit': 1.0, 'points': [[0.0, 1.0], [1.0, -1.0], [2.0, 1.0]]}


def synthesize_manifest(**extra):
    document = {'kind': 'synthesize', 'inputs': {'constraints': CONSTRAINTS, 'grid': '0:4:0.5'}}
    document.update(extra)
    return document


def respond_manifest():
    return {'kind': 'respond',
            'inputs': {'constraints': CONSTRAINTS, 'omega': 2.0, 'grid': '-5:5:0.5',
                       'tail': 'none'}}


class TestManifest(unittest.TestCase):
    """Test manifest validation."""

    def test_unknown_kind(self):
        with self.assertRaises(ValidationFailed) as ctx:
            ExperimentManifest.from_json({'kind': 'pendulum', 'inputs': {}})
        self.assertEqual(ctx.exception.field_path, 'kind')

    def test_missing_inputs(self):
        with self.assertRaises(ValidationFailed) as ctx:
            ExperimentManifest.from_json({'kind': 'respond'})
        self.assertEqual(ctx.exception.field_path, 'inputs')

    def test_unknown_field(self):
        with self.assertRaises(ValidationFailed):
            ExperimentManifest.from_json({'kind': 'respond', 'inputs': {}, 'color': 'red'})

    def test_tolerances_validated(self):
        with self.assertRaises(ValidationFailed) as ctx:
            ExperimentManifest('respond', {}, {'quad_tol': 0.5})
        self.assertEqual(ctx.exception.field_path, 'tolerances.quad_tol')
        with self.assertRaises(ValidationFailed):
            ExperimentManifest('respond', {}, {'step': 1e-3})
        with self.assertRaises(ValidationFailed):
            ExperimentManifest('respond', {}, {'precision': 'quad'})

    def test_resolved_tolerances(self):
        tolerances = ExperimentManifest('parametric', {}, {'quad_tol': 1e-8}).resolved_tolerances()
        self.assertEqual(tolerances['quad_tol'], 1e-8)
        self.assertEqual(tolerances['precision'], 'machine')
        self.assertEqual(tolerances['ode_tol'], 1e-11)


class TestRunExperiment(unittest.TestCase):
    """Test one manifest run."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.out = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_directory_and_outputs(self):
        result = run_experiment(synthesize_manifest(), self.out)
        self.assertEqual(result.directory.name, f'synthesize-{result.digest[:12]}')
        self.assertEqual(result.outputs, ('signal.csv', 'signal.json'))
        for name in ('signal.csv', 'signal.json', 'manifest.json', 'timing.json'):
            self.assertTrue((result.directory / name).is_file(), name)
        manifest = json.loads((result.directory / 'manifest.json').read_text())
        self.assertEqual(manifest['digest'], result.digest)
        self.assertNotIn('elapsed_seconds', manifest)

    def test_rerun_is_byte_identical(self):
        first = run_experiment(synthesize_manifest(), self.out)
        before = {name: (first.directory / name).read_bytes()
                  for name in ('signal.csv', 'signal.json', 'manifest.json')}
        second = run_experiment(synthesize_manifest(), self.out)
        self.assertEqual(second.digest, first.digest)
        for name, content in before.items():
            self.assertEqual((second.directory / name).read_bytes(), content, name)

    def test_document_path_matches_inline(self):
        path = self.out / 'constraints.json'
        path.write_text(json.dumps(CONSTRAINTS))
        inline = run_experiment(synthesize_manifest(), self.out)
        document = synthesize_manifest()
        document['inputs']['constraints'] = str(path)
        loaded = run_experiment(document, self.out)
        self.assertEqual(loaded.digest, inline.digest)

    def test_output_selection(self):
        result = run_experiment(synthesize_manifest(outputs=['signal.json']), self.out)
        self.assertEqual(result.outputs, ('signal.json',))
        self.assertFalse((result.directory / 'signal.csv').exists())

    def test_unknown_output(self):
        with self.assertRaises(ValidationFailed) as ctx:
            run_experiment(synthesize_manifest(outputs=['spectrum.csv']), self.out)
        self.assertEqual(ctx.exception.field_path, 'outputs[0]')

    def test_field_paths_are_prefixed(self):
        document = synthesize_manifest()
        document['inputs']['constraints'] = {'bandlimit': -1.0, 'points': [[0.0, 1.0]]}
        with self.assertRaises(ValidationFailed) as ctx:
            run_experiment(document, self.out)
        self.assertTrue(ctx.exception.field_path.startswith('inputs.constraints'))

    def test_missing_input(self):
        document = respond_manifest()
        del document['inputs']['omega']
        with self.assertRaises(ValidationFailed) as ctx:
            run_experiment(document, self.out)
        self.assertEqual(ctx.exception.field_path, 'inputs.omega')

    def test_missing_document_file(self):
        document = synthesize_manifest()
        document['inputs']['constraints'] = str(self.out / 'absent.json')
        with self.assertRaises(ValidationFailed) as ctx:
            run_experiment(document, self.out)
        self.assertEqual(ctx.exception.field_path, 'inputs.constraints')

    def test_respond_summary(self):
        result = run_experiment(respond_manifest(), self.out)
        self.assertEqual(result.summary['omega'], 2.0)
        self.assertEqual(result.summary['asymptotic_excitation'], 0.0)
        self.assertIn('response.csv', result.outputs)


class TestSweep(unittest.TestCase):
    """Test sweeps over manifest overrides."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.out = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_rows_follow_product_order(self):
        overrides = {'inputs.omega': [0.5, 2.5, -1.0], 'inputs.tail': ['none', 'analytic']}
        result = run_sweep(respond_manifest(), overrides, workers=3, out_dir=self.out)
        frame = result.frame
        self.assertEqual(len(frame), 6)
        self.assertEqual(list(frame['inputs.omega']), [0.5, 0.5, 2.5, 2.5, -1.0, -1.0])
        self.assertEqual(list(frame['inputs.tail']), ['none', 'analytic'] * 3)
        self.assertEqual(list(frame['status']), ['ok'] * 4 + ['error'] * 2)
        self.assertTrue(frame['error'].iloc[-1].startswith('ValidationFailed'))
        self.assertTrue((result.directory / 'sweep.csv').is_file())

    def test_parallel_matches_serial(self):
        overrides = {'inputs.omega': [0.5, 1.5, 2.5]}
        serial = run_sweep(respond_manifest(), overrides, workers=1, out_dir=self.out).frame
        parallel = run_sweep(respond_manifest(), overrides, workers=3, out_dir=self.out).frame
        self.assertEqual(list(serial['digest']), list(parallel['digest']))

    def test_empty_overrides(self):
        result = run_sweep(respond_manifest(), {}, out_dir=self.out)
        self.assertEqual(len(result.frame), 0)
        self.assertIn('status', result.frame.columns)

    def test_rejects_scalar_override(self):
        with self.assertRaises(ValidationFailed) as ctx:
            run_sweep(respond_manifest(), {'inputs.omega': 2.0}, out_dir=self.out)
        self.assertEqual(ctx.exception.field_path, 'overrides.inputs.omega')

    def test_rejects_bad_template(self):
        with self.assertRaises(ValidationFailed):
            run_sweep({'kind': 'respond'}, {'inputs.omega': [1.0]}, out_dir=self.out)


class TestSetPath(unittest.TestCase):
    """Test dotted-path overrides."""

    def test_creates_objects(self):
        document = {'inputs': {}}
        set_path(document, 'inputs.constraints.bandlimit', 2.0)
        self.assertEqual(document, {'inputs': {'constraints': {'bandlimit': 2.0}}})

    def test_rejects_non_object(self):
        with self.assertRaises(ValidationFailed):
            set_path({'inputs': {'omega': 1.0}}, 'inputs.omega.value', 2.0)

    def test_rejects_empty_segment(self):
        with self.assertRaises(ValidationFailed):
            set_path({}, 'inputs..omega', 2.0)


if __name__ == "__main__":
    unittest.main()
