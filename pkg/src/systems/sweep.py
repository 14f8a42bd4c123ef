"""
Experiments & Sweeps
====================

An experiment manifest names one system (``kind``), its inputs (inline
values or paths to JSON documents) and its tolerances. ``run_experiment``
resolves the inputs, runs the owning module and writes every table and
document under ``<out>/<kind>-<digest>/``, where the digest is taken over the
resolved manifest so identical work lands in the same directory with the
same bytes. Wall-clock timing goes to a separate ``timing.json``.

``run_sweep`` expands a template manifest over a grid of dotted-path
overrides and runs the points on a thread pool.
"""

import copy
import itertools
import logging
import math
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import pandas as pd

import config
from src.core.errors import SuperoscError, ValidationFailed
from src.core.signals import ConstraintSpec, SincExpansion, characterize, evaluate, solve_min_norm
from src.core.utils import (
    canonical_json,
    digest,
    load_json,
    ordered_map,
    parse_grid,
    resolve_out_dir,
    to_plain,
    write_csv,
    write_json,
)
from src.systems import anharmonic, dispersive, harmonic, nlevel, parametric, response

logger = logging.getLogger(__name__)

KINDS = ('synthesize', 'respond', 'harmonic', 'nlevel', 'anharmonic', 'dispersive',
         'parametric')
TOLERANCE_KEYS = ('quad_tol', 'ode_tol', 'precision')
DOCUMENT_INPUTS = ('constraints', 'signal', 'system', 'profile')


# ===============================================
# === MANIFEST =================================
# ===============================================

@dataclass(frozen=True)
class ExperimentManifest:
    kind: str
    inputs: dict
    tolerances: dict = field(default_factory=dict)
    outputs: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationFailed(f'kind must be one of {list(KINDS)}', 'kind', value=self.kind)
        if not isinstance(self.inputs, dict):
            raise ValidationFailed('inputs must be an object', 'inputs')
        if not isinstance(self.tolerances, dict):
            raise ValidationFailed('tolerances must be an object', 'tolerances')
        for key, value in self.tolerances.items():
            if key not in TOLERANCE_KEYS:
                raise ValidationFailed(f'unknown tolerance, expected one of {list(TOLERANCE_KEYS)}',
                                       f'tolerances.{key}')
            if key == 'precision':
                if value not in ('machine', 'extended'):
                    raise ValidationFailed('precision must be machine or extended',
                                           'tolerances.precision', value=value)
            elif isinstance(value, bool) or not isinstance(value, (int, float)) \
                    or not 0 < value < 1e-2:
                raise ValidationFailed('tolerance must lie in (0, 1e-2)', f'tolerances.{key}',
                                       value=value)
        outputs = tuple(self.outputs or ())
        for index, name in enumerate(outputs):
            if not isinstance(name, str):
                raise ValidationFailed('output names must be strings', f'outputs[{index}]')
        object.__setattr__(self, 'outputs', outputs)

    @classmethod
    def from_json(cls, document):
        if not isinstance(document, dict):
            raise ValidationFailed('manifest must be a JSON object', '')
        for key in ('kind', 'inputs'):
            if key not in document:
                raise ValidationFailed('missing field', key)
        unknown = set(document) - {'kind', 'inputs', 'tolerances', 'outputs'}
        if unknown:
            raise ValidationFailed('unknown manifest field', sorted(unknown)[0])
        return cls(document['kind'], document['inputs'], document.get('tolerances', {}),
                   tuple(document.get('outputs', ())))

    @classmethod
    def load(cls, path):
        return cls.from_json(load_json(path, 'manifest'))

    def to_json(self):
        document = {'kind': self.kind, 'inputs': self.inputs, 'tolerances': self.tolerances}
        if self.outputs:
            document['outputs'] = list(self.outputs)
        return document

    def resolved_tolerances(self):
        """Explicit tolerances with every missing one taken from the current config."""
        ode_default = config.PARAMETRIC_ODE_TOL if self.kind == 'parametric' \
            else config.DEFAULT_ODE_TOL
        return {
            'quad_tol': float(self.tolerances.get('quad_tol', config.DEFAULT_QUAD_TOL)),
            'ode_tol': float(self.tolerances.get('ode_tol', ode_default)),
            'precision': self.tolerances.get('precision', config.DEFAULT_PRECISION),
        }


@dataclass(frozen=True)
class ExperimentResult:
    kind: str
    digest: str
    directory: Path
    outputs: tuple
    summary: dict


@dataclass(frozen=True, eq=False)
class SweepResult:
    frame: pd.DataFrame
    directory: Path


# ===============================================
# === INPUT RESOLUTION =========================
# ===============================================

def _prefixed(error, prefix):
    error.field_path = f'{prefix}.{error.field_path}' if error.field_path else prefix
    return error


def resolve_inputs(inputs):
    """Replace document paths by their JSON content; returns (resolved, input digests)."""
    resolved, digests = {}, {}
    for key, value in inputs.items():
        if key in DOCUMENT_INPUTS and isinstance(value, str):
            value = load_json(value, f'inputs.{key}')
        resolved[key] = to_plain(value)
        if key in DOCUMENT_INPUTS:
            digests[key] = digest(resolved[key])
    return resolved, digests


def _number(inputs, name, default=None, positive=False, integer=False):
    value = inputs.get(name, default)
    if value is None:
        raise ValidationFailed('missing input', f'inputs.{name}')
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ValidationFailed('must be a finite number', f'inputs.{name}', value=value)
    if positive and value <= 0:
        raise ValidationFailed('must be positive', f'inputs.{name}', value=value)
    if integer:
        if float(value) != int(value):
            raise ValidationFailed('must be an integer', f'inputs.{name}', value=value)
        return int(value)
    return float(value)


def _choice(inputs, name, choices, default):
    value = inputs.get(name, default)
    if value not in choices:
        raise ValidationFailed(f'must be one of {list(choices)}', f'inputs.{name}', value=value)
    return value


def _grid(inputs, default=None):
    value = inputs.get('grid', default)
    if value is None:
        raise ValidationFailed('missing input', 'inputs.grid')
    return parse_grid(value, 'inputs.grid')


def _document(inputs, name, parser):
    try:
        return parser(inputs[name])
    except ValidationFailed as e:
        raise _prefixed(e, f'inputs.{name}')


def _signal(inputs, tolerances):
    """Drive from an inline/loaded sinc expansion, or synthesized from constraints."""
    if 'signal' in inputs:
        return _document(inputs, 'signal', SincExpansion.from_json)
    if 'constraints' in inputs:
        spec = _document(inputs, 'constraints', ConstraintSpec.from_json)
        try:
            return solve_min_norm(spec, tolerances['precision'])
        except ValidationFailed as e:
            raise _prefixed(e, 'inputs.constraints')
    raise ValidationFailed('needs a signal or constraints input', 'inputs.signal')


def _signal_summary(J):
    return {'condition_number': J.condition_number, 'precision_mode': J.precision_mode,
            'interpolation_residual': J.residual, 'bandlimit': J.bandlimit}


# ===============================================
# === RUNNERS ==================================
# ===============================================
# Each runner returns (tables, documents, summary).

def _run_synthesize(inputs, tol):
    J = _signal(inputs, tol)
    documents = {'signal': J.to_json()}
    summary = _signal_summary(J)
    tables = {}
    if 'window' in inputs:
        window = inputs['window']
        if not isinstance(window, list) or len(window) != 2:
            raise ValidationFailed('window must be [t_min, t_max]', 'inputs.window')
        report = characterize(J, window, inputs.get('scan_horizon'))
        documents['characterization'] = report.to_json()
        summary.update(dynamic_range=report.dynamic_range,
                       local_period_estimate=report.local_period_estimate)
    if 'grid' in inputs:
        grid = _grid(inputs)
        tables['signal'] = pd.DataFrame({'time': grid, 'f': evaluate(J, grid)})
    return tables, documents, summary


def _run_respond(inputs, tol):
    J = _signal(inputs, tol)
    omega = _number(inputs, 'omega', positive=True)
    tail = _choice(inputs, 'tail', response.TAIL_MODES, config.DEFAULT_TAIL_MODE)
    trace = response.partial_fourier(J, omega, _grid(inputs), tol['quad_tol'], tail)
    asymptotic = response.asymptotic_value(J, omega)
    peak = int(np.argmax(trace.excitation))
    summary = {
        **_signal_summary(J),
        'omega': omega,
        'tail_mode': tail,
        'truncation_bound': trace.truncation_bound,
        'quad_error': trace.quad_error,
        'peak_excitation': float(trace.excitation[peak]),
        'peak_time': float(trace.times[peak]),
        'final_excitation': float(trace.excitation[-1]),
        'asymptotic_excitation': abs(asymptotic) ** 2,
    }
    return {'response': trace.to_frame()}, {'signal': J.to_json()}, summary


def _run_harmonic(inputs, tol):
    J = _signal(inputs, tol)
    omega = _number(inputs, 'omega', positive=True)
    tail = _choice(inputs, 'tail', response.TAIL_MODES, config.DEFAULT_TAIL_MODE)
    n_max = inputs.get('n_max')
    if n_max is not None:
        n_max = _number(inputs, 'n_max', integer=True)
    result = harmonic.drive_harmonic(J, omega, _grid(inputs), tol['quad_tol'], tail, n_max)
    tables = {'harmonic': result.to_frame(), 'populations': result.populations_frame()}
    return tables, {}, {**_signal_summary(J), **result.summary()}


def _run_nlevel(inputs, tol):
    J = _signal(inputs, tol)
    if 'system' not in inputs:
        raise ValidationFailed('missing input', 'inputs.system')
    system = _document(inputs, 'system', nlevel.QuantumSystemSpec.from_json)
    initial = _number(inputs, 'initial', default=0, integer=True)
    grid = _grid(inputs)
    trace = nlevel.integrate_exact(system, J, initial, grid, tol['ode_tol'])
    frame = trace.to_frame()
    summary = {'norm_drift': trace.norm_drift, 'nfev': trace.nfev,
               'final_populations': trace.populations[-1].tolist()}
    if 'compare_level' in inputs:
        level = _number(inputs, 'compare_level', integer=True)
        first = nlevel.perturbative_amplitude(system, J, initial, level, grid,
                                              tol['quad_tol'], tail='none')
        frame[f're_first_order_c{level}'] = first.real
        frame[f'im_first_order_c{level}'] = first.imag
        summary['first_order_deviation'] = float(np.max(np.abs(
            trace.coefficients[:, level] - first)))
    return {'amplitudes': frame}, {}, summary


def _run_anharmonic(inputs, tol):
    spec = anharmonic.AnharmonicSpec(
        _number(inputs, 'frequency', positive=True),
        _number(inputs, 'coupling', default=0.0),
        _number(inputs, 'truncation', integer=True),
    )
    mode = _choice(inputs, 'mode', ('spectrum', 'classical', 'drive'), 'spectrum')
    if mode == 'spectrum':
        summary = anharmonic.diagonalize(spec)
        report = {'converged': summary.converged, 'stability': summary.stability,
                  'ground_energy': float(summary.eigenvalues[0]),
                  'first_gap': float(summary.gaps[0])}
        return {'gaps': summary.gaps_frame()}, {'spectrum': summary.to_json()}, report
    J = _signal(inputs, tol)
    grid = _grid(inputs)
    if mode == 'classical':
        tail = _choice(inputs, 'tail', response.TAIL_MODES, config.DEFAULT_TAIL_MODE)
        result = anharmonic.classical_perturbative(spec, J, grid, tol['quad_tol'], tail)
        return {'classical': result.to_frame()}, {}, result.summary()
    delta = _number(inputs, 'delta', default=1.0)
    frame = anharmonic.compare_drives(spec, J, grid, delta, tol['ode_tol'])
    summary = {'final_p1_anharmonic': float(frame['p1_anharmonic'].iloc[-1]),
               'final_p1_harmonic': float(frame['p1_harmonic'].iloc[-1])}
    return {'drive': frame}, {}, summary


def _run_dispersive(inputs, tol):
    J = _signal(inputs, tol)
    roots = dispersive.solve_dispersion(_number(inputs, 'k', positive=True),
                                        _number(inputs, 'cutoff', positive=True))
    method = _choice(inputs, 'method', dispersive.METHODS, 'band')
    result = dispersive.driven_response(roots, J, _grid(inputs), tol['quad_tol'], method)
    return {'dispersive': result.to_frame()}, {'roots': roots.to_json()}, result.summary()


def _run_parametric(inputs, tol):
    mode = _choice(inputs, 'mode', ('single', 'scan'), 'single')
    if mode == 'scan':
        omega0 = _number(inputs, 'omega0', positive=True)
        frequencies = inputs.get('mod_frequencies')
        if isinstance(frequencies, str):
            frequencies = parse_grid(frequencies, 'inputs.mod_frequencies')
        scan = parametric.resonance_scan(
            omega0, _number(inputs, 'depth'), _number(inputs, 'envelope_width', positive=True),
            frequencies, tol['ode_tol'],
        )
        return {'scan': scan.frame}, {}, scan.summary()
    if 'profile' not in inputs:
        raise ValidationFailed('missing input', 'inputs.profile')
    profile = _document(inputs, 'profile', parametric.FrequencyProfile.from_json)
    t_start = _number(inputs, 't_start') if 't_start' in inputs else None
    t_end = _number(inputs, 't_end') if 't_end' in inputs else None
    trace, pair = parametric.bogoliubov(profile, t_start, t_end, tol['ode_tol'])
    summary = {**pair.to_json(), 'wronskian_drift': trace.wronskian_drift,
               'omega_in': trace.omega_in, 't_start': trace.t_start, 't_end': trace.t_end}
    if profile.kind == 'modulated':
        summary['growth_rate'] = parametric.growth_rate(trace, parametric.plateau(profile))
    return {'mode': trace.to_frame()}, {'bogoliubov': pair.to_json()}, summary


RUNNERS = {
    'synthesize': _run_synthesize,
    'respond': _run_respond,
    'harmonic': _run_harmonic,
    'nlevel': _run_nlevel,
    'anharmonic': _run_anharmonic,
    'dispersive': _run_dispersive,
    'parametric': _run_parametric,
}


# ===============================================
# === EXECUTION ================================
# ===============================================

def _select_outputs(manifest, tables, documents):
    available = {f'{name}.csv' for name in tables} | {f'{name}.json' for name in documents}
    if not manifest.outputs:
        return available
    for index, name in enumerate(manifest.outputs):
        if name not in available:
            raise ValidationFailed(f'unknown output, expected one of {sorted(available)}',
                                   f'outputs[{index}]', value=name)
    return set(manifest.outputs)


def run_experiment(manifest, out_dir=None):
    """Run one manifest and write its outputs; returns an ``ExperimentResult``."""
    if isinstance(manifest, dict):
        manifest = ExperimentManifest.from_json(manifest)
    elif isinstance(manifest, (str, Path)):
        manifest = ExperimentManifest.load(manifest)
    inputs, input_digests = resolve_inputs(manifest.inputs)
    tolerances = manifest.resolved_tolerances()
    key = digest({'kind': manifest.kind, 'inputs': inputs, 'tolerances': tolerances,
                  'outputs': sorted(manifest.outputs)})
    directory = resolve_out_dir(out_dir) / f'{manifest.kind}-{key[:config.DIGEST_PREFIX]}'

    started = datetime.now(timezone.utc)
    clock = time.perf_counter()
    logger.info('running %s experiment %s', manifest.kind, key[:config.DIGEST_PREFIX])
    try:
        tables, documents, summary = RUNNERS[manifest.kind](inputs, tolerances)
    except SuperoscError as e:
        raise e.with_context(experiment=manifest.kind, digest=key[:config.DIGEST_PREFIX])
    elapsed = time.perf_counter() - clock

    selected = _select_outputs(manifest, tables, documents)
    written = []
    for name, frame in tables.items():
        if f'{name}.csv' in selected:
            write_csv(frame, directory / f'{name}.csv')
            written.append(f'{name}.csv')
    for name, document in documents.items():
        if f'{name}.json' in selected:
            write_json(document, directory / f'{name}.json')
            written.append(f'{name}.json')
    written.sort()

    write_json({
        'kind': manifest.kind,
        'inputs': inputs,
        'tolerances': tolerances,
        'digest': key,
        'input_digests': input_digests,
        'outputs': written,
        'summary': summary,
    }, directory / 'manifest.json')
    write_json({'started': started.isoformat(), 'elapsed_seconds': elapsed},
               directory / 'timing.json')
    logger.info('%s experiment written to %s (%.2fs)', manifest.kind, directory, elapsed)
    return ExperimentResult(manifest.kind, key, directory, tuple(written), to_plain(summary))


# ===============================================
# === SWEEPS ===================================
# ===============================================

def set_path(document, dotted, value):
    """Set ``document[a][b]...`` for ``dotted = 'a.b...'``, creating objects on the way."""
    parts = dotted.split('.')
    if not all(parts):
        raise ValidationFailed('empty path segment', f'overrides.{dotted}')
    target = document
    for part in parts[:-1]:
        target = target.setdefault(part, {})
        if not isinstance(target, dict):
            raise ValidationFailed('path crosses a non-object value', f'overrides.{dotted}')
    target[parts[-1]] = value


def _scalar_summary(summary):
    return {k: v for k, v in summary.items()
            if isinstance(v, (int, float, str, bool)) or v is None}


def run_sweep(template, overrides, workers=None, out_dir=None):
    """
    Run ``template`` at every point of the product of ``overrides``.

    ``overrides`` maps dotted manifest paths (``inputs.omega``) to value lists;
    rows follow the product order and failed points carry their error.
    """
    if isinstance(template, ExperimentManifest):
        template = template.to_json()
    if not isinstance(overrides, dict):
        raise ValidationFailed('overrides must map paths to lists', 'overrides')
    for path, values in overrides.items():
        if not isinstance(values, list):
            raise ValidationFailed('override values must be a list', f'overrides.{path}')
    ExperimentManifest.from_json(template)
    names = list(overrides)
    points = list(itertools.product(*(overrides[n] for n in names))) if names else []

    base = resolve_out_dir(out_dir)
    sweep_key = digest({'template': template, 'overrides': overrides})
    directory = base / f'sweep-{sweep_key[:config.DIGEST_PREFIX]}'

    def run(point):
        document = copy.deepcopy(template)
        for name, value in zip(names, point):
            set_path(document, name, value)
        return run_experiment(document, base)

    outcomes = ordered_map(run, points, workers)
    rows = []
    for point, (result, error) in zip(points, outcomes):
        row = {name: canonical_json(value) if isinstance(value, (list, dict)) else value
               for name, value in zip(names, point)}
        if error is None:
            row.update(status='ok', error='', digest=result.digest[:config.DIGEST_PREFIX],
                       directory=result.directory.name)
            row.update(_scalar_summary(result.summary))
        else:
            row.update(status='error', error=f'{type(error).__name__}: {error}', digest='',
                       directory='')
        rows.append(row)
    frame = pd.DataFrame(rows, columns=None if rows else
                         names + ['status', 'error', 'digest', 'directory'])
    write_csv(frame, directory / 'sweep.csv')
    write_json({'template': template, 'overrides': overrides, 'points': len(points)},
               directory / 'manifest.json')
    failures = sum(1 for _, error in outcomes if error is not None)
    logger.info('sweep of %d points done, %d failed', len(points), failures)
    return SweepResult(frame, directory)
