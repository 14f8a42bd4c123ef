"""
Command Line Interface
======================

``superosc <command> [options]``. Every experiment command builds a manifest
and hands it to ``run_experiment``; results land in ``--out`` (or
``$SUPEROSC_OUT_DIR``, or ``out/``).

Exit codes: 0 success, 1 invalid input or usage, 2 numerical failure.
"""

import argparse
import json
import logging
import sys
from dataclasses import replace

import config
from config.presets.experiment_presets import get_preset
from src.core.errors import NumericalFailure, ValidationFailed
from src.core.utils import config_overrides, load_json
from src.systems import dispersive, response
from src.systems.sweep import ExperimentManifest, run_experiment, run_sweep
from src.ui.figures import FIGURES, render_figure
from src.ui.plotting import PlotSpec, emit_plot
from tools.config_validator import print_config_summary, report_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2


class CliArgumentParser(argparse.ArgumentParser):
    """Usage errors exit 1 so that 2 stays reserved for numerical failures."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f'{self.prog}: error: {message}\n')


# ===============================================
# === PARSER ===================================
# ===============================================

def _common_options():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='JSON object of config constant overrides')
    common.add_argument('--out', help='output directory')
    common.add_argument('--tol', type=float, help='quadrature and ODE tolerance')
    common.add_argument('--precision', choices=('machine', 'extended'))
    common.add_argument('--grid', help='time grid start:stop:step')
    common.add_argument('--quiet', action='store_true', help='warnings and errors only')
    common.add_argument('--verbose', action='store_true', help='debug logging')
    return common


def _signal_options(parser, required=True):
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument('--signal', help='sinc expansion JSON')
    group.add_argument('--constraints', help='constraint JSON to synthesize the drive from')


def build_parser():
    common = _common_options()
    parser = CliArgumentParser(prog='superosc',
                               description='Superoscillating drives and the systems they excite.')
    commands = parser.add_subparsers(dest='command', required=True,
                                     parser_class=CliArgumentParser)

    p = commands.add_parser('synthesize', parents=[common],
                            help='min-norm bandlimited signal through constraint points')
    p.add_argument('--constraints', required=True)
    p.add_argument('--window', nargs=2, type=float, metavar=('T_MIN', 'T_MAX'))
    p.add_argument('--scan-horizon', type=float)

    p = commands.add_parser('respond', parents=[common], help='running Fourier transform at a probe')
    _signal_options(p)
    p.add_argument('--omega', type=float, required=True)
    p.add_argument('--tail', choices=response.TAIL_MODES)

    p = commands.add_parser('harmonic', parents=[common], help='driven harmonic oscillator')
    _signal_options(p)
    p.add_argument('--omega', type=float, required=True)
    p.add_argument('--tail', choices=response.TAIL_MODES)
    p.add_argument('--n-max', type=int)

    p = commands.add_parser('nlevel', parents=[common], help='driven N-level system')
    _signal_options(p)
    p.add_argument('--system', required=True)
    p.add_argument('--initial', type=int, default=0)
    p.add_argument('--compare-level', type=int)

    p = commands.add_parser('anharmonic', help='quartic oscillator')
    modes = p.add_subparsers(dest='mode', required=True, parser_class=CliArgumentParser)
    for mode in ('spectrum', 'classical', 'drive'):
        q = modes.add_parser(mode, parents=[common])
        q.add_argument('--frequency', type=float, default=1.0)
        q.add_argument('--coupling', type=float, required=True)
        q.add_argument('--truncation', type=int, default=config.FIG3_TRUNCATION)
        if mode != 'spectrum':
            _signal_options(q)
        if mode == 'classical':
            q.add_argument('--tail', choices=response.TAIL_MODES)
        if mode == 'drive':
            q.add_argument('--delta', type=float)

    p = commands.add_parser('dispersive', parents=[common], help='two-root dispersive mode')
    _signal_options(p)
    p.add_argument('--k', type=float, required=True)
    p.add_argument('--cutoff', type=float, required=True)
    p.add_argument('--method', choices=dispersive.METHODS)

    p = commands.add_parser('parametric', help='oscillator with a time-dependent frequency')
    modes = p.add_subparsers(dest='mode', required=True, parser_class=CliArgumentParser)
    q = modes.add_parser('single', parents=[common])
    q.add_argument('--profile', required=True)
    q.add_argument('--t-start', type=float)
    q.add_argument('--t-end', type=float)
    q = modes.add_parser('scan', parents=[common])
    q.add_argument('--omega0', type=float, required=True)
    q.add_argument('--depth', type=float, required=True)
    q.add_argument('--envelope-width', type=float, required=True)
    q.add_argument('--mod-frequencies', help='start:stop:step')

    p = commands.add_parser('sweep', parents=[common], help='manifest over a grid of overrides')
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument('--manifest')
    source.add_argument('--preset')
    p.add_argument('--override', action='append', default=[], metavar='PATH=JSON_LIST')
    p.add_argument('--workers', type=int)

    p = commands.add_parser('figure', parents=[common], help='render a standard figure')
    p.add_argument('name', choices=FIGURES)

    p = commands.add_parser('plot', parents=[common], help='SVG line plot from a plot spec')
    p.add_argument('--spec', required=True)
    p.add_argument('--output')

    commands.add_parser('config', parents=[common], help='validate and summarize the config')
    return parser


# ===============================================
# === COMMANDS =================================
# ===============================================

def _tolerances(args):
    tolerances = {}
    if args.tol is not None:
        tolerances['quad_tol'] = args.tol
        tolerances['ode_tol'] = args.tol
    if args.precision:
        tolerances['precision'] = args.precision
    return tolerances


def _run(kind, inputs, args):
    inputs = {key: value for key, value in inputs.items() if value is not None}
    if args.grid:
        inputs['grid'] = args.grid
    manifest = ExperimentManifest(kind, inputs, _tolerances(args))
    result = run_experiment(manifest, args.out)
    logger.info('%s: %s', result.directory, ', '.join(result.outputs))
    return EXIT_OK


def _signal_inputs(args):
    return {'signal': args.signal, 'constraints': args.constraints}


def _synthesize(args):
    inputs = {'constraints': args.constraints, 'scan_horizon': args.scan_horizon}
    if args.window:
        inputs['window'] = list(args.window)
    return _run('synthesize', inputs, args)


def _respond(args):
    return _run('respond', {**_signal_inputs(args), 'omega': args.omega, 'tail': args.tail}, args)


def _harmonic(args):
    return _run('harmonic', {**_signal_inputs(args), 'omega': args.omega, 'tail': args.tail,
                             'n_max': args.n_max}, args)


def _nlevel(args):
    return _run('nlevel', {**_signal_inputs(args), 'system': args.system,
                           'initial': args.initial, 'compare_level': args.compare_level}, args)


def _anharmonic(args):
    inputs = {'mode': args.mode, 'frequency': args.frequency, 'coupling': args.coupling,
              'truncation': args.truncation}
    if args.mode != 'spectrum':
        inputs.update(_signal_inputs(args))
    inputs['tail'] = getattr(args, 'tail', None)
    inputs['delta'] = getattr(args, 'delta', None)
    return _run('anharmonic', inputs, args)


def _dispersive(args):
    return _run('dispersive', {**_signal_inputs(args), 'k': args.k, 'cutoff': args.cutoff,
                               'method': args.method}, args)


def _parametric(args):
    if args.mode == 'single':
        inputs = {'mode': 'single', 'profile': args.profile, 't_start': args.t_start,
                  't_end': args.t_end}
    else:
        inputs = {'mode': 'scan', 'omega0': args.omega0, 'depth': args.depth,
                  'envelope_width': args.envelope_width, 'mod_frequencies': args.mod_frequencies}
    return _run('parametric', inputs, args)


def _parse_override(text):
    path, sep, raw = text.partition('=')
    if not sep or not path:
        raise ValidationFailed('override must be PATH=JSON_LIST', 'override', value=text)
    try:
        values = json.loads(raw)
    except json.JSONDecodeError as e:
        raise ValidationFailed(f'override value is not JSON: {e.msg}', f'overrides.{path}') from e
    if not isinstance(values, list):
        raise ValidationFailed('override value must be a JSON list', f'overrides.{path}')
    return path, values


def _sweep(args):
    template = get_preset(args.preset) if args.preset else load_json(args.manifest, 'manifest')
    if not isinstance(template, dict):
        raise ValidationFailed('manifest must be a JSON object', 'manifest')
    template.setdefault('tolerances', {}).update(_tolerances(args))
    if args.grid:
        template.setdefault('inputs', {})['grid'] = args.grid
    overrides = dict(_parse_override(text) for text in args.override)
    if not overrides:
        result = run_experiment(template, args.out)
        logger.info('%s: %s', result.directory, ', '.join(result.outputs))
        return EXIT_OK
    result = run_sweep(template, overrides, args.workers, args.out)
    failed = int((result.frame['status'] != 'ok').sum()) if len(result.frame) else 0
    logger.info('%s: %d points, %d failed', result.directory, len(result.frame), failed)
    return EXIT_OK


def _figure(args):
    result = render_figure(args.name, args.out, args.precision, args.tol)
    logger.info('%s written: %s', result.name, ', '.join(result.outputs))
    return EXIT_OK


def _plot(args):
    spec = PlotSpec.from_json(load_json(args.spec, 'spec'))
    if args.output:
        spec = replace(spec, output=args.output)
    emit_plot(spec)
    return EXIT_OK


def _config(args):
    print_config_summary()
    print()
    return EXIT_OK if report_config() else EXIT_INVALID


COMMANDS = {
    'synthesize': _synthesize,
    'respond': _respond,
    'harmonic': _harmonic,
    'nlevel': _nlevel,
    'anharmonic': _anharmonic,
    'dispersive': _dispersive,
    'parametric': _parametric,
    'sweep': _sweep,
    'figure': _figure,
    'plot': _plot,
    'config': _config,
}


# ===============================================
# === ENTRY POINT ==============================
# ===============================================

def configure_logging(quiet=False, verbose=False):
    level = 'DEBUG' if verbose else 'WARNING' if quiet else config.LOG_LEVEL
    logging.basicConfig(level=level, format=config.LOG_FORMAT, force=True)


def cli_dispatch(argv=None):
    """Parse ``argv``, run the command and return its exit code."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_INVALID

    configure_logging(args.quiet, args.verbose)
    try:
        overrides = load_json(args.config, 'config') if args.config else {}
        with config_overrides(overrides):
            return COMMANDS[args.command](args)
    except ValidationFailed as e:
        logger.error('invalid input: %s', e)
        return EXIT_INVALID
    except NumericalFailure as e:
        logger.error('numerical failure: %s', e)
        return EXIT_NUMERICAL


def main(argv=None):
    return cli_dispatch(argv)
