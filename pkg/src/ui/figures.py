"""
Standard Figures
================

The three reference figures, each written with its data under
``<out>/<name>/``:

* ``fig1``: the alternating superoscillation, globally on a log scale and
  zoomed on the superoscillating window;
* ``fig2``: temporary excitation |S(t)|^2 of a probe above the band;
* ``fig3``: level gaps of the quartic oscillator.
"""

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

import config
from src.core.errors import ValidationFailed
from src.core.signals import ConstraintSpec, characterize, evaluate, solve_min_norm
from src.core.utils import parse_grid, resolve_out_dir, to_plain, write_csv, write_json
from src.systems.anharmonic import AnharmonicSpec, diagonalize
from src.systems.response import asymptotic_value, partial_fourier
from src.ui.plotting import PlotSpec, Series, emit_plot

logger = logging.getLogger(__name__)

FIGURES = ('fig1', 'fig2', 'fig3')


@dataclass(frozen=True)
class FigureResult:
    name: str
    outputs: tuple
    summary: dict


def _alternating_signal(precision=None):
    spec = ConstraintSpec.alternating(config.FIG1_BANDLIMIT, *config.FIG1_INDEX_RANGE)
    return solve_min_norm(spec, precision)


def fig1(out_dir=None, precision=None):
    directory = resolve_out_dir(out_dir) / 'fig1'
    J = _alternating_signal(precision)
    report = characterize(J, config.FIG1_WINDOW)
    horizon = config.FIG1_HORIZON
    grid = parse_grid((-horizon, horizon, config.CHARACTERIZE_GRID_STEP))
    values = evaluate(J, grid)

    write_json({'signal': J.to_json(), 'characterization': report.to_json()},
               directory / 'signal.json')
    csv = directory / 'signal.csv'
    write_csv(pd.DataFrame({'time': grid, 'f': values, 'abs_f': np.abs(values)}), csv)
    plot = PlotSpec(
        series=(Series(str(csv), 'time', 'abs_f'),),
        output=str(directory / 'fig1.svg'),
        log_y=True,
        title='Superoscillating signal',
        x_label='t',
        y_label='|f(t)|',
        panels=(PlotSpec(series=(Series(str(csv), 'time', 'f'),),
                         x_label='t', y_label='f(t)',
                         x_range=tuple(config.FIG1_WINDOW)),),
    )
    emit_plot(plot)
    summary = {'dynamic_range': report.dynamic_range,
               'local_period_estimate': report.local_period_estimate,
               'condition_number': J.condition_number}
    return FigureResult('fig1', ('fig1.svg', 'signal.csv', 'signal.json'), summary)


def fig2(out_dir=None, precision=None, quad_tol=None):
    directory = resolve_out_dir(out_dir) / 'fig2'
    J = _alternating_signal(precision)
    trace = partial_fourier(J, config.FIG2_PROBE, parse_grid(config.FIG2_GRID), quad_tol)
    csv = directory / 'response.csv'
    write_csv(trace.to_frame(), csv)
    emit_plot(PlotSpec(
        series=(Series(str(csv), 'time', 'excitation'),),
        output=str(directory / 'fig2.svg'),
        title='Temporary excitation above the band',
        x_label='t',
        y_label='|S(t)|^2',
    ))
    peak = int(np.argmax(trace.excitation))
    summary = {'peak_excitation': float(trace.excitation[peak]),
               'peak_time': float(trace.times[peak]),
               'final_excitation': float(trace.excitation[-1]),
               'asymptotic_excitation': abs(asymptotic_value(J, config.FIG2_PROBE)) ** 2}
    return FigureResult('fig2', ('fig2.svg', 'response.csv'), summary)


def fig3(out_dir=None):
    directory = resolve_out_dir(out_dir) / 'fig3'
    spectrum = diagonalize(AnharmonicSpec(1.0, config.FIG3_COUPLING, config.FIG3_TRUNCATION))
    write_json(spectrum.to_json(), directory / 'spectrum.json')
    csv = directory / 'gaps.csv'
    write_csv(spectrum.gaps_frame(), csv)
    emit_plot(PlotSpec(
        series=(Series(str(csv), 'index', 'gap', marker='o'),),
        output=str(directory / 'fig3.svg'),
        title='Quartic oscillator level gaps',
        x_label='n',
        y_label='E(n+1) - E(n)',
    ))
    summary = {'converged': spectrum.converged, 'first_gap': float(spectrum.gaps[0])}
    return FigureResult('fig3', ('fig3.svg', 'gaps.csv', 'spectrum.json'), summary)


def render_figure(name, out_dir=None, precision=None, quad_tol=None):
    if name not in FIGURES:
        raise ValidationFailed(f'unknown figure, expected one of {list(FIGURES)}', 'figure',
                               value=name)
    logger.info('rendering %s', name)
    if name == 'fig1':
        result = fig1(out_dir, precision)
    elif name == 'fig2':
        result = fig2(out_dir, precision, quad_tol)
    else:
        result = fig3(out_dir)
    return FigureResult(result.name, result.outputs, to_plain(result.summary))
