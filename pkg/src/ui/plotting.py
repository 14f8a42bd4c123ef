"""
SVG Plotting
============

Line plots of CSV columns written as self-contained, byte-stable SVG. The
figure is built with matplotlib's object API (no pyplot state) inside an
rc context that fixes the SVG id salt, keeps text as ``<text>`` elements and
turns path simplification off so every data point reaches the file.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
from matplotlib.figure import Figure
from matplotlib.ticker import LogLocator, NullFormatter

import config
from src.core.errors import MissingColumn, ValidationFailed
from src.core.utils import load_csv

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Series:
    csv: str
    x: str
    y: str
    label: str = ''
    marker: str = ''


@dataclass(frozen=True)
class PlotSpec:
    """
    One panel of series, optionally followed by stacked ``panels``.

    Only the top-level spec needs ``output``; stacked panels share its width
    and are drawn below it in order.
    """

    series: tuple
    output: str = ''
    log_x: bool = False
    log_y: bool = False
    title: str = ''
    x_label: str = ''
    y_label: str = ''
    x_range: tuple = None
    panels: tuple = field(default=())

    @classmethod
    def from_json(cls, document, field_path=''):
        if not isinstance(document, dict):
            raise ValidationFailed('plot spec must be a JSON object', field_path)
        prefix = f'{field_path}.' if field_path else ''
        raw_series = document.get('series')
        if not isinstance(raw_series, list) or not raw_series:
            raise ValidationFailed('series must be a non-empty list', f'{prefix}series')
        series = []
        for index, item in enumerate(raw_series):
            if not isinstance(item, dict) or not all(k in item for k in ('csv', 'x', 'y')):
                raise ValidationFailed('series entries need csv, x and y',
                                       f'{prefix}series[{index}]')
            series.append(Series(str(item['csv']), str(item['x']), str(item['y']),
                                 str(item.get('label', '')), str(item.get('marker', ''))))
        x_range = document.get('x_range')
        if x_range is not None:
            if not isinstance(x_range, list) or len(x_range) != 2:
                raise ValidationFailed('x_range must be [min, max]', f'{prefix}x_range')
            x_range = tuple(float(v) for v in x_range)
        panels = tuple(cls.from_json(p, f'{prefix}panels[{i}]')
                       for i, p in enumerate(document.get('panels', [])))
        return cls(tuple(series), str(document.get('output', '')),
                   bool(document.get('log_x', False)), bool(document.get('log_y', False)),
                   str(document.get('title', '')), str(document.get('x_label', '')),
                   str(document.get('y_label', '')), x_range, panels)


def _rc():
    return {
        'svg.hashsalt': config.SVG_HASH_SALT,
        'svg.fonttype': 'none',
        'path.simplify': False,
        'axes.unicode_minus': False,
    }


def _read_series(series, field_path, cache):
    path = Path(series.csv)
    if path not in cache:
        cache[path] = load_csv(path, f'{field_path}.csv')
    frame = cache[path]
    for axis in ('x', 'y'):
        column = getattr(series, axis)
        if column not in frame.columns:
            raise MissingColumn(f'column {column!r} not in {path.name}', f'{field_path}.{axis}',
                                available=list(frame.columns))
    return frame[series.x].to_numpy(), frame[series.y].to_numpy()


def _decade_axis(axis):
    axis.set_major_locator(LogLocator(base=10.0, numticks=12))
    axis.set_minor_locator(LogLocator(base=10.0, subs=tuple(range(2, 10)), numticks=12))
    axis.set_minor_formatter(NullFormatter())


def _draw_panel(ax, panel, field_path, cache):
    for index, series in enumerate(panel.series):
        x, y = _read_series(series, f'{field_path}series[{index}]', cache)
        ax.plot(x, y, label=series.label or None, linewidth=config.LINE_WIDTH,
                marker=series.marker or None)
    if panel.log_x:
        ax.set_xscale('log')
        _decade_axis(ax.xaxis)
    if panel.log_y:
        ax.set_yscale('log')
        _decade_axis(ax.yaxis)
    if panel.x_range:
        ax.set_xlim(*panel.x_range)
    ax.set_title(panel.title)
    ax.set_xlabel(panel.x_label)
    ax.set_ylabel(panel.y_label)
    if any(s.label for s in panel.series):
        ax.legend()


def build_figure(spec):
    """Figure with one axes per panel; raises ``MissingColumn`` for absent columns."""
    panels = (spec,) + tuple(spec.panels)
    width, height = config.FIGURE_SIZE
    figure = Figure(figsize=(width, height * len(panels)))
    cache = {}
    for index, panel in enumerate(panels):
        ax = figure.add_subplot(len(panels), 1, index + 1)
        prefix = '' if index == 0 else f'panels[{index - 1}].'
        _draw_panel(ax, panel, prefix, cache)
    figure.tight_layout()
    return figure


def emit_plot(spec):
    """Write ``spec`` to ``spec.output`` as SVG and return the path."""
    if not spec.output:
        raise ValidationFailed('plot output path is required', 'output')
    output = Path(spec.output)
    output.parent.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context(_rc()):
        figure = build_figure(spec)
        figure.savefig(output, format='svg', metadata={'Date': None})
    logger.info('wrote %s', output)
    return output
