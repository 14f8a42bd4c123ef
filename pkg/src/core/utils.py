"""
Utility Functions
=================

Input loading, time grids, canonical JSON and digests, CSV/JSON writers,
configuration overrides and the ordered worker pool used by sweeps.
"""

import hashlib
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pandas as pd

import config
from src.core.errors import ValidationFailed
from tools.validation import input_validator

logger = logging.getLogger(__name__)


# ===============================================
# === INPUT FILES ==============================
# ===============================================

def load_json(path, field_path=''):
    """Read a JSON input file, converting every failure into ``ValidationFailed``."""
    ok, message = input_validator.validate_input_path(path, {'.json'})
    if not ok:
        raise ValidationFailed(message, field_path or str(path))
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            return json.load(handle)
    except json.JSONDecodeError as e:
        raise ValidationFailed(f'invalid JSON: {e.msg}', field_path or str(path),
                               line=e.lineno, column=e.colno) from e


def load_csv(path, field_path=''):
    ok, message = input_validator.validate_input_path(path, {'.csv'})
    if not ok:
        raise ValidationFailed(message, field_path or str(path))
    return pd.read_csv(path)


def parse_grid(text, field_path='grid'):
    """``start:stop:step`` (stop inclusive) to an evenly spaced array."""
    if isinstance(text, (list, tuple)):
        parts = list(text)
    else:
        parts = str(text).split(':')
    if len(parts) != 3:
        raise ValidationFailed('grid must be start:stop:step', field_path, value=text)
    try:
        start, stop, step = (float(p) for p in parts)
    except (TypeError, ValueError) as e:
        raise ValidationFailed('grid entries must be numbers', field_path, value=text) from e
    if not all(math.isfinite(v) for v in (start, stop, step)):
        raise ValidationFailed('grid entries must be finite', field_path, value=text)
    if step <= 0 or stop < start:
        raise ValidationFailed('grid needs step > 0 and stop >= start', field_path, value=text)
    count = int(round((stop - start) / step)) + 1
    return np.linspace(start, stop, count)


def check_grid(grid, field_path='grid'):
    grid = np.asarray(grid, dtype=float).reshape(-1)
    if grid.size == 0:
        raise ValidationFailed('time grid is empty', field_path)
    if not np.all(np.isfinite(grid)):
        raise ValidationFailed('time grid must be finite', field_path)
    if grid.size > 1 and not np.all(np.diff(grid) > 0):
        raise ValidationFailed('time grid must be strictly increasing', field_path)
    return grid


# ===============================================
# === CANONICAL JSON & DIGESTS =================
# ===============================================

def to_plain(value):
    """Numpy containers and scalars to plain Python values."""
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_plain(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


def canonical_json(value):
    """Sorted keys, no whitespace, floats with ``CSV_DIGITS`` significant digits."""
    value = to_plain(value)
    if isinstance(value, dict):
        items = sorted(value.items())
        return '{' + ','.join(json.dumps(k) + ':' + canonical_json(v) for k, v in items) + '}'
    if isinstance(value, list):
        return '[' + ','.join(canonical_json(v) for v in value) + ']'
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            return json.dumps(str(value))
        return format(value, f'.{config.CSV_DIGITS}g')
    return json.dumps(value)


def digest(value):
    return hashlib.sha256(canonical_json(value).encode('utf-8')).hexdigest()


# ===============================================
# === OUTPUT ===================================
# ===============================================

def resolve_out_dir(out=None):
    return Path(out or os.environ.get(config.OUT_DIR_ENV) or config.DEFAULT_OUT_DIR)


def write_csv(frame, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=f'%.{config.CSV_DIGITS}g', lineterminator='\n')
    logger.debug('wrote %s (%d rows)', path, len(frame))
    return path


def write_json(document, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(to_plain(document), indent=2, sort_keys=True, allow_nan=True)
    path.write_text(text + '\n', encoding='utf-8', newline='\n')
    logger.debug('wrote %s', path)
    return path


def complex_columns(name, values):
    """Split a complex series into ``re_<name>`` and ``im_<name>`` columns."""
    values = np.asarray(values)
    return {f're_{name}': values.real, f'im_{name}': values.imag}


# ===============================================
# === CONFIGURATION OVERRIDES ==================
# ===============================================

def validate_overrides(overrides, field_root='config'):
    if not isinstance(overrides, dict):
        raise ValidationFailed('overrides must be a JSON object', field_root)
    for name, value in overrides.items():
        ok, message = input_validator.validate_setting_name(name)
        if ok:
            ok, message = input_validator.validate_setting_value(value, name)
        if not ok:
            raise ValidationFailed(message, f'{field_root}.{name}', value=value)


def apply_overrides(overrides):
    """Set config constants in place; returns the previous values."""
    validate_overrides(overrides)
    previous = {}
    for name, value in overrides.items():
        previous[name] = getattr(config, name)
        if isinstance(previous[name], tuple) and isinstance(value, list):
            value = tuple(value)
        setattr(config, name, value)
        logger.info('config override %s = %r', name, value)
    return previous


@contextmanager
def config_overrides(overrides):
    previous = apply_overrides(overrides or {})
    try:
        yield
    finally:
        for name, value in previous.items():
            setattr(config, name, value)


# ===============================================
# === WORKER POOL ==============================
# ===============================================

def ordered_map(func, items, workers=None):
    """
    Apply ``func`` to every item on a thread pool.

    Results come back in input order as ``(value, error)`` pairs; an exception
    raised for one item is captured rather than propagated.
    """
    items = list(items)
    workers = max(1, int(workers or config.DEFAULT_WORKERS))

    def guarded(item):
        try:
            return func(item), None
        except Exception as e:  # per-item failures are reported, not fatal
            logger.warning('item failed: %s', e)
            return None, e

    if workers == 1 or len(items) <= 1:
        return [guarded(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(guarded, items))
