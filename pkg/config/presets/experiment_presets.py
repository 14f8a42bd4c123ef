#!/usr/bin/env python3
"""
Experiment Presets
==================

Ready-made experiment manifests for the standard runs. Each preset returns a
fresh manifest dict that ``run_experiment`` accepts directly, or that can be
used as a sweep template.
"""

import copy
import math
import re

import config
from src.core.errors import ValidationFailed


def _alternating_constraints():
    n_min, n_max = config.FIG1_INDEX_RANGE
    return {
        'bandlimit': config.FIG1_BANDLIMIT,
        'points': [[float(n), float((-1) ** (n % 2))] for n in range(n_min, n_max + 1)],
    }


def _grid(start, stop, step):
    return f'{start}:{stop}:{step}'


# Preset 1: Superoscillating alternating sequence
def superoscillation_preset():
    """Alternating +-1 samples at unit spacing under a bandlimit of pi/2."""
    return {
        'kind': 'synthesize',
        'inputs': {
            'constraints': _alternating_constraints(),
            'window': list(config.FIG1_WINDOW),
            'grid': _grid(-config.FIG1_HORIZON, config.FIG1_HORIZON,
                          config.CHARACTERIZE_GRID_STEP),
        },
        'tolerances': {'precision': 'machine'},
    }


# Preset 2: Temporary resonance at a probe above the band
def temporary_resonance_preset():
    """Running Fourier transform of the alternating signal probed at pi."""
    return {
        'kind': 'respond',
        'inputs': {
            'constraints': _alternating_constraints(),
            'omega': config.FIG2_PROBE,
            'grid': _grid(*config.FIG2_GRID),
            'tail': 'analytic',
        },
    }


# Preset 3: Quartic oscillator level gaps
def anharmonic_gaps_preset():
    return {
        'kind': 'anharmonic',
        'inputs': {
            'mode': 'spectrum',
            'frequency': 1.0,
            'coupling': config.FIG3_COUPLING,
            'truncation': config.FIG3_TRUNCATION,
        },
    }


# Preset 4: Parametric resonance scan
def parametric_scan_preset():
    """Modulation frequency scan at 5% depth over a plateau of ~160 time units."""
    return {
        'kind': 'parametric',
        'inputs': {
            'mode': 'scan',
            'omega0': 1.0,
            'depth': 0.05,
            'envelope_width': 160.0,
        },
    }


# Preset 5: Fractional resonance of the quartic oscillator
def fractional_resonance_preset():
    """Drive band below w but 3 * band above it: the cube of q0 resonates."""
    bandlimit = 0.6
    spacing = math.pi / bandlimit
    return {
        'kind': 'anharmonic',
        'inputs': {
            'mode': 'classical',
            'frequency': 1.0,
            'coupling': 0.01,
            'truncation': 16,
            'signal': {
                'bandlimit': bandlimit,
                'centers': [-spacing, 0.0, spacing],
                'weights': [1.0, 1.0, 1.0],
            },
            'grid': _grid(-40.0, 200.0, 0.1),
            'tail': 'none',
        },
    }


# Preset 6: Dispersive mode driven below both roots
def dispersive_preset():
    bandlimit = 0.5
    spacing = math.pi / bandlimit
    return {
        'kind': 'dispersive',
        'inputs': {
            'k': 1.0,
            'cutoff': 10.0,
            'method': 'band',
            'signal': {
                'bandlimit': bandlimit,
                'centers': [k * spacing for k in range(4)],
                'weights': [1.0, 3.0, 3.0, 1.0],
            },
            'grid': _grid(-20.0, 600.0, 0.25),
        },
    }


PRESETS = {
    'fig1': superoscillation_preset,
    'fig2': temporary_resonance_preset,
    'fig3': anharmonic_gaps_preset,
    'parametric': parametric_scan_preset,
    'fractional': fractional_resonance_preset,
    'dispersive': dispersive_preset,
}


def get_preset(preset_name):
    """Manifest for ``preset_name``; raises ``ValidationFailed`` for unknown names."""
    if not isinstance(preset_name, str) or len(preset_name) > 50:
        raise ValidationFailed('invalid preset name', 'preset')

    # Sanitize preset name
    preset_name = re.sub(r'[^a-zA-Z0-9_-]', '', preset_name.lower())

    if preset_name not in PRESETS:
        raise ValidationFailed(f'unknown preset, available: {", ".join(PRESETS)}', 'preset',
                               value=preset_name)
    return copy.deepcopy(PRESETS[preset_name]())
