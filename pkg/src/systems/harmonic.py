"""
Driven Harmonic Oscillator
==========================

A linearly driven oscillator H = w (a^+ a + 1/2) + J(t) q stays in a coherent
state. Every level amplitude follows from the partial Fourier transform S_w
of the drive:

    c_n(t) = exp(Phi(t)) S(t)^n / sqrt(n!),
    Phi(t) = (-i / sqrt(2 w)) integral^t J(s) exp(-i w s) S(s) ds,

with Re Phi = -|S|^2 / 2, so the populations are Poisson with mean |S|^2.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy.stats import poisson

import config
from src.core.errors import ValidationFailed
from src.core.quadrature import cumulative_quadrature
from src.core.signals import SincExpansion
from src.core.utils import check_grid, complex_columns
from src.systems.nlevel import QuantumSystemSpec
from src.systems.response import (
    exact_running_integral,
    has_closed_form,
    panel_width,
    partial_fourier,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GroundStateOverlap:
    """
    Ground-state overlap in both conventions.

    ``instantaneous`` is |<0|psi>| = exp(-|S|^2/2); ``state`` is the complex
    Schroedinger-picture amplitude exp(Phi); ``quoted_modulus`` is exp(-|S|^2).
    """

    times: np.ndarray
    instantaneous: np.ndarray
    state: np.ndarray
    quoted_modulus: np.ndarray


@dataclass(frozen=True, eq=False)
class HarmonicDriveResult:
    frequency: float
    trace: object
    overlap: np.ndarray
    state_overlap: np.ndarray
    quoted_overlap_modulus: np.ndarray
    level_amplitudes: np.ndarray
    phase_integral: np.ndarray
    n_max: int
    tail_bound: float

    @property
    def times(self):
        return self.trace.times

    def to_frame(self):
        frame = self.trace.to_frame()
        frame['overlap'] = self.overlap
        for name, values in complex_columns('state_overlap', self.state_overlap).items():
            frame[name] = values
        frame['quoted_overlap_modulus'] = self.quoted_overlap_modulus
        return frame

    def populations_frame(self):
        columns = {'time': self.times}
        populations = np.abs(self.level_amplitudes) ** 2
        for level in range(populations.shape[1]):
            columns[f'p{level}'] = populations[:, level]
        return pd.DataFrame(columns)

    def summary(self):
        excitation = self.trace.excitation
        peak = int(np.argmax(excitation))
        return {
            'frequency': self.frequency,
            'n_max': self.n_max,
            'tail_bound': self.tail_bound,
            'peak_excitation': float(excitation[peak]),
            'peak_time': float(self.times[peak]),
            'final_excitation': float(excitation[-1]),
            'tail_mode': self.trace.tail_mode,
            'truncation_bound': self.trace.truncation_bound,
        }


# ===============================================
# === LADDER SYSTEM ============================
# ===============================================

def ladder_position_matrix(omega, size):
    """Position operator q in the first ``size`` number states: <n-1|q|n> = sqrt(n / 2w)."""
    if size < 1:
        raise ValidationFailed('basis size must be positive', 'size', value=size)
    off = np.sqrt(np.arange(1, size) / (2.0 * omega))
    return np.diag(off, 1) + np.diag(off, -1)


def harmonic_ladder_system(omega, n_levels, delta=1.0):
    """Truncated oscillator as an N-level system, E_n = (n + 1/2) w, Q = q."""
    if not omega > 0:
        raise ValidationFailed('frequency must be positive', 'omega', value=omega)
    energies = (np.arange(n_levels) + 0.5) * omega
    return QuantumSystemSpec(energies, ladder_position_matrix(omega, n_levels), delta)


# ===============================================
# === EXCITATION & OVERLAPS ====================
# ===============================================

def number_expectation(J, omega, grid, quad_tol=None, tail=None):
    """<N(t)> = |S_w(t)|^2."""
    return partial_fourier(J, omega, grid, quad_tol, tail).excitation


def level_cutoff(peak_excitation):
    """Smallest N whose Poisson tail P(n > N) at the peak mean is below POISSON_TAIL_TOL."""
    if peak_excitation <= 0:
        return 0, 0.0
    n_max = int(poisson.isf(config.POISSON_TAIL_TOL, peak_excitation))
    while n_max > 0 and poisson.sf(n_max - 1, peak_excitation) < config.POISSON_TAIL_TOL:
        n_max -= 1
    while poisson.sf(n_max, peak_excitation) >= config.POISSON_TAIL_TOL \
            and n_max < config.MAX_LEVELS:
        n_max += 1
    n_max = min(n_max, config.MAX_LEVELS)
    if poisson.sf(n_max, peak_excitation) >= config.POISSON_TAIL_TOL:
        logger.warning('level cutoff capped at %d for peak excitation %.3g',
                       config.MAX_LEVELS, peak_excitation)
    return n_max, float(poisson.sf(n_max, peak_excitation))


def _phase_imaginary(J, omega, trace, quad_tol):
    """Im Phi on the trace grid, accumulated from the same lower limit as S."""
    if not has_closed_form(J):
        raise ValidationFailed('phase exponent needs a drive with a closed-form transform',
                               'signal', drive=type(J).__name__)
    grid = trace.times
    first = float(grid[0])
    reference = trace.t_start if math.isfinite(trace.t_start) else None
    if reference is not None:
        start = reference
    elif isinstance(J, SincExpansion):
        # integrand decays like 1/t^2
        start = min(first, J.support[0]) - config.MAX_TAIL_SPAN
    else:
        start = min(first, J.support[0])
    root = math.sqrt(2.0 * omega)
    base = 0.0j if reference is None else exact_running_integral(J, omega, reference)

    def integrand(s):
        s_values = (-1j / root) * (exact_running_integral(J, omega, s) - base)
        return -np.real(J(s) * np.exp(-1j * omega * s) * s_values) / root

    extra = [start] if start < first else []
    extra += [b for b in getattr(J, 'breakpoints', ()) if start < b < grid[-1]]
    edges = np.union1d(grid, np.asarray(extra, dtype=float)) if extra else grid
    index = np.searchsorted(edges, grid)
    values, error = cumulative_quadrature(integrand, edges, panel_width(omega, J.bandlimit),
                                          quad_tol)
    logger.debug('phase exponent from t=%.4g, quadrature error %.2e', start, error)
    return np.real(values[index])


def _phase_exponent(J, omega, trace, quad_tol):
    return -0.5 * trace.excitation + 1j * _phase_imaginary(J, omega, trace, quad_tol)


def ground_state_overlap(J, omega, grid, quad_tol=None, tail=None):
    """Both ground-state overlap conventions, labeled."""
    quad_tol = quad_tol or config.DEFAULT_QUAD_TOL
    trace = partial_fourier(J, omega, grid, quad_tol, tail)
    phi = _phase_exponent(J, omega, trace, quad_tol)
    return GroundStateOverlap(trace.times, np.exp(-0.5 * trace.excitation), np.exp(phi),
                              np.exp(-trace.excitation))


# ===============================================
# === LEVEL AMPLITUDES =========================
# ===============================================

def _coefficients(phi, amplitudes, n_max):
    levels = np.empty((amplitudes.size, n_max + 1), dtype=complex)
    levels[:, 0] = np.exp(phi)
    for n in range(1, n_max + 1):
        levels[:, n] = levels[:, n - 1] * amplitudes / math.sqrt(n)
    return levels


def closed_form_coefficients(J, omega, grid, n_max=None, quad_tol=None, tail=None):
    """c_n(t) for n <= n_max; ``n_max=None`` picks the Poisson cutoff at the peak |S|^2."""
    quad_tol = quad_tol or config.DEFAULT_QUAD_TOL
    trace = partial_fourier(J, omega, grid, quad_tol, tail)
    if n_max is None:
        n_max, _ = level_cutoff(float(np.max(trace.excitation)))
    elif isinstance(n_max, bool) or not isinstance(n_max, (int, np.integer)) or n_max < 0:
        raise ValidationFailed('n_max must be a non-negative integer', 'n_max', value=n_max)
    phi = _phase_exponent(J, omega, trace, quad_tol)
    return _coefficients(phi, trace.amplitudes, int(n_max))


def drive_harmonic(J, omega, grid, quad_tol=None, tail=None, n_max=None):
    """Excitation, overlaps and level amplitudes of a driven oscillator."""
    quad_tol = quad_tol or config.DEFAULT_QUAD_TOL
    grid = check_grid(grid)
    trace = partial_fourier(J, omega, grid, quad_tol, tail)
    peak = float(np.max(trace.excitation))
    if n_max is None:
        n_max, tail_bound = level_cutoff(peak)
    else:
        tail_bound = float(poisson.sf(n_max, peak)) if peak > 0 else 0.0
    phi = _phase_exponent(J, omega, trace, quad_tol)
    levels = _coefficients(phi, trace.amplitudes, n_max)
    logger.info('harmonic drive w=%.6g: peak <N> %.4g, final <N> %.4g, N_max %d',
                omega, peak, trace.excitation[-1], n_max)
    return HarmonicDriveResult(
        frequency=float(omega),
        trace=trace,
        overlap=np.exp(-0.5 * trace.excitation),
        state_overlap=np.exp(phi),
        quoted_overlap_modulus=np.exp(-trace.excitation),
        level_amplitudes=levels,
        phase_integral=1j * math.sqrt(2.0 * omega) * phi,
        n_max=int(n_max),
        tail_bound=tail_bound,
    )
