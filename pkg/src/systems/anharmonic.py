"""
Anharmonic Oscillator
=====================

The quartic oscillator H = w (a^+ a + 1/2) + lambda q^4 in a truncated
number basis, and the classical perturbative response of a cubic restoring
force, where q0^3 is bandlimited to 3 Omega and can therefore drive an
oscillator the original drive cannot reach.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy.integrate import simpson
from scipy.linalg import eigh

import config
from src.core.errors import ValidationFailed
from src.core.signals import SincExpansion, evaluate_spectrum
from src.core.utils import check_grid
from src.systems.harmonic import ladder_position_matrix
from src.systems.nlevel import QuantumSystemSpec, integrate_exact
from src.systems.response import (
    CallableDrive,
    exact_running_integral,
    has_closed_form,
    retarded_response,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AnharmonicSpec:
    frequency: float
    coupling: float
    truncation: int

    def __post_init__(self):
        for name in ('frequency', 'coupling'):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) \
                    or not math.isfinite(value):
                raise ValidationFailed('must be a finite number', name, value=value)
        if self.frequency <= 0:
            raise ValidationFailed('frequency must be positive', 'frequency',
                                   value=self.frequency)
        if self.coupling < 0:
            raise ValidationFailed('coupling must be non-negative', 'coupling',
                                   value=self.coupling)
        if isinstance(self.truncation, bool) or not isinstance(self.truncation, int) \
                or self.truncation < 2:
            raise ValidationFailed('truncation must be an integer >= 2', 'truncation',
                                   value=self.truncation)
        object.__setattr__(self, 'frequency', float(self.frequency))
        object.__setattr__(self, 'coupling', float(self.coupling))

    @classmethod
    def from_json(cls, document):
        if not isinstance(document, dict):
            raise ValidationFailed('anharmonic document must be a JSON object', '')
        for key in ('frequency', 'coupling', 'truncation'):
            if key not in document:
                raise ValidationFailed('missing field', key)
        return cls(document['frequency'], document['coupling'], document['truncation'])

    def to_json(self):
        return {'frequency': self.frequency, 'coupling': self.coupling,
                'truncation': self.truncation}


@dataclass(frozen=True, eq=False)
class SpectrumSummary:
    spec: AnharmonicSpec
    eigenvalues: np.ndarray
    gaps: np.ndarray
    eigenvectors: np.ndarray
    position_matrix: np.ndarray
    converged: bool
    stability: float

    def to_json(self):
        return {
            'spec': self.spec.to_json(),
            'eigenvalues': self.eigenvalues.tolist(),
            'gaps': self.gaps.tolist(),
            'converged': bool(self.converged),
            'stability': self.stability,
            'position_matrix': self.position_matrix.tolist(),
        }

    def gaps_frame(self):
        return pd.DataFrame({
            'index': np.arange(self.gaps.size),
            'lower': self.eigenvalues[:-1],
            'upper': self.eigenvalues[1:],
            'gap': self.gaps,
        })


@dataclass(frozen=True, eq=False)
class ClassicalPerturbativeResult:
    times: np.ndarray
    q0: np.ndarray
    q1: np.ndarray
    q0_cubed_spectrum_at_omega: complex
    q1_asymptotic_amplitude: float
    q0_asymptotic_amplitude: float

    def to_frame(self):
        return pd.DataFrame({'time': self.times, 'q0': self.q0, 'q1': self.q1})

    def summary(self):
        value = self.q0_cubed_spectrum_at_omega
        return {
            're_q0_cubed_spectrum': value.real,
            'im_q0_cubed_spectrum': value.imag,
            'q0_asymptotic_amplitude': self.q0_asymptotic_amplitude,
            'q1_asymptotic_amplitude': self.q1_asymptotic_amplitude,
        }


# ===============================================
# === SPECTRUM =================================
# ===============================================

def build_hamiltonian(spec):
    """diag((n + 1/2) w) + lambda [X^4]_{N x N}, with X built in N + QUARTIC_PAD states."""
    n = spec.truncation
    padded = ladder_position_matrix(spec.frequency, n + config.QUARTIC_PAD)
    quartic = np.linalg.matrix_power(padded, 4)[:n, :n]
    return np.diag((np.arange(n) + 0.5) * spec.frequency) + spec.coupling * quartic


def _fix_signs(vectors):
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def diagonalize(spec, check_convergence=True):
    """Ascending eigenpairs of the truncated Hamiltonian and the position matrix in that basis."""
    eigenvalues, eigenvectors = eigh(build_hamiltonian(spec))
    eigenvectors = _fix_signs(eigenvectors)
    position = ladder_position_matrix(spec.frequency, spec.truncation)
    rotated = eigenvectors.T @ position @ eigenvectors
    rotated = 0.5 * (rotated + rotated.T)

    converged, stability = True, 0.0
    if check_convergence:
        doubled = AnharmonicSpec(spec.frequency, spec.coupling, 2 * spec.truncation)
        reference = eigh(build_hamiltonian(doubled), eigvals_only=True)
        keep = max(1, spec.truncation // 2)
        stability = float(np.max(np.abs(eigenvalues[:keep] - reference[:keep])))
        converged = stability <= config.CONVERGENCE_TOL
        if not converged:
            logger.warning('lowest %d eigenvalues moved by %.3e between N=%d and N=%d',
                           keep, stability, spec.truncation, 2 * spec.truncation)
    logger.debug('diagonalized N=%d lambda=%.4g: E0=%.10g', spec.truncation, spec.coupling,
                 eigenvalues[0])
    return SpectrumSummary(spec, eigenvalues, np.diff(eigenvalues), eigenvectors, rotated,
                           bool(converged), stability)


def hermite_functions(omega, size, x):
    """Number-state wavefunctions psi_0..psi_{size-1} at ``x``, shape (len(x), size)."""
    x = np.asarray(x, dtype=float).reshape(-1)
    xi = math.sqrt(omega) * x
    basis = np.empty((x.size, size))
    basis[:, 0] = (omega / math.pi) ** 0.25 * np.exp(-0.5 * xi ** 2)
    if size > 1:
        basis[:, 1] = math.sqrt(2.0) * xi * basis[:, 0]
    for n in range(1, size - 1):
        basis[:, n + 1] = math.sqrt(2.0 / (n + 1)) * xi * basis[:, n] \
            - math.sqrt(n / (n + 1)) * basis[:, n - 1]
    return basis


def eigenfunctions(summary, x):
    """Position-space eigenfunctions, one column per eigenvalue."""
    basis = hermite_functions(summary.spec.frequency, summary.spec.truncation, x)
    return basis @ summary.eigenvectors


# ===============================================
# === QUANTUM DRIVING ==========================
# ===============================================

def to_system(summary, delta=1.0):
    """The diagonalized oscillator as an N-level system coupled through q."""
    return QuantumSystemSpec(summary.eigenvalues, summary.position_matrix, delta)


def drive_quantum(spec, J, grid, delta=1.0, initial=0, ode_tol=None):
    summary = diagonalize(spec, check_convergence=False)
    return integrate_exact(to_system(summary, delta), J, initial, grid, ode_tol)


def compare_drives(spec, J, grid, delta=1.0, ode_tol=None):
    """|c_1|^2 under the anharmonic and the harmonic (lambda = 0) Hamiltonians."""
    harmonic = AnharmonicSpec(spec.frequency, 0.0, spec.truncation)
    anharmonic_trace = drive_quantum(spec, J, grid, delta, ode_tol=ode_tol)
    harmonic_trace = drive_quantum(harmonic, J, grid, delta, ode_tol=ode_tol)
    return pd.DataFrame({
        'time': anharmonic_trace.times,
        'p1_anharmonic': anharmonic_trace.populations[:, 1],
        'p1_harmonic': harmonic_trace.populations[:, 1],
        'p0_anharmonic': anharmonic_trace.populations[:, 0],
        'p0_harmonic': harmonic_trace.populations[:, 0],
    })


# ===============================================
# === CLASSICAL PERTURBATION ===================
# ===============================================

def cubed_spectrum(times, values, nu):
    """(1/sqrt(2 pi)) integral f(t) exp(-i nu t) dt of a sampled function, by Simpson's rule."""
    times = check_grid(times, 'times')
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    phases = np.exp(-1j * nu[:, None] * times[None, :])
    spectrum = simpson(np.asarray(values)[None, :] * phases, x=times, axis=-1)
    return spectrum / math.sqrt(2.0 * math.pi)


def _total_transform(J, nu):
    """integral_{-inf}^{inf} J(s) exp(i nu s) ds."""
    if isinstance(J, SincExpansion):
        return math.sqrt(2.0 * math.pi) * evaluate_spectrum(J, -nu)
    return complex(exact_running_integral(J, nu, J.support[1]))


def classical_perturbative(spec, J, grid, quad_tol=None, tail=None):
    """
    Zeroth and first order of q'' + w^2 q = J + (cubic) with unit coupling,

        q0 = integral^t sin(w (t - s)) / w J(s) ds,
        q1 = integral^t sin(w (t - s)) / w q0(s)^3 ds.

    q1 starts at grid[0]; q0^3 is evaluated from the closed-form transform.
    """
    if not has_closed_form(J):
        raise ValidationFailed('classical response needs a drive with a closed-form transform',
                               'signal', drive=type(J).__name__)
    omega = spec.frequency
    grid = check_grid(grid)
    q0, _ = retarded_response(J, omega, grid, quad_tol, tail)

    def q0_exact(s):
        return np.imag(np.exp(1j * omega * s) * exact_running_integral(J, -omega, s)) / omega

    cube = CallableDrive(lambda s: q0_exact(s) ** 3, 3.0 * J.bandlimit,
                         support=(float(grid[0]), math.inf))
    q1, running = retarded_response(cube, omega, grid, quad_tol, tail='none')
    cubed_at_omega = complex(running.values[-1]) / math.sqrt(2.0 * math.pi)
    q1_amplitude = abs(running.values[-1]) / omega
    q0_amplitude = abs(_total_transform(J, -omega)) / omega
    logger.info('classical response w=%.6g: |q0| -> %.4g, |q1| -> %.4g',
                omega, q0_amplitude, q1_amplitude)
    return ClassicalPerturbativeResult(grid, q0, q1, cubed_at_omega, float(q1_amplitude),
                                       float(q0_amplitude))
