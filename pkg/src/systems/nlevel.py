"""
Driven N-Level Systems
======================

A finite quantum system H = diag(E) + delta * J(t) * Q driven by a signal J,
in the interaction picture

    i dc_m/dt = sum_s delta J(t) Q_ms exp(i w_ms t) c_s,   w_ms = E_m - E_s.

The exact amplitudes come from an adaptive Runge-Kutta integration; the
first-order amplitudes reuse the running Fourier integral of the drive.
"""

import logging
import math
from dataclasses import dataclass, replace

import numpy as np
import pandas as pd
from scipy.integrate import solve_ivp

import config
from src.core.errors import NormDriftExceeded, StepSizeUnderflow, ValidationFailed
from src.core.utils import check_grid, complex_columns
from src.systems.response import running_integral

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-12


# ===============================================
# === SYSTEM DEFINITION ========================
# ===============================================

@dataclass(frozen=True, eq=False)
class QuantumSystemSpec:
    """Level energies (ascending), coupling matrix Q and coupling strength delta."""

    energies: np.ndarray
    coupling: np.ndarray
    delta: float = 1.0

    def __post_init__(self):
        try:
            energies = np.asarray(self.energies, dtype=float).reshape(-1)
            coupling = np.asarray(self.coupling, dtype=float)
        except (TypeError, ValueError) as e:
            raise ValidationFailed('energies and coupling must be numeric', 'energies') from e
        size = energies.size
        if size < 2:
            raise ValidationFailed('at least two levels are required', 'energies')
        if not np.all(np.isfinite(energies)):
            raise ValidationFailed('energies must be finite', 'energies')
        if np.any(np.diff(energies) < 0):
            raise ValidationFailed('energies must be sorted ascending', 'energies')
        if coupling.shape != (size, size):
            raise ValidationFailed('coupling must be square with one row per level', 'coupling',
                                   shape=coupling.shape, levels=size)
        if not np.all(np.isfinite(coupling)):
            raise ValidationFailed('coupling must be finite', 'coupling')
        asymmetry = float(np.max(np.abs(coupling - coupling.T)))
        if asymmetry > SYMMETRY_TOL:
            raise ValidationFailed('coupling must be symmetric', 'coupling', asymmetry=asymmetry)
        delta = self.delta
        if isinstance(delta, bool) or not isinstance(delta, (int, float)) \
                or not math.isfinite(delta) or delta < 0:
            raise ValidationFailed('delta must be finite and non-negative', 'delta', value=delta)
        energies.setflags(write=False)
        coupling.setflags(write=False)
        object.__setattr__(self, 'energies', energies)
        object.__setattr__(self, 'coupling', coupling)
        object.__setattr__(self, 'delta', float(delta))

    @property
    def size(self):
        return self.energies.size

    def transition_frequency(self, m, n):
        """w_mn = E_m - E_n."""
        return float(self.energies[m] - self.energies[n])

    def shifted(self, offset):
        """Same system with every energy moved by ``offset`` (a gauge change)."""
        return replace(self, energies=self.energies + offset)

    def with_delta(self, delta):
        return replace(self, delta=delta)

    def to_json(self):
        return {
            'energies': self.energies.tolist(),
            'coupling': self.coupling.tolist(),
            'delta': self.delta,
        }

    @classmethod
    def from_json(cls, document):
        if not isinstance(document, dict):
            raise ValidationFailed('system document must be a JSON object', '')
        for key in ('energies', 'coupling'):
            if key not in document:
                raise ValidationFailed('missing field', key)
        return cls(document['energies'], document['coupling'], document.get('delta', 1.0))


@dataclass(frozen=True, eq=False)
class AmplitudeTrace:
    times: np.ndarray
    coefficients: np.ndarray
    norm_drift: float
    nfev: int = 0

    @property
    def populations(self):
        return np.abs(self.coefficients) ** 2

    def to_frame(self):
        columns = {'time': self.times}
        for level in range(self.coefficients.shape[1]):
            columns.update(complex_columns(f'c{level}', self.coefficients[:, level]))
        return pd.DataFrame(columns)


@dataclass(frozen=True)
class ConvergenceOrder:
    """Deviation of exact from first-order amplitudes across a coupling ladder."""

    deltas: tuple
    deviations: tuple
    orders: tuple

    @property
    def order(self):
        return float(np.median(self.orders)) if self.orders else math.nan

    def to_json(self):
        return {'deltas': list(self.deltas), 'deviations': list(self.deviations),
                'orders': list(self.orders), 'order': self.order}


def _check_level(system, level, name):
    if isinstance(level, bool) or not isinstance(level, (int, np.integer)) \
            or not 0 <= level < system.size:
        raise ValidationFailed('level index out of range', name, value=level, levels=system.size)
    return int(level)


# ===============================================
# === FIRST ORDER ==============================
# ===============================================

def perturbative_amplitude(system, J, n, m, grid, quad_tol=None, tail=None):
    """
    First-order amplitude of level m starting from level n,

        c_m(t) = -i delta Q_mn integral^t J(s) exp(i w_mn s) ds,   m != n.
    """
    n = _check_level(system, n, 'n')
    m = _check_level(system, m, 'm')
    if n == m:
        raise ValidationFailed('initial and final levels must differ', 'm', n=n, m=m)
    grid = check_grid(grid)
    element = system.coupling[m, n]
    if element == 0.0 or system.delta == 0.0:
        return np.zeros(grid.size, dtype=complex)
    running = running_integral(J, system.transition_frequency(m, n), grid, quad_tol, tail)
    return -1j * system.delta * element * running.values


# ===============================================
# === EXACT INTEGRATION ========================
# ===============================================

def _initial_vector(system, initial):
    if isinstance(initial, (int, np.integer)) and not isinstance(initial, bool):
        vector = np.zeros(system.size, dtype=complex)
        vector[_check_level(system, initial, 'initial')] = 1.0
        return vector
    vector = np.asarray(initial, dtype=complex).reshape(-1)
    if vector.size != system.size:
        raise ValidationFailed('initial state has the wrong length', 'initial',
                               length=vector.size, levels=system.size)
    norm = float(np.linalg.norm(vector))
    if not math.isfinite(norm) or abs(norm - 1.0) > 1e-12:
        raise ValidationFailed('initial state must be normalized', 'initial', norm=norm)
    return vector


def _real_drive(J, t):
    value = np.asarray(J(t))
    if np.iscomplexobj(value):
        if value.imag != 0.0:
            raise ValidationFailed('drive must be real valued', 'signal', t=float(t),
                                   value=complex(value))
        value = value.real
    return float(value)


def integrate_exact(system, J, initial, grid, ode_tol=None):
    """Interaction-picture amplitudes on ``grid`` from c(grid[0]) = e_initial."""
    ode_tol = ode_tol or config.DEFAULT_ODE_TOL
    grid = check_grid(grid)
    c0 = _initial_vector(system, initial)
    if grid.size == 1:
        return AmplitudeTrace(grid, c0[None, :], 0.0, 0)

    gaps = system.energies[:, None] - system.energies[None, :]
    coupling = system.delta * system.coupling.astype(complex)

    def rhs(t, c):
        drive = _real_drive(J, t)
        if drive == 0.0:
            return np.zeros_like(c)
        return -1j * drive * ((coupling * np.exp(1j * gaps * t)) @ c)

    scale = max(float(np.max(np.abs(gaps))), float(J.bandlimit))
    max_step = math.pi / scale if scale > 0 else np.inf
    result = solve_ivp(rhs, (grid[0], grid[-1]), c0, method=config.ODE_METHOD,
                       t_eval=grid, rtol=ode_tol, atol=ode_tol, max_step=max_step)
    logger.debug('%s status %d, nfev %d over [%.4g, %.4g]', config.ODE_METHOD,
                 result.status, result.nfev, grid[0], grid[-1])
    if result.status < 0:
        raise StepSizeUnderflow(result.message, t=float(result.t[-1]) if result.t.size else
                                float(grid[0]), nfev=result.nfev)

    coefficients = result.y.T
    drift = float(np.max(np.abs(np.sum(np.abs(coefficients) ** 2, axis=1) - 1.0)))
    span = float(grid[-1] - grid[0])
    allowed = config.NORM_DRIFT_FACTOR * ode_tol * max(span, 1.0)
    if drift > allowed:
        raise NormDriftExceeded('norm drifted beyond tolerance', drift=drift, allowed=allowed)
    return AmplitudeTrace(grid, coefficients, drift, int(result.nfev))


# ===============================================
# === CONVERGENCE ORDER ========================
# ===============================================

def perturbative_order(system, J, n, m, grid, deltas=None, ode_tol=None, quad_tol=None):
    """
    Observed order of (exact - first order) in delta.

    Both amplitudes start at grid[0]; the order between successive ladder
    rungs is log(dev_k / dev_k+1) / log(delta_k / delta_k+1).
    """
    deltas = tuple(float(d) for d in (deltas or config.PERTURBATIVE_DELTAS))
    if len(deltas) < 2 or any(d <= 0 for d in deltas):
        raise ValidationFailed('need at least two positive couplings', 'deltas')
    deviations = []
    for delta in deltas:
        scaled = system.with_delta(delta)
        exact = integrate_exact(scaled, J, n, grid, ode_tol).coefficients[:, m]
        first = perturbative_amplitude(scaled, J, n, m, grid, quad_tol, tail='none')
        deviations.append(float(np.max(np.abs(exact - first))))
    orders = []
    for k in range(len(deltas) - 1):
        if deviations[k] > 0 and deviations[k + 1] > 0:
            orders.append(math.log(deviations[k] / deviations[k + 1])
                          / math.log(deltas[k] / deltas[k + 1]))
    logger.debug('perturbative deviations %s, orders %s', deviations, orders)
    return ConvergenceOrder(deltas, tuple(deviations), tuple(orders))
