"""
Dispersive Oscillator
=====================

A field mode with dispersion w^4 / Lambda^2 - w^2 + k^2 = 0 has two roots per
wavenumber. Its response to a bandlimited drive is computed two ways:

* ``band``: the Fourier integral restricted to the drive band, using the
  partial-fraction Green's function;
* ``oscillators``: the same partial fractions as two retarded harmonic
  responses.

Below the band the drive cannot resonate with either root and the response
decays once the drive is gone.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

import config
from src.core.errors import DegenerateRoots, ResonanceInBand, TolUnachievable, ValidationFailed
from src.core.quadrature import gauss_legendre_rule
from src.core.signals import SincExpansion
from src.core.utils import check_grid
from src.systems.response import retarded_response

logger = logging.getLogger(__name__)

METHODS = ('band', 'oscillators')
DEGENERATE_DISCRIMINANT = 1e-14


@dataclass(frozen=True)
class DispersionRoots:
    """
    Roots of w^4 / Lambda^2 - w^2 + k^2 = 0 with w1 >= w2 on the real branch.

    On the complex branch the roots are complex and the velocities are NaN.
    """

    wavenumber: float
    cutoff: float
    omega1: complex
    omega2: complex
    branch: str
    group_velocity: tuple
    phase_velocity: tuple

    def residuals(self):
        """Relative residual of each root in the dispersion relation."""
        k, cutoff = self.wavenumber, self.cutoff
        out = []
        for w in (self.omega1, self.omega2):
            value = w ** 4 / cutoff ** 2 - w ** 2 + k ** 2
            out.append(abs(value) / max(abs(w) ** 2, k ** 2))
        return tuple(out)

    def to_json(self):
        def plain(value):
            value = complex(value)
            return value.real if value.imag == 0 else [value.real, value.imag]
        return {
            'wavenumber': self.wavenumber,
            'cutoff': self.cutoff,
            'omega1': plain(self.omega1),
            'omega2': plain(self.omega2),
            'branch': self.branch,
            'group_velocity': list(self.group_velocity),
            'phase_velocity': list(self.phase_velocity),
        }


@dataclass(frozen=True)
class GreensFunction:
    """G(nu) = w [1/(nu^2 - w1^2) - 1/(nu^2 - w2^2)],  w = 1/(w1^2 - w2^2)."""

    omega1: float
    omega2: float
    weight: float

    def __call__(self, nu):
        nu2 = np.asarray(nu, dtype=float) ** 2
        return self.weight * (1.0 / (nu2 - self.omega1 ** 2) - 1.0 / (nu2 - self.omega2 ** 2))

    def direct(self, nu):
        nu2 = np.asarray(nu, dtype=float) ** 2
        return 1.0 / ((nu2 - self.omega1 ** 2) * (nu2 - self.omega2 ** 2))

    def recombination_residual(self, nu):
        """max |partial fractions - direct| / |direct| over ``nu``."""
        direct = self.direct(nu)
        return float(np.max(np.abs(self(nu) - direct) / np.abs(direct)))


@dataclass(frozen=True, eq=False)
class DispersiveResponse:
    roots: DispersionRoots
    times: np.ndarray
    response: np.ndarray
    method: str
    decay_ratio: float
    decay_window: tuple

    def to_frame(self):
        return pd.DataFrame({'time': self.times, 'q': self.response})

    def summary(self):
        return {
            'roots': self.roots.to_json(),
            'method': self.method,
            'decay_ratio': self.decay_ratio,
            'decay_window': list(self.decay_window),
            'peak_response': float(np.max(np.abs(self.response))),
        }


# ===============================================
# === DISPERSION RELATION ======================
# ===============================================

def _velocities(k, cutoff, omega):
    denominator = omega * (cutoff ** 2 - 2.0 * omega ** 2)
    group = k * cutoff ** 2 / denominator if denominator != 0 else math.inf
    phase = omega / k if k != 0 else math.inf
    return group, phase


def solve_dispersion(k, cutoff):
    """Both roots, the branch label and the group and phase velocities."""
    for name, value in (('k', k), ('cutoff', cutoff)):
        if isinstance(value, bool) or not isinstance(value, (int, float)) \
                or not math.isfinite(value) or value <= 0:
            raise ValidationFailed('must be finite and positive', name, value=value)
    k, cutoff = float(k), float(cutoff)
    discriminant = 1.0 - 4.0 * k ** 2 / cutoff ** 2

    if abs(discriminant) <= DEGENERATE_DISCRIMINANT:
        omega = cutoff / math.sqrt(2.0)
        group, phase = _velocities(k, cutoff, omega)
        return DispersionRoots(k, cutoff, omega, omega, 'degenerate', (group, group),
                               (phase, phase))

    if discriminant < 0:
        root = math.sqrt(-discriminant)
        omega1 = complex(np.sqrt(0.5 * cutoff ** 2 * (1.0 + 1j * root)))
        omega2 = complex(np.sqrt(0.5 * cutoff ** 2 * (1.0 - 1j * root)))
        nan = (math.nan, math.nan)
        logger.debug('complex dispersion branch at k=%.6g, Lambda=%.6g', k, cutoff)
        return DispersionRoots(k, cutoff, omega1, omega2, 'complex', nan, nan)

    omega1 = cutoff / math.sqrt(2.0) * math.sqrt(1.0 + math.sqrt(discriminant))
    # Vieta: w1 w2 = k Lambda
    omega2 = k * cutoff / omega1
    velocities = [_velocities(k, cutoff, w) for w in (omega1, omega2)]
    return DispersionRoots(k, cutoff, omega1, omega2, 'real',
                           tuple(v[0] for v in velocities), tuple(v[1] for v in velocities))


def dispersion_curve(cutoff, ks):
    """Roots and velocities over a wavenumber grid."""
    rows = []
    for k in np.asarray(ks, dtype=float):
        roots = solve_dispersion(float(k), cutoff)
        rows.append({
            'k': roots.wavenumber,
            'branch': roots.branch,
            'omega1': complex(roots.omega1).real,
            'omega2': complex(roots.omega2).real,
            'group_velocity1': roots.group_velocity[0],
            'group_velocity2': roots.group_velocity[1],
            'phase_velocity1': roots.phase_velocity[0],
            'phase_velocity2': roots.phase_velocity[1],
        })
    return pd.DataFrame(rows)


def greens_partial_fractions(roots):
    if roots.branch == 'complex':
        raise ValidationFailed('complex dispersion branch has no real partial fractions', 'k',
                               k=roots.wavenumber, cutoff=roots.cutoff)
    omega1, omega2 = float(np.real(roots.omega1)), float(np.real(roots.omega2))
    if abs(omega1 - omega2) < config.DEGENERATE_ROOT_TOL:
        raise DegenerateRoots('roots too close for partial fractions', omega1=omega1,
                              omega2=omega2)
    return GreensFunction(omega1, omega2, 1.0 / (omega1 ** 2 - omega2 ** 2))


# ===============================================
# === DRIVEN RESPONSE ==========================
# ===============================================

def _band_pass(green, J, grid, panels, order):
    """(1/pi) Re sum_k w_k G(nu_k) J^(nu_k) exp(i nu_k t) on [0, Omega] with ``panels`` panels."""
    nodes, weights = gauss_legendre_rule(order)
    edges = np.linspace(0.0, J.bandlimit, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nu = (mid[:, None] + half[:, None] * nodes).reshape(-1)
    quad_weights = (half[:, None] * weights).reshape(-1)
    amplitude = np.exp(-1j * nu[:, None] * J.centers) @ J.weights.astype(complex)
    coefficients = quad_weights * green(nu) * amplitude

    response = np.empty(grid.size)
    chunk = max(1, 2 ** 20 // max(nu.size, 1))
    for start in range(0, grid.size, chunk):
        times = grid[start:start + chunk]
        response[start:start + chunk] = np.real(np.exp(1j * times[:, None] * nu) @ coefficients)
    return response / np.pi


def _band_response(green, J, grid, quad_tol):
    reach = float(np.max(np.abs(grid[:, None] - J.centers)))
    panels = max(config.BAND_CHUNK_PANELS, math.ceil(8.0 * J.bandlimit * reach / math.pi))
    order = config.GAUSS_LEGENDRE_ORDER
    current = _band_pass(green, J, grid, panels, order)
    for depth in range(config.QUAD_MAX_DEPTH):
        refined = _band_pass(green, J, grid, 2 * panels, order)
        change = float(np.max(np.abs(refined - current)))
        allowed = quad_tol * J.bandlimit * max(1.0, float(np.max(np.abs(refined))))
        logger.debug('band quadrature %d -> %d panels, change %.3e', panels, 2 * panels, change)
        if change <= allowed:
            return refined
        current, panels = refined, 2 * panels
    raise TolUnachievable('band quadrature did not settle', panels=panels, change=change)


def _decay(times, response, slow_root):
    window = config.DECAY_PERIODS * 2.0 * math.pi / slow_root
    start = max(float(times[0]), float(times[-1]) - window)
    tail = times >= start
    peak = float(np.max(np.abs(response)))
    if peak == 0.0:
        return 0.0, (start, float(times[-1]))
    return float(np.max(np.abs(response[tail]))) / peak, (start, float(times[-1]))


def driven_response(roots, J, grid, quad_tol=None, method='band'):
    """
    Retarded response q of (d^2/dt^2 + w1^2)(d^2/dt^2 + w2^2) q = J.

    ``band`` integrates the Green's function over the drive band and refuses a
    root inside it; ``oscillators`` evaluates w (y2 - y1) with y_j the
    retarded harmonic response at w_j and only warns.
    """
    if method not in METHODS:
        raise ValidationFailed('unknown method', 'method', value=method)
    if not isinstance(J, SincExpansion):
        raise ValidationFailed('dispersive response needs a sinc expansion drive', 'signal')
    quad_tol = quad_tol or config.DEFAULT_QUAD_TOL
    grid = check_grid(grid)
    green = greens_partial_fractions(roots)

    if green.omega2 <= J.bandlimit:
        if method == 'band':
            raise ResonanceInBand('a dispersion root lies inside the drive band',
                                  omega2=green.omega2, bandlimit=J.bandlimit)
        logger.warning('root w2=%.6g inside the drive band (Omega=%.6g)',
                       green.omega2, J.bandlimit)

    if J.is_empty:
        response = np.zeros(grid.size)
    elif method == 'band':
        response = _band_response(green, J, grid, quad_tol)
    else:
        y1, _ = retarded_response(J, green.omega1, grid, quad_tol)
        y2, _ = retarded_response(J, green.omega2, grid, quad_tol)
        response = green.weight * (y2 - y1)

    ratio, window = _decay(grid, response, green.omega2)
    logger.info('dispersive response (%s): decay ratio %.3e over [%.4g, %.4g]',
                method, ratio, *window)
    return DispersiveResponse(roots, grid, response, method, ratio, window)
