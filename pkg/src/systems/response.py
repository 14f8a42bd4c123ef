"""
Driven Response
===============

The partial Fourier transform

    S_w(t) = (-i / sqrt(2 w)) * integral_{-inf}^{t} J(s) exp(i w s) ds

of a drive J, which fixes the excitation of a driven oscillator at every
time, together with the raw running integral and the classical retarded
response that the other systems are built from.

The -inf lower limit is handled in one of three auditable ways (``tail``):

* ``analytic``: the tail of a sinc expansion is added in closed form;
* ``truncate``: integration starts where the sinc envelope drops below
  ``quad_tol`` and the truncation bound is recorded;
* ``none``: integration starts at the first grid time.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy.special import sici

import config
from src.core.errors import ValidationFailed
from src.core.quadrature import cumulative_quadrature
from src.core.signals import SincExpansion, evaluate_spectrum
from src.core.utils import check_grid

logger = logging.getLogger(__name__)

TAIL_MODES = ('analytic', 'truncate', 'none')


@dataclass(frozen=True)
class CallableDrive:
    """Any vectorized drive function, with the frequency scale used for panel sizing."""

    func: object
    bandlimit: float
    support: tuple = (-math.inf, math.inf)
    breakpoints: tuple = ()

    def __call__(self, t):
        return self.func(np.asarray(t, dtype=float))


@dataclass(frozen=True, eq=False)
class ResponseTrace:
    probe_frequency: float
    times: np.ndarray
    amplitudes: np.ndarray
    excitation: np.ndarray
    t_start: float = -math.inf
    tail_mode: str = 'analytic'
    truncation_bound: float = 0.0
    quad_error: float = 0.0

    def to_frame(self):
        return pd.DataFrame({
            'time': self.times,
            're_S': self.amplitudes.real,
            'im_S': self.amplitudes.imag,
            'excitation': self.excitation,
        })


@dataclass(frozen=True, eq=False)
class RunningIntegral:
    """Values of integral^t J(s) exp(i nu s) ds on a grid, with its bookkeeping."""

    values: np.ndarray
    t_start: float
    tail_mode: str
    truncation_bound: float = 0.0
    quad_error: float = 0.0
    meta: dict = field(default_factory=dict)


# ===============================================
# === CLOSED FORM ==============================
# ===============================================

def _signed_si(k, x):
    """integral_{-inf}^{x} sin(k u) / u du."""
    si, _ = sici(k * x)
    return si + np.sign(k) * (np.pi / 2.0)


def sinc_fourier_kernel(bandlimit, nu, x):
    """
    K(x) = integral_{-inf}^{x} sin(Omega u) / (pi u) exp(i nu u) du.

    Diverges logarithmically at the band edge |nu| = Omega.
    """
    x = np.asarray(x, dtype=float)
    upper = abs(bandlimit + nu)
    lower = abs(bandlimit - nu)
    if upper == 0.0 or lower == 0.0:
        raise ValidationFailed('running transform diverges at the band edge', 'frequency',
                               frequency=nu, bandlimit=bandlimit)
    real = 0.5 * (_signed_si(bandlimit + nu, x) + _signed_si(bandlimit - nu, x))
    ax = np.abs(x)
    near = ax < config.SINC_TAYLOR_RADIUS
    safe = np.where(near, 1.0, ax)
    _, ci_lower = sici(lower * safe)
    _, ci_upper = sici(upper * safe)
    imag = 0.5 * np.where(near, math.log(lower / upper), ci_lower - ci_upper)
    return (real + 1j * imag) / np.pi


def closed_form_running_integral(J, nu, t):
    """integral_{-inf}^{t} J(s) exp(i nu s) ds for a sinc expansion, via sine/cosine integrals."""
    t = np.asarray(t, dtype=float)
    if J.centers.size == 0:
        return np.zeros(t.shape, dtype=complex)
    kernel = sinc_fourier_kernel(J.bandlimit, nu, t[..., None] - J.centers)
    return kernel @ (J.weights * np.exp(1j * nu * J.centers))


def has_closed_form(J):
    return isinstance(J, SincExpansion) or hasattr(J, 'running_transform')


def exact_running_integral(J, nu, t):
    """Closed-form integral_{-inf}^{t} J(s) exp(i nu s) ds for drives that have one."""
    if isinstance(J, SincExpansion):
        return closed_form_running_integral(J, nu, t)
    if hasattr(J, 'running_transform'):
        return J.running_transform(nu, t)
    raise ValidationFailed('drive has no closed-form running transform', 'signal',
                           drive=type(J).__name__)


def truncation_start(J, quad_tol, first):
    """Latest t <= first where the sinc envelope is below quad_tol, capped at MAX_TAIL_SPAN."""
    lo, _ = J.support
    limit = min(first, lo) - config.MAX_TAIL_SPAN
    total = float(np.abs(J.weights).sum())
    # envelope <= total / (pi * distance to the nearest center)
    distance = total / (np.pi * quad_tol)
    start = min(first, lo - distance)
    if start < limit:
        logger.warning('tail cutoff capped at %.1f time units before the signal', config.MAX_TAIL_SPAN)
        start = limit
    return start


# ===============================================
# === RUNNING INTEGRAL =========================
# ===============================================

def panel_width(*frequencies):
    scale = max(abs(f) for f in frequencies)
    return config.PANEL_FRACTION * math.pi / scale if scale > 0 else math.inf


def running_integral(J, nu, grid, quad_tol=None, tail=None):
    """
    integral^{t} J(s) exp(i nu s) ds at every grid time.

    Each grid interval is integrated once with composite Gauss-Legendre panels
    no wider than min(pi/|nu|, pi/Omega)/8 and the pieces are summed cumulatively.
    """
    quad_tol = quad_tol or config.DEFAULT_QUAD_TOL
    tail = tail or config.DEFAULT_TAIL_MODE
    if tail not in TAIL_MODES:
        raise ValidationFailed('unknown tail mode', 'tail', value=tail)
    grid = check_grid(grid)
    first = float(grid[0])

    offset = 0.0j
    truncation_bound = 0.0
    start = first
    if isinstance(J, SincExpansion):
        if J.is_empty:
            return RunningIntegral(np.zeros(grid.size, dtype=complex), first, tail)
        if tail == 'analytic':
            offset = complex(closed_form_running_integral(J, nu, first))
            start = -math.inf
        elif tail == 'truncate':
            cutoff = truncation_start(J, quad_tol, first)
            gap = abs(abs(nu) - J.bandlimit)
            envelope = float(J.envelope(cutoff)) if cutoff < first else 0.0
            truncation_bound = envelope / gap if gap > 0 else envelope * (first - cutoff)
            start = cutoff
    else:
        support_start = J.support[0]
        if math.isfinite(support_start):
            start = min(first, support_start)
        elif tail != 'none':
            logger.debug('drive without closed-form tail; integrating from the first grid time')

    extra = [start] if math.isfinite(start) and start < first else []
    extra += [b for b in J.breakpoints if start < b < grid[-1]]
    edges = np.union1d(grid, np.asarray(extra, dtype=float)) if extra else grid
    index = np.searchsorted(edges, grid)

    max_width = panel_width(nu, J.bandlimit)

    def integrand(s):
        return J(s) * np.exp(1j * nu * s)

    # edges[0] is the lower limit, so cumulative[index] already spans [start, t]
    cumulative, error = cumulative_quadrature(integrand, edges, max_width, quad_tol)
    values = offset + cumulative[index]
    logger.debug('running integral nu=%.6g over %d points (tail %s, error %.2e)',
                 nu, grid.size, tail, error)
    return RunningIntegral(values, start, tail, truncation_bound, error)


# ===============================================
# === PARTIAL FOURIER TRANSFORM ================
# ===============================================

def _check_probe(omega):
    if not (isinstance(omega, (int, float)) and math.isfinite(omega) and omega > 0):
        raise ValidationFailed('probe frequency must be positive', 'omega', value=omega)


def partial_fourier(J, omega, grid, quad_tol=None, tail=None):
    """S_w(t) = (-i / sqrt(2 w)) integral^t J(s) exp(i w s) ds on ``grid``."""
    _check_probe(omega)
    running = running_integral(J, omega, grid, quad_tol, tail)
    prefactor = -1j / math.sqrt(2.0 * omega)
    amplitudes = prefactor * running.values
    excitation = np.abs(amplitudes) ** 2
    bound = running.truncation_bound / math.sqrt(2.0 * omega)
    return ResponseTrace(float(omega), check_grid(grid), amplitudes, excitation,
                         running.t_start, running.tail_mode, bound,
                         running.quad_error / math.sqrt(2.0 * omega))


def asymptotic_value(J, omega):
    """lim_{t -> inf} S_w(t) = (-i / sqrt(2 w)) sqrt(2 pi) J~(-w); exactly 0 off the band."""
    _check_probe(omega)
    if not isinstance(J, SincExpansion):
        raise ValidationFailed('asymptotic value needs a bandlimited drive', 'signal')
    spectrum = evaluate_spectrum(J, -omega)
    if spectrum == 0:
        return 0j
    return (-1j / math.sqrt(2.0 * omega)) * math.sqrt(2.0 * math.pi) * spectrum


def closed_form_partial_fourier(J, omega, t, reference=None):
    """S_w(t) for a sinc expansion from the sine/cosine-integral form.

    With ``reference`` set, the integral starts there instead of at -inf.
    """
    values = closed_form_running_integral(J, omega, t)
    if reference is not None:
        values = values - closed_form_running_integral(J, omega, reference)
    return (-1j / math.sqrt(2.0 * omega)) * values


# ===============================================
# === RETARDED RESPONSE ========================
# ===============================================

def retarded_response(source, omega, grid, quad_tol=None, tail=None):
    """
    Classical retarded response of a unit oscillator,

        q(t) = integral^t sin(w (t - s)) / w * g(s) ds = Im(exp(i w t) I(t)) / w,

    with I(t) = integral^t g(s) exp(-i w s) ds. Returns (q, I) on the grid.
    """
    _check_probe(omega)
    grid = check_grid(grid)
    running = running_integral(source, -omega, grid, quad_tol, tail)
    q = np.imag(np.exp(1j * omega * grid) * running.values) / omega
    return q, running
