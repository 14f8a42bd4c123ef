"""
Bandlimited Signals
===================

Minimum-norm synthesis of Omega-bandlimited functions through prescribed
amplitudes. The solution is a weighted sum of shifted sinc kernels

    f(t) = sum_i b_i sin(Omega (t - t_i)) / (pi (t - t_i)),   S b = a,

with S the Gram matrix of the kernels at the constraint times. Inside a
constraint window the interpolant can oscillate faster than Omega
(superoscillation), paid for by large amplitudes outside the window.
"""

import logging
import math
import threading
import warnings
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.optimize import bisect, minimize_scalar

import config
from src.core.errors import (
    DuplicateTimes,
    EmptyWindow,
    IllConditioned,
    IllConditionedWarning,
    ValidationFailed,
)

logger = logging.getLogger(__name__)

PRECISION_MODES = ('machine', 'extended')

# mpmath keeps its working precision in a process-wide context
_MP_LOCK = threading.Lock()


# ===============================================
# === CONSTRAINTS ==============================
# ===============================================

@dataclass(frozen=True)
class ConstraintSpec:
    """Bandlimit and the (time, amplitude) pairs the signal must pass through."""

    bandlimit: float
    points: tuple

    def __post_init__(self):
        if not isinstance(self.bandlimit, (int, float)) or not math.isfinite(self.bandlimit) \
                or self.bandlimit <= 0:
            raise ValidationFailed('bandlimit must be finite and positive', 'bandlimit',
                                   value=self.bandlimit)
        if len(self.points) == 0:
            raise ValidationFailed('at least one constraint point is required', 'points')
        cleaned = []
        for index, point in enumerate(self.points):
            if len(point) != 2:
                raise ValidationFailed('each point is a [time, amplitude] pair',
                                       f'points[{index}]')
            for slot, value in enumerate(point):
                if not isinstance(value, (int, float)) or isinstance(value, bool) \
                        or not math.isfinite(value):
                    raise ValidationFailed('point entries must be finite reals',
                                           f'points[{index}][{slot}]', value=value)
            cleaned.append((float(point[0]), float(point[1])))
        object.__setattr__(self, 'bandlimit', float(self.bandlimit))
        object.__setattr__(self, 'points', tuple(cleaned))

    @property
    def times(self):
        return np.array([t for t, _ in self.points])

    @property
    def amplitudes(self):
        return np.array([a for _, a in self.points])

    @classmethod
    def from_json(cls, document):
        if not isinstance(document, dict):
            raise ValidationFailed('constraint document must be a JSON object', '')
        for key in ('bandlimit', 'points'):
            if key not in document:
                raise ValidationFailed('missing field', key)
        if not isinstance(document['points'], list):
            raise ValidationFailed('points must be a list', 'points')
        return cls(document['bandlimit'], tuple(tuple(p) if isinstance(p, list) else (p,)
                                                for p in document['points']))

    def to_json(self):
        return {'bandlimit': self.bandlimit, 'points': [list(p) for p in self.points]}

    @classmethod
    def alternating(cls, bandlimit, n_min, n_max, spacing=1.0):
        """Amplitudes (-1)^n at times n * spacing, n_min <= n <= n_max."""
        return cls(bandlimit, tuple((n * spacing, float((-1) ** (n % 2)))
                                    for n in range(n_min, n_max + 1)))


# ===============================================
# === KERNEL ===================================
# ===============================================

def sinc_kernel(bandlimit, x):
    """sin(Omega x) / (pi x), replaced by its limit Omega/pi near x = 0."""
    x = np.asarray(x, dtype=float)
    near = np.abs(x) < config.SINC_TAYLOR_RADIUS
    safe = np.where(near, 1.0, x)
    return np.where(near, bandlimit / np.pi, np.sin(bandlimit * safe) / (np.pi * safe))


def sinc_kernel_derivative(bandlimit, x):
    """d/dx of ``sinc_kernel``."""
    x = np.asarray(x, dtype=float)
    near = np.abs(x) < config.SINC_TAYLOR_RADIUS
    safe = np.where(near, 1.0, x)
    value = (bandlimit * safe * np.cos(bandlimit * safe) - np.sin(bandlimit * safe)) \
        / (np.pi * safe ** 2)
    return np.where(near, -bandlimit ** 3 * x / (3.0 * np.pi), value)


def check_distinct_times(times, tol=None):
    tol = config.DUPLICATE_TIME_TOL if tol is None else tol
    order = np.argsort(times, kind='stable')
    gaps = np.diff(times[order])
    clash = np.flatnonzero(gaps <= tol)
    if clash.size:
        i, j = sorted((int(order[clash[0]]), int(order[clash[0] + 1])))
        raise DuplicateTimes('constraint times coincide', f'points[{j}][0]',
                             first=i, second=j, time=float(times[j]))


def gram_matrix(spec):
    """Gram matrix S_ji = sin(Omega (t_j - t_i)) / (pi (t_j - t_i))."""
    times = spec.times
    check_distinct_times(times)
    return sinc_kernel(spec.bandlimit, times[:, None] - times[None, :])


# ===============================================
# === EXPANSIONS ===============================
# ===============================================

@dataclass(frozen=True, eq=False)
class SincExpansion:
    """
    Bandlimited signal stored as sinc weights.

    ``condition_number`` and ``residual`` describe the Gram solve that produced
    the weights; expansions assembled directly from weights report 1 and 0.
    """

    bandlimit: float
    centers: np.ndarray
    weights: np.ndarray
    condition_number: float = 1.0
    precision_mode: str = 'machine'
    residual: float = 0.0
    warnings: tuple = field(default=())

    def __post_init__(self):
        try:
            centers = np.asarray(self.centers, dtype=float).reshape(-1)
            weights = np.asarray(self.weights, dtype=float).reshape(-1)
        except (TypeError, ValueError) as e:
            raise ValidationFailed('centers and weights must be lists of numbers',
                                   'weights') from e
        if not (np.all(np.isfinite(centers)) and np.all(np.isfinite(weights))):
            raise ValidationFailed('centers and weights must be finite', 'weights')
        if centers.shape != weights.shape:
            raise ValidationFailed('centers and weights differ in length', 'weights')
        centers.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, 'centers', centers)
        object.__setattr__(self, 'weights', weights)

    @classmethod
    def from_weights(cls, bandlimit, centers, weights):
        return cls(float(bandlimit), centers, weights)

    @classmethod
    def empty(cls, bandlimit):
        return cls(float(bandlimit), np.zeros(0), np.zeros(0))

    def __call__(self, t):
        return evaluate(self, t)

    def __add__(self, other):
        if not isinstance(other, SincExpansion):
            return NotImplemented
        if other.bandlimit != self.bandlimit:
            raise ValidationFailed('cannot add expansions with different bandlimits',
                                   'bandlimit', left=self.bandlimit, right=other.bandlimit)
        return SincExpansion(
            self.bandlimit,
            np.concatenate([self.centers, other.centers]),
            np.concatenate([self.weights, other.weights]),
            condition_number=max(self.condition_number, other.condition_number),
            precision_mode=self.precision_mode,
            residual=self.residual + other.residual,
        )

    def scaled(self, factor):
        return SincExpansion(self.bandlimit, self.centers, factor * self.weights,
                             self.condition_number, self.precision_mode,
                             abs(factor) * self.residual, self.warnings)

    def time_reversed(self):
        return SincExpansion(self.bandlimit, -self.centers, self.weights,
                             self.condition_number, self.precision_mode,
                             self.residual, self.warnings)

    @property
    def is_empty(self):
        return self.centers.size == 0 or not np.any(self.weights)

    @property
    def support(self):
        """Span of the sinc centers; the signal itself is not compactly supported."""
        if self.centers.size == 0:
            return 0.0, 0.0
        return float(self.centers.min()), float(self.centers.max())

    breakpoints = ()

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        terms = sinc_kernel_derivative(self.bandlimit, t[..., None] - self.centers)
        return terms @ self.weights

    def envelope(self, t):
        """Sinc tail envelope sum_i |b_i| / (pi |t - t_i|)."""
        t = np.asarray(t, dtype=float)
        return (np.abs(self.weights) / (np.pi * np.abs(t[..., None] - self.centers))).sum(axis=-1)

    def norm_squared(self):
        """||f||^2 = b^T S b."""
        if self.centers.size == 0:
            return 0.0
        gram = sinc_kernel(self.bandlimit, self.centers[:, None] - self.centers[None, :])
        return float(self.weights @ gram @ self.weights)

    def spectrum(self, nu):
        return evaluate_spectrum(self, nu)

    def to_json(self):
        return {
            'bandlimit': self.bandlimit,
            'centers': self.centers.tolist(),
            'weights': self.weights.tolist(),
            'condition_number': self.condition_number,
            'precision_mode': self.precision_mode,
            'residual': self.residual,
        }

    @classmethod
    def from_json(cls, document):
        if not isinstance(document, dict):
            raise ValidationFailed('signal document must be a JSON object', '')
        for key in ('bandlimit', 'centers', 'weights'):
            if key not in document:
                raise ValidationFailed('missing field', key)
        bandlimit = document['bandlimit']
        if not isinstance(bandlimit, (int, float)) or not bandlimit > 0:
            raise ValidationFailed('bandlimit must be positive', 'bandlimit')
        mode = document.get('precision_mode', 'machine')
        if mode not in PRECISION_MODES:
            raise ValidationFailed('unknown precision mode', 'precision_mode', value=mode)
        return cls(float(bandlimit), document['centers'], document['weights'],
                   float(document.get('condition_number', 1.0)), mode,
                   float(document.get('residual', 0.0)))


@dataclass(frozen=True)
class TruncatedCosine:
    """amplitude * cos(frequency t) on [t_on, t_off], zero elsewhere."""

    frequency: float
    t_on: float
    t_off: float
    amplitude: float = 1.0

    def __post_init__(self):
        if not self.t_off > self.t_on:
            raise ValidationFailed('t_off must exceed t_on', 't_off')

    @property
    def bandlimit(self):
        # Only used for panel sizing; the drive is not bandlimited.
        return abs(self.frequency)

    @property
    def support(self):
        return self.t_on, self.t_off

    @property
    def breakpoints(self):
        return self.t_on, self.t_off

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t >= self.t_on) & (t <= self.t_off)
        return np.where(inside, self.amplitude * np.cos(self.frequency * t), 0.0)

    def running_transform(self, nu, t):
        """integral_{-inf}^{t} f(s) exp(i nu s) ds from the exact antiderivative."""
        t = np.clip(np.asarray(t, dtype=float), self.t_on, self.t_off)
        total = np.zeros(t.shape, dtype=complex)
        for k in (nu + self.frequency, nu - self.frequency):
            if k == 0.0:
                total += t - self.t_on
            else:
                total += (np.exp(1j * k * t) - np.exp(1j * k * self.t_on)) / (1j * k)
        return 0.5 * self.amplitude * total


# ===============================================
# === SYNTHESIS ================================
# ===============================================

def _condition_number(matrix):
    with np.errstate(divide='ignore'):
        return float(np.linalg.cond(matrix))


def _solve_extended(spec, dps):
    """Cholesky solve and symmetric eigen-condition number in mpmath."""
    with _MP_LOCK, mp.workdps(dps):
        omega = mp.mpf(spec.bandlimit)
        times = [mp.mpf(t) for t in spec.times]
        size = len(times)
        gram = mp.matrix(size, size)
        for j in range(size):
            for i in range(size):
                d = times[j] - times[i]
                gram[j, i] = omega / mp.pi if d == 0 else mp.sin(omega * d) / (mp.pi * d)
        rhs = mp.matrix([mp.mpf(a) for a in spec.amplitudes])
        solution = mp.cholesky_solve(gram, rhs)
        spectrum = mp.eigsy(gram, eigvals_only=True)
        eigenvalues = [spectrum[i] for i in range(size)]
        lowest = min(eigenvalues)
        condition = float(max(eigenvalues) / lowest) if lowest > 0 else math.inf
        return np.array([float(solution[i]) for i in range(size)]), condition


def _interpolation_residual(bandlimit, times, weights, amplitudes):
    values = sinc_kernel(bandlimit, times[:, None] - times[None, :]) @ weights
    return float(np.max(np.abs(values - amplitudes)))


def residual_bound(condition_number, amplitudes):
    eps = np.finfo(float).eps
    return max(config.RESIDUAL_FLOOR, condition_number * eps * float(np.max(np.abs(amplitudes))))


def solve_min_norm(spec, precision=None):
    """
    Minimum-L2-norm Omega-bandlimited interpolant through ``spec.points``.

    Machine precision uses a Cholesky factorization. When the Gram condition
    number passes ``CONDITION_THRESHOLD`` (or the residual check fails) the
    solve is repeated in mpmath with ``EXTENDED_PRECISION_DPS`` digits.
    ``IllConditioned`` is raised only if the extended solve still misses the
    residual bound.
    """
    precision = precision or config.DEFAULT_PRECISION
    if precision not in PRECISION_MODES:
        raise ValidationFailed('precision must be machine or extended', 'precision',
                               value=precision)

    gram = gram_matrix(spec)
    times, amplitudes = spec.times, spec.amplitudes
    condition = _condition_number(gram)
    logger.debug('gram size %d, condition number %.3e', len(times), condition)
    notes = []

    weights = None
    mode = precision
    if precision == 'machine' and condition <= config.CONDITION_THRESHOLD:
        try:
            factor = cho_factor(gram, lower=True)
            weights = cho_solve(factor, amplitudes)
        except LinAlgError:
            logger.warning('Cholesky factorization failed in machine precision')
        if weights is not None:
            residual = _interpolation_residual(spec.bandlimit, times, weights, amplitudes)
            if residual > residual_bound(condition, amplitudes):
                logger.warning('machine residual %.3e exceeds bound, retrying extended', residual)
                weights = None

    if weights is None:
        if precision == 'machine':
            logger.warning('condition number %.3e, falling back to extended precision',
                           condition)
        mode = 'extended'
        weights, condition = _solve_extended(spec, config.EXTENDED_PRECISION_DPS)
        residual = _interpolation_residual(spec.bandlimit, times, weights, amplitudes)
        if residual > residual_bound(condition, amplitudes):
            raise IllConditioned('interpolation residual exceeds bound after extended solve',
                                 residual=residual, condition_number=condition)

    if condition > config.CONDITION_THRESHOLD:
        note = f'IllConditioned: condition number {condition:.3e}'
        notes.append(note)
        warnings.warn(note, IllConditionedWarning, stacklevel=2)

    return SincExpansion(spec.bandlimit, times, weights, max(1.0, condition), mode,
                         residual, tuple(notes))


# ===============================================
# === EVALUATION ===============================
# ===============================================

def evaluate(f, t):
    """f(t); scalar in, float out, array in, array out."""
    t_arr = np.asarray(t, dtype=float)
    if f.centers.size == 0:
        values = np.zeros(t_arr.shape)
    else:
        values = sinc_kernel(f.bandlimit, t_arr[..., None] - f.centers) @ f.weights
    return float(values) if np.ndim(t) == 0 else values


def evaluate_extended(f, t, dps=None):
    """f(t) summed term by term in mpmath, for use as an oracle."""
    dps = dps or config.EXTENDED_PRECISION_DPS
    with _MP_LOCK, mp.workdps(dps):
        omega = mp.mpf(f.bandlimit)
        t = mp.mpf(t)
        total = mp.mpf(0)
        for center, weight in zip(f.centers, f.weights):
            d = t - mp.mpf(center)
            term = omega / mp.pi if abs(d) < config.SINC_TAYLOR_RADIUS \
                else mp.sin(omega * d) / (mp.pi * d)
            total += mp.mpf(weight) * term
        return float(total)


def evaluate_spectrum(f, nu):
    """Fourier transform (1/sqrt(2 pi)) sum_i b_i exp(-i nu t_i) on the band, 0 off it."""
    nu_arr = np.asarray(nu, dtype=float)
    phases = np.exp(-1j * nu_arr[..., None] * f.centers) @ f.weights.astype(complex)
    values = np.where(np.abs(nu_arr) <= f.bandlimit, phases / math.sqrt(2.0 * math.pi), 0.0)
    return complex(values) if np.ndim(nu) == 0 else values


# ===============================================
# === CHARACTERIZATION =========================
# ===============================================

@dataclass(frozen=True)
class SignalCharacterization:
    window: tuple
    peak_inside: float
    peak_outside: float
    dynamic_range: float
    local_period_estimate: float
    zero_crossings: tuple
    scan_horizon: float
    argmax_outside: float

    def to_json(self):
        return {
            'window': list(self.window),
            'peak_inside': self.peak_inside,
            'peak_outside': self.peak_outside,
            'dynamic_range': self.dynamic_range,
            'local_period_estimate': self.local_period_estimate,
            'zero_crossings': list(self.zero_crossings),
            'scan_horizon': self.scan_horizon,
            'argmax_outside': self.argmax_outside,
        }


def _refine_peak(f, ts, index, lo, hi):
    """Golden-section refinement of the grid maximum of |f| at ``ts[index]``."""
    best_t = float(ts[index])
    best = abs(evaluate(f, best_t))
    if index == 0 or index == ts.size - 1:
        return best_t, best
    try:
        result = minimize_scalar(lambda t: -abs(evaluate(f, t)),
                                 bracket=(ts[index - 1], ts[index], ts[index + 1]),
                                 method='golden', options={'xtol': config.GOLDEN_XTOL})
    except ValueError:
        return best_t, best
    if lo <= result.x <= hi and -result.fun > best:
        return float(result.x), float(-result.fun)
    return best_t, best


def characterize(f, window, scan_horizon=None, grid_step=None):
    """
    Peak amplitudes inside and outside ``window`` and the local oscillation period.

    ``scan_horizon`` is the half-width of the scanned interval about the window
    centre; it defaults to the window half-width plus ``SIDELOBE_WIDTHS`` sinc
    sidelobes (pi / Omega each).
    """
    t_min, t_max = float(window[0]), float(window[1])
    if t_max < t_min:
        raise ValidationFailed('window must be ordered', 'window')
    step = grid_step or config.CHARACTERIZE_GRID_STEP
    if step <= 0:
        raise ValidationFailed('grid step must be positive', 'grid_step')
    centre = 0.5 * (t_min + t_max)
    half_width = 0.5 * (t_max - t_min)
    if scan_horizon is None:
        scan_horizon = half_width + config.SIDELOBE_WIDTHS * math.pi / f.bandlimit
    if scan_horizon <= half_width:
        raise ValidationFailed('scan horizon must extend beyond the window', 'scan_horizon')

    count = int(round(2.0 * scan_horizon / step)) + 1
    ts = np.linspace(centre - scan_horizon, centre + scan_horizon, count)
    values = evaluate(f, ts)
    inside = (ts >= t_min) & (ts <= t_max)
    if not inside.any():
        raise EmptyWindow('no grid points fall inside the window', 'window',
                          window=(t_min, t_max), step=step)

    inside_idx = np.flatnonzero(inside)
    peak_idx = int(inside_idx[np.argmax(np.abs(values[inside_idx]))])
    _, peak_inside = _refine_peak(f, ts, peak_idx, t_min, t_max)

    outside_idx = np.flatnonzero(~inside)
    peak_outside, argmax_outside = 0.0, math.nan
    if outside_idx.size:
        out_idx = int(outside_idx[np.argmax(np.abs(values[outside_idx]))])
        lo, hi = (ts[0], t_min) if ts[out_idx] < t_min else (t_max, ts[-1])
        argmax_outside, peak_outside = _refine_peak(f, ts, out_idx, lo, hi)

    crossings = []
    window_values = values[inside_idx]
    window_ts = ts[inside_idx]
    for k in range(window_ts.size - 1):
        left, right = window_values[k], window_values[k + 1]
        if left == 0.0:
            crossings.append(float(window_ts[k]))
        elif left * right < 0.0:
            crossings.append(float(bisect(lambda t: evaluate(f, t),
                                          window_ts[k], window_ts[k + 1], xtol=1e-12)))
    if window_ts.size and window_values[-1] == 0.0:
        crossings.append(float(window_ts[-1]))

    period = 2.0 * float(np.median(np.diff(crossings))) if len(crossings) >= 2 else math.inf
    dynamic_range = peak_outside / peak_inside if peak_inside > 0 else math.inf

    logger.debug('characterized window %s: inside %.3e outside %.3e period %.4f',
                 (t_min, t_max), peak_inside, peak_outside, period)
    return SignalCharacterization((t_min, t_max), peak_inside, peak_outside, dynamic_range,
                                  period, tuple(crossings), float(scan_horizon),
                                  float(argmax_outside))
