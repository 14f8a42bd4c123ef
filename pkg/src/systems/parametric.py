"""
Parametric Oscillator
=====================

Mode equation q'' + w(t)^2 q = 0 with a time-dependent spring frequency that
is static at both ends. The mode starts as the positive-frequency plane wave
of the initial region and is decomposed into plane waves of the final region,

    q -> alpha exp(-i w t) / sqrt(2 w) + beta exp(i w t) / sqrt(2 w),

so that |beta|^2 is the excitation created by the change of frequency.
"""

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd
from scipy.integrate import solve_ivp

import config
from src.core.errors import NotAsymptoticallyStatic, StepSizeUnderflow, ValidationFailed
from src.core.signals import SincExpansion
from src.core.utils import complex_columns, ordered_map

logger = logging.getLogger(__name__)

PROFILE_KINDS = ('constant', 'tanh_step', 'gaussian_bump', 'modulated', 'sampled')
_PARAMETERS = {
    'constant': ('omega',),
    'tanh_step': ('omega_in', 'omega_out', 'center', 'width'),
    'gaussian_bump': ('omega0', 'amplitude', 'center', 'width'),
    'modulated': ('omega0', 'depth', 'mod_frequency', 'envelope_width'),
    'sampled': ('omega0', 'scale'),
}
_POSITIVE = {'omega', 'omega_in', 'omega_out', 'omega0', 'width', 'envelope_width'}
WINDOW_GROWTH = 1.25
WINDOW_ITERATIONS = 400


# ===============================================
# === FREQUENCY PROFILES =======================
# ===============================================

@dataclass(frozen=True, eq=False)
class FrequencyProfile:
    """
    Spring frequency w(t) of one of the supported shapes.

    ``params`` holds the shape parameters by name; ``signal`` is the sinc
    expansion of a ``sampled`` profile; ``mirrored`` runs the profile backward
    in time.
    """

    kind: str
    params: dict
    signal: object = None
    mirrored: bool = False
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise ValidationFailed('unknown profile kind', 'kind', value=self.kind)
        params = dict(self.params)
        for name in _PARAMETERS[self.kind]:
            if name not in params:
                raise ValidationFailed('missing profile parameter', name, kind=self.kind)
            value = params[name]
            if isinstance(value, bool) or not isinstance(value, (int, float)) \
                    or not math.isfinite(value):
                raise ValidationFailed('profile parameters must be finite numbers', name,
                                       value=value)
            if name in _POSITIVE and value <= 0:
                raise ValidationFailed('must be positive', name, value=value)
            params[name] = float(value)
        params.setdefault('center', 0.0)
        if self.kind == 'sampled' and not isinstance(self.signal, SincExpansion):
            raise ValidationFailed('sampled profile needs a sinc expansion', 'signal')
        if self.kind == 'modulated' and abs(params['depth']) >= 1.0:
            raise ValidationFailed('modulation depth must be below 1', 'depth',
                                   value=params['depth'])
        object.__setattr__(self, 'params', params)

    # === Constructors ===

    @classmethod
    def constant(cls, omega):
        return cls('constant', {'omega': omega})

    @classmethod
    def tanh_step(cls, omega_in, omega_out, center=0.0, width=1.0):
        return cls('tanh_step', {'omega_in': omega_in, 'omega_out': omega_out,
                                 'center': center, 'width': width})

    @classmethod
    def gaussian_bump(cls, omega0, amplitude, center=0.0, width=1.0):
        return cls('gaussian_bump', {'omega0': omega0, 'amplitude': amplitude,
                                     'center': center, 'width': width})

    @classmethod
    def modulated(cls, omega0, depth, mod_frequency, envelope_width, center=0.0):
        return cls('modulated', {'omega0': omega0, 'depth': depth,
                                 'mod_frequency': mod_frequency,
                                 'envelope_width': envelope_width, 'center': center})

    @classmethod
    def sampled(cls, omega0, signal, scale=1.0):
        """w(t) = omega0 + scale * f(t) for a bandlimited f."""
        return cls('sampled', {'omega0': omega0, 'scale': scale}, signal=signal)

    def reversed(self):
        return replace(self, mirrored=not self.mirrored, _cache={})

    # === Evaluation ===

    def _time(self, t):
        t = np.asarray(t, dtype=float)
        return -t if self.mirrored else t

    def omega(self, t):
        s = self._time(t)
        p = self.params
        if self.kind == 'constant':
            value = np.full(s.shape, p['omega'])
        elif self.kind == 'tanh_step':
            x = (s - p['center']) / p['width']
            value = p['omega_in'] + 0.5 * (p['omega_out'] - p['omega_in']) * (1.0 + np.tanh(x))
        elif self.kind == 'gaussian_bump':
            x = (s - p['center']) / p['width']
            value = p['omega0'] + p['amplitude'] * np.exp(-0.5 * x ** 2)
        elif self.kind == 'modulated':
            env, _ = self._envelope(s)
            phase = p['mod_frequency'] * (s - p['center'])
            value = p['omega0'] * (1.0 + p['depth'] * env * np.cos(phase))
        else:
            value = p['omega0'] + p['scale'] * np.asarray(self.signal(s))
        return float(value) if np.ndim(t) == 0 else value

    def derivative(self, t):
        s = self._time(t)
        p = self.params
        if self.kind == 'constant':
            value = np.zeros(s.shape)
        elif self.kind == 'tanh_step':
            x = (s - p['center']) / p['width']
            value = 0.5 * (p['omega_out'] - p['omega_in']) / p['width'] / np.cosh(x) ** 2
        elif self.kind == 'gaussian_bump':
            x = (s - p['center']) / p['width']
            value = -p['amplitude'] * x / p['width'] * np.exp(-0.5 * x ** 2)
        elif self.kind == 'modulated':
            env, slope = self._envelope(s)
            nu = p['mod_frequency']
            phase = nu * (s - p['center'])
            value = p['omega0'] * p['depth'] * (slope * np.cos(phase) - env * nu * np.sin(phase))
        else:
            value = p['scale'] * np.asarray(self.signal.derivative(s))
        value = -value if self.mirrored else value
        return float(value) if np.ndim(t) == 0 else value

    def _envelope(self, s):
        """Plateau of length L with Gaussian ramps of width ENVELOPE_RAMP_FRACTION * L."""
        p = self.params
        half = 0.5 * p['envelope_width']
        ramp = config.ENVELOPE_RAMP_FRACTION * p['envelope_width']
        x = s - p['center']
        excess = np.maximum(np.abs(x) - half, 0.0)
        env = np.exp(-0.5 * (excess / ramp) ** 2)
        slope = -np.sign(x) * excess / ramp ** 2 * env
        return env, slope

    @property
    def asymptotic_omega(self):
        """(w(-inf), w(+inf)) in the profile's own time direction."""
        p = self.params
        if self.kind == 'constant':
            ends = (p['omega'], p['omega'])
        elif self.kind == 'tanh_step':
            ends = (p['omega_in'], p['omega_out'])
        else:
            ends = (p['omega0'], p['omega0'])
        return ends[::-1] if self.mirrored else ends

    # === Static regions ===

    def flatness_bound(self, t):
        """Upper bound of |w'/w^2| at ``t`` that only decreases away from the profile centre."""
        s = float(self._time(t))
        p = self.params
        omega = self.omega(t)
        if omega <= 0:
            return math.inf
        if self.kind == 'modulated':
            env, slope = self._envelope(s)
            rate = p['omega0'] * abs(p['depth']) * (abs(slope) + env * p['mod_frequency'])
        elif self.kind == 'sampled':
            signal = self.signal
            distance = float(np.min(np.abs(s - signal.centers))) if signal.centers.size else math.inf
            if distance == 0.0:
                return math.inf
            total = float(np.abs(signal.weights).sum())
            rate = abs(p['scale']) * total * (signal.bandlimit / (math.pi * distance)
                                              + 1.0 / (math.pi * distance ** 2))
        else:
            rate = abs(self.derivative(t))
        return float(rate / omega ** 2)

    def _extent(self):
        p = self.params
        if self.kind == 'constant':
            return 0.0, 5.0 * 2.0 * math.pi / p['omega']
        if self.kind in ('tanh_step', 'gaussian_bump'):
            return p['center'], 4.0 * p['width']
        if self.kind == 'modulated':
            return p['center'], 0.5 * p['envelope_width'] \
                + 4.0 * config.ENVELOPE_RAMP_FRACTION * p['envelope_width']
        low, high = self.signal.support
        return 0.5 * (low + high), 0.5 * (high - low) + math.pi / self.signal.bandlimit

    def static_window(self):
        """Symmetric window about the profile centre whose ends satisfy the flatness bound."""
        if 'window' in self._cache:
            return self._cache['window']
        centre, half = self._extent()
        for _ in range(WINDOW_ITERATIONS):
            start, end = centre - half, centre + half
            if self.mirrored:
                start, end = -end, -start
            if max(self.flatness_bound(start), self.flatness_bound(end)) < config.FLATNESS_TOL:
                self._cache['window'] = (start, end)
                logger.debug('static window of %s profile: [%.6g, %.6g]', self.kind, start, end)
                return start, end
            half *= WINDOW_GROWTH
        raise NotAsymptoticallyStatic('no static window found', kind=self.kind, half_width=half)

    def check_positive(self, t_start, t_end):
        ts = np.linspace(t_start, t_end, config.POSITIVITY_SCAN_POINTS)
        values = self.omega(ts)
        lowest = float(np.min(values))
        if not lowest > 0:
            raise ValidationFailed('profile frequency must stay positive', 'profile',
                                   minimum=lowest, at=float(ts[int(np.argmin(values))]))
        return lowest, float(np.max(values))

    # === JSON ===

    def to_json(self):
        document = {'kind': self.kind, **self.params}
        if self.kind == 'sampled':
            document['signal'] = self.signal.to_json()
        if self.mirrored:
            document['mirrored'] = True
        return document

    @classmethod
    def from_json(cls, document):
        if not isinstance(document, dict):
            raise ValidationFailed('profile document must be a JSON object', '')
        kind = document.get('kind')
        if kind not in PROFILE_KINDS:
            raise ValidationFailed('unknown profile kind', 'kind', value=kind)
        params = {k: v for k, v in document.items() if k not in ('kind', 'signal', 'mirrored')}
        signal = None
        if kind == 'sampled':
            if 'signal' not in document:
                raise ValidationFailed('missing field', 'signal')
            signal = SincExpansion.from_json(document['signal'])
        return cls(kind, params, signal, bool(document.get('mirrored', False)))


# ===============================================
# === RESULTS ==================================
# ===============================================

@dataclass(frozen=True, eq=False)
class ModeTrace:
    times: np.ndarray
    q: np.ndarray
    q_dot: np.ndarray
    omega: np.ndarray
    wronskian_drift: float
    omega_in: float
    nfev: int = 0

    @property
    def t_start(self):
        return float(self.times[0])

    @property
    def t_end(self):
        return float(self.times[-1])

    def adiabatic_invariant(self):
        """(|q'|^2 + w^2 |q|^2) / w, equal to |alpha|^2 + |beta|^2 in a static region."""
        return (np.abs(self.q_dot) ** 2 + self.omega ** 2 * np.abs(self.q) ** 2) / self.omega

    def to_frame(self):
        columns = {'time': self.times, 'omega': self.omega}
        columns.update(complex_columns('q', self.q))
        columns.update(complex_columns('q_dot', self.q_dot))
        return pd.DataFrame(columns)


@dataclass(frozen=True)
class BogoliubovPair:
    alpha: complex
    beta: complex
    normalization_residual: float
    flatness_residual: float

    @property
    def excitation(self):
        return abs(self.beta) ** 2

    @property
    def converged(self):
        return self.normalization_residual <= config.NORMALIZATION_TOL

    def to_json(self):
        return {
            'alpha': [self.alpha.real, self.alpha.imag],
            'beta': [self.beta.real, self.beta.imag],
            'beta_squared': self.excitation,
            'normalization_residual': self.normalization_residual,
            'flatness_residual': self.flatness_residual,
            'converged': self.converged,
        }


@dataclass(frozen=True, eq=False)
class ResonanceScan:
    frame: pd.DataFrame
    argmax_frequency: float
    secondary_frequency: float

    def summary(self):
        return {
            'argmax_frequency': self.argmax_frequency,
            'secondary_frequency': self.secondary_frequency,
            'points': int(len(self.frame)),
            'failures': int(self.frame['error'].astype(bool).sum()),
        }


# ===============================================
# === MODE INTEGRATION =========================
# ===============================================

def _check_static(profile, t, end):
    residual = profile.flatness_bound(t)
    if residual >= config.FLATNESS_TOL:
        raise NotAsymptoticallyStatic(f'profile is not static at the {end}', t=t,
                                      flatness=residual, tolerance=config.FLATNESS_TOL)
    return residual


def integrate_mode(profile, t_start=None, t_end=None, ode_tol=None, samples=None):
    """Positive-frequency mode of the initial static region, integrated to ``t_end``."""
    ode_tol = ode_tol or config.PARAMETRIC_ODE_TOL
    samples = samples or config.MODE_SAMPLES
    if t_start is None or t_end is None:
        window = profile.static_window()
        t_start = window[0] if t_start is None else t_start
        t_end = window[1] if t_end is None else t_end
    t_start, t_end = float(t_start), float(t_end)
    if not t_end > t_start:
        raise ValidationFailed('t_end must exceed t_start', 't_end', t_start=t_start, t_end=t_end)
    _check_static(profile, t_start, 'start')
    _check_static(profile, t_end, 'end')
    _, highest = profile.check_positive(t_start, t_end)

    omega_in = profile.omega(t_start)
    q0 = np.exp(-1j * omega_in * t_start) / math.sqrt(2.0 * omega_in)
    y0 = np.array([q0, -1j * omega_in * q0])

    def rhs(t, y):
        return np.array([y[1], -profile.omega(t) ** 2 * y[0]])

    times = np.linspace(t_start, t_end, samples)
    result = solve_ivp(rhs, (t_start, t_end), y0, method=config.ODE_METHOD, t_eval=times,
                       rtol=ode_tol, atol=ode_tol, max_step=math.pi / (4.0 * highest))
    logger.debug('mode integration status %d, nfev %d over [%.4g, %.4g]',
                 result.status, result.nfev, t_start, t_end)
    if result.status < 0:
        raise StepSizeUnderflow(result.message, nfev=result.nfev)

    q, q_dot = result.y
    wronskian = q * np.conj(q_dot) - np.conj(q) * q_dot
    drift = float(np.max(np.abs(wronskian - 1j)))
    allowed = config.NORM_DRIFT_FACTOR * ode_tol * (t_end - t_start)
    if drift > allowed:
        logger.warning('Wronskian drift %.3e exceeds %.3e', drift, allowed)
    return ModeTrace(times, q, q_dot, profile.omega(times), drift, omega_in, int(result.nfev))


def extract_bogoliubov(trace, profile):
    """Match q and q' at the final time against the plane waves of the final frequency."""
    residual = max(_check_static(profile, trace.t_end, 'end'),
                   profile.flatness_bound(trace.t_start))
    t = trace.t_end
    omega = profile.omega(t)
    wave = np.exp(-1j * omega * t) / math.sqrt(2.0 * omega)
    matching = np.array([[wave, np.conj(wave)],
                         [-1j * omega * wave, 1j * omega * np.conj(wave)]])
    alpha, beta = np.linalg.solve(matching, np.array([trace.q[-1], trace.q_dot[-1]]))
    normalization = abs(abs(alpha) ** 2 - abs(beta) ** 2 - 1.0)
    if normalization > config.NORMALIZATION_TOL:
        logger.warning('|alpha|^2 - |beta|^2 misses 1 by %.3e', normalization)
    return BogoliubovPair(complex(alpha), complex(beta), float(normalization), float(residual))


def bogoliubov(profile, t_start=None, t_end=None, ode_tol=None):
    trace = integrate_mode(profile, t_start, t_end, ode_tol)
    return trace, extract_bogoliubov(trace, profile)


# ===============================================
# === RESONANCE & GROWTH =======================
# ===============================================

def resonance_scan(omega0, depth, envelope_width, mod_frequencies=None, ode_tol=None,
                   workers=None):
    """|beta|^2 over modulation frequencies; failed points are recorded, not raised."""
    if mod_frequencies is None:
        mod_frequencies = np.linspace(0.5 * omega0, 3.0 * omega0, config.SCAN_POINTS)
    mod_frequencies = np.asarray(mod_frequencies, dtype=float).reshape(-1)

    def run(nu):
        profile = FrequencyProfile.modulated(omega0, depth, float(nu), envelope_width)
        _, pair = bogoliubov(profile, ode_tol=ode_tol)
        return pair

    outcomes = ordered_map(run, mod_frequencies, workers)
    rows = []
    for nu, (pair, error) in zip(mod_frequencies, outcomes):
        rows.append({
            'mod_frequency': float(nu),
            'beta_squared': pair.excitation if pair else math.nan,
            'normalization_residual': pair.normalization_residual if pair else math.nan,
            'converged': bool(pair.converged) if pair else False,
            'error': '' if error is None else f'{type(error).__name__}: {error}',
        })
    frame = pd.DataFrame(rows, columns=['mod_frequency', 'beta_squared',
                                        'normalization_residual', 'converged', 'error'])

    argmax, secondary = math.nan, math.nan
    valid = frame['beta_squared'].notna()
    if valid.any():
        argmax = float(frame.loc[frame.loc[valid, 'beta_squared'].idxmax(), 'mod_frequency'])
        near = valid & frame['mod_frequency'].between(0.75 * omega0, 1.25 * omega0)
        if near.any():
            secondary = float(frame.loc[frame.loc[near, 'beta_squared'].idxmax(),
                                        'mod_frequency'])
    logger.info('resonance scan over %d frequencies: argmax %.6g, secondary %.6g',
                len(frame), argmax, secondary)
    return ResonanceScan(frame, argmax, secondary)


def growth_rate(trace, window=None):
    """
    Exponential growth rate of |q| over ``window``.

    Fitted as half the slope of the log adiabatic invariant, which follows
    |q|^2 without its fast oscillation.
    """
    times = trace.times
    if window is None:
        window = (times[0], times[-1])
    inside = (times >= window[0]) & (times <= window[1])
    if inside.sum() < 2:
        raise ValidationFailed('growth window holds fewer than two samples', 'window',
                               window=tuple(window))
    energy = trace.adiabatic_invariant()
    slope, _ = np.polyfit(times[inside], np.log(energy[inside]), 1)
    return 0.5 * float(slope)


def plateau(profile):
    """Interval of full modulation of a ``modulated`` profile."""
    if profile.kind != 'modulated':
        raise ValidationFailed('only modulated profiles have a plateau', 'kind',
                               kind=profile.kind)
    half = 0.5 * profile.params['envelope_width']
    centre = profile.params['center']
    window = (centre - half, centre + half)
    return (-window[1], -window[0]) if profile.mirrored else window


def mathieu_rate(omega0, depth):
    """First-zone growth rate at twice the background frequency."""
    return 0.5 * abs(depth) * omega0


def sudden_step_coefficients(omega1, omega2):
    """|alpha| and |beta| for an instantaneous jump from omega1 to omega2."""
    if not (omega1 > 0 and omega2 > 0):
        raise ValidationFailed('frequencies must be positive', 'omega1')
    root = 2.0 * math.sqrt(omega1 * omega2)
    return (omega1 + omega2) / root, abs(omega2 - omega1) / root
