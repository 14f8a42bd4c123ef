"""
Quadrature
==========

Composite Gauss-Legendre running integrals with panel bisection, plus an
adaptive Simpson integrator kept as an independent oracle.
"""

import logging
from functools import lru_cache

import numpy as np

import config
from src.core.errors import TolUnachievable

logger = logging.getLogger(__name__)

EPS = np.finfo(float).eps


@lru_cache(maxsize=8)
def gauss_legendre_rule(order):
    """Nodes and weights of the ``order``-point rule on [-1, 1]."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _panel_estimates(integrand, lo, hi, order):
    """Whole-panel and two-half estimates for every panel at once."""
    nodes, weights = gauss_legendre_rule(order)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    quarter = 0.5 * half

    f_whole = integrand(mid[:, None] + half[:, None] * nodes)
    f_left = integrand((mid - half * 0.5)[:, None] + quarter[:, None] * nodes)
    f_right = integrand((mid + half * 0.5)[:, None] + quarter[:, None] * nodes)

    whole = half * (f_whole @ weights)
    halves = quarter * (f_left @ weights + f_right @ weights)
    scale = quarter * (np.abs(f_left) @ weights + np.abs(f_right) @ weights)
    return halves, np.abs(halves - whole), scale


def cumulative_quadrature(integrand, edges, max_width, tol, order=None, max_depth=None):
    """
    Running integral of ``integrand`` over consecutive ``edges``.

    Each interval between neighbouring edges is cut into equal panels no wider
    than ``max_width``; a panel is accepted once its whole and two-half
    estimates agree within ``tol`` per unit length (or the roundoff floor),
    otherwise it is bisected.

    Parameters
    ----------
    integrand : callable
        Vectorized function of a float array, returning a real or complex
        array of the same shape.
    edges : (K,) array
        Increasing abscissae. The result at ``edges[0]`` is 0.
    max_width : float
        Largest panel width.
    tol : float
        Error budget per unit length.

    Returns
    -------
    values : (K,) complex array
        ``values[k]`` is the integral from ``edges[0]`` to ``edges[k]``.
    error : float
        Sum of the accepted panel error estimates.
    """
    order = order or config.GAUSS_LEGENDRE_ORDER
    max_depth = config.QUAD_MAX_DEPTH if max_depth is None else max_depth
    edges = np.asarray(edges, dtype=float)
    values = np.zeros(edges.size, dtype=complex)
    if edges.size < 2:
        return values, 0.0

    lengths = np.diff(edges)
    counts = np.maximum(1, np.ceil(lengths / max_width).astype(int))
    owner = np.repeat(np.arange(lengths.size), counts)
    first = np.repeat(np.cumsum(counts) - counts, counts)
    position = np.arange(owner.size) - first
    width = (lengths / counts)[owner]
    lo = edges[:-1][owner] + position * width
    hi = np.where(position == counts[owner] - 1, edges[1:][owner], lo + width)

    sums = np.zeros(lengths.size, dtype=complex)
    error = 0.0
    depth = 0
    while lo.size:
        estimate, err, scale = _panel_estimates(integrand, lo, hi, order)
        allowed = tol * (hi - lo) + 64.0 * EPS * scale
        accepted = err <= allowed
        np.add.at(sums, owner[accepted], estimate[accepted])
        error += float(err[accepted].sum())
        if accepted.all():
            break
        if depth >= max_depth:
            worst = int(np.argmax(err - allowed))
            raise TolUnachievable(
                'panel refinement hit the depth limit',
                panel=(float(lo[worst]), float(hi[worst])),
                error=float(err[worst]),
                depth=depth,
            )
        rejected = ~accepted
        mid = 0.5 * (lo[rejected] + hi[rejected])
        lo = np.concatenate([lo[rejected], mid])
        hi = np.concatenate([mid, hi[rejected]])
        owner = np.concatenate([owner[rejected], owner[rejected]])
        depth += 1
        logger.debug('bisected %d panels (depth %d)', int(rejected.sum()), depth)

    values[1:] = np.cumsum(sums)
    return values, error


def definite_integral(integrand, a, b, max_width, tol):
    """Single definite integral through the same panel machinery."""
    values, error = cumulative_quadrature(integrand, [a, b], max_width, tol)
    return values[-1], error


# ===============================================
# === ORACLE ===================================
# ===============================================

def adaptive_simpson(func, a, b, tol=1e-12, max_depth=None):
    """Scalar adaptive Simpson rule with Richardson correction."""
    max_depth = max_depth or config.SIMPSON_MAX_DEPTH

    def simpson(fa, fm, fb, a, b):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm = func(lm)
        frm = func(rm)
        left = simpson(fa, flm, fm, a, m)
        right = simpson(fm, frm, fb, m, b)
        delta = left + right - whole
        if depth >= max_depth or abs(delta) <= 15.0 * tol:
            return left + right + delta / 15.0
        return (recurse(a, m, fa, flm, fm, left, tol / 2.0, depth + 1)
                + recurse(m, b, fm, frm, fb, right, tol / 2.0, depth + 1))

    fa, fb = func(a), func(b)
    fm = func(0.5 * (a + b))
    return recurse(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 0)
