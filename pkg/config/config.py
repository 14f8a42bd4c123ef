"""
Numerical Configuration Constants
=================================

Tolerances, defaults and output settings for the superoscillation toolkit.
Every value here can be overridden per run with ``--config overrides.json``.
"""

import math
import os

# ===============================================
# === SIGNAL SYNTHESIS =========================
# ===============================================

DUPLICATE_TIME_TOL = 1e-12        # Constraint times closer than this are duplicates
SINC_TAYLOR_RADIUS = 1e-8         # |t - t_i| below which the sinc term uses its limit
CONDITION_THRESHOLD = 1e12        # Gram condition number that triggers the extended retry
EXTENDED_PRECISION_DPS = 50       # mpmath working digits for the extended solve
DEFAULT_PRECISION = 'machine'     # 'machine' or 'extended'
RESIDUAL_FLOOR = 1e-9             # Lower bound of the interpolation residual check

# === Characterization ===
SIDELOBE_WIDTHS = 10              # Default scan horizon beyond the window, in units of pi/Omega
CHARACTERIZE_GRID_STEP = 0.01     # Default scan step
GOLDEN_XTOL = 1e-10               # Peak refinement tolerance

# ===============================================
# === QUADRATURE ===============================
# ===============================================

DEFAULT_QUAD_TOL = 1e-9           # Quadrature error per unit time
GAUSS_LEGENDRE_ORDER = 8          # Nodes per panel
PANEL_FRACTION = 1.0 / 8.0        # Panel width as a fraction of min(pi/omega, pi/Omega)
QUAD_MAX_DEPTH = 12               # Bisection depth before TolUnachievable
DEFAULT_TAIL_MODE = 'analytic'    # 'analytic', 'truncate' or 'none'
MAX_TAIL_SPAN = 2000.0            # Cap on the truncated lower cutoff distance
SIMPSON_MAX_DEPTH = 50            # Recursion cap of the adaptive Simpson oracle

# ===============================================
# === ODE INTEGRATION ==========================
# ===============================================

DEFAULT_ODE_TOL = 1e-10           # rtol = atol for the level-amplitude equations
ODE_METHOD = 'DOP853'             # Embedded Runge-Kutta pair used by solve_ivp
NORM_DRIFT_FACTOR = 100.0         # Allowed drift = factor * tol * span
PERTURBATIVE_DELTAS = (0.1, 0.05, 0.025, 0.0125)  # Coupling ladder of the order check

# ===============================================
# === HARMONIC OSCILLATOR ======================
# ===============================================

POISSON_TAIL_TOL = 1e-12          # Level cutoff: Poisson tail beyond N_max
MAX_LEVELS = 400                  # Hard cap on automatic N_max

# ===============================================
# === ANHARMONIC OSCILLATOR ====================
# ===============================================

QUARTIC_PAD = 4                   # Padding before raising the position matrix to the 4th power
CONVERGENCE_TOL = 1e-8            # Eigenvalue stability between N and 2N
FIG3_COUPLING = 1.0               # Quartic coupling of the gap figure
FIG3_TRUNCATION = 16              # Basis size of the gap figure

# ===============================================
# === DISPERSIVE OSCILLATOR ====================
# ===============================================

DEGENERATE_ROOT_TOL = 1e-6        # |w1 - w2| below which partial fractions are refused
DECAY_PERIODS = 10                # Periods of the slower root used by the decay check
BAND_CHUNK_PANELS = 64            # Initial panels over [0, Omega] for the band path

# ===============================================
# === PARAMETRIC OSCILLATOR ====================
# ===============================================

PARAMETRIC_ODE_TOL = 1e-11        # rtol = atol for the mode equation
FLATNESS_TOL = 1e-6               # |omega' / omega^2| defining a static end
NORMALIZATION_TOL = 1e-8          # | |alpha|^2 - |beta|^2 - 1 | for a converged run
SCAN_POINTS = 51                  # Default modulation grid size over [w0/2, 3 w0]
ENVELOPE_RAMP_FRACTION = 0.1      # Gaussian ramp width relative to the plateau length
POSITIVITY_SCAN_POINTS = 2001     # Samples used to check omega(t) > 0
MODE_SAMPLES = 4001               # Output samples of an integrated mode

# ===============================================
# === SWEEPS & OUTPUT ==========================
# ===============================================

DEFAULT_WORKERS = min(8, os.cpu_count() or 1)
CSV_DIGITS = 17                   # Significant digits of every CSV number
DIGEST_PREFIX = 12                # Hex digits of the digest used in directory names
OUT_DIR_ENV = 'SUPEROSC_OUT_DIR'
DEFAULT_OUT_DIR = 'out'
MAX_INPUT_FILE_SIZE = 16 * 1024 * 1024  # 16MB

# ===============================================
# === FIGURES ==================================
# ===============================================

FIG1_BANDLIMIT = math.pi / 2      # Bandlimit of the alternating example
FIG1_INDEX_RANGE = (-5, 5)        # n range of a_n = (-1)^n
FIG1_WINDOW = (-4.0, 4.0)         # Superoscillating window
FIG1_HORIZON = 40.0               # |t| scan horizon of the global view
FIG2_PROBE = math.pi              # Probe frequency of the response figure
FIG2_GRID = (-40.0, 40.0, 0.05)   # start, stop, step of the response figure

# ===============================================
# === PLOTTING =================================
# ===============================================

SVG_HASH_SALT = 'superosc'        # Fixed id salt for byte-stable SVG
FIGURE_SIZE = (6.4, 4.0)          # Inches per panel
LINE_WIDTH = 1.0

# ===============================================
# === LOGGING ==================================
# ===============================================

LOG_LEVEL = 'INFO'
LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'
