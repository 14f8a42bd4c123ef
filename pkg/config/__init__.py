"""
Configuration Package
====================

Numerical tolerances, defaults and experiment presets.
"""

from .config import *  # noqa: F401,F403
