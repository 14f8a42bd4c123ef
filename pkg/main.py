"""
Superoscillating Drives
=======================

Bandlimited signals that oscillate faster than their highest frequency over a
finite window, and the quantum and classical systems they drive:
- Min-norm synthesis through prescribed points, with extended-precision fallback
- Running Fourier transforms and temporary resonances above the band
- Driven N-level systems, harmonic and quartic oscillators
- Dispersive modes with two roots and parametric (time-dependent frequency) oscillators
- Reproducible experiment manifests, parameter sweeps and SVG figures

Usage:
- python main.py synthesize --constraints points.json --window -4 4
- python main.py respond --constraints points.json --omega 3.14159 --grid=-40:40:0.05
- python main.py figure fig1
- python main.py sweep --preset fig2 --override 'inputs.omega=[2.0, 3.0]'
- python main.py config
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

from src.ui.cli import main  # noqa: E402

if __name__ == '__main__':
    sys.exit(main())
