#!/usr/bin/env python3
"""
CLI Launcher Script
===================

Runs the command line interface with proper path setup. Relative paths in
the arguments are resolved against the caller's working directory.
"""

import sys
from pathlib import Path

# Get the project root directory
project_root = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root))

try:
    from src.ui.cli import main
except ImportError as e:
    print(f"❌ Error starting CLI: {e}")
    print("Please install the requirements: pip install -r requirements.txt")
    sys.exit(1)

code = main(sys.argv[1:])
if code == 0:
    print("✅ Done")
elif code == 1:
    print("❌ Invalid input (see the log above)")
else:
    print("⚠️  Numerical failure (see the log above)")
sys.exit(code)
