#!/usr/bin/env python3
"""
Configuration Tools Launcher
============================

Prints the configuration summary and validates it with proper path setup.
"""

import os
import sys
from pathlib import Path

# Get the project root directory
project_root = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root))

# Change to project directory
os.chdir(project_root)

try:
    from tools.config_validator import print_config_summary, report_config
    print("🔧 Starting Configuration Tools...")
    print_config_summary()
    print()
    sys.exit(0 if report_config() else 1)
except ImportError as e:
    print(f"❌ Error starting config tools: {e}")
    print("Please ensure all tool files are present.")
    sys.exit(1)
