#!/usr/bin/env python3
"""
Test Runner Script
=================

Discovers and runs every suite under tests/ with proper path setup.
"""

import os
import sys
import unittest
from pathlib import Path

# Get the project root directory
project_root = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root))

# Change to project directory
os.chdir(project_root)

try:
    print("🧪 Running Test Suite...")
    suite = unittest.defaultTestLoader.discover(str(project_root / 'tests'), pattern='test_*.py',
                                                top_level_dir=str(project_root))
    result = unittest.TextTestRunner(verbosity=2).run(suite)
    if result.wasSuccessful():
        print(f"✅ All {result.testsRun} tests passed")
    else:
        print(f"❌ {len(result.failures)} failures, {len(result.errors)} errors")
    sys.exit(0 if result.wasSuccessful() else 1)
except ImportError as e:
    print(f"❌ Error importing tests: {e}")
    print("Please ensure all test files are present.")
    sys.exit(1)
