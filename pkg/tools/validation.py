#!/usr/bin/env python3
"""
Input Validation
================

Checks applied to everything that enters from outside the library: input
files, configuration override names and override values. Each check returns
an ``(ok, message)`` pair; callers decide whether a failure is fatal.
"""

import math
import re
from pathlib import Path
from typing import Any, Tuple

import config


class InputValidator:
    """Validation rules for input files and configuration overrides."""

    MAX_SETTING_NAME_LENGTH = 50
    ALLOWED_INPUT_EXTENSIONS = {'.json', '.csv'}
    ALLOWED_SETTING_TYPES = (bool, int, float, str, list, tuple)
    PRECISION_CHOICES = {'machine', 'extended'}
    TAIL_CHOICES = {'analytic', 'truncate', 'none'}

    # Matched against the end of the setting name
    NUMERIC_RANGES = {
        '_TOL': (0.0, 1e-2),
        '_RADIUS': (0.0, 1e-3),
        '_THRESHOLD': (1.0, 1e300),
        '_DPS': (16, 2000),
        '_ORDER': (2, 64),
        '_DEPTH': (1, 60),
        '_FACTOR': (1.0, 1e12),
        '_FRACTION': (0.0, 1.0),
        '_WORKERS': (1, 1024),
        '_DIGITS': (15, 17),
        '_POINTS': (2, 10 ** 6),
        '_LEVELS': (1, 10 ** 4),
    }

    @staticmethod
    def validate_input_path(file_path, allowed_extensions=None) -> Tuple[bool, str]:
        """Validate an input file path."""
        try:
            path = Path(file_path)
            if not path.exists():
                return False, f"File not found: {file_path}"
            if not path.is_file():
                return False, f"Not a regular file: {file_path}"
            allowed = allowed_extensions or InputValidator.ALLOWED_INPUT_EXTENSIONS
            if path.suffix.lower() not in allowed:
                return False, f"Invalid file extension. Allowed: {sorted(allowed)}"
            if path.stat().st_size > config.MAX_INPUT_FILE_SIZE:
                return False, f"File too large (max {config.MAX_INPUT_FILE_SIZE} bytes)"
            return True, "Valid"
        except OSError as e:
            return False, f"Path validation error: {e}"

    @staticmethod
    def validate_setting_name(name: str) -> Tuple[bool, str]:
        """Validate a configuration override name."""
        if not isinstance(name, str):
            return False, "Setting name must be string"
        if len(name) > InputValidator.MAX_SETTING_NAME_LENGTH:
            return False, f"Setting name too long (max {InputValidator.MAX_SETTING_NAME_LENGTH})"
        if not re.match(r'^[A-Z_][A-Z0-9_]*$', name):
            return False, "Setting name must be uppercase with underscores only"
        if not hasattr(config, name):
            return False, f"Unknown setting: {name}"
        return True, "Valid"

    @staticmethod
    def validate_setting_value(value: Any, setting_name: str = "") -> Tuple[bool, str]:
        """Validate an override value against the current constant's type and range."""
        if not isinstance(value, InputValidator.ALLOWED_SETTING_TYPES):
            return False, f"Invalid type. Allowed: {InputValidator.ALLOWED_SETTING_TYPES}"

        current = getattr(config, setting_name, None)
        if current is not None:
            numeric = (int, float)
            if isinstance(current, bool) != isinstance(value, bool):
                return False, f"Expected {type(current).__name__}"
            if isinstance(current, numeric) and not isinstance(value, numeric):
                return False, f"Expected a number for {setting_name}"
            if isinstance(current, int) and not isinstance(current, bool) \
                    and isinstance(value, float) and not value.is_integer():
                return False, f"Expected an integer for {setting_name}"
            if isinstance(current, str) and not isinstance(value, str):
                return False, f"Expected a string for {setting_name}"
            if isinstance(current, (tuple, list)) and not isinstance(value, (tuple, list)):
                return False, f"Expected a list for {setting_name}"

        if isinstance(value, str):
            if setting_name == 'DEFAULT_PRECISION' and value not in InputValidator.PRECISION_CHOICES:
                return False, f"Value must be one of {sorted(InputValidator.PRECISION_CHOICES)}"
            if setting_name == 'DEFAULT_TAIL_MODE' and value not in InputValidator.TAIL_CHOICES:
                return False, f"Value must be one of {sorted(InputValidator.TAIL_CHOICES)}"

        if isinstance(value, (int, float)) and not isinstance(value, bool):
            if not math.isfinite(value):
                return False, "Numeric value must be finite"
            for suffix, (min_val, max_val) in InputValidator.NUMERIC_RANGES.items():
                if not setting_name.endswith(suffix):
                    continue
                # A zero lower bound is exclusive
                if not (min_val <= value <= max_val) or (min_val == 0 and value == 0):
                    return False, f"Value must be between {min_val} and {max_val}"

        return True, "Valid"


input_validator = InputValidator()
