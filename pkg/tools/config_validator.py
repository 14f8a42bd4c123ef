#!/usr/bin/env python3
"""
Configuration Validator
=======================

Checks the numerical configuration for values that cannot work or that make
results unreliable, and prints a summary of the active settings.
"""

import config
from tools.validation import input_validator


def validate_config():
    """Returns ``(issues, warnings)``; issues make every run fail or mislead."""
    issues = []
    warnings = []

    # Every override-able constant must pass the same checks as --config
    for name in sorted(vars(config)):
        if not name.isupper():
            continue
        ok, message = input_validator.validate_setting_value(getattr(config, name), name)
        if not ok:
            issues.append(f"{name}: {message}")

    if config.DEFAULT_QUAD_TOL >= 1e-3:
        issues.append("DEFAULT_QUAD_TOL must be below 1e-3")
    if config.DEFAULT_ODE_TOL >= 1e-3 or config.PARAMETRIC_ODE_TOL >= 1e-3:
        issues.append("ODE tolerances must be below 1e-3")
    if config.DEFAULT_PRECISION not in input_validator.PRECISION_CHOICES:
        issues.append("DEFAULT_PRECISION must be 'machine' or 'extended'")
    if config.DEFAULT_TAIL_MODE not in input_validator.TAIL_CHOICES:
        issues.append("DEFAULT_TAIL_MODE must be 'analytic', 'truncate' or 'none'")
    if config.GAUSS_LEGENDRE_ORDER < 2:
        issues.append("GAUSS_LEGENDRE_ORDER must be at least 2")
    if not 0 < config.PANEL_FRACTION <= 1:
        issues.append("PANEL_FRACTION must lie in (0, 1]")
    if config.MAX_TAIL_SPAN <= 0:
        issues.append("MAX_TAIL_SPAN must be positive")
    if config.MAX_LEVELS < 2:
        issues.append("MAX_LEVELS must be at least 2")
    if config.FIG3_TRUNCATION < 4:
        issues.append("FIG3_TRUNCATION must be at least 4")
    deltas = list(config.PERTURBATIVE_DELTAS)
    if len(deltas) < 2 or any(b >= a for a, b in zip(deltas, deltas[1:])):
        issues.append("PERTURBATIVE_DELTAS must be a decreasing ladder of at least two values")
    start, stop, step = config.FIG2_GRID
    if step <= 0 or stop <= start:
        issues.append("FIG2_GRID must be (start, stop, step) with stop > start and step > 0")
    if config.FIG1_WINDOW[1] <= config.FIG1_WINDOW[0]:
        issues.append("FIG1_WINDOW must be ordered")

    if config.CONDITION_THRESHOLD > 1e15:
        warnings.append("CONDITION_THRESHOLD above 1e15 lets machine solves lose all digits")
    if config.EXTENDED_PRECISION_DPS < 30:
        warnings.append("EXTENDED_PRECISION_DPS below 30 may not rescue ill-conditioned solves")
    if config.FIG1_HORIZON <= max(abs(v) for v in config.FIG1_WINDOW):
        warnings.append("FIG1_HORIZON does not reach beyond the superoscillating window")
    if config.DEFAULT_QUAD_TOL > 1e-6:
        warnings.append("DEFAULT_QUAD_TOL above 1e-6 loosens every closed-form comparison")

    return issues, warnings


def report_config():
    """Print the validation result; returns True when there are no issues."""
    issues, warnings = validate_config()

    if issues:
        print("❌ Configuration Issues Found:")
        for issue in issues:
            print(f"  - {issue}")

    if warnings:
        print("⚠️  Configuration Warnings:")
        for warning in warnings:
            print(f"  - {warning}")

    if not issues and not warnings:
        print("✅ Configuration validation passed!")

    return len(issues) == 0


def print_config_summary():
    """Print a summary of key configuration settings."""
    print("📐 Numerical Configuration Summary")
    print("=" * 40)

    print("Synthesis:")
    print(f"  Precision: {config.DEFAULT_PRECISION}")
    print(f"  Condition Threshold: {config.CONDITION_THRESHOLD:.1e}")
    print(f"  Extended Digits: {config.EXTENDED_PRECISION_DPS}")

    print("\nQuadrature:")
    print(f"  Tolerance: {config.DEFAULT_QUAD_TOL:.1e}")
    print(f"  Gauss-Legendre Order: {config.GAUSS_LEGENDRE_ORDER}")
    print(f"  Tail Mode: {config.DEFAULT_TAIL_MODE}")

    print("\nODE:")
    print(f"  Method: {config.ODE_METHOD}")
    print(f"  Tolerance: {config.DEFAULT_ODE_TOL:.1e}")
    print(f"  Parametric Tolerance: {config.PARAMETRIC_ODE_TOL:.1e}")

    print("\nOscillators:")
    print(f"  Max Levels: {config.MAX_LEVELS}")
    print(f"  Anharmonic Convergence: {config.CONVERGENCE_TOL:.1e}")
    print(f"  Scan Points: {config.SCAN_POINTS}")

    print("\nOutput:")
    print(f"  Workers: {config.DEFAULT_WORKERS}")
    print(f"  CSV Digits: {config.CSV_DIGITS}")
    print(f"  Log Level: {config.LOG_LEVEL}")


if __name__ == "__main__":
    print_config_summary()
    print()
    report_config()
