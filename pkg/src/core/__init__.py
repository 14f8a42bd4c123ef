"""
Core Components
===============

Errors, quadrature, bandlimited signals and shared I/O utilities.
"""
