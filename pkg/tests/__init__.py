"""
Test Suite
==========

Numerical, interface and configuration tests.
"""
