"""
Development Tools
================

Input validation and configuration checks.
"""
