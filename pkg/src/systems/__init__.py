"""
Driven Systems
==============

Responses of N-level systems and oscillators to bandlimited drives, plus the
experiment runner.
"""
