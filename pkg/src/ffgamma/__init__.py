"""Thakur Gamma values in positive characteristic: evaluation, bracket relations, CM classification."""

__version__ = "0.1.0"
