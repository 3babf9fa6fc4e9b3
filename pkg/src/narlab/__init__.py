"""Sensorimotor non-axiomatic reasoner and operant-conditioning lab."""

__version__ = "0.1.0"
