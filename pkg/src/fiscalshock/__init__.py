"""Fiscal shock extraction and sign-asymmetry testing."""

__version__ = "0.1.0"
