"""Exact q-series toolkit for internal congruences of ph3 and ps3 modulo powers of 3."""

__version__ = "0.1.0"
