"""Numerical toolkit for special Kähler bases, semi-flat metrics and their collapse."""

__version__ = "0.1.0"
