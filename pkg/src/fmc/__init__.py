"""Functional Machine Calculus: terms, a multi-stack machine, reduction, types and encodings."""

__version__ = "0.1.0"
