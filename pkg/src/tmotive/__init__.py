"""Exact computer algebra for Anderson t-motives over F_q[t]."""

__version__ = "0.1.0"
