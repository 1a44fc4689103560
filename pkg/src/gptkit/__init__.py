"""Toolkit for generalized probabilistic theories and their axiom audits."""

__version__ = "0.1.0"
