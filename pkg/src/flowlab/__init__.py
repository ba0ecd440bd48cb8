"""Flowlab - certificates for tail boundary flows and nonsingular Bernoulli shifts."""

__version__ = "0.1.0"
