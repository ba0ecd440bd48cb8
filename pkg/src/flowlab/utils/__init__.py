"""Utility functions for Flowlab.

Shared helpers with no dependency on the analysis packages.
"""
