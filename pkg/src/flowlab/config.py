"""Configuration and defaults for Flowlab.

This module centralizes all numeric defaults and environment variables.
"""

import os

# Measure arithmetic
DEFAULT_EPS_TRUNC = 1e-12
MERGE_RTOL = 1e-12
MASS_TOL = 1e-9

# Transport
DEFAULT_LP_LIMIT = 200

# Certificates
DEFAULT_DIVERGENCE_THRESHOLD = 1e3
DEFAULT_GROWTH_RATIO = 0.25
MIN_WITNESS_TERMS = 8
STABILIZATION_TOL = 1e-9
BOUND_SLACK = 1e-9

# Analyses
DEFAULT_HORIZON = 100
DEFAULT_SEED = 0
BRIDGE_TOLERANCE = 0.05

# Almost periodic pipeline search budgets
TRANSLATION_BUDGET = 10**6
CONTRACTION_BUDGET = 4096
CONTRACTION_LOOKAHEAD = 256

# Suspension generator
CONSERVATIVITY_RATIO = 3.0
SELECTION_GROWTH = 3.5
DEFECT_BUDGET = 1e-6

# Report output
CSV_FLOAT_FORMAT = ".17g"
INPUT_MAX_SIZE_BYTES = 50 * 1024 * 1024


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name, "")
    try:
        value = int(raw)
    except ValueError:
        return default
    return value if value > 0 else default


# Environment variable overrides
THREADS = _env_int("FLOWLAB_THREADS", 1)
LOG_LEVEL = os.getenv("FLOWLAB_LOG_LEVEL", "WARNING").upper()
