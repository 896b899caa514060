"""Numerical tolerances and size caps."""

from __future__ import annotations

import os

#: Hermiticity / PSD / trace checks on states and observables.
MATRIX_TOL = 1e-9
#: Region predicates (C, D, admissible z, flip-probability validity).
REGION_TOL = 1e-9
#: Steering branches with probability below this are rejected.
ZERO_BRANCH_TOL = 1e-12
#: Relative eigenvalue cutoff when factorizing a Gram matrix.
RANK_CUTOFF = 1e-10
#: Agreement required between two routes to the same correlation.
CROSS_CHECK_TOL = 1e-8
#: Maximum local Hilbert-space dimension accepted per party.
MAX_DIM = 16

TOL_ENV_VAR = "HYPERBIT_TOL"


def default_tolerance() -> float:
    """Region tolerance, overridable through ``HYPERBIT_TOL``."""
    raw = os.environ.get(TOL_ENV_VAR)
    if raw is None or raw == "":
        return REGION_TOL
    value = float(raw)
    if not value > 0:
        raise ValueError(f"{TOL_ENV_VAR} must be positive, got {raw!r}")
    return value
