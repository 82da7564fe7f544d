# src/polyrigid/config.py
"""
Central configuration for polyrigid.

Every numeric tolerance lives here so the ladder stays in one place:
model constraints < per-step consistency < measurement round-trip < congruence.
"""
from __future__ import annotations

import os

# Points must satisfy their model constraint (unit norm, hyperboloid) to this
MODEL_TOL: float = 1e-12

# Per-step consistency of a solved vertex figure / placed neighborhood
STEP_TOL: float = 1e-9

# Generalized trigonometry residuals accepted from a solver
RESIDUAL_TOL: float = 1e-9

# measure(reconstruct(M)) must reproduce M per entry within this
MEASURE_TOL: float = 1e-8

# End-to-end congruence residual after the whole reverse sequence
CONGRUENCE_TOL: float = 1e-6

# Angles / lengths this close to 0, pi or 2pi are treated as singular
SINGULAR_BAND: float = 1e-6

# Cosines in [-1 - slack, 1 + slack] are clamped; beyond that -> Unrealizable
ARCCOS_SLACK: float = 1e-12

# Face planarity (absolute, unit-scale inputs)
PLANARITY_TOL: float = 1e-9

# Coplanar hull facets are merged below this normal/offset deviation
HULL_MERGE_TOL: float = 1e-9

# Great-arc crossing test used by the self-intersection check
ARC_INTERSECT_TOL: float = 1e-10

# Reflection-branch agreement of boundary dihedral angles during reverse gluing
BRANCH_TOL: float = 1e-6

# Distances between the same two vertices derived from two placements must agree
CROSSCHECK_TOL: float = 1e-6

# Fixture generators give up after this many rejected samples
DEFAULT_REJECTION_BUDGET: int = 200

# Seed used by the CLI when none is given
DEFAULT_SEED: int = 0

# Environment variables
TOL_ENV_VAR: str = "POLYRIGID_TOL"
JOBS_ENV_VAR: str = "POLYRIGID_JOBS"


def get_congruence_tol() -> float:
    """Return the congruence tolerance, honouring the POLYRIGID_TOL override."""
    raw = os.environ.get(TOL_ENV_VAR)
    if raw is None or not raw.strip():
        return CONGRUENCE_TOL
    try:
        value = float(raw)
    except ValueError:
        raise ValueError(f"{TOL_ENV_VAR} must be a positive number, got {raw!r}") from None
    if not value > 0:
        raise ValueError(f"{TOL_ENV_VAR} must be a positive number, got {raw!r}")
    return value


def get_default_jobs() -> int:
    """Worker count for batch commands (POLYRIGID_JOBS, defaults to 1)."""
    raw = os.environ.get(JOBS_ENV_VAR, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1
