"""Lattice Donaldson-Thomas instantons on the flat 6-torus."""

from ._core import (
    ConfigError,
    DomainError,
    EnergyBreakdown,
    FieldState,
    LatticeSpec,
    SnapshotError,
    coulomb_fix,
    field_bump,
    identity_sweep,
    implied_constants,
    minimize,
    monotonicity,
    random_rough_state,
    random_smooth_state,
    read_state,
    snapshot_bytes,
    write_snapshot,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "EnergyBreakdown",
    "FieldState",
    "LatticeSpec",
    "SnapshotError",
    "coulomb_fix",
    "field_bump",
    "identity_sweep",
    "implied_constants",
    "minimize",
    "monotonicity",
    "random_rough_state",
    "random_smooth_state",
    "read_state",
    "snapshot_bytes",
    "write_snapshot",
]
