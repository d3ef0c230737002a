"""Caginalp-type phase-field solver."""

from ._caginalp import (
    BoundarySpec,
    ConfigError,
    DomainError,
    EnergyReport,
    EstimateConstants,
    FieldState,
    Grid,
    HatParams,
    IoError,
    NondimParams,
    NumericalError,
    PhysicalParams,
    Potentials,
    SharpScalings,
    cli,
    estimate_constants,
    hat_from_sharp,
    hat_params,
    make_state,
    nondimensionalize,
    pde,
    profile,
    sharp_scalings,
    stefan,
)

__all__ = [
    "BoundarySpec",
    "ConfigError",
    "DomainError",
    "EnergyReport",
    "EstimateConstants",
    "FieldState",
    "Grid",
    "HatParams",
    "IoError",
    "NondimParams",
    "NumericalError",
    "PhysicalParams",
    "Potentials",
    "SharpScalings",
    "cli",
    "estimate_constants",
    "hat_from_sharp",
    "hat_params",
    "make_state",
    "nondimensionalize",
    "pde",
    "profile",
    "sharp_scalings",
    "stefan",
]
