"""Forward kinematics of multiple robots holding a deformable sheet."""

from ._core import (
    Equilibrium,
    FkResult,
    ParseError,
    Scene,
    Solution,
    Stability,
    ValidationError,
    envelope_at,
    find_equilibria,
    load_scene,
    lowest_energy,
    regular_polygon_scene,
    solve_fk,
)

__all__ = [
    "Equilibrium",
    "FkResult",
    "ParseError",
    "Scene",
    "Solution",
    "Stability",
    "ValidationError",
    "envelope_at",
    "find_equilibria",
    "load_scene",
    "lowest_energy",
    "regular_polygon_scene",
    "solve_fk",
]

__version__ = "0.1.0"
