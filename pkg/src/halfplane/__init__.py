"""Normal-mode analysis and finite-difference experiments for the elastic half-plane."""

from .dispersion import Material, RayleighMode, find_rayleigh_mode, phi, psi
from .exact import RayleighWaveSpec, ModeConversionSpec, rayleigh_field, solve_reflection
from .boundary import BoundaryData, BoundaryResponse, TruncationCoeffs, solve_boundary_system
from .config import ExperimentConfig
from .solver import Grid, SchemeOrder, Solver, WaveField, cfl_dt, run

__all__ = [
    "Material",
    "RayleighMode",
    "find_rayleigh_mode",
    "phi",
    "psi",
    "RayleighWaveSpec",
    "ModeConversionSpec",
    "rayleigh_field",
    "solve_reflection",
    "BoundaryData",
    "BoundaryResponse",
    "TruncationCoeffs",
    "solve_boundary_system",
    "ExperimentConfig",
    "Grid",
    "SchemeOrder",
    "Solver",
    "WaveField",
    "cfl_dt",
    "run",
]
