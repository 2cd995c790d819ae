from ._core import (ConfigError, EigenIndex, Grid, PhysParams, SpectralField, compute_M, compute_N,
                    dimension_bound, gauss_constant, rho_m, run, simulate_decay, sobolev_constant)

__all__ = [
    "ConfigError", "EigenIndex", "Grid", "PhysParams", "SpectralField", "compute_M", "compute_N",
    "dimension_bound", "gauss_constant", "rho_m", "run", "simulate_decay", "sobolev_constant",
]
