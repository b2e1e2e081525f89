"""Closed-form and split-step simulation of 1D quantum droplets in linear traps."""
from .analytic import (DropletParams, DropletState, KineticConvention, full_wavefunction,
                       mu_of_norm, norm_of_mu)
from .core import ComplexField, SpatialGrid, make_grid
from .potentials import PotentialSpec, Variant
from .propagator import EvolutionConfig, evolve

__version__ = "0.1.0"

__all__ = [
    "ComplexField", "DropletParams", "DropletState", "EvolutionConfig", "KineticConvention",
    "PotentialSpec", "SpatialGrid", "Variant", "evolve", "full_wavefunction", "make_grid",
    "mu_of_norm", "norm_of_mu", "__version__",
]
