"""Numerical potential theory: Newtonian and Helmholtz potentials of 3-D
domains, harmonic moments, and transparent-ball constructions."""
from . import geometry, moments, potentials, specfun, transparency
from .errors import (
    ConvergenceRegionError,
    DegenerateInputError,
    DomainError,
    NearSingularityError,
    PotlabError,
)
from .geometry import Ball, StarShaped, surface_mesh, volume_quadrature

__version__ = "0.1.0"
