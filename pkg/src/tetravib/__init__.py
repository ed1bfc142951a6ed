"""Symmetric vibrations of a tetrahedral four-particle molecule.

Pipeline: pair force field -> tetrahedral equilibrium -> Hessian spectrum on
the isotypic components of the particle-permutation symmetry -> bifurcation
invariants in the Burnside ring of the full spatio-temporal symmetry group ->
numerical continuation of the predicted symmetric periodic orbit families.
"""

from .forcefield import (
    PairPotential, Configuration, EquilibriumResult,
    pair_potential, total_potential, gradient, hessian, find_equilibrium,
    DomainError, DegenerateParameters, ConvergenceError,
)
from .grouprep import (
    realization, act, action_matrix, multiplicities,
    isotypic_projection, isotypic_decomposition, slice_spectrum,
)

__version__ = "0.1.0"
