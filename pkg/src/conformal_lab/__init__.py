"""Exact symbolic computation for finite-rank Hom-Lie conformal algebras."""

from .algebra import (
    ConformalModule,
    HomConformalAlgebra,
    abelian,
    adjoint_module,
    alpha_power_adjoint,
    bracket,
    check_algebra,
    check_module,
    rank2_example,
    semidirect_sum,
    virasoro,
)
from .cohomology import Cochain, cochain_space_basis, cohomology_dims, differential, differential_s
from .deformation import check_deformation, d_minus1_of_endo, find_nijenhuis, is_nijenhuis, is_trivial_deformation
from .derivations import ConformalMap, ExtensionRule, commutator, derivation_extension, inner_derivation, is_alpha_k_derivation, solve_derivations
from .errors import *  # noqa: F401,F403
from .fileformat import parse_definition, print_definition
from .generalized import breve_extension, decompose_gder, phi_embedding, solve_space
from .polyring import MultiPoly

__version__ = "0.1.0"
