"""Finite-dimensional laboratory for sigma-derivations of matrix C*-algebras."""

__version__ = "0.1.0"

from .algebra import DEFAULT_TOLERANCES, StarAlgebra, Tolerances, build_algebra
from .constructions import (
    ConstructionReport,
    construct_sigma_thm32,
    construct_sigma_thm33,
    projection_membership_rem35,
    range_span_projection,
    reduce_general_prop36,
    reduce_to_hom_prop34,
)
from .derivations import (
    annihilators,
    derivation_space,
    dstar,
    inner_derivation,
    leibniz_residual,
    lemma22_residual,
    sigma_tau_residual,
    symmetrize,
)
from .errors import InvalidSpecError, PreconditionError, SdlabError, ShapeError
from .example26 import build_example26
from .semidirect import SemidirectContext, phi_d, semidirect_mul, semidirect_norm_estimate
from .supermap import (
    SuperMap,
    identity_map,
    is_homomorphism,
    is_star_linear,
    right_compress,
    star_conjugate,
    star_part,
    supermap_from_images,
    zero_map,
)
