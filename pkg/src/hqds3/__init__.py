"""Commutative 3-d algebras and their homogeneous quadratic systems.

The quadratic system x' = x * x on R^3 and the commutative algebra with
structure tensor c are two views of one object; this package classifies the
algebras that admit an invertible real-diagonalizable derivation into four
canonical classes and verifies the matching dynamical dictionary.
"""
from .algebra import (
    Algebra,
    NAMED_SLOTS,
    SingularBasis,
    annihilator,
    automorphism_residual,
    change_of_basis,
    conjugated,
    from_named,
    from_products,
    idempotents,
    left_mult_matrix,
    nilpotent_cone,
    product,
    square_ideal,
    square_map,
    structure_flags,
    subspace_check,
    zero_algebra,
)
from .catalog import (
    CANONICAL_TAGS,
    automorphism_family,
    automorphism_swap,
    canonical_algebra,
    canonical_system,
    derivation_family,
)
from .classify import (
    ClassificationResult,
    InvariantFingerprint,
    certificate_residual,
    classify,
    classify_via_derivation,
    fingerprint,
    pairwise_noniso_witness,
    reduce_with_derivation,
)
from .derivations import (
    ConstantMask,
    IllConditioned,
    SingularSpectrum,
    SpectralReport,
    SpectrumCase,
    SsndSearchConfig,
    admissible_mask,
    analyze_spectrum,
    arrangement_lines,
    derivation_residual,
    derivation_space,
    find_real_ssnd,
    jordan_chevalley,
    normalize_spectrum,
)
from .dynamics import (
    CellId,
    DegenerateVelocity,
    IntegratorConfig,
    PreconditionFailed,
    Trajectory,
    affine_flow,
    analytic_derivatives,
    cell_of,
    curvature_torsion,
    integrate,
    linear_first_integrals,
    ray_solution,
    save_csv,
    steady_state_residual,
    trajectory_to_csv,
)

__version__ = "0.1.0"

__all__ = [
    "Algebra",
    "NAMED_SLOTS",
    "SingularBasis",
    "annihilator",
    "automorphism_residual",
    "change_of_basis",
    "conjugated",
    "from_named",
    "from_products",
    "idempotents",
    "left_mult_matrix",
    "nilpotent_cone",
    "product",
    "square_ideal",
    "square_map",
    "structure_flags",
    "subspace_check",
    "zero_algebra",
    "CANONICAL_TAGS",
    "automorphism_family",
    "automorphism_swap",
    "canonical_algebra",
    "canonical_system",
    "derivation_family",
    "ClassificationResult",
    "InvariantFingerprint",
    "certificate_residual",
    "classify",
    "classify_via_derivation",
    "fingerprint",
    "pairwise_noniso_witness",
    "reduce_with_derivation",
    "ConstantMask",
    "IllConditioned",
    "SingularSpectrum",
    "SpectralReport",
    "SpectrumCase",
    "SsndSearchConfig",
    "admissible_mask",
    "analyze_spectrum",
    "arrangement_lines",
    "derivation_residual",
    "derivation_space",
    "find_real_ssnd",
    "jordan_chevalley",
    "normalize_spectrum",
    "CellId",
    "DegenerateVelocity",
    "IntegratorConfig",
    "PreconditionFailed",
    "Trajectory",
    "affine_flow",
    "analytic_derivatives",
    "cell_of",
    "curvature_torsion",
    "integrate",
    "linear_first_integrals",
    "ray_solution",
    "save_csv",
    "steady_state_residual",
    "trajectory_to_csv",
    "__version__",
]
