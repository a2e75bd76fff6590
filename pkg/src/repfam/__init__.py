"""Exponential families generated by matrix group actions on vector spaces.

Build a family from a chart, a catalog representation, and a distinguished
vector; decide whether its natural parametrization is identifiable; test when
two generating pairs produce the same family; and realize the distributions
numerically (normalizer, pdf, cdf, sampling).  The worked example is the
generalized inverse Gaussian family on the positive reals.
"""

from .diagnostics import (
    InjectivityVerdict,
    PairSpec,
    Witness,
    affine_span_check,
    cyclic_check,
    dual_fixed_vectors,
    h_fixed_subspace,
    injectivity_check,
    span_conditions_check,
    well_definedness_check,
)
from .equivalence import (
    FunctionSpaceSample,
    Intertwiner,
    find_equivalence,
    function_space,
    function_space_to_pair,
    matrix_coefficient,
    pair_to_function_space,
    right_fixed_check,
    same_family_check,
)
from .family import (
    CarrierSpec,
    FamilySpec,
    NaturalParam,
    cdf,
    cdf_values,
    gig_family,
    integrability_check,
    log_normalizer,
    pdf,
    pdf_values,
    sample,
    unnormalized_density,
    witness_replay,
)
from .groupmodel import (
    CharacterBasis,
    GroupChart,
    RepSpec,
    SubgroupSpec,
    chart,
    diagonal_weights,
    direct_sum,
    dual_rep_eval,
    log_unipotent,
    rep_eval,
    rotation,
    sample_group,
    validate_character_basis,
)
from .numkernel import (
    QuadResult,
    RankReport,
    Rng,
    integrate_halfline,
    integrate_interval,
    nullspace,
    rank,
    rng_uniform,
)
from .special import GigParams, bessel_k, gamma_fn, gig_norm_const, gig_pdf
from .specfile import SpecFileModel, VERSION, build_pair

__version__ = VERSION

__all__ = [
    "CarrierSpec", "CharacterBasis", "FamilySpec", "FunctionSpaceSample",
    "GigParams", "GroupChart", "InjectivityVerdict", "Intertwiner",
    "NaturalParam", "PairSpec", "QuadResult", "RankReport", "RepSpec", "Rng",
    "SpecFileModel", "SubgroupSpec", "VERSION", "Witness",
    "affine_span_check", "bessel_k", "build_pair", "cdf", "cdf_values",
    "chart", "cyclic_check", "diagonal_weights", "direct_sum",
    "dual_fixed_vectors", "dual_rep_eval", "find_equivalence",
    "function_space", "function_space_to_pair", "gamma_fn", "gig_family",
    "gig_norm_const", "gig_pdf", "h_fixed_subspace", "injectivity_check",
    "integrability_check", "integrate_halfline", "integrate_interval",
    "log_normalizer", "log_unipotent", "matrix_coefficient", "nullspace",
    "pair_to_function_space", "pdf", "pdf_values", "rank", "rep_eval",
    "right_fixed_check", "rng_uniform", "rotation", "same_family_check",
    "sample", "sample_group", "span_conditions_check", "unnormalized_density",
    "validate_character_basis", "well_definedness_check", "witness_replay",
]
