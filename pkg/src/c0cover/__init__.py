"""Cover calculus on finite discretizations of metric compactification packs.

The library builds canonical covers of minimal multiplicity (at most
dim X + 2) on the complement of a boundary set, constructs and tests
displacement-controlled relations, and verifies the multiplicity identities
and inequalities of the calculus at desk scale.
"""

from .covers import (
    Cover,
    DimAtScale,
    RefinementWitness,
    common_multiplicity,
    delta_of,
    dim_at_scale,
    is_canonical,
    lebesgue_number,
    mesh,
    mult_along,
    mult_at,
    mult_on,
    multiplicity,
    refines,
    singleton_cover,
    star,
    uniformity_verdict,
    whole_space_cover,
)
from .canonical import (
    CoverSequence,
    Provider,
    build_alpha,
    canonical_refining,
    ext,
    finite_dim0_provider,
    interval_dim1_provider,
    minimal_canonical,
    plugin_provider,
    provider_for,
    refine_subsequence,
    star_expand,
)
from .cylinder import (
    Embedding,
    GridCover,
    collar_embedding,
    double_cover,
    f_map,
    fxf_modulus,
    g_map,
    grid_cover,
    identity_embedding,
    lower_bound_check,
    pullback_cover,
    random_uniform_candidates,
    slab_rescale,
)
from .errors import C0CoverError
from .experiment import ExperimentConfig, run_experiment
from .packs import (
    CylinderPack,
    DiscretePack,
    ModulusCurve,
    PackKind,
    ScaleLadder,
    annulus,
    boundary_distance,
    default_ladder,
    generate_pack,
    h_profile,
    validate_pack,
)
from .relations import (
    CurveVerdict,
    LambdaSpec,
    Relation,
    ball,
    ball_cover,
    c0_modulus,
    compose,
    controlled_E,
    diag_nbhd_from_lambda,
    diagonal,
    full_relation,
    image,
    inverse,
    shrink_cover,
)
from .svg import emit_svg
from .verify import verify_suite

__version__ = "0.1.0"
