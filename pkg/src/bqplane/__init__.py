"""Exact verification toolkit for unit-distance-preserving maps of the
plane over computable fields: quadratic tower arithmetic, distance
forms, unit chains, and the decomposition of every unit-preserving map
into an affine-orthogonal part and a coordinatewise field homomorphism.
"""

from .errors import (
    BQError,
    BranchUndetermined,
    BudgetExhausted,
    CaseUndetermined,
    DivisionByZero,
    FieldMismatch,
    FieldNotFinite,
    FrameNotOrthonormal,
    InvalidField,
    InvalidLevel,
    LorentzNormalizationFailed,
    NoImaginaryPresentation,
    NoImaginaryUnit,
    NotAHomomorphism,
    NotOrthogonal,
    ParseError,
    PrimaryBranchUnavailable,
    ProductFormViolation,
    SearchExhausted,
    ZeroParameter,
    ZeroRadicand,
    ZeroScale,
)
from .fields import (
    Composite,
    FieldElement,
    FieldTower,
    Identity,
    LevelConjugation,
    PrimeField,
    Q,
    QuadExt,
    adjoin_sqrt,
    apply_hom,
    catalog_homomorphisms,
    coeff_vector,
    compose_homs,
    embed,
    format_element,
    from_coeff_vector,
    hom_check,
    hom_from_levels,
    imaginary_unit,
    re_im,
    sqrt_in_field,
    tower_levels,
)
from .geometry import (
    Point,
    all_points,
    eta,
    lambda_map,
    lm_distance,
    phi,
    point,
    psi,
    swap_map,
    verify_transform_identities,
    xi,
)
from .maps import (
    EXHAUSTIVE,
    AffineMap2,
    AffineOrthoMap,
    ComposedMap,
    DomainSpec,
    MapTable,
    OrthoMatrix2,
    SemiAffineMap,
    compose,
    enumerate_canonical_maps,
    enumerate_orthogonal_group,
    identity_map,
    invert,
    lorentz_case1_matrix,
    lorentz_case2_matrix,
    map_from_expression,
    preserves_phi,
    preserves_unit_distance,
    rational_unit_vector,
    rotation_matrix,
    reflection_matrix,
    sample_domain,
    swap_affine,
    translation_map,
    unit_circle,
    unit_from_parameter,
)
from .chains import (
    Chain,
    EdgeCertificate,
    build_lemma3_chain,
    build_real_chain,
    verify_chain,
)
from .decompose import (
    Anomaly,
    DecompositionResult,
    SearchCensus,
    decompose,
    decompose_lorentz,
    detect_branch,
    extract_homomorphism,
    normalizer_from_images,
    search_unit_preservers,
)
from .parsing import (
    format_field,
    format_map,
    format_point,
    format_table_lines,
    parse_element,
    parse_field,
    parse_map,
    parse_point,
    parse_table_lines,
)
