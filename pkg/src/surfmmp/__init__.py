"""Exact numerical birational geometry for combinatorial surface models.

The package computes intersection theory with residue-field degrees,
Mumford pullbacks, discrepancies and singularity classes, extremal rays,
full MMP traces and dlt blowups for surfaces presented as configurations
of curves with an integer intersection matrix. All arithmetic is exact.
"""

from .adjunction import (
    AdjunctionReport,
    ConnectednessReport,
    NkltLocus,
    connectedness_check,
    diff_divisor,
    inversion_of_adjunction,
    nklt_locus,
)
from .cone import (
    CurveClass,
    ExtremalRay,
    Fibration,
    PositivityFlags,
    curve_classes,
    fiber_seminegative_witness,
    log_canonical_positivity,
    negative_extremal_rays,
    positivity,
    validate_fibration,
)
from .errors import (
    BasisInsufficiency,
    ContractionRefused,
    InputError,
    InvariantViolation,
    ParseError,
    SurfmmpError,
)
from .lattice import (
    HORIZONTAL,
    Configuration,
    Curve,
    CurveDivisor,
    DefinitenessCertificate,
    Divisor,
    IncidencePoint,
    ValidationReport,
    blowup_at_node,
    canonical_pairing,
    coefficient_filter,
    degree_on_curve,
    intersect,
    is_negative_definite,
    pullback_through_blowup,
    validate_configuration,
)
from .mmp import (
    DltBlowup,
    MMPStep,
    MMPTrace,
    MoriFibreSpace,
    contract_extremal,
    dlt_blowup,
    run_mmp,
)
from .pullback import (
    Classification,
    CrepantData,
    Model,
    NegativityVerdict,
    Pair,
    classify_pair,
    crepant_coefficients,
    log_canonical_pairing,
    log_canonical_pairing_curve,
    model_intersect,
    model_self_intersection,
    multiplier_divisor,
    negativity_check,
    numerical_pullback,
    total_boundary,
)
from .riemann_roch import chi_of_curve, euler_char_curve, euler_char_surface

__all__ = [
    "AdjunctionReport",
    "BasisInsufficiency",
    "Classification",
    "Configuration",
    "ConnectednessReport",
    "ContractionRefused",
    "CrepantData",
    "Curve",
    "CurveClass",
    "CurveDivisor",
    "DefinitenessCertificate",
    "Divisor",
    "DltBlowup",
    "ExtremalRay",
    "Fibration",
    "HORIZONTAL",
    "IncidencePoint",
    "InputError",
    "InvariantViolation",
    "MMPStep",
    "MMPTrace",
    "Model",
    "MoriFibreSpace",
    "NegativityVerdict",
    "NkltLocus",
    "Pair",
    "ParseError",
    "PositivityFlags",
    "SurfmmpError",
    "ValidationReport",
    "blowup_at_node",
    "canonical_pairing",
    "chi_of_curve",
    "classify_pair",
    "coefficient_filter",
    "connectedness_check",
    "contract_extremal",
    "crepant_coefficients",
    "curve_classes",
    "degree_on_curve",
    "diff_divisor",
    "dlt_blowup",
    "euler_char_curve",
    "euler_char_surface",
    "fiber_seminegative_witness",
    "intersect",
    "inversion_of_adjunction",
    "is_negative_definite",
    "log_canonical_pairing",
    "log_canonical_pairing_curve",
    "log_canonical_positivity",
    "model_intersect",
    "model_self_intersection",
    "multiplier_divisor",
    "negative_extremal_rays",
    "negativity_check",
    "nklt_locus",
    "numerical_pullback",
    "positivity",
    "pullback_through_blowup",
    "run_mmp",
    "total_boundary",
    "validate_configuration",
    "validate_fibration",
]
