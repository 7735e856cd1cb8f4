"""Monotonicity checks, cone envelopes and total variation for sampled 2-D fields."""

from .classify import (
    ClassifyParams,
    Verdict,
    check_cone_monotone,
    check_k_any,
    check_k_monotone,
    check_lebesgue,
    check_mostow,
    check_normal,
    check_vg,
    check_weak,
    classify,
)
from .construct import ConePointCloud, envelope_value, synth_field
from .field import (
    FieldError,
    GridDomain,
    LevelSetComponent,
    ScalarField,
    SubdomainSample,
    extract_level_components,
    load_field,
    sample_subdomains,
    save_field,
)
from .gallery import gallery_generate, gallery_names
from .geometry import Cone, ConeError, cone_contains, cone_leq, cone_negate, line_trace, normal_cone_at, parse_cone
from .variation import TvReport, tipped_lipschitz_bound, tv_coarea, tv_gradient, tv_report, tv_upper_bound

__version__ = "0.1.0"

__all__ = [
    "ClassifyParams", "Verdict", "check_cone_monotone", "check_k_any", "check_k_monotone",
    "check_lebesgue", "check_mostow", "check_normal", "check_vg", "check_weak", "classify",
    "ConePointCloud", "envelope_value", "synth_field",
    "FieldError", "GridDomain", "LevelSetComponent", "ScalarField", "SubdomainSample",
    "extract_level_components", "load_field", "sample_subdomains", "save_field",
    "gallery_generate", "gallery_names",
    "Cone", "ConeError", "cone_contains", "cone_leq", "cone_negate", "line_trace", "normal_cone_at",
    "parse_cone",
    "TvReport", "tipped_lipschitz_bound", "tv_coarea", "tv_gradient", "tv_report", "tv_upper_bound",
]
