"""Width invariants, spectral density bounds and torus quadrature for
matrices over complex Laurent polynomial rings."""

from .bounds import (
    INFINITE_TYPE,
    SPECTRAL_CONSTANT,
    AnalyzeOptions,
    BoundParameters,
    BoundReport,
    analyze,
    best_ordering,
    bound_coefficient,
    matrix_bound,
    ns_lower_bound,
    rescale_lambda,
    scalar_bound,
    step_bound,
)
from .density import (
    DensityCurve,
    HermitianSpectrum,
    InequalityReport,
    TorusGrid,
    TorusPoint,
    alpha_fit,
    det_domination_check,
    gram_spectrum,
    matrix_density,
    op_norm_estimate,
    product_inequality_check,
    scalar_density,
)
from .matrices import (
    MinorCertificate,
    PolyMatrix,
    determinant,
    determinant_bareiss,
    determinant_cofactor,
    exact_div,
    iter_nonvanishing_minors,
    max_nonvanishing_minor,
    minor,
)
from .parsing import ParseError, format_matrix, format_poly, parse_matrix, parse_poly
from .poly import (
    GaussianRational,
    LaurentPoly,
    WidthProfile,
    lead_lex,
    q_plus_decompose,
    width_profile,
)

__all__ = [
    "AnalyzeOptions",
    "BoundParameters",
    "BoundReport",
    "DensityCurve",
    "GaussianRational",
    "HermitianSpectrum",
    "INFINITE_TYPE",
    "InequalityReport",
    "LaurentPoly",
    "MinorCertificate",
    "ParseError",
    "PolyMatrix",
    "SPECTRAL_CONSTANT",
    "TorusGrid",
    "TorusPoint",
    "WidthProfile",
    "alpha_fit",
    "analyze",
    "best_ordering",
    "bound_coefficient",
    "det_domination_check",
    "determinant",
    "determinant_bareiss",
    "determinant_cofactor",
    "exact_div",
    "format_matrix",
    "format_poly",
    "gram_spectrum",
    "iter_nonvanishing_minors",
    "lead_lex",
    "matrix_bound",
    "matrix_density",
    "max_nonvanishing_minor",
    "minor",
    "ns_lower_bound",
    "op_norm_estimate",
    "parse_matrix",
    "parse_poly",
    "product_inequality_check",
    "q_plus_decompose",
    "rescale_lambda",
    "scalar_bound",
    "scalar_density",
    "step_bound",
    "width_profile",
]
