"""Holomorphic functions of several complex variables on polydiscs.

Curve integrals, Cauchy's integral formula for derivatives of any order,
Taylor coefficients with certified tail bounds, holomorphy diagnostics,
removable-singularity extension and polynomial approximation, for values
in C^m or in m x m matrices.
"""

from .analysis import (
    ApproxResult,
    IdentityResult,
    ThinSetSpec,
    approx_polynomial,
    identity_certify,
    riemann_extend,
)
from .cauchy import (
    BoundarySamples,
    cauchy_bound,
    cauchy_derivative,
    sample_boundary,
    taylor_coefficients,
)
from .core import (
    Arc,
    Circle,
    CPoint,
    CurveC1,
    MultiIndex,
    Polydisc,
    SampledComponent,
    Segment,
    Seminorm,
    SpaceDescriptor,
    VectorValue,
    complexify,
    realify,
)
from .errors import (
    AccuracyWarning,
    AliasingError,
    DegenerateCurveWarning,
    DegreeCapError,
    DomainError,
    EvaluationError,
    ExtensionError,
    IntegrationError,
    ParseError,
    PolydiscError,
    ResolutionError,
    ResourceError,
    StepUnderflowError,
)
from .expr import Expression, parse
from .holomorphy import (
    DiagnosticReport,
    cr_residual,
    holomorphy_report,
    negative_spectrum_check,
    real_complex_relation_check,
    separate_holomorphy_check,
    weak_holomorphy_probe,
)
from .quadrature import (
    Integrand,
    differentiate_parametric_integral,
    ftc_check,
    integrate_curve,
    integrate_rectangle,
)
from .series import LiouvilleResult, TaylorSeries, evaluate, liouville_test, tail_bound

__version__ = "0.1.0"

__all__ = [
    "ApproxResult",
    "IdentityResult",
    "ThinSetSpec",
    "approx_polynomial",
    "identity_certify",
    "riemann_extend",
    "BoundarySamples",
    "cauchy_bound",
    "cauchy_derivative",
    "sample_boundary",
    "taylor_coefficients",
    "Arc",
    "Circle",
    "CPoint",
    "CurveC1",
    "MultiIndex",
    "Polydisc",
    "SampledComponent",
    "Segment",
    "Seminorm",
    "SpaceDescriptor",
    "VectorValue",
    "complexify",
    "realify",
    "AccuracyWarning",
    "AliasingError",
    "DegenerateCurveWarning",
    "DegreeCapError",
    "DomainError",
    "EvaluationError",
    "ExtensionError",
    "IntegrationError",
    "ParseError",
    "PolydiscError",
    "ResolutionError",
    "ResourceError",
    "StepUnderflowError",
    "Expression",
    "parse",
    "DiagnosticReport",
    "cr_residual",
    "holomorphy_report",
    "negative_spectrum_check",
    "real_complex_relation_check",
    "separate_holomorphy_check",
    "weak_holomorphy_probe",
    "Integrand",
    "differentiate_parametric_integral",
    "ftc_check",
    "integrate_curve",
    "integrate_rectangle",
    "LiouvilleResult",
    "TaylorSeries",
    "evaluate",
    "liouville_test",
    "tail_bound",
]
