"""
Curves in Minkowski 3-space.

Frenet and Cartan frames computed on Taylor jets, determinant tests
``det(alpha^(k), alpha^(k+1), alpha^(k+2)) = 0``, slant-helix detection
through closed-form torsion families, and reconstruction of unit-curvature
curves from a prescribed torsion.
"""

from .characterize import (
    ResidualReport,
    SlantReport,
    Verdict,
    det345_closed_form_check,
    det_k,
    residual_nonnull,
    residual_null,
    slant_indicator,
    slant_report,
    tangent_indicatrix,
    torsion_residual_report,
    uniform_grid,
)
from .expr import CurveDef, parse_curve, parse_expression
from .families import FamilyCase, FitResult, TorsionFamily, fit_torsion_family, validity_interval
from .frame import (
    CartanApparatus,
    Classification,
    CurveKind,
    FrenetApparatus,
    classify_curve,
    curvature_jets,
    nonnull_frenet,
    null_cartan,
)
from .jet import Jet
from .lorentz import CausalClass, causal_class, det3, lorentz_cross, lorentz_norm, metric_g
from .synthesize import (
    FrameCase,
    FrameState,
    SampledCurve,
    canonical_frame,
    integrate_frame,
    make_salkowski,
)

__version__ = "0.1.0"
