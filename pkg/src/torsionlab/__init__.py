"""Numerical laboratory for finite-dimensional torsion forms and circle-bundle torsion classes."""

from .errors import (
    ConvergenceError,
    DomainError,
    ExactnessError,
    PositivityError,
    SchemaError,
    StructuralError,
    TorsionLabError,
)
from .exterior import DifferentialForm, TorusBase, exterior_d, harmonic_part, wedge
from .flat_bundle import FlatBundleData, MetricFamily, graded_odd_char_form, kamber_tondeur, odd_char_form
from .torsion import (
    FiltrationData,
    FlatComplexWithMetrics,
    TorsionResult,
    filtration_torsion,
    graded_torsion_class,
    metric_change_torsion,
    ses_torsion,
    torsion_class_rep,
    torsion_form,
)
from .special_fn import RootOfUnity, polylog, zeta
from .circle_model import bl_circle_class, check_main_theorem, ik_circle_class

__all__ = [
    "TorsionLabError", "StructuralError", "PositivityError", "ExactnessError",
    "ConvergenceError", "SchemaError", "DomainError",
    "TorusBase", "DifferentialForm", "wedge", "exterior_d", "harmonic_part",
    "MetricFamily", "FlatBundleData", "kamber_tondeur", "odd_char_form", "graded_odd_char_form",
    "FlatComplexWithMetrics", "FiltrationData", "TorsionResult", "torsion_form",
    "metric_change_torsion", "ses_torsion", "filtration_torsion", "torsion_class_rep", "graded_torsion_class",
    "RootOfUnity", "polylog", "zeta", "bl_circle_class", "ik_circle_class", "check_main_theorem",
]

__version__ = "0.1.0"
