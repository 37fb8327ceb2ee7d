"""Scale-invariant p-spread functionals and density ratios on polygonal knots."""

__version__ = "0.1.0"

from .curve import (
    EmbeddingReport,
    PolygonalCurve,
    center_of_mass,
    diameter,
    length,
    radius_of_gyration,
    read_curve_file,
    subdivide,
    transform,
    validate_embedded,
    write_curve_file,
)
from .exponent import Exponent
from .spread import (
    PairIntegral,
    QuadratureConfig,
    SpreadValue,
    chord_integral_pair,
    chord_integral_same_segment,
    density_ratio,
    spread,
    spread_p_limit_check,
)
from .reference import (
    circle_fixed_chord_ratio,
    circle_spread,
    degenerate_constant,
    sin_power_integral,
)

__all__ = [
    "EmbeddingReport",
    "Exponent",
    "PairIntegral",
    "PolygonalCurve",
    "QuadratureConfig",
    "SpreadValue",
    "center_of_mass",
    "chord_integral_pair",
    "chord_integral_same_segment",
    "circle_fixed_chord_ratio",
    "circle_spread",
    "degenerate_constant",
    "density_ratio",
    "diameter",
    "length",
    "radius_of_gyration",
    "read_curve_file",
    "sin_power_integral",
    "spread",
    "spread_p_limit_check",
    "subdivide",
    "transform",
    "validate_embedded",
    "write_curve_file",
]
