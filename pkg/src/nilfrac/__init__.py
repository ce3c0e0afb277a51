"""Nilpotent singularities of planar vector fields and box dimension of unit-time-map orbits."""

from .boxdim import (DimensionEstimate, EstimatorConfig, estimate_dim_boxcount,
                     estimate_dim_sausage, estimate_increment_exponent)
from .classify import ClassificationReport, Kind, classify_nilpotent
from .errors import InputError, NilfracError
from .polyfield import BiPoly, NilpotentModel, PlanarVectorField, PuiseuxSeries
from .unitmap import Orbit, iterate_orbit, picard_jet

__all__ = [
    "BiPoly", "ClassificationReport", "DimensionEstimate", "EstimatorConfig", "InputError",
    "Kind", "NilfracError", "NilpotentModel", "Orbit", "PlanarVectorField", "PuiseuxSeries",
    "classify_nilpotent", "estimate_dim_boxcount", "estimate_dim_sausage",
    "estimate_increment_exponent", "iterate_orbit", "picard_jet",
]
__version__ = "0.1.0"
