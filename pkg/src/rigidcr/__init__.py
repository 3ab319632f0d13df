"""Exact normal forms and invariants of rigid hypersurfaces in C^2 and C^3."""

from .series_core import GaussRat, SeriesError, TruncSeries
from .hypersurface import DegenerateError, Hypersurface, gm_model, lightcone_tube, random_rank1, validate
from .rigid_maps import RigidMap, apply, dilation_rotation
from .normalform_c3 import normalize, prenormalize
from .cr_fields import diff_invariants
from .equivalence import equivalent_c3
from .toy_c2 import equivalent_c2, invariant_R, prenormalize_c2

__all__ = [
    "GaussRat", "SeriesError", "TruncSeries", "DegenerateError", "Hypersurface", "gm_model",
    "lightcone_tube", "random_rank1", "validate", "RigidMap", "apply", "dilation_rotation",
    "normalize", "prenormalize", "diff_invariants", "equivalent_c3", "equivalent_c2",
    "invariant_R", "prenormalize_c2",
]
