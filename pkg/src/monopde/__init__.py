"""monopde: numerical laboratory for div G(grad u) = 0 with strictly
monotone, possibly highly degenerate planar fields G.

The package classifies the degeneracy structure of a field over gradient
space, regularizes the field (modification at infinity + mollification),
solves the equation with P1 finite elements and damped Newton, and runs the
diagnostic machinery: distance/Lebesgue profiles, discrete Young measures,
superlevel dichotomies, covering counts and explicit barrier subsolutions.
"""
from .geometry import Box
from .fields import (FieldDescriptor, make_builtin, eval_field, jacobian,
                     monotony_modulus, monotonicity_report,
                     strong_monotonicity_constant, ellipticity_quotients,
                     default_radius_ladder, default_lambda_ladder,
                     default_Lambda_ladder)
from .degeneracy import DegeneracyGrid, classify_grid, dist_to_class, hausdorff_distance
from .dual import dual_field, invert_field, NewtonOptions

__version__ = "0.1.0"
