"""Exact Nahm transform engine for parabolic Higgs bundles on the line.

Everything is computed over Q(i) with exact rational arithmetic; see the
README for the input document format and the demos/ scripts for worked tours.
"""

from .bundle import (
    ParabolicHiggsBundle,
    check_assumptions,
    check_residue_compatibility,
    connection_side_data,
    eigenspace_filtration_split,
    frame_indices,
    graded_residue_split,
    parse_bundle,
    residue,
    weight_filtration,
)
from .lattice import (
    Rparabolic_to_parabolic,
    build_FG,
    build_FG_alpha,
    check_theta_alpha,
    parabolic_to_Rparabolic,
    theta_matrix,
)
from .points import INFINITY, PointOnLine
from .qi import GaussianRational, qi
from .ratfunc import RationalFunction, laurent_coeffs
from .roots import poly_gaussian_roots
from .smith import smith_local, smith_local_valuations, smith_pid
from .transform import (
    hypercoh_dims,
    spectral_curve,
    transform,
    transformed_parabolic,
    transformed_rank,
    transformed_residues,
)
from .verify import verify_all
