"""Spectral geometry lab: sphere spectra, Weyl ratios, disjoint unions,
isoperimetric bounds, counterexample certificates and FEM dumbbells."""
from .closed_forms import (dim_constants, gamma_constant, segment_dirichlet_spectrum,
                           sphere_spectrum, sphere_volume, unit_ball_volume, weyl_constant,
                           weyl_ratio, weyl_ratios)
from .errors import DomainError, MeshError, QualityError, SolverError
from .fem import assemble_mass, assemble_stiffness, mesh_spectrum, solve_lowest
from .mesh import (TriMesh, disjoint_union, gen_icosphere, glue_dumbbell, isoperimetric_ratio,
                   validate)
from .planner import (PiecewiseLinear, check_isoperimetric_bound, iso_interval, plan_counterexample,
                      select_h, verify_certificate, weyl_threshold)
from .spectra import Spectrum, merge_spectra, verify_shift_lemma

__version__ = "0.1.0"
