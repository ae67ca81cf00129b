"""Polarity testing for orthogonal representations and slice-based
nearest-point solvers for orbit-type matrix varieties."""

from .catalog import FamilySpec, catalog_build, catalog_list
from .estimators import PolarityTester, SingularValueProjector, SpectrumProjector
from .exact_linalg import ExactMatrix, in_span, nullspace_basis, rank, restricted_form_nondegenerate
from .polarity import (
    PolarityReport,
    Verdict,
    extract_slice,
    generic_orbit_dimension,
    generic_vector,
    orbit_tangent,
    polarity_test,
    verify_slice,
)
from .rep import OrthogonalRep, SliceBasis, SliceStatus, load, save, validate
from .transfer import (
    CriticalPointSet,
    SingularValueProblem,
    SpectrumProblem,
    critical_points_singular_values,
    critical_points_spectrum,
    ed_degree_adjoint_orbit,
    ed_degree_spectrum,
    equivariance_check,
    nearest_with_singular_values,
    nearest_with_spectrum,
    slice_containment_check,
    verify_criticality,
)

__version__ = "0.1.0"
