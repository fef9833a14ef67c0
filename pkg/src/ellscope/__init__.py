"""Legendre-Hadamard ellipticity of isotropic hyperelastic energies.

Energies are symmetric functions of principal stretches. The package
classifies stretch states with a criterion built from the energy's
first and second derivatives, cross-checks it against a direct rank-one
probe minimization on the deformation gradient, maps ellipticity
domains over low-dimensional stretch charts, and verifies the auxiliary
inequalities behind the distortional log-strain results.
"""

from .bounds import (GridMinReport, ProfileMinReport, PThetaBox,
                     SymmetryReport, acute_wedge_bound,
                     acute_wedge_bound_dzeta, boundary_profile,
                     boundary_profile_min_closed_form, check_symmetry,
                     min_boundary_profile, obtuse_sector_bound_dvarpi,
                     obtuse_sector_bounds, reduced_condition, verify_nonneg)
from .charts import (CHART_DIMS, ab_to_stretches, chart_to_stretches,
                     cone_point, dev3_invariant_from_ab, ellipse_membership,
                     logt_to_stretches_2d, ptheta_to_ab)
from .criteria import (DEFAULT_TOL, EllipticityVerdict, Status, be_margin,
                       c3_margin, c4_margin, check_point, te_margin)
from .energies import (EnergySpec, FdReport, Stretches, as_stretch_array,
                       dev_log_norm_sq, fd_consistency_report, fd_gradient,
                       fd_hessian, grad_g, hess_g, make_builtin)
from .oracle import (AcousticProbe, OracleConfig, OracleVerdict,
                     StepUnderflowError, as_deformation_gradient, energy_of_F,
                     min_acoustic, oracle_verdict, rank_one_form,
                     singular_values)
from .scanner import (BRUHNS_CUBE, BoundaryPolyline, DomainScanResult,
                      RegionReport, ScanRequest, scan_grid, trace_boundary,
                      trace_margins, verify_logratio_band, verify_region)

__version__ = "0.1.0"

__all__ = [
    "AcousticProbe", "BRUHNS_CUBE", "BoundaryPolyline", "CHART_DIMS",
    "DEFAULT_TOL", "DomainScanResult", "EllipticityVerdict", "EnergySpec",
    "FdReport", "GridMinReport", "OracleConfig", "OracleVerdict",
    "ProfileMinReport", "PThetaBox", "RegionReport", "ScanRequest", "Status",
    "Stretches", "StepUnderflowError", "SymmetryReport", "ab_to_stretches",
    "acute_wedge_bound", "acute_wedge_bound_dzeta", "as_deformation_gradient",
    "as_stretch_array", "be_margin", "boundary_profile",
    "boundary_profile_min_closed_form", "c3_margin", "c4_margin",
    "chart_to_stretches", "check_point", "check_symmetry", "cone_point",
    "dev3_invariant_from_ab", "dev_log_norm_sq", "ellipse_membership",
    "energy_of_F", "fd_consistency_report", "fd_gradient", "fd_hessian",
    "grad_g", "hess_g", "logt_to_stretches_2d", "make_builtin",
    "min_acoustic", "min_boundary_profile", "obtuse_sector_bound_dvarpi",
    "obtuse_sector_bounds", "oracle_verdict", "ptheta_to_ab",
    "rank_one_form", "reduced_condition", "scan_grid", "singular_values",
    "te_margin", "trace_boundary", "trace_margins", "verify_logratio_band",
    "verify_nonneg", "verify_region",
]
