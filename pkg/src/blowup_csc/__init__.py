"""Admissibility of blow-up points and the model computations used to glue
scalar-flat pieces into constant scalar curvature Kahler metrics."""

__version__ = "0.1.0"

from .admissibility import (POS_TOL, RANK_TOL, AdmissibilityReport, check, equivariant_check,
                            report_from_matrix)
from .biharmonic import inner_extension_mode, match_mode, outer_extension_mode, poisson_map_mode
from .catalog import example_catalog
from .estimators import AdmissibilityEstimator, KernelFeatures, SimancaPotential
from .kernel import (KernelBasis, KernelFunction, ModelManifold, SymmetryGroup, invariant_subbasis,
                     kernel_basis)
from .ledger import delta_window, verify_ledger
from .ode import fit_trajectory, integrate_zeta
from .search import Configuration, adjoin_point, cover_construct, m0_estimate, random_rank_search
from .suite import paper_suite

__all__ = [
    "__version__", "POS_TOL", "RANK_TOL", "AdmissibilityReport", "check", "equivariant_check",
    "report_from_matrix", "inner_extension_mode", "match_mode", "outer_extension_mode",
    "poisson_map_mode", "example_catalog", "AdmissibilityEstimator", "KernelFeatures",
    "SimancaPotential", "KernelBasis", "KernelFunction", "ModelManifold", "SymmetryGroup",
    "invariant_subbasis", "kernel_basis", "delta_window", "verify_ledger", "fit_trajectory",
    "integrate_zeta", "Configuration", "adjoin_point", "cover_construct", "m0_estimate",
    "random_rank_search", "paper_suite",
]
