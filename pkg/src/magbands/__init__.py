"""Band structures of magnetic Dirichlet layers and Iwatsuka-type strips.

The package computes dispersion curves (band functions) of the fiber
operators arising from translation-invariant magnetic systems:

* curved Dirichlet layers of half-width a in a homogeneous field,
  described by the turning angle of their generating curve;
* the one-dimensional transverse and effective comparison operators;
* extended Iwatsuka models (unidirectional field perturbations plus a
  one-sided potential well) with a non-constancy certificate for their
  Landau bands.

Closed-form results for straight layers (double-ladder spectra, the
theta-degeneracy dichotomy, the Kummer condition for the parallel
spectral bottom) live in :mod:`magbands.closedform`.
"""

__version__ = "0.1.0"

from .assembly import (FiberMatrix, Grid, assemble_effective, assemble_fiber,
                       assemble_halfplane, assemble_iwatsuka,
                       assemble_transverse, suggest_half_length)
from .bands import (BandStructure, BentThresholds, ThinLimitReport,
                    asymptote_match, band_scan, bent_thresholds,
                    field_monotonicity_check, flat_band_detect,
                    halfplane_levels, scan_effective_bands,
                    scan_iwatsuka_bands, scan_layer_bands,
                    scan_transverse_bands, suff_condition_check,
                    thin_limit_study)
from .closedform import (BottomCurve, DegeneracyReport, NearDegeneratePair,
                         bottom_asymptotics, bottom_curve, bottom_parallel,
                         degeneracy_enumerate, flat_spectrum,
                         near_degenerate_pair, theta_parameter)
from .eigensolve import lowest_eigs, shooting_eig_1d
from .errors import (AssumptionError, ConfinementError, InvalidParameterError,
                     MagbandsError, SolverError)
from .geometry import (AssumptionReport, CurveProfile, LayerConfig,
                       build_profile, check_assumptions, curvature,
                       curvature_potential_V, curve_point, curve_points,
                       metric_factor, slope_stats, vector_potential_A2)
from .iwatsuka import (BumpField, CallableField, CallableWell, ExpDecayField,
                       GaussField, IwatsukaSpec, NonconstancyCertificate,
                       PolyExpWell, StepField, default_grid, iwatsuka_bands,
                       nonconstancy_certificate, validate_field)
from .specfun import (RationalApprox, dirichlet_approx, dirichlet_energy,
                      dirichlet_mode, hermite_psi, kummer_1f1)

__all__ = [
    "__version__",
    "AssumptionError", "ConfinementError", "InvalidParameterError",
    "MagbandsError", "SolverError",
    "CurveProfile", "LayerConfig", "AssumptionReport", "build_profile",
    "curve_point", "curve_points", "curvature", "metric_factor",
    "vector_potential_A2", "curvature_potential_V", "slope_stats",
    "check_assumptions",
    "kummer_1f1", "hermite_psi", "dirichlet_mode", "dirichlet_energy",
    "RationalApprox", "dirichlet_approx",
    "Grid", "FiberMatrix", "assemble_fiber", "assemble_halfplane",
    "assemble_transverse", "assemble_effective", "assemble_iwatsuka",
    "suggest_half_length",
    "lowest_eigs", "shooting_eig_1d",
    "BandStructure", "band_scan", "scan_layer_bands", "scan_transverse_bands",
    "scan_effective_bands", "scan_iwatsuka_bands", "flat_band_detect",
    "halfplane_levels", "asymptote_match", "BentThresholds",
    "bent_thresholds", "field_monotonicity_check", "ThinLimitReport",
    "thin_limit_study", "suff_condition_check",
    "flat_spectrum", "theta_parameter", "DegeneracyReport",
    "NearDegeneratePair", "degeneracy_enumerate", "near_degenerate_pair",
    "bottom_parallel", "bottom_asymptotics", "BottomCurve", "bottom_curve",
    "StepField", "BumpField", "ExpDecayField", "GaussField", "CallableField",
    "PolyExpWell", "CallableWell", "IwatsukaSpec", "validate_field",
    "default_grid", "iwatsuka_bands", "NonconstancyCertificate",
    "nonconstancy_certificate",
]
