"""Continued-fraction spectral response of a driven two-level system."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:
    __version__ = "0.1.0"

from .kernel import BandKernel, DriveSpec, Regularization, beta, f_reg, g_kernel_general
from .cfrac import (CfState, FrequencyLattice, ResponseSpectrum, assemble_response, cf_iterate,
                    gamma_chain, lattice_matrix, lattice_matrix_inverse)
from .oracle import PropagatorTrace, analytic_delta_zero, propagate, static_rabi_reference
from .spectrum import PeakReport, compare_peaks, damped_transform, find_peaks
from .bcs import BcsModel, gap_residual, mf_kernels, solve_gap

__all__ = [
    "__version__",
    "BandKernel", "DriveSpec", "Regularization", "beta", "f_reg", "g_kernel_general",
    "CfState", "FrequencyLattice", "ResponseSpectrum", "assemble_response", "cf_iterate",
    "gamma_chain", "lattice_matrix", "lattice_matrix_inverse",
    "PropagatorTrace", "analytic_delta_zero", "propagate", "static_rabi_reference",
    "PeakReport", "compare_peaks", "damped_transform", "find_peaks",
    "BcsModel", "gap_residual", "mf_kernels", "solve_gap",
]
