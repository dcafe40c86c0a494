"""Asymptotic perimeter statistics of column-built polyomino families."""

from ._numeric import (ChainStructureError, PolyostatError, ResourceLimitError,
                       RootNotFoundError, SeriesConvergenceError, working_dtype)
from .families import FAMILIES, FamilyId, as_family, gluing_count, horizontal_increment
from .markov import build_chain, chain_checks
from .moments import joint_stats, step_moments, vertical_stats, xi5
from .qseries import KernelModel, kernel_h, theta_phi
from .spectral import bender_width_constants, find_rho, gf_perimeter_constants

__version__ = "0.1.0"

__all__ = [
    "FAMILIES", "FamilyId", "KernelModel", "PolyostatError", "SeriesConvergenceError",
    "RootNotFoundError", "ChainStructureError", "ResourceLimitError", "as_family", "gluing_count",
    "horizontal_increment", "kernel_h", "theta_phi", "find_rho",
    "bender_width_constants", "gf_perimeter_constants", "build_chain",
    "chain_checks", "step_moments", "vertical_stats", "xi5", "joint_stats",
    "working_dtype",
]
