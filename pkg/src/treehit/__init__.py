"""Exact and simulated hitting times of birth-and-death chains on trees."""
from .chain import (ChainSpec, StationaryMeasure, ValidationReport, Violation, make_spec,
                    stationary, validate)
from .chainfile import ChainFileError, emit, load, parse, save
from .drift import DriftReport, FamilyVerdict, drift_report, family_verdict, l_set
from .hitting import HittingTimes, MomentReport
from .kernels import BACKEND_NAME
from .oracle import LinearHittingSolution, OracleError, solve_hitting
from .regular import ClosedForms, RegularSpec, closed_forms, generate, level_chain
from .sim import (EmpiricalSummary, SimConfig, simulate_final_excursion, simulate_hitting,
                  simulate_return)
from .tree import (Tree, TreeError, alpha, branch_decomposition, build_tree,
                   from_parent_array, kth_parent, root_path)

__version__ = "0.1.0"

__all__ = [
    "BACKEND_NAME", "ChainFileError", "ChainSpec", "ClosedForms", "DriftReport",
    "EmpiricalSummary", "FamilyVerdict", "HittingTimes", "LinearHittingSolution",
    "MomentReport", "OracleError", "RegularSpec", "SimConfig", "StationaryMeasure", "Tree",
    "TreeError", "ValidationReport", "Violation", "alpha", "branch_decomposition",
    "build_tree", "closed_forms", "drift_report", "emit", "family_verdict",
    "from_parent_array", "generate", "kth_parent", "l_set", "level_chain", "load",
    "make_spec", "parse", "root_path", "save", "simulate_final_excursion",
    "simulate_hitting", "simulate_return", "solve_hitting", "stationary", "validate",
]
