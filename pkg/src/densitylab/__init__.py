"""Numerical laboratory for zero-density estimates and large values of Dirichlet polynomials."""

from .errors import (BranchFailure, CapacityError, ConditioningError, DensityLabError,
                     DetectionFailure, HorizonError, HypothesisError, IncompletenessError,
                     InputDomainError, NumericalError, PoleError, ProfileError, StepFailure,
                     ZeroTableFormatError)
from .evaluation import zeta_sum
from .zeta import zeta_afe, zeta_reference
from .zeros import ZeroTable, count_N, find_zeros, ingest_zeros
from .intervals import IntervalSet
from .large_values import ScanConfig, WitnessRecord, measure_R, measure_theorem_lhs
from .detector import DetectorConfig, run_detector
from .exponents import DH, STRONG_DH, induction_verify, rhs_exponent
from .calibration import default_manifest

__version__ = "0.1.0"

__all__ = [
    "BranchFailure", "CapacityError", "ConditioningError", "DensityLabError", "DetectionFailure",
    "HorizonError", "HypothesisError", "IncompletenessError", "InputDomainError", "NumericalError",
    "PoleError", "ProfileError", "StepFailure", "ZeroTableFormatError",
    "zeta_sum", "zeta_afe", "zeta_reference", "ZeroTable", "count_N", "find_zeros", "ingest_zeros",
    "IntervalSet", "ScanConfig", "WitnessRecord", "measure_R", "measure_theorem_lhs",
    "DetectorConfig", "run_detector", "DH", "STRONG_DH", "induction_verify", "rhs_exponent",
    "default_manifest",
]
