"""Identification of complex-valued bilinear systems y = h^H X g + n.

Block estimators (Wiener and least squares), streaming LMS/NLMS/RLS filters,
their split-real and mixed complex/real counterparts, and an experiment
harness built on top of them.
"""
from .adaptive import (DivergenceError, LmsState, NlmsState, RlsState, cblms_step, cbnlms_step,
                       cbrls_step, lms_step_bounds, make_cbrls)
from .mixed import MixedState, crblms_step, crbnlms_step, crbrls_step, make_crbrls
from .model import (DB_FLOOR, BilinearSystem, ErrorMetrics, evaluate_bilinear, linearize, mat,
                    normalized_misalignment, vec)
from .optimum import cbls_iterate, cbwf_iterate, crbls_iterate, crbwf_iterate, run_alternating
from .signals import Rng, SignalModel
from .splitreal import (LinearNlmsState, blms2r_step, blms4r_step, bnlms2r_step, bnlms4r_step,
                        linear_nlms_step, make_split_state)
from .stats import BlockDataset, SecondOrderStats, estimate_stats, exact_stats

__version__ = "0.1.0"

__all__ = [
    "DB_FLOOR", "BilinearSystem", "BlockDataset", "DivergenceError", "ErrorMetrics",
    "LinearNlmsState", "LmsState", "MixedState", "NlmsState", "RlsState", "Rng",
    "SecondOrderStats", "SignalModel", "blms2r_step", "blms4r_step", "bnlms2r_step",
    "bnlms4r_step", "cblms_step", "cbls_iterate", "cbnlms_step", "cbrls_step", "cbwf_iterate",
    "crblms_step", "crbls_iterate", "crbnlms_step", "crbrls_step", "crbwf_iterate",
    "estimate_stats", "evaluate_bilinear", "exact_stats", "linear_nlms_step", "linearize",
    "lms_step_bounds", "make_cbrls", "make_crbrls", "make_split_state", "mat",
    "normalized_misalignment", "run_alternating", "vec",
]
