"""Sharp Bellman functions for p-oscillations of functions in a BMO ball."""
from .candidates import TangentData, bellman, dispatch, eval_global, tangent_data
from .errors import ArgumentError, BellmanError, ConsistencyError, DomainError, NumericError
from .geometry import BellmanParams, CandidateKind, DomainPoint, Region, RegionKind, classify, contains
from .quadrature import MuSolution, QuadratureConfig, solve_mu
from .testfn import PiecewiseFn, bmo_norm, make_optimizer, moments, p_mean

__all__ = [
    "ArgumentError", "BellmanError", "BellmanParams", "CandidateKind", "ConsistencyError",
    "DomainError", "DomainPoint", "MuSolution", "NumericError", "PiecewiseFn", "QuadratureConfig",
    "Region", "RegionKind", "TangentData", "bellman", "bmo_norm", "classify", "contains",
    "dispatch", "eval_global", "make_optimizer", "moments", "p_mean", "solve_mu", "tangent_data",
]
