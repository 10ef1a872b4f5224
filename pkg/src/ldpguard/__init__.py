"""Least distance programming with a verification guard.

Solve ``min ||x||`` subject to ``G x >= h`` through nonnegative least squares,
check every answer, and fuzz the solver with cases whose consistency is
known by construction.
"""

from .casegen import CaseKind, CaseRecipe, CaseRecord, gen_consistent, gen_interior, gen_likely_infeasible, gen_transformed
from .ldp import LdpInternals, LdpOutcome, Status, ldp_reduce, ldp_solve
from .nnls import IterationLimit, NnlsResult, nnls_solve
from .oracle import DimensionTooLarge, bruteforce_min_norm, rational_feasible
from .problem import LdpProblem, ToleranceConfig
from .verify import KktCertificate, VerificationReport, kkt_check, verify_feasible

__all__ = [
    "CaseKind",
    "CaseRecipe",
    "CaseRecord",
    "DimensionTooLarge",
    "IterationLimit",
    "KktCertificate",
    "LdpInternals",
    "LdpOutcome",
    "LdpProblem",
    "NnlsResult",
    "Status",
    "ToleranceConfig",
    "VerificationReport",
    "bruteforce_min_norm",
    "gen_consistent",
    "gen_interior",
    "gen_likely_infeasible",
    "gen_transformed",
    "kkt_check",
    "ldp_reduce",
    "ldp_solve",
    "nnls_solve",
    "rational_feasible",
    "verify_feasible",
]

__version__ = "0.1.0"
