"""Problem container and tolerance settings shared across the package."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dense import as_mat, as_vec


@dataclass(frozen=True)
class ToleranceConfig:
    """Tolerances for the solver and the verification guard.

    tau_feas : scaled constraint violation accepted by the feasibility check.
    tau_w : NNLS dual-feasibility tolerance, scaled by ``||E^T f||_inf + 1``.
    tau_div : smallest ``|r_{n+1}|`` the solver will divide by.
    tau_kkt : KKT certificate tolerance.
    tau_detect : infeasibility is declared when the NNLS residual norm is at
        most ``tau_detect * (1 + ||f||)``.
    max_iterations : NNLS iteration cap; ``None`` means three times the
        number of NNLS unknowns.
    """

    tau_feas: float = 1e-8
    tau_w: float = 1e-11
    tau_div: float = 1e-10
    tau_kkt: float = 1e-7
    tau_detect: float = 1e-10
    max_iterations: int | None = None

    def __post_init__(self):
        for name in ("tau_feas", "tau_w", "tau_div", "tau_kkt", "tau_detect"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {value!r}")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass(frozen=True, eq=False)
class LdpProblem:
    """Constraint system ``G @ x >= h`` whose minimum-norm solution is sought."""

    G: np.ndarray
    h: np.ndarray = field(repr=False)

    def __post_init__(self):
        G = as_mat(self.G)
        h = as_vec(self.h)
        if h.shape[0] != G.shape[0]:
            raise ValueError(f"G has {G.shape[0]} rows but h has {h.shape[0]} entries")
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "h", h)

    @property
    def m(self) -> int:
        return self.G.shape[0]

    @property
    def n(self) -> int:
        return self.G.shape[1]
