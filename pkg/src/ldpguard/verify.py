"""Checks applied to every candidate answer before it is reported as solved."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dense import as_vec, mat_vec, transpose_mat_vec
from .problem import LdpProblem, ToleranceConfig

__all__ = ["VerificationReport", "KktCertificate", "verify_feasible", "kkt_check", "row_scales"]


@dataclass(frozen=True, eq=False)
class KktCertificate:
    """Multipliers and residuals of the minimum-norm optimality conditions.

    Stationarity ``x = G^T lam``, dual feasibility ``lam >= 0`` and
    complementarity ``lam_i * ((G x)_i - h_i) = 0``.
    """

    lam: np.ndarray
    stationarity_residual: float
    complementarity_residual: float
    lam_min: float
    stationarity_bound: float
    complementarity_bound: float
    tau_kkt: float

    @property
    def valid(self) -> bool:
        return (
            self.lam_min >= -self.tau_kkt
            and self.stationarity_residual <= self.stationarity_bound
            and self.complementarity_residual <= self.complementarity_bound
        )


@dataclass(frozen=True, eq=False)
class VerificationReport:
    """Outcome of checking ``G x >= h`` for one candidate.

    ``violations[i] = h_i - (G x)_i``; row ``i`` passes when its violation is at
    most ``tau_feas * scales[i]``. ``worst_row`` is 0-based. ``reason`` and
    ``kkt`` are filled in by the solver when it rejects a candidate for
    something other than a constraint violation; in that case ``passed`` is
    False even though every row may be within tolerance.
    """

    violations: np.ndarray
    max_violation: float
    worst_row: int
    scales: np.ndarray
    passed: bool
    candidate_x: np.ndarray
    tau_feas: float
    reason: str | None = None
    kkt: KktCertificate | None = None

    @property
    def feasible(self) -> bool:
        """Row test alone, ignoring any rejection attached by the solver."""
        return bool(np.all(self.violations <= self.tau_feas * self.scales))


def row_scales(prob: LdpProblem, x: np.ndarray) -> np.ndarray:
    """``max(1, |h_i|, ||G_i||_2 * ||x||_2)`` for each row."""
    xnorm = float(np.linalg.norm(x))
    rows = np.linalg.norm(prob.G, axis=1)
    return np.maximum(np.maximum(1.0, np.abs(prob.h)), rows * xnorm)


def verify_feasible(prob: LdpProblem, x, cfg: ToleranceConfig | None = None) -> VerificationReport:
    cfg = cfg or ToleranceConfig()
    x = as_vec(x)
    if x.shape[0] != prob.n:
        raise ValueError(f"candidate has {x.shape[0]} entries, problem has n = {prob.n}")
    violations = prob.h - mat_vec(prob.G, x)
    scales = row_scales(prob, x)
    worst = int(np.argmax(violations))
    violations.setflags(write=False)
    scales.setflags(write=False)
    return VerificationReport(
        violations=violations,
        max_violation=float(violations[worst]),
        worst_row=worst,
        scales=scales,
        passed=bool(np.all(violations <= cfg.tau_feas * scales)),
        candidate_x=x,
        tau_feas=cfg.tau_feas,
    )


def kkt_check(prob: LdpProblem, x, lam, cfg: ToleranceConfig | None = None) -> KktCertificate:
    """Residuals of the optimality conditions for ``(x, lam)``.

    Meaningful once ``x`` has passed :func:`verify_feasible`; the residuals are
    computed regardless.
    """
    cfg = cfg or ToleranceConfig()
    x = as_vec(x)
    lam = as_vec(lam)
    if x.shape[0] != prob.n or lam.shape[0] != prob.m:
        raise ValueError("kkt_check: x must have n entries and lam m entries")
    slack = mat_vec(prob.G, x) - prob.h
    stationarity = float(np.max(np.abs(x - transpose_mat_vec(prob.G, lam))))
    complementarity = float(np.max(np.abs(lam * slack)))
    scales = row_scales(prob, x)
    return KktCertificate(
        lam=lam,
        stationarity_residual=stationarity,
        complementarity_residual=complementarity,
        lam_min=float(lam.min()),
        stationarity_bound=cfg.tau_kkt * (1.0 + float(np.max(np.abs(x)))),
        complementarity_bound=cfg.tau_kkt
        * (1.0 + float(np.linalg.norm(x)) * float(scales.max())),
        tau_kkt=cfg.tau_kkt,
    )
