"""Least distance programming: minimum-norm ``x`` with ``G x >= h``.

After ``h`` is divided by a power of two (exact, and undone exactly), the
problem is reduced to nonnegative least squares on ``E = [G^T; h^T]`` and
``f = e_{n+1}``. A nonzero NNLS residual ``r`` yields
``x_k = -r_k / r_{n+1}``; a zero residual means the constraints are
inconsistent. No candidate is
reported as solved until it has passed the feasibility check and the KKT
certificate built from the NNLS multipliers.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
import enum
import math

import numpy as np

from .nnls import IterationLimit, NnlsResult, nnls_solve
from .problem import LdpProblem, ToleranceConfig
from .verify import KktCertificate, VerificationReport, kkt_check, verify_feasible

__all__ = ["Status", "LdpInternals", "LdpOutcome", "ldp_reduce", "ldp_solve"]


class Status(enum.Enum):
    SOLVED = "Solved"
    INFEASIBLE = "Infeasible"
    VERIFICATION_FAILED = "VerificationFailed"
    ITERATION_LIMIT = "IterationLimit"

    def __str__(self):
        return self.value


@dataclass(frozen=True, eq=False)
class LdpInternals:
    """Reduction data. ``ldp_solve`` works on ``h / h_scale``, so column j of
    its ``E`` is ``(G_j, h_j / h_scale)``; ``pivot`` is ``r_{n+1}``."""

    E: np.ndarray
    f: np.ndarray
    nnls: NnlsResult | None = None
    pivot: float | None = None
    h_scale: float = 1.0


@dataclass(frozen=True, eq=False)
class LdpOutcome:
    status: Status
    internals: LdpInternals
    x: np.ndarray | None = None
    certificate: KktCertificate | None = None
    report: VerificationReport | None = None

    @property
    def solved(self) -> bool:
        return self.status is Status.SOLVED


def ldp_reduce(prob: LdpProblem) -> LdpInternals:
    """Build ``E`` (column j is ``(G_j, h_j)``) and ``f = e_{n+1}``."""
    E = np.vstack([prob.G.T, prob.h[np.newaxis, :]])
    f = np.zeros(prob.n + 1)
    f[-1] = 1.0
    E.setflags(write=False)
    f.setflags(write=False)
    return LdpInternals(E=E, f=f)


def h_scale_for(prob: LdpProblem) -> float:
    """Power of two close to ``max_i |h_i| / ||G_i||`` over rows with ``G_i != 0``.

    Dividing ``h`` by it is exact and brings the solution norm near 1, which
    keeps ``r_{n+1} = -||r||^2`` far from the division guard for well-posed
    problems of any magnitude.
    """
    rows = np.linalg.norm(prob.G, axis=1)
    live = rows > 0.0
    if not live.any():
        return 1.0
    ratio = float(np.max(np.abs(prob.h[live]) / rows[live]))
    if ratio == 0.0:
        return 1.0
    return math.ldexp(1.0, int(np.clip(round(math.log2(ratio)), -500, 500)))


def _rejected(report: VerificationReport, reason: str, cert=None) -> VerificationReport:
    return dataclasses.replace(report, passed=False, reason=reason, kkt=cert)


# Extra power-of-two exponents tried on top of h_scale_for when a computed
# candidate fails verification. Nearly rank-deficient G can make the default
# scale a poor one for the NNLS pivot.
RETRY_EXPONENTS = (12, 24, -12)
_RETRYABLE = ("constraint violation above tolerance", "KKT certificate invalid")


def ldp_solve(prob: LdpProblem, cfg: ToleranceConfig | None = None) -> LdpOutcome:
    """
    Minimum-norm solution of ``G x >= h``.

    Parameters
    ----------
    prob : LdpProblem
    cfg : ToleranceConfig, optional

    Returns
    -------
    LdpOutcome
        ``SOLVED`` carries ``x``, a valid KKT certificate and a passing report.
        ``INFEASIBLE`` means the NNLS residual vanished (both the residual-norm
        and the pivot tests agree). ``VERIFICATION_FAILED`` carries the
        rejected candidate inside ``report``. ``ITERATION_LIMIT`` carries the
        last NNLS iterate in ``internals``.

    Notes
    -----
    When the candidate fails the feasibility or KKT check, the solve is
    repeated with ``h`` rescaled by ``2**k`` for ``k`` in ``RETRY_EXPONENTS``.
    Retries cannot admit a bad answer because each one passes the same
    checks. If every attempt fails, the first failure is reported. Division
    guard refusals are final.
    """
    cfg = cfg or ToleranceConfig()
    s = h_scale_for(prob)
    first = _attempt(prob, s, cfg)
    if first.status is not Status.VERIFICATION_FAILED or first.report.reason not in _RETRYABLE:
        return first
    for k in RETRY_EXPONENTS:
        out = _attempt(prob, math.ldexp(s, k), cfg)
        if out.status is Status.SOLVED:
            return out
    return first


def _attempt(prob: LdpProblem, s: float, cfg: ToleranceConfig) -> LdpOutcome:
    base = dataclasses.replace(ldp_reduce(LdpProblem(prob.G, prob.h / s)), h_scale=s)
    n = prob.n
    try:
        res = nnls_solve(base.E, base.f, cfg)
    except IterationLimit as exc:
        internals = dataclasses.replace(base, nnls=exc.result, pivot=float(exc.result.r[n]))
        return LdpOutcome(Status.ITERATION_LIMIT, internals)

    pivot = float(res.r[n])
    internals = dataclasses.replace(base, nnls=res, pivot=pivot)
    vanished = res.rnorm <= cfg.tau_detect * (1.0 + float(np.linalg.norm(base.f)))
    tiny_pivot = abs(pivot) <= cfg.tau_div
    if vanished and tiny_pivot:
        return LdpOutcome(Status.INFEASIBLE, internals)

    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        x = s * (-res.r[:n] / pivot) if pivot != 0.0 else np.zeros(n)
        lam = s * (res.u / -pivot) if pivot != 0.0 else np.zeros(prob.m)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(lam))):
        report = verify_feasible(prob, np.zeros(n), cfg)
        return LdpOutcome(
            Status.VERIFICATION_FAILED,
            internals,
            report=_rejected(report, "candidate overflowed; NNLS residual pivot too small"),
        )

    report = verify_feasible(prob, x, cfg)
    if tiny_pivot:
        return LdpOutcome(
            Status.VERIFICATION_FAILED,
            internals,
            report=_rejected(
                report,
                f"|r_(n+1)| = {abs(pivot):.3e} is below the division guard "
                f"but the residual norm {res.rnorm:.3e} did not vanish",
            ),
        )
    cert = kkt_check(prob, x, lam, cfg)
    if not report.passed:
        return LdpOutcome(
            Status.VERIFICATION_FAILED,
            internals,
            report=_rejected(report, "constraint violation above tolerance", cert),
        )
    if not cert.valid:
        return LdpOutcome(
            Status.VERIFICATION_FAILED,
            internals,
            report=_rejected(report, "KKT certificate invalid", cert),
        )
    x.setflags(write=False)
    return LdpOutcome(Status.SOLVED, internals, x=x, certificate=cert, report=report)
