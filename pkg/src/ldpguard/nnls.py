"""Active-set nonnegative least squares (Lawson-Hanson)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dense import RankDeficient, as_mat, as_vec, ls_solve_subset, mat_vec, transpose_mat_vec
from .problem import ToleranceConfig

__all__ = ["NnlsResult", "IterationLimit", "nnls_solve"]


@dataclass(frozen=True, eq=False)
class NnlsResult:
    """Solution of ``min ||E u - f||_2`` subject to ``u >= 0``.

    ``r`` is the residual ``E u - f`` and ``dual`` the gradient
    ``E^T (E u - f)``. ``backtracks`` counts inner-loop steps where the
    unconstrained sub-solve left the feasible region and ``u`` had to be
    moved back to a bound.
    """

    u: np.ndarray
    r: np.ndarray
    rnorm: float
    positive_set: tuple[int, ...]
    dual: np.ndarray
    iterations: int
    backtracks: int
    scale: float


class IterationLimit(RuntimeError):
    """The active-set loop ran past its iteration cap; ``result`` is the last iterate."""

    def __init__(self, result: NnlsResult, limit: int):
        super().__init__(f"NNLS exceeded {limit} iterations")
        self.result = result
        self.limit = limit


def _package(E, f, u, iterations, backtracks, scale) -> NnlsResult:
    u = np.maximum(u, 0.0) + 0.0  # also maps -0.0 to +0.0
    r = mat_vec(E, u) - f
    for a in (u, r):
        a.setflags(write=False)
    dual = transpose_mat_vec(E, r)
    dual.setflags(write=False)
    return NnlsResult(
        u=u,
        r=r,
        rnorm=float(np.linalg.norm(r)),
        positive_set=tuple(int(j) for j in np.flatnonzero(u > 0.0)),
        dual=dual,
        iterations=iterations,
        backtracks=backtracks,
        scale=scale,
    )


def nnls_solve(E, f, cfg: ToleranceConfig | None = None) -> NnlsResult:
    """
    Solve ``argmin_u ||E u - f||_2`` subject to ``u >= 0``.

    Parameters
    ----------
    E : (p, q) array_like
        Design matrix.
    f : (p,) array_like
        Right-hand side.
    cfg : ToleranceConfig, optional
        Uses ``tau_w`` (dual feasibility, scaled by ``||E^T f||_inf + 1``)
        and ``max_iterations`` (default ``3 * q``).

    Returns
    -------
    NnlsResult

    Raises
    ------
    IterationLimit
        If the active-set loop does not terminate within the cap.

    Notes
    -----
    The entering variable is the one with the largest negative gradient,
    lowest index on ties. A candidate whose column is numerically dependent
    on the current positive set, or whose trial coefficient is not positive,
    is skipped until the positive set next changes.
    """
    cfg = cfg or ToleranceConfig()
    E = as_mat(E)
    f = as_vec(f)
    p, q = E.shape
    if f.shape[0] != p:
        raise ValueError(f"E has {p} rows but f has {f.shape[0]} entries")
    limit = cfg.max_iterations or 3 * q
    scale = float(np.max(np.abs(transpose_mat_vec(E, f)))) + 1.0
    tol = cfg.tau_w * scale

    u = np.zeros(q)
    passive = np.zeros(q, dtype=bool)
    iterations = 0
    backtracks = 0

    while True:
        w = -transpose_mat_vec(E, mat_vec(E, u) - f)
        skipped = np.zeros(q, dtype=bool)
        while True:
            open_ = ~passive & ~skipped & (w > tol)
            if not open_.any():
                return _package(E, f, u, iterations, backtracks, scale)
            # argmax returns the first maximum, i.e. the lowest index on ties
            t = int(np.argmax(np.where(open_, w, -np.inf)))
            trial = np.flatnonzero(passive | (np.arange(q) == t))
            try:
                z = ls_solve_subset(E, f, trial)
            except RankDeficient:
                skipped[t] = True
                continue
            if z[np.searchsorted(trial, t)] <= 0.0:
                skipped[t] = True
                continue
            break
        passive[t] = True

        while True:
            iterations += 1
            if iterations > limit:
                raise IterationLimit(
                    _package(E, f, u, iterations - 1, backtracks, scale), limit
                )
            idx = np.flatnonzero(passive)
            if np.all(z > 0.0):
                u[:] = 0.0
                u[idx] = z
                break
            backtracks += 1
            neg = z <= 0.0
            ui = u[idx]
            ratios = ui[neg] / (ui[neg] - z[neg])
            k = int(np.argmin(ratios))
            alpha = ratios[k]
            u[idx] = ui + alpha * (z - ui)
            u[idx[np.flatnonzero(neg)[k]]] = 0.0
            drop = idx[u[idx] <= 0.0]
            u[drop] = 0.0
            passive[drop] = False
            idx = np.flatnonzero(passive)
            if idx.size == 0:
                break
            z = ls_solve_subset(E, f, idx)
